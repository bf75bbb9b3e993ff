#include "bpa/montecarlo.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace bpa {

namespace {

double binom_cdf(std::uint64_t k, std::uint64_t n, double p) {
    if (p <= 0.0)
        return 1.0;
    if (p >= 1.0)
        return k >= n ? 1.0 : 0.0;
    auto log_pmf = [n, p](std::uint64_t j) {
        const double nd = (double)n, jd = (double)j;
        return std::lgamma(nd + 1.0) - std::lgamma(jd + 1.0) - std::lgamma(nd - jd + 1.0) +
               jd * std::log(p) + (nd - jd) * std::log1p(-p);
    };
    if (k >= n)
        return 1.0;
    if (k <= n / 2) {
        double acc = 0.0;
        for (std::uint64_t j = 0; j <= k; ++j)
            acc += std::exp(log_pmf(j));
        return std::min(acc, 1.0);
    }
    double acc = 0.0;
    for (std::uint64_t j = k + 1; j <= n; ++j)
        acc += std::exp(log_pmf(j));
    return std::max(0.0, 1.0 - acc);
}

// Clopper-Pearson exact bounds at 95%.
std::pair<double, double> exact_binomial_bounds(std::uint64_t k, std::uint64_t n) {
    constexpr double kAlphaHalf = 0.025;
    auto solve = [](const std::function<double(double)> &f) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double lower =
        k == 0 ? 0.0 : solve([&](double p) { return binom_cdf(k - 1, n, p) - (1.0 - kAlphaHalf); });
    const double upper =
        k == n ? 1.0 : solve([&](double p) { return binom_cdf(k, n, p) - kAlphaHalf; });
    return {lower, upper};
}

Interval proportion_interval(std::uint64_t k, std::uint64_t n) {
    Interval iv;
    iv.estimate = (double)k / (double)n;
    if (k < 5 || n - k < 5) {
        const auto [lo, hi] = exact_binomial_bounds(k, n);
        iv.half_width95 = 0.5 * (hi - lo);
    } else {
        iv.half_width95 = 1.96 * std::sqrt(iv.estimate * (1.0 - iv.estimate) / (double)n);
    }
    return iv;
}

double least_squares_slope(const std::vector<std::pair<double, double>> &xy) {
    const double n = (double)xy.size();
    double sx = 0, sy = 0;
    for (const auto &[x, y] : xy) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto &[x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx <= 0.0)
        return 0.0;
    return sxy / sxx;
}

} // namespace

std::vector<ReplicationOutcome>
run_replications_with(const std::function<ReplicationOutcome(std::uint64_t)> &replicate,
                      std::uint64_t count, unsigned parallelism) {
    std::vector<ReplicationOutcome> out(count);
    if (parallelism == 1) {
        for (std::uint64_t i = 0; i < count; ++i)
            out[i] = replicate(i);
        return out;
    }
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    const long long n = (long long)count;
    if (parallelism == 0) {
#pragma omp parallel for schedule(dynamic, 4)
        for (long long i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed))
                continue;
            try {
                out[(std::size_t)i] = replicate((std::uint64_t)i);
            } catch (...) {
#pragma omp critical
                {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        }
    } else {
#pragma omp parallel for schedule(dynamic, 4) num_threads((int)parallelism)
        for (long long i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed))
                continue;
            try {
                out[(std::size_t)i] = replicate((std::uint64_t)i);
            } catch (...) {
#pragma omp critical
                {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        }
    }
    if (failed)
        std::rethrow_exception(error);
    return out;
}

std::vector<ReplicationOutcome> run_replications(const ModelParams &params,
                                                 const EstimatorConfig &config) {
    validate(params);
    validate(config.stop);
    const CompiledModel model = CompiledModel::compile(params);
    auto one = [&model, &config](std::uint64_t i) {
        ModelSampler src{&model, Rng::stream(config.master_seed, i)};
        return run_with(model, config.stop, src);
    };
    return run_replications_with(one, config.replications, config.parallelism);
}

std::vector<ReplicationOutcome> run_replications_serial(const ModelParams &params,
                                                        const EstimatorConfig &config) {
    EstimatorConfig serial = config;
    serial.parallelism = 1;
    return run_replications(params, serial);
}

ProbabilityEstimates summarize_extinction(const std::vector<ReplicationOutcome> &outcomes) {
    if (outcomes.empty())
        throw std::invalid_argument("summarize_extinction: no outcomes");
    const std::uint64_t n = outcomes.size();
    std::uint64_t k_s = 0, k_x = 0, k_y = 0, k_co = 0;
    for (const auto &o : outcomes) {
        assert(!o.total_extinct || (o.x_extinct && o.y_extinct));
        k_s += o.total_extinct;
        k_x += o.x_extinct;
        k_y += o.y_extinct;
        k_co += !o.x_extinct && !o.y_extinct;
    }
    ProbabilityEstimates est;
    est.q_s = proportion_interval(k_s, n);
    est.q_x = proportion_interval(k_x, n);
    est.q_y = proportion_interval(k_y, n);
    est.p_coexist = proportion_interval(k_co, n);
    est.replications_used = n;
    return est;
}

ProbabilityEstimates estimate_extinction(const ModelParams &params, const EstimatorConfig &config) {
    if (config.replications < 10)
        throw std::invalid_argument("estimate_extinction: needs at least 10 replications");
    if (!config.stop.time_horizon && !config.stop.survival_cap)
        throw std::invalid_argument(
            "estimate_extinction: stop rule needs a time horizon or a survival cap");
    return summarize_extinction(run_replications(params, config));
}

FractionStudy estimate_limit_fraction(const ModelParams &params, const EstimatorConfig &config,
                                      double target, double band) {
    if (!config.stop.max_transitions)
        throw std::invalid_argument("estimate_limit_fraction: stop rule needs max_transitions");
    const auto outcomes = run_replications(params, config);
    FractionStudy study;
    study.target = target;
    study.band = band;
    std::uint64_t in_band = 0;
    for (const auto &o : outcomes) {
        if (o.halt != HaltReason::Transitions)
            continue;
        study.samples.push_back(o.terminal_fraction);
        if (std::fabs(o.terminal_fraction - target) <= band * target)
            ++in_band;
    }
    if (study.samples.empty())
        throw std::runtime_error("estimate_limit_fraction: no path survived to the bound");
    double sum = 0.0;
    for (double f : study.samples)
        sum += f;
    study.mean_fraction = sum / (double)study.samples.size();
    study.within_band_share = (double)in_band / (double)study.samples.size();
    return study;
}

GrowthDiagnostic growth_check(const ModelParams &params, const EstimatorConfig &config,
                              double alpha) {
    validate(params);
    validate(config.stop);
    const CompiledModel model = CompiledModel::compile(params);

    struct PathStats {
        bool surviving = false;
        double slope = 0.0, martingale = 0.0;
    };
    std::vector<PathStats> stats(config.replications);
    auto one = [&](std::uint64_t i) {
        ModelSampler src{&model, Rng::stream(config.master_seed, i)};
        AdaptiveRecorder rec;
        ReplicationOutcome out = run_with(model, config.stop, src, rec);
        const auto &points = rec.points;
        if (!out.total_extinct && points.size() >= 8) {
            std::vector<std::pair<double, double>> tail;
            for (std::size_t j = points.size() / 2; j < points.size(); ++j) {
                const double s = (double)(points[j].x + points[j].y);
                if (s > 0)
                    tail.emplace_back(points[j].tau, std::log(s));
            }
            if (tail.size() >= 2) {
                PathStats &ps = stats[i];
                ps.surviving = true;
                ps.slope = least_squares_slope(tail);
                const auto &last = points.back();
                ps.martingale = (double)(last.x + last.y) * std::exp(-alpha * last.tau);
            }
        }
        return out;
    };
    run_replications_with(one, config.replications, config.parallelism);

    GrowthDiagnostic diag;
    diag.theoretical_alpha = alpha;
    for (const auto &ps : stats) {
        if (!ps.surviving)
            continue;
        diag.per_path_slope.push_back(ps.slope);
        diag.martingale_tail.push_back(ps.martingale);
    }
    if (diag.per_path_slope.empty())
        throw std::runtime_error("growth_check: no surviving paths to diagnose");
    return diag;
}

double high_separation_check(const ModelParams &params, const EstimatorConfig &config) {
    if (params.y0 == 0)
        return 1.0;
    return estimate_extinction(params, config).q_y.estimate;
}

} // namespace bpa
