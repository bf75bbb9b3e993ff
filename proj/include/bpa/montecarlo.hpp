#pragma once

#include <functional>
#include <vector>

#include "bpa/bpa_core.hpp"

namespace bpa {

struct EstimatorConfig {
    std::uint64_t replications = 0;
    std::uint64_t master_seed = 1;
    StopRule stop;
    /// 0 = all available threads, 1 = serial. Advisory only: estimates are
    /// a deterministic function of (params, replications, master_seed).
    unsigned parallelism = 0;
};

struct Interval {
    double estimate = 0.0;
    double half_width95 = 0.0;
};

struct ProbabilityEstimates {
    Interval q_s;        // total population hit zero
    Interval q_x, q_y;   // the named population hit zero at some epoch
    Interval p_coexist;  // neither ever hit zero
    std::uint64_t replications_used = 0;
};

/// Evaluates `replicate(i)` for i in [0, count), OpenMP-parallel unless
/// parallelism == 1. Outcomes land in replication order, so any fold over
/// the result is independent of scheduling.
std::vector<ReplicationOutcome>
run_replications_with(const std::function<ReplicationOutcome(std::uint64_t)> &replicate,
                      std::uint64_t count, unsigned parallelism);

std::vector<ReplicationOutcome> run_replications(const ModelParams &params,
                                                 const EstimatorConfig &config);

/// Serial reference for the OpenMP kernel; must produce bit-identical
/// outcomes (kept for tests and benchmarking).
std::vector<ReplicationOutcome> run_replications_serial(const ModelParams &params,
                                                        const EstimatorConfig &config);

/// Deterministic fold of per-replication outcomes into the four
/// probability estimates. 95% intervals use the normal approximation,
/// switching to exact binomial (Clopper-Pearson) bounds when either the
/// success or the failure count is below 5.
ProbabilityEstimates summarize_extinction(const std::vector<ReplicationOutcome> &outcomes);

ProbabilityEstimates estimate_extinction(const ModelParams &params, const EstimatorConfig &config);

struct FractionStudy {
    std::vector<double> samples; // X_N / S_N over paths that survived to N
    double mean_fraction = 0.0;
    double within_band_share = 0.0; // |sample - target| <= band * target
    double target = 0.0;
    double band = 0.05;
};

/// Terminal-fraction study over paths that reach stop.max_transitions.
FractionStudy estimate_limit_fraction(const ModelParams &params, const EstimatorConfig &config,
                                      double target, double band = 0.05);

struct GrowthDiagnostic {
    std::vector<double> per_path_slope; // least-squares slope of log S vs tau, path tails
    double theoretical_alpha = 0.0;
    std::vector<double> martingale_tail; // terminal S * exp(-alpha * tau)
};

GrowthDiagnostic growth_check(const ModelParams &params, const EstimatorConfig &config,
                              double alpha);

/// Estimated probability that the y population dies out under the given
/// start; the caller configures the separation x0 >> y0.
double high_separation_check(const ModelParams &params, const EstimatorConfig &config);

} // namespace bpa
