#include "bpa/sa_ode.hpp"

#include <cmath>
#include <stdexcept>

namespace bpa {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr std::uint64_t kTableMaxN = 10000000;
constexpr std::uint64_t kCheckpointStride = 1024;
constexpr std::uint64_t kEtaCap = std::uint64_t{1} << 62;

// Partial sums H_n at multiples of kCheckpointStride, accumulated in index
// order so recomputing a segment reproduces the running sum bit for bit.
const std::vector<double> &checkpoints() {
    static const std::vector<double> table = [] {
        std::vector<double> cp;
        cp.reserve(kTableMaxN / kCheckpointStride + 1);
        double h = 0.0;
        cp.push_back(0.0);
        for (std::uint64_t k = 1; k <= kTableMaxN; ++k) {
            h += 1.0 / (double)k;
            if (k % kCheckpointStride == 0)
                cp.push_back(h);
        }
        return cp;
    }();
    return table;
}

double harmonic_exact(std::uint64_t n) {
    const auto &cp = checkpoints();
    const std::uint64_t base = n / kCheckpointStride;
    double h = cp[base];
    for (std::uint64_t k = base * kCheckpointStride + 1; k <= n; ++k)
        h += 1.0 / (double)k;
    return h;
}

double harmonic_asymptotic(double n) {
    return std::log(n) + kEulerGamma + 1.0 / (2.0 * n) - 1.0 / (12.0 * n * n);
}

double table_max_time() {
    static const double h = harmonic_exact(kTableMaxN);
    return h;
}

} // namespace

double harmonic_time(std::uint64_t n) {
    if (n == 0)
        return 0.0;
    if (n <= kTableMaxN)
        return harmonic_exact(n);
    return harmonic_asymptotic((double)n);
}

std::uint64_t eta(double t) {
    if (!(t >= 0.0))
        throw std::domain_error("eta: t must be >= 0");
    if (t < 1.0)
        return 0; // H_1 = 1 is the first positive partial sum
    if (t >= table_max_time()) {
        if (t - kEulerGamma > 42.9) // exp would pass 2^62; saturated regardless
            return kEtaCap;
        const double guess = std::floor(std::exp(t - kEulerGamma));
        std::uint64_t n = guess < 3.0 ? 1 : (std::uint64_t)guess - 2;
        while (harmonic_asymptotic((double)(n + 1)) <= t)
            ++n;
        return n;
    }
    // Invert through the expansion, then walk the exact sums upward from a
    // safe undershoot. The walk adds terms in canonical order, so the
    // comparisons see the same doubles the tracker accumulates.
    const double guess = std::exp(t - kEulerGamma);
    std::uint64_t lo = guess > 16.0 ? (std::uint64_t)guess - 16 : 0;
    if (lo > kTableMaxN)
        lo = kTableMaxN;
    double h = harmonic_exact(lo);
    while (h > t && lo > 0) { // expansion overshot (tiny n); back off
        lo = lo > 16 ? lo - 16 : 0;
        h = harmonic_exact(lo);
    }
    std::uint64_t n = lo;
    for (;;) {
        const double next = h + 1.0 / (double)(n + 1);
        if (next > t)
            return n;
        h = next;
        ++n;
    }
}

std::pair<std::int64_t, std::int64_t> recover_counts(const Theta &th) {
    const double scale = (double)eta(th.t);
    return {(std::int64_t)std::llround(th.theta * scale),
            (std::int64_t)std::llround((th.psi - th.theta) * scale)};
}

std::vector<Theta> track(std::span<const TrajectoryPoint> trajectory) {
    if (trajectory.empty() || trajectory.front().n != 0)
        throw std::invalid_argument("track: trajectory must start at n = 0");
    for (std::size_t i = 1; i < trajectory.size(); ++i)
        if (trajectory[i].n != trajectory[i - 1].n + 1)
            throw std::invalid_argument("track: trajectory must have stride 1");

    std::vector<Theta> out;
    out.reserve(trajectory.size());
    const auto &p0 = trajectory[0];
    out.push_back({(double)(p0.x + p0.y), (double)p0.x, 0.0});

    // Recursion state, seeded at n = 1 where the direct ratios begin (the
    // n = 0 update absorbs the whole initial population).
    double psi_rec = 0.0, theta_rec = 0.0;
    double t = 0.0;

    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const auto &prev = trajectory[i - 1];
        const auto &cur = trajectory[i];
        const std::uint64_t n_prev = prev.n;
        t += 1.0 / (double)(n_prev + 1);

        const double s_cur = (double)(cur.x + cur.y);
        const double psi_direct = s_cur / (double)cur.n;
        const double theta_direct = (double)cur.x / (double)cur.n;

        if (i == 1) {
            psi_rec = psi_direct;
            theta_rec = theta_direct;
        } else {
            const double eps = 1.0 / (double)(n_prev + 1);
            const double dx = (double)(cur.x - prev.x);
            const double ds = (double)(cur.x + cur.y - prev.x - prev.y);
            const double xi = ds + 1.0;
            // Waking-type indicator times its signed attack/offspring terms
            // collapses to the raw X increment.
            const bool k_ind = prev.x + prev.y > 0;
            const bool j_ind = k_ind && prev.x > 0;
            if (k_ind)
                psi_rec += eps * (xi - 1.0 - psi_rec);
            if (j_ind)
                theta_rec += eps * (dx - theta_rec);
        }

        const double scale = std::max(1.0, std::fabs(psi_direct));
        if (std::fabs(psi_rec - psi_direct) > 1e-6 * scale ||
            std::fabs(theta_rec - theta_direct) > 1e-6 * scale)
            throw std::logic_error("track: recursion diverged from direct ratios");

        out.push_back({psi_direct, theta_direct, t});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Limit ODEs
// ---------------------------------------------------------------------------

std::array<double, 3> SymmetricRhs::operator()(const Theta &th) const {
    const double psi = th.psi, theta = th.theta;
    const double g_psi = psi > 0.0 ? m_ - 1.0 - psi : 0.0;
    double g_theta = 0.0;
    if (psi > 0.0 && theta > 0.0) {
        const double ratio = theta / psi;
        const double scale = (double)eta(th.t);
        const bool interior = theta < psi;
        const double axy = interior ? mxy_((psi - theta) * scale) : 0.0;
        const double ayx = interior ? myx_(theta * scale) : 0.0;
        g_theta = ratio * (m_ - 1.0 + axy) - (1.0 - ratio) * ayx - theta;
    }
    return {g_psi, g_theta, 1.0};
}

std::array<double, 3> AsymmetricRhs::operator()(const Theta &th) const {
    const double psi = th.psi, theta = th.theta;
    double g_psi = 0.0, g_theta = 0.0;
    if (psi > 0.0) {
        const double ratio = theta / psi;
        g_psi = ratio * (mx_ - my_) + my_ - 1.0 - psi;
        if (theta > 0.0) {
            const double scale = (double)eta(th.t);
            const bool interior = theta < psi;
            const double axy = interior ? mxy_((psi - theta) * scale) : 0.0;
            const double ayx = interior ? myx_(theta * scale) : 0.0;
            g_theta = ratio * (mx_ - 1.0 + axy) - (1.0 - ratio) * ayx - theta;
        }
    }
    return {g_psi, g_theta, 1.0};
}

std::array<double, 3> ode_rhs_symmetric(const Theta &th, double m, const AttackSpec &attack_xy,
                                        const AttackSpec &attack_yx) {
    return SymmetricRhs(m, attack_xy, attack_yx)(th);
}

std::array<double, 3> ode_rhs_asymmetric(const Theta &th, double mx, double my,
                                         const AttackSpec &attack_xy,
                                         const AttackSpec &attack_yx) {
    return AsymmetricRhs(mx, my, attack_xy, attack_yx)(th);
}

std::vector<Theta> integrate(const std::function<std::array<double, 3>(const Theta &)> &rhs,
                             Theta start, const OdeConfig &config) {
    if (!(config.dt > 0.0) || !std::isfinite(config.dt))
        throw std::invalid_argument("integrate: dt must be > 0");
    if (!(config.t_end > start.t))
        throw std::invalid_argument("integrate: t_end must exceed the start time");

    std::vector<Theta> path;
    path.push_back(start);
    Theta cur = start;
    const double t0 = start.t;
    for (std::uint64_t i = 1;; ++i) {
        double dt = config.dt;
        const double t_next = t0 + (double)i * config.dt;
        if (t_next >= config.t_end)
            dt = config.t_end - cur.t;

        auto shift = [](const Theta &base, const std::array<double, 3> &k, double h) {
            return Theta{base.psi + h * k[0], base.theta + h * k[1], base.t + h * k[2]};
        };
        const auto k1 = rhs(cur);
        const auto k2 = rhs(shift(cur, k1, dt / 2.0));
        const auto k3 = rhs(shift(cur, k2, dt / 2.0));
        const auto k4 = rhs(shift(cur, k3, dt));
        cur.psi += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        cur.theta += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        cur.t = t_next >= config.t_end ? config.t_end : t_next;

        if (config.clamp_theta) {
            const double hi = std::max(cur.psi, 0.0);
            cur.theta = std::min(std::max(cur.theta, 0.0), hi);
        }
        if (!std::isfinite(cur.psi) || !std::isfinite(cur.theta))
            throw std::runtime_error("integrate: state became non-finite");

        path.push_back(cur);
        if (cur.t >= config.t_end)
            return path;
    }
}

EquilibriumClass classify(const Theta &final_state, const ModelParams &params, double tol) {
    const auto candidates = candidate_limits(params);
    double scale = 1e-12;
    for (const auto &c : candidates)
        scale = std::max(scale, std::fabs(c.psi));

    EquilibriumClass best = EquilibriumClass::Unresolved;
    double best_dist = tol;
    for (const auto &c : candidates) {
        if (!std::isfinite(c.psi) || !std::isfinite(c.theta))
            continue;
        const double dist = std::max(std::fabs(final_state.psi - c.psi),
                                     std::fabs(final_state.theta - c.theta)) /
                            scale;
        if (dist <= best_dist) {
            best_dist = dist;
            best = c.label;
        }
    }
    return best;
}

double ratio_rhs(const Theta &th, const ModelParams &params) {
    if (!(th.psi > 0.0))
        throw std::domain_error("ratio_rhs: psi must be > 0");
    if (!(th.theta > 0.0) || !(th.theta < th.psi))
        return 0.0;
    const double mx = mean(params.offspring_x), my = mean(params.offspring_y);
    const AttackMeanFn mxy(params.attack_xy), myx(params.attack_yx);
    const double scale = (double)eta(th.t);
    const double ratio = th.theta / th.psi;
    const double axy = mxy((th.psi - th.theta) * scale);
    const double ayx = myx(th.theta * scale);
    // Reduces to ratio*m_xy - (1 - ratio)*m_yx when the means are equal.
    return (ratio * (mx - my + axy + ayx) - ayx - ratio * ratio * (mx - my)) / th.psi;
}

double saturation_time(const AssumptionReport &report, double beta_l, double m, double eps) {
    const auto &a3 = report.a3;
    if (!(a3.kappa_xy > 0.0) || !(a3.kappa_yx > 0.0))
        throw std::invalid_argument("saturation_time: needs positive envelope slopes");
    if (!(beta_l > 0.0) || !(m - 1.0 - eps > 0.0))
        throw std::invalid_argument("saturation_time: needs beta_l > 0 and eps < m - 1");
    const double bound =
        std::max(a3.y_bar * a3.kappa_xy / a3.kappa_yx, a3.x_bar * a3.kappa_yx / a3.kappa_xy);
    const double n_req = std::ceil(bound / (beta_l * (m - 1.0 - eps)));
    return harmonic_time((std::uint64_t)std::max(1.0, n_req));
}

} // namespace bpa
