#pragma once

#include <cmath>
#include <cstdint>

namespace bpa {

inline std::uint64_t splitmix64(std::uint64_t &state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ generator with exact integer-valued samplers for the
/// distributions the simulator needs. All draws are a deterministic
/// function of the seed, so every replication is reproducible in
/// isolation (see stream()).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto &w : state_)
            w = splitmix64(sm);
    }

    /// Stream for replication `index` under `master_seed`: the xoshiro
    /// state is expanded by splitmix64 from
    ///   master_seed + (index + 1) * 0x9E3779B97F4A7C15.
    /// Any subset of replications can be regenerated without running
    /// the others.
    static Rng stream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1), endpoints excluded; safe under log().
    double uniform_open01() { return ((double)(next() >> 11) + 0.5) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Exponential(rate); strictly positive.
    double exponential(double rate) { return -std::log(uniform_open01()) / rate; }

    std::uint64_t poisson(double mean) {
        if (mean <= 0.0)
            return 0;
        if (mean < kPoissonInversionCutoff)
            return poisson_inversion(std::exp(-mean));
        return poisson_ptrd(mean);
    }

    /// Knuth product-of-uniforms inversion; caller supplies exp(-mean)
    /// so hot loops can cache it.
    std::uint64_t poisson_inversion(double exp_neg_mean) {
        std::uint64_t k = 0;
        double prod = uniform_open01();
        while (prod > exp_neg_mean) {
            ++k;
            prod *= uniform_open01();
        }
        return k;
    }

    /// Transformed-rejection sampler with squeeze, exact for mean >= 10.
    std::uint64_t poisson_ptrd(double mean) {
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            const double u = uniform01() - 0.5;
            const double v = uniform01();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr)
                return (std::uint64_t)kf;
            if (kf < 0.0 || (us < 0.013 && v > us))
                continue;
            if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
                kf * loglam - mean - std::lgamma(kf + 1.0))
                return (std::uint64_t)kf;
        }
    }

    std::uint64_t binomial(std::uint64_t n, double p) {
        if (n == 0 || p <= 0.0)
            return 0;
        if (p >= 1.0)
            return n;
        if (p > 0.5)
            return n - binomial(n, 1.0 - p);
        if (n <= 16) {
            std::uint64_t k = 0;
            for (std::uint64_t i = 0; i < n; ++i)
                k += bernoulli(p) ? 1 : 0;
            return k;
        }
        // Geometric skips between successes; expected cost O(n*p).
        const double c = std::log1p(-p);
        std::uint64_t k = 0;
        double pos = -1.0;
        for (;;) {
            pos += std::floor(std::log(uniform_open01()) / c) + 1.0;
            if (pos >= (double)n)
                return k;
            ++k;
        }
    }

    static constexpr double kPoissonInversionCutoff = 10.0;

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

} // namespace bpa
