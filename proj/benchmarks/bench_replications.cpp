// Throughput comparison of the replication kernels: serial reference vs.
// the OpenMP driver, plus a raw single-path transition-rate measurement.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "bpa/montecarlo.hpp"
#include "bpa/presets.hpp"

using namespace bpa;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t total_transitions(const std::vector<ReplicationOutcome> &outcomes) {
    std::uint64_t n = 0;
    for (const auto &o : outcomes)
        n += o.final_state.n;
    return n;
}

} // namespace

int main(int argc, char **argv) {
    const std::uint64_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1024;

    EstimatorConfig cfg;
    cfg.replications = reps;
    cfg.master_seed = 1;
    cfg.stop = presets::capped_horizon();
    const ModelParams params = presets::symmetric_base(2, 2);

    std::printf("replication kernel, %llu replications of the symmetric benchmark\n",
                (unsigned long long)reps);

    auto t0 = Clock::now();
    const auto serial = run_replications_serial(params, cfg);
    const double t_serial = seconds_since(t0);
    const std::uint64_t steps = total_transitions(serial);
    std::printf("  serial : %8.3f s   %10.2e transitions/s\n", t_serial,
                (double)steps / t_serial);

    t0 = Clock::now();
    const auto parallel = run_replications(params, cfg);
    const double t_parallel = seconds_since(t0);
    std::printf("  openmp : %8.3f s   %10.2e transitions/s   speedup %.2fx\n", t_parallel,
                (double)steps / t_parallel, t_serial / t_parallel);

    bool identical = serial.size() == parallel.size();
    for (std::size_t i = 0; identical && i < serial.size(); ++i)
        identical = serial[i].final_state.n == parallel[i].final_state.n &&
                    serial[i].final_state.x == parallel[i].final_state.x &&
                    serial[i].final_state.tau == parallel[i].final_state.tau;
    std::printf("  outcomes bit-identical: %s\n", identical ? "yes" : "NO");

    // Single long path: transition cost independent of population size.
    ModelParams big = presets::coexist_instance(2.0, 2.0, 0.02, 500000, 500000);
    StopRule stop;
    stop.max_transitions = 10000000;
    Rng rng(7);
    t0 = Clock::now();
    const auto out = run(big, stop, rng);
    const double t_path = seconds_since(t0);
    std::printf("single path: %llu transitions in %.3f s (%.1f ns/transition)\n",
                (unsigned long long)out.final_state.n, t_path,
                1e9 * t_path / (double)out.final_state.n);
    return identical ? 0 : 1;
}
