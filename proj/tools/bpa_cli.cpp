// bpa -- command-line front end: simulation, estimation, closed-form
// reports, ODE runs, market comparisons, and the bundled table presets.
// Every subcommand writes deterministic artifacts (JSON/CSV) into --out.

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bpa/presets.hpp"
#include "bpa/serialize.hpp"

namespace {

using bpa::Json;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replications;
    std::string mode; // "", "bpa", "bpna"
    bool full = false;
};

unsigned env_threads() {
    const char *v = std::getenv("BPA_THREADS");
    if (!v || !*v)
        return 0;
    const long n = std::strtol(v, nullptr, 10);
    return n > 0 ? (unsigned)n : 0;
}

void apply_mode(bpa::ModelParams &params, const std::string &mode) {
    if (mode == "bpa")
        params.mode = bpa::Mode::Bpa;
    else if (mode == "bpna")
        params.mode = bpa::Mode::Bpna;
    else if (!mode.empty())
        throw bpa::ConfigError("--mode must be 'bpa' or 'bpna'");
}

std::filesystem::path out_file(const CommonOpts &opts, const std::string &name) {
    std::filesystem::create_directories(opts.out_dir);
    return std::filesystem::path(opts.out_dir) / name;
}

void write_json(const std::filesystem::path &path, const Json &j) {
    bpa::write_file_atomic(path, j.dump(2) + "\n");
}

Json header(const Json &config) {
    return Json{{"version", bpa::kToolkitVersion}, {"config", config}};
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonOpts &opts) {
    const Json cfg = bpa::parse_config_file(opts.config_path);
    bpa::require_keys(cfg, {"model", "stop", "seed", "record_stride", "emit_theta"},
                      "simulate config");
    if (!cfg.contains("model") || !cfg.contains("stop"))
        throw bpa::ConfigError("simulate config: needs 'model' and 'stop'");
    bpa::ModelParams params = bpa::model_from_json(cfg["model"]);
    const bpa::StopRule stop = bpa::stop_from_json(cfg["stop"]);
    std::uint64_t seed = cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 1;
    std::uint64_t stride = cfg.contains("record_stride") ? cfg["record_stride"].get<std::uint64_t>() : 1;
    const bool emit_theta = cfg.contains("emit_theta") && cfg["emit_theta"].get<bool>();
    if (stride == 0)
        throw bpa::ConfigError("simulate config: record_stride must be >= 1");
    if (emit_theta && stride != 1)
        throw bpa::ConfigError("simulate config: emit_theta needs record_stride = 1");
    if (opts.seed)
        seed = *opts.seed;
    apply_mode(params, opts.mode);

    bpa::Rng rng = bpa::Rng::stream(seed, 0);
    std::vector<bpa::TrajectoryPoint> trajectory;
    const bpa::ReplicationOutcome outcome =
        bpa::run_recorded(params, stop, rng, trajectory, stride);

    bpa::write_file_atomic(out_file(opts, "trajectory.csv"), bpa::trajectory_csv(trajectory));
    if (emit_theta)
        bpa::write_file_atomic(out_file(opts, "theta.csv"),
                               bpa::tracker_csv(bpa::track(trajectory)));
    Json j = header(Json{{"model", bpa::model_to_json(params)},
                         {"stop", bpa::stop_to_json(stop)},
                         {"seed", seed},
                         {"record_stride", stride},
                         {"emit_theta", emit_theta}});
    j["outcome"] = bpa::outcome_to_json(outcome);
    write_json(out_file(opts, "outcome.json"), j);
    return 0;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonOpts &opts) {
    const Json cfg = bpa::parse_config_file(opts.config_path);
    bpa::require_keys(cfg, {"model", "estimator"}, "estimate config");
    if (!cfg.contains("model") || !cfg.contains("estimator"))
        throw bpa::ConfigError("estimate config: needs 'model' and 'estimator'");
    bpa::ModelParams params = bpa::model_from_json(cfg["model"]);
    bpa::EstimatorConfig est = bpa::estimator_from_json(cfg["estimator"]);
    if (opts.seed)
        est.master_seed = *opts.seed;
    if (opts.replications)
        est.replications = *opts.replications;
    if (est.parallelism == 0)
        est.parallelism = env_threads();
    apply_mode(params, opts.mode);

    if (est.replications < 10)
        throw bpa::ConfigError("estimate: needs at least 10 replications");
    if (!est.stop.time_horizon && !est.stop.survival_cap)
        throw bpa::ConfigError("estimate: stop rule needs a time horizon or a survival cap");

    const auto outcomes = bpa::run_replications(params, est);
    const auto estimates = bpa::summarize_extinction(outcomes);

    Json j = header(Json{{"model", bpa::model_to_json(params)},
                         {"estimator", bpa::estimator_to_json(est)}});
    j["estimates"] = bpa::estimates_to_json(estimates);
    write_json(out_file(opts, "estimates.json"), j);
    bpa::write_file_atomic(out_file(opts, "replications.csv"), bpa::replications_csv(outcomes));
    return 0;
}

// --- theory -----------------------------------------------------------------

int cmd_theory(const CommonOpts &opts) {
    const Json cfg = bpa::parse_config_file(opts.config_path);
    bpa::require_keys(cfg, {"model"}, "theory config");
    if (!cfg.contains("model"))
        throw bpa::ConfigError("theory config: needs 'model'");
    bpa::ModelParams params = bpa::model_from_json(cfg["model"]);
    apply_mode(params, opts.mode);

    Json j = header(Json{{"model", bpa::model_to_json(params)}});
    j["theory"] = bpa::theory_to_json(bpa::theory_report(params));
    j["assumptions"] = bpa::assumptions_to_json(bpa::validate_assumptions(params));
    write_json(out_file(opts, "theory.json"), j);
    return 0;
}

// --- ode --------------------------------------------------------------------

int cmd_ode(const CommonOpts &opts) {
    const Json cfg = bpa::parse_config_file(opts.config_path);
    bpa::require_keys(cfg, {"model", "ode", "start", "variant"}, "ode config");
    if (!cfg.contains("model") || !cfg.contains("ode"))
        throw bpa::ConfigError("ode config: needs 'model' and 'ode'");
    bpa::ModelParams params = bpa::model_from_json(cfg["model"]);
    apply_mode(params, opts.mode);
    const bpa::OdeConfig ode_cfg = bpa::ode_config_from_json(cfg["ode"]);

    bpa::Theta start{(double)(params.x0 + params.y0), (double)params.x0, 0.0};
    if (cfg.contains("start")) {
        const Json &s = cfg["start"];
        bpa::require_keys(s, {"psi", "theta", "t"}, "ode start");
        if (s.contains("psi"))
            start.psi = s["psi"].get<double>();
        if (s.contains("theta"))
            start.theta = s["theta"].get<double>();
        if (s.contains("t"))
            start.t = s["t"].get<double>();
    }

    std::string variant = cfg.contains("variant") ? cfg["variant"].get<std::string>() : "auto";
    const double mx = bpa::mean(params.offspring_x), my = bpa::mean(params.offspring_y);
    if (variant == "auto")
        variant = std::fabs(mx - my) <= 1e-9 * std::max(1.0, mx) ? "symmetric" : "asymmetric";

    std::function<std::array<double, 3>(const bpa::Theta &)> rhs;
    if (variant == "symmetric") {
        rhs = bpa::SymmetricRhs(mx, params.attack_xy, params.attack_yx);
    } else if (variant == "asymmetric") {
        rhs = bpa::AsymmetricRhs(mx, my, params.attack_xy, params.attack_yx);
    } else {
        throw bpa::ConfigError("ode config: variant must be auto|symmetric|asymmetric");
    }

    const auto path = bpa::integrate(rhs, start, ode_cfg);
    const bpa::EquilibriumClass cls = bpa::classify(path.back(), params);

    bpa::write_file_atomic(out_file(opts, "ode.csv"), bpa::theta_path_csv(path));
    Json j = header(Json{{"model", bpa::model_to_json(params)},
                         {"ode", bpa::ode_config_to_json(ode_cfg)},
                         {"start", Json{{"psi", bpa::round_sig12(start.psi)},
                                        {"theta", bpa::round_sig12(start.theta)},
                                        {"t", bpa::round_sig12(start.t)}}},
                         {"variant", variant}});
    j["classification"] = bpa::to_string(cls);
    j["final"] = Json{{"psi", bpa::round_sig12(path.back().psi)},
                      {"theta", bpa::round_sig12(path.back().theta)},
                      {"t", bpa::round_sig12(path.back().t)}};
    write_json(out_file(opts, "ode.json"), j);
    return 0;
}

// --- market -----------------------------------------------------------------

int cmd_market(const CommonOpts &opts) {
    const Json cfg = bpa::parse_config_file(opts.config_path);
    bpa::require_keys(cfg, {"market", "estimator"}, "market config");
    if (!cfg.contains("market") || !cfg.contains("estimator"))
        throw bpa::ConfigError("market config: needs 'market' and 'estimator'");
    const bpa::MarketParams market = bpa::market_from_json(cfg["market"]);
    bpa::EstimatorConfig est = bpa::estimator_from_json(cfg["estimator"]);
    if (opts.seed)
        est.master_seed = *opts.seed;
    if (opts.replications)
        est.replications = *opts.replications;
    if (est.parallelism == 0)
        est.parallelism = env_threads();

    const bpa::ComparisonReport report = bpa::compare(market, est);
    Json j = header(Json{{"market", bpa::market_to_json(market)},
                         {"estimator", bpa::estimator_to_json(est)}});
    j["comparison"] = bpa::comparison_to_json(report);
    write_json(out_file(opts, "market.json"), j);
    return 0;
}

// --- table presets ----------------------------------------------------------

std::string csv_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int cmd_table(const CommonOpts &opts, int id) {
    const std::uint64_t seed = opts.seed.value_or(1);
    const unsigned parallelism = env_threads();
    auto estimator = [&](std::uint64_t reps) {
        bpa::EstimatorConfig est;
        est.replications = opts.replications.value_or(reps);
        est.master_seed = seed;
        est.stop = bpa::presets::capped_horizon();
        est.parallelism = parallelism;
        return est;
    };

    std::string csv;
    Json rows = Json::array();
    std::string name = "table" + std::to_string(id);

    auto extinction_row = [&](const bpa::ModelParams &params, const bpa::EstimatorConfig &est) {
        const auto e = bpa::estimate_extinction(params, est);
        return std::array<double, 4>{e.q_s.estimate, e.q_x.estimate, e.q_y.estimate,
                                     e.p_coexist.estimate};
    };

    if (id == 1 || id == 4) {
        // Symmetric (1) or dominant-x (4) start sizes vs. y0 = 2, with the
        // independent-propagation baseline alongside.
        const std::vector<std::uint64_t> x0s =
            id == 1 ? std::vector<std::uint64_t>{2, 4, 10, 16, 30}
                    : std::vector<std::uint64_t>{2, 6, 8, 10};
        const auto est = estimator(opts.full ? 3200 : 800);
        csv = "x0,qs_bpa,qx_bpa,qy_bpa,p_bpa,qs_bpna,qx_bpna,qy_bpna,p_bpna\n";
        for (std::uint64_t x0 : x0s) {
            auto base = id == 1 ? bpa::presets::symmetric_base(x0, 2)
                                : bpa::presets::asymmetric_base(x0, 2);
            const auto with = extinction_row(base, est);
            base.mode = bpa::Mode::Bpna;
            const auto without = extinction_row(base, est);
            csv += std::to_string(x0);
            for (double v : with)
                csv += "," + csv_cell(v);
            for (double v : without)
                csv += "," + csv_cell(v);
            csv += '\n';
            rows.push_back(Json{{"x0", x0},
                                {"bpa", {with[0], with[1], with[2], with[3]}},
                                {"bpna", {without[0], without[1], without[2], without[3]}}});
        }
    } else if (id == 2 || id == 3) {
        const auto est = estimator(opts.full ? 3200 : 400);
        csv = id == 2 ? "x0,qs,qx,qy,p\n" : "y0,qs,qx,qy,p\n";
        const std::vector<std::uint64_t> sizes = id == 2
                                                     ? std::vector<std::uint64_t>{200, 210, 220, 250}
                                                     : std::vector<std::uint64_t>{105, 300, 450, 500};
        for (std::uint64_t s : sizes) {
            const auto params = id == 2 ? bpa::presets::symmetric_base(s, 200)
                                        : bpa::presets::asymmetric_base(100, s);
            const auto vals = extinction_row(params, est);
            csv += std::to_string(s);
            for (double v : vals)
                csv += "," + csv_cell(v);
            csv += '\n';
            rows.push_back(Json{{id == 2 ? "x0" : "y0", s},
                                {"estimates", {vals[0], vals[1], vals[2], vals[3]}}});
        }
    } else if (id == 5) {
        // Long-run fraction X_N/S_N on surviving paths against the
        // theoretical ratio. Reduced scale; --full raises seeds and N by
        // 10x (the source scale, N ~ 1e9, is not desk-feasible).
        struct Row {
            double ratio, mx, my;
            std::uint64_t x0;
        };
        const std::uint64_t base_seeds = opts.full ? 100000 : 10000;
        const std::vector<Row> spec_rows = {{1.005, 2.9998, 3.0, base_seeds + base_seeds / 100},
                                            {1.0, 2.0, 2.0, base_seeds * 10},
                                            {0.618, 3.0, 2.98, base_seeds * 10},
                                            {0.618, 2.92, 2.90, base_seeds * 10}};
        csv = "x0,y0,m_x,m_y,N,beta_target,mean_fraction\n";
        for (const auto &row : spec_rows) {
            const std::uint64_t y0 = (std::uint64_t)std::llround((double)row.x0 / row.ratio);
            const auto params = bpa::presets::coexist_instance(row.mx, row.my, 0.02, row.x0, y0);
            bpa::EstimatorConfig est;
            est.replications = opts.replications.value_or(opts.full ? 32 : 16);
            est.master_seed = seed;
            est.stop.max_transitions = opts.full ? 1000000 : 100000;
            est.parallelism = parallelism;
            const auto limits = bpa::candidate_limits(params);
            const auto &coexist = limits[3];
            const double target = coexist.theta / coexist.psi;
            const auto study = bpa::estimate_limit_fraction(params, est, target);
            csv += std::to_string(row.x0) + "," + std::to_string(y0) + "," + csv_cell(row.mx) +
                   "," + csv_cell(row.my) + "," + std::to_string(*est.stop.max_transitions) + "," +
                   csv_cell(target) + "," + csv_cell(study.mean_fraction) + "\n";
            rows.push_back(Json{{"x0", row.x0},
                                {"y0", y0},
                                {"m_x", row.mx},
                                {"m_y", row.my},
                                {"N", *est.stop.max_transitions},
                                {"beta_target", bpa::round_sig12(target)},
                                {"mean_fraction", bpa::round_sig12(study.mean_fraction)}});
        }
    } else if (id == 6) {
        // Share of paths whose terminal fraction lands within 5% of the
        // equilibrium ratio after 1e4 transitions.
        struct Row {
            double mx, my, mc;
            std::uint64_t x0, y0;
        };
        const std::vector<Row> spec_rows = {
            {300, 300, 10, 2500, 3001}, {300, 300, 10, 3000, 3001}, {300, 300, 10, 3000, 3601},
            {300, 300, 30, 3000, 3601}, {300, 280, 10, 3000, 8692}, {300, 290, 20, 3000, 4611},
            {450, 447, 20, 2500, 3001}};
        csv = "m_x,m_y,m_c_star,x0,y0,beta_target,pct_in\n";
        for (const auto &row : spec_rows) {
            const auto params =
                bpa::presets::coexist_instance(row.mx, row.my, row.mc, row.x0, row.y0);
            bpa::EstimatorConfig est;
            est.replications = opts.replications.value_or(opts.full ? 1000 : 200);
            est.master_seed = seed;
            est.stop.max_transitions = 10000;
            est.parallelism = parallelism;
            const auto limits = bpa::candidate_limits(params);
            const double target = limits[3].theta / limits[3].psi;
            const auto study = bpa::estimate_limit_fraction(params, est, target);
            csv += csv_cell(row.mx) + "," + csv_cell(row.my) + "," + csv_cell(row.mc) + "," +
                   std::to_string(row.x0) + "," + std::to_string(row.y0) + "," + csv_cell(target) +
                   "," + csv_cell(100.0 * study.within_band_share) + "\n";
            rows.push_back(Json{{"m_x", row.mx},
                                {"m_y", row.my},
                                {"m_c_star", row.mc},
                                {"x0", row.x0},
                                {"y0", row.y0},
                                {"beta_target", bpa::round_sig12(target)},
                                {"pct_in", bpa::round_sig12(100.0 * study.within_band_share)}});
        }
    } else {
        throw bpa::ConfigError("table id must be in 1..6");
    }

    bpa::write_file_atomic(out_file(opts, name + ".csv"), csv);
    Json j = header(Json{{"table", id},
                         {"seed", seed},
                         {"full", opts.full},
                         {"replications_override",
                          opts.replications ? Json(*opts.replications) : Json(nullptr)}});
    j["rows"] = rows;
    write_json(out_file(opts, name + ".json"), j);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Two-type branching processes with attack/acquisition: simulation, "
                 "Monte Carlo estimation, fixed-point reports, ODE limits, and "
                 "viral-market comparisons"};
    app.require_subcommand(1);

    CommonOpts opts;
    int table_id = 0;

    auto add_common = [&opts](CLI::App *cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", opts.config_path, "JSON config file")->required();
        cmd->add_option("--seed", opts.seed, "Master seed override");
        cmd->add_option("--out", opts.out_dir, "Output directory (default .)");
        cmd->add_option("--replications", opts.replications, "Replication count override");
        cmd->add_option("--mode", opts.mode, "Force mode: bpa|bpna");
        cmd->add_flag("--full", opts.full, "Full-scale run (table presets)");
    };

    CLI::App *sim = app.add_subcommand("simulate", "Run one path, write trajectory + outcome");
    add_common(sim, true);
    CLI::App *est = app.add_subcommand("estimate", "Monte Carlo extinction estimates");
    add_common(est, true);
    CLI::App *theo = app.add_subcommand("theory", "Closed-form report for a model");
    add_common(theo, true);
    CLI::App *ode = app.add_subcommand("ode", "Integrate the limit ODE and classify");
    add_common(ode, true);
    CLI::App *market = app.add_subcommand("market", "Compare attack vs. independent models");
    add_common(market, true);
    CLI::App *table = app.add_subcommand("table", "Reproduce a bundled result table (1-6)");
    table->add_option("id", table_id, "Table id (1-6)")->required();
    add_common(table, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(opts);
        if (est->parsed())
            return cmd_estimate(opts);
        if (theo->parsed())
            return cmd_theory(opts);
        if (ode->parsed())
            return cmd_ode(opts);
        if (market->parsed())
            return cmd_market(opts);
        if (table->parsed())
            return cmd_table(opts, table_id);
    } catch (const bpa::ConfigError &e) {
        std::cout << Json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cout << Json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cout << Json{{"error", {{"type", "runtime"}, {"message", e.what()}}}}.dump() << "\n";
        return 3;
    }
    return 0;
}
