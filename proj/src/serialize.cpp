#include "bpa/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace bpa {

namespace {

std::string fmt(const char *format, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

Json num(double v) { return Json(round_sig12(v)); }

double want_number(const Json &j, const char *key, const char *ctx) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(ctx) + ": missing numeric field '" + key + "'");
    return j[key].get<double>();
}

std::uint64_t want_uint(const Json &j, const char *key, const char *ctx) {
    if (!j.contains(key) || !j[key].is_number_unsigned())
        throw ConfigError(std::string(ctx) + ": missing non-negative integer field '" + key + "'");
    return j[key].get<std::uint64_t>();
}

std::string want_string(const Json &j, const char *key, const char *ctx) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError(std::string(ctx) + ": missing string field '" + key + "'");
    return j[key].get<std::string>();
}

Json interval_to_json(const Interval &iv) {
    return Json{{"estimate", num(iv.estimate)}, {"half_width95", num(iv.half_width95)}};
}

} // namespace

double round_sig12(double v) {
    if (!std::isfinite(v))
        return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

void require_keys(const Json &obj, std::initializer_list<const char *> allowed,
                  const char *context) {
    if (!obj.is_object())
        throw ConfigError(std::string(context) + ": expected a JSON object");
    for (const auto &item : obj.items()) {
        bool known = false;
        for (const char *k : allowed)
            known = known || item.key() == k;
        if (!known)
            throw ConfigError(std::string(context) + ": unknown key '" + item.key() + "'");
    }
}

// ---------------------------------------------------------------------------
// Laws
// ---------------------------------------------------------------------------

Json count_law_to_json(const CountLaw &law) {
    return std::visit(
        [](const auto &l) -> Json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonCount>)
                return Json{{"type", "poisson"}, {"mean", num(l.mean)}};
            else if constexpr (std::is_same_v<T, ConstantCount>)
                return Json{{"type", "constant"}, {"k", l.k}};
            else
                return Json{{"type", "pmf"}, {"probs", l.probs}};
        },
        law);
}

CountLaw count_law_from_json(const Json &j) {
    const std::string type = want_string(j, "type", "count law");
    if (type == "poisson") {
        require_keys(j, {"type", "mean"}, "count law");
        return PoissonCount{want_number(j, "mean", "count law")};
    }
    if (type == "constant") {
        require_keys(j, {"type", "k"}, "count law");
        return ConstantCount{want_uint(j, "k", "count law")};
    }
    if (type == "pmf") {
        require_keys(j, {"type", "probs"}, "count law");
        if (!j.contains("probs") || !j["probs"].is_array())
            throw ConfigError("count law: 'probs' must be an array");
        return PmfCount{j["probs"].get<std::vector<double>>()};
    }
    throw ConfigError("count law: unknown type '" + type + "'");
}

Json law_to_json(const OffspringLaw &law) {
    return std::visit(
        [](const auto &l) -> Json {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PoissonThinned>)
                return Json{{"type", "poisson_thinned"},
                            {"friend_mean", num(l.friend_mean)},
                            {"share_prob", num(l.share_prob)}};
            else if constexpr (std::is_same_v<T, BinomialOfFriends>)
                return Json{{"type", "binomial_of_friends"},
                            {"friends", count_law_to_json(l.friends)},
                            {"share_prob", num(l.share_prob)}};
            else if constexpr (std::is_same_v<T, ExplicitPmf>)
                return Json{{"type", "pmf"}, {"probs", l.probs}};
            else if constexpr (std::is_same_v<T, ConstantLaw>)
                return Json{{"type", "constant"}, {"k", l.k}};
            else
                return Json{{"type", "zero"}};
        },
        law);
}

OffspringLaw law_from_json(const Json &j) {
    const std::string type = want_string(j, "type", "offspring law");
    if (type == "poisson_thinned") {
        require_keys(j, {"type", "friend_mean", "share_prob"}, "offspring law");
        return PoissonThinned{want_number(j, "friend_mean", "offspring law"),
                              want_number(j, "share_prob", "offspring law")};
    }
    if (type == "binomial_of_friends") {
        require_keys(j, {"type", "friends", "share_prob"}, "offspring law");
        if (!j.contains("friends"))
            throw ConfigError("offspring law: missing 'friends'");
        return BinomialOfFriends{count_law_from_json(j["friends"]),
                                 want_number(j, "share_prob", "offspring law")};
    }
    if (type == "pmf") {
        require_keys(j, {"type", "probs"}, "offspring law");
        if (!j.contains("probs") || !j["probs"].is_array())
            throw ConfigError("offspring law: 'probs' must be an array");
        return ExplicitPmf{j["probs"].get<std::vector<double>>()};
    }
    if (type == "constant") {
        require_keys(j, {"type", "k"}, "offspring law");
        return ConstantLaw{want_uint(j, "k", "offspring law")};
    }
    if (type == "zero") {
        require_keys(j, {"type"}, "offspring law");
        return ZeroLaw{};
    }
    throw ConfigError("offspring law: unknown type '" + type + "'");
}

Json attack_to_json(const AttackSpec &spec) {
    return Json{{"max_attacks", law_to_json(spec.max_attacks)},
                {"success_prob", num(spec.success_prob)}};
}

AttackSpec attack_from_json(const Json &j) {
    require_keys(j, {"max_attacks", "success_prob"}, "attack spec");
    if (!j.contains("max_attacks"))
        throw ConfigError("attack spec: missing 'max_attacks'");
    return AttackSpec{law_from_json(j["max_attacks"]), want_number(j, "success_prob", "attack spec")};
}

Json model_to_json(const ModelParams &params) {
    return Json{{"lambda", num(params.lambda)},
                {"offspring_x", law_to_json(params.offspring_x)},
                {"offspring_y", law_to_json(params.offspring_y)},
                {"attack_xy", attack_to_json(params.attack_xy)},
                {"attack_yx", attack_to_json(params.attack_yx)},
                {"x0", params.x0},
                {"y0", params.y0},
                {"mode", params.mode == Mode::Bpa ? "bpa" : "bpna"}};
}

ModelParams model_from_json(const Json &j) {
    require_keys(j, {"lambda", "offspring_x", "offspring_y", "attack_xy", "attack_yx", "x0", "y0",
                     "mode"},
                 "model");
    ModelParams p;
    p.lambda = want_number(j, "lambda", "model");
    for (const char *k : {"offspring_x", "offspring_y", "attack_xy", "attack_yx"})
        if (!j.contains(k))
            throw ConfigError(std::string("model: missing '") + k + "'");
    p.offspring_x = law_from_json(j["offspring_x"]);
    p.offspring_y = law_from_json(j["offspring_y"]);
    p.attack_xy = attack_from_json(j["attack_xy"]);
    p.attack_yx = attack_from_json(j["attack_yx"]);
    p.x0 = want_uint(j, "x0", "model");
    p.y0 = want_uint(j, "y0", "model");
    const std::string mode = want_string(j, "mode", "model");
    if (mode == "bpa")
        p.mode = Mode::Bpa;
    else if (mode == "bpna")
        p.mode = Mode::Bpna;
    else
        throw ConfigError("model: mode must be 'bpa' or 'bpna'");
    return p;
}

Json stop_to_json(const StopRule &stop) {
    Json j = Json::object();
    if (stop.max_transitions)
        j["max_transitions"] = *stop.max_transitions;
    if (stop.time_horizon)
        j["time_horizon"] = num(*stop.time_horizon);
    if (stop.survival_cap)
        j["survival_cap"] = *stop.survival_cap;
    j["stop_on_extinction"] = stop.stop_on_extinction;
    return j;
}

StopRule stop_from_json(const Json &j) {
    require_keys(j, {"max_transitions", "time_horizon", "survival_cap", "stop_on_extinction"},
                 "stop rule");
    StopRule stop;
    if (j.contains("max_transitions"))
        stop.max_transitions = j["max_transitions"].get<std::uint64_t>();
    if (j.contains("time_horizon"))
        stop.time_horizon = j["time_horizon"].get<double>();
    if (j.contains("survival_cap"))
        stop.survival_cap = j["survival_cap"].get<std::int64_t>();
    if (j.contains("stop_on_extinction"))
        stop.stop_on_extinction = j["stop_on_extinction"].get<bool>();
    return stop;
}

Json estimator_to_json(const EstimatorConfig &config) {
    return Json{{"replications", config.replications},
                {"master_seed", config.master_seed},
                {"stop", stop_to_json(config.stop)},
                {"parallelism", config.parallelism}};
}

EstimatorConfig estimator_from_json(const Json &j) {
    require_keys(j, {"replications", "master_seed", "stop", "parallelism"}, "estimator");
    EstimatorConfig c;
    c.replications = want_uint(j, "replications", "estimator");
    if (j.contains("master_seed"))
        c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (!j.contains("stop"))
        throw ConfigError("estimator: missing 'stop'");
    c.stop = stop_from_json(j["stop"]);
    if (j.contains("parallelism"))
        c.parallelism = j["parallelism"].get<unsigned>();
    return c;
}

Json market_to_json(const MarketParams &market) {
    return Json{{"friend_law", count_law_to_json(market.friend_law)},
                {"eta_x", num(market.eta_x)},
                {"eta_y", num(market.eta_y)},
                {"gamma", num(market.gamma)},
                {"p_xy", num(market.p_xy)},
                {"p_yx", num(market.p_yx)},
                {"seeds_x", market.seeds_x},
                {"seeds_y", market.seeds_y},
                {"lambda", num(market.lambda)},
                {"joint_friend_split", market.joint_friend_split}};
}

MarketParams market_from_json(const Json &j) {
    require_keys(j, {"friend_law", "eta_x", "eta_y", "gamma", "p_xy", "p_yx", "seeds_x", "seeds_y",
                     "lambda", "joint_friend_split"},
                 "market");
    MarketParams m;
    if (!j.contains("friend_law"))
        throw ConfigError("market: missing 'friend_law'");
    m.friend_law = count_law_from_json(j["friend_law"]);
    m.eta_x = want_number(j, "eta_x", "market");
    m.eta_y = want_number(j, "eta_y", "market");
    m.gamma = want_number(j, "gamma", "market");
    m.p_xy = want_number(j, "p_xy", "market");
    m.p_yx = want_number(j, "p_yx", "market");
    m.seeds_x = want_uint(j, "seeds_x", "market");
    m.seeds_y = want_uint(j, "seeds_y", "market");
    m.lambda = want_number(j, "lambda", "market");
    if (j.contains("joint_friend_split"))
        m.joint_friend_split = j["joint_friend_split"].get<bool>();
    return m;
}

Json ode_config_to_json(const OdeConfig &config) {
    return Json{{"dt", num(config.dt)},
                {"t_end", num(config.t_end)},
                {"clamp_theta", config.clamp_theta}};
}

OdeConfig ode_config_from_json(const Json &j) {
    require_keys(j, {"dt", "t_end", "clamp_theta"}, "ode");
    OdeConfig c;
    if (j.contains("dt"))
        c.dt = j["dt"].get<double>();
    c.t_end = want_number(j, "t_end", "ode");
    if (j.contains("clamp_theta"))
        c.clamp_theta = j["clamp_theta"].get<bool>();
    return c;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

Json estimates_to_json(const ProbabilityEstimates &est) {
    return Json{{"q_s", interval_to_json(est.q_s)},
                {"q_x", interval_to_json(est.q_x)},
                {"q_y", interval_to_json(est.q_y)},
                {"p_coexist", interval_to_json(est.p_coexist)},
                {"replications_used", est.replications_used}};
}

Json theory_to_json(const TheoryReport &report) {
    Json j{{"alpha_x", num(report.alpha_x)},
           {"alpha_y", num(report.alpha_y)},
           {"q_star_x", num(report.q_star_x)},
           {"q_star_y", num(report.q_star_y)},
           {"bpna",
            Json{{"extinct_x", num(report.bpna.extinct_x)},
                 {"extinct_y", num(report.bpna.extinct_y)},
                 {"extinct_total", num(report.bpna.extinct_total)},
                 {"coexist", num(report.bpna.coexist)}}},
           {"beta_l", num(report.beta_l)}};
    j["theta_l"] = report.theta_l ? Json(num(*report.theta_l)) : Json(nullptr);
    if (report.asymmetric) {
        j["asymmetric"] = Json{{"beta_al", num(report.asymmetric->beta_al)},
                               {"psi_al", num(report.asymmetric->psi_al)},
                               {"theta_al", num(report.asymmetric->theta_al)},
                               {"swapped", report.asymmetric_swapped},
                               {"conjecture", report.asymmetric_conjecture}};
    } else {
        j["asymmetric"] = nullptr;
    }
    Json points = Json::array();
    for (const auto &p : report.limit_points)
        points.push_back(Json{{"label", to_string(p.label)},
                              {"psi", num(p.psi)},
                              {"theta", std::isfinite(p.theta) ? Json(num(p.theta)) : Json(nullptr)}});
    j["limit_points"] = points;
    return j;
}

Json fraction_to_json(const FractionStudy &study) {
    Json samples = Json::array();
    for (double f : study.samples)
        samples.push_back(num(f));
    return Json{{"mean_fraction", num(study.mean_fraction)},
                {"within_band_share", num(study.within_band_share)},
                {"target", num(study.target)},
                {"band", num(study.band)},
                {"surviving_paths", study.samples.size()},
                {"samples", samples}};
}

Json comparison_to_json(const ComparisonReport &report) {
    return Json{{"bpa", estimates_to_json(report.bpa)},
                {"bpna", estimates_to_json(report.bpna)},
                {"theory_bpa", theory_to_json(report.theory_bpa)},
                {"theory_bpna", theory_to_json(report.theory_bpna)}};
}

Json outcome_to_json(const ReplicationOutcome &outcome) {
    Json j{{"halt_reason", to_string(outcome.halt)},
           {"x_extinct", outcome.x_extinct},
           {"y_extinct", outcome.y_extinct},
           {"total_extinct", outcome.total_extinct}};
    j["extinct_epoch_x"] = outcome.extinct_epoch_x ? Json(*outcome.extinct_epoch_x) : Json(nullptr);
    j["extinct_epoch_y"] = outcome.extinct_epoch_y ? Json(*outcome.extinct_epoch_y) : Json(nullptr);
    j["final_state"] = Json{{"n", outcome.final_state.n},
                            {"x", outcome.final_state.x},
                            {"y", outcome.final_state.y},
                            {"tau", num(outcome.final_state.tau)},
                            {"absorbed", outcome.final_state.absorbed}};
    j["terminal_fraction"] = num(outcome.terminal_fraction);
    return j;
}

Json assumptions_to_json(const AssumptionReport &report) {
    Json violations = Json::array();
    for (const auto &[u, v] : report.a4_violations)
        violations.push_back(Json::array({u, v}));
    return Json{{"m_x", num(report.m_x)},
                {"m_y", num(report.m_y)},
                {"second_moments", Json::array({num(report.second_moments[0]),
                                                num(report.second_moments[1]),
                                                num(report.second_moments[2]),
                                                num(report.second_moments[3])})},
                {"m_xy_star", num(report.m_xy_star)},
                {"m_yx_star", num(report.m_yx_star)},
                {"a1_ok", report.a1_ok},
                {"zero_prob_ok", report.zero_prob_ok},
                {"a2_ok", report.a2_ok},
                {"a3_ok", report.a3_ok},
                {"a4_ok", report.a4_ok},
                {"a3_params", Json{{"kappa_xy", num(report.a3.kappa_xy)},
                                   {"kappa_yx", num(report.a3.kappa_yx)},
                                   {"x_bar", num(report.a3.x_bar)},
                                   {"y_bar", num(report.a3.y_bar)}}},
                {"a4_violation_count", report.a4_violation_count},
                {"a4_violations", violations}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string trajectory_csv(std::span<const TrajectoryPoint> points) {
    std::string out = "n,x,y,tau\n";
    for (const auto &p : points) {
        out += std::to_string(p.n);
        out += ',';
        out += std::to_string(p.x);
        out += ',';
        out += std::to_string(p.y);
        out += ',';
        out += fmt("%.17g", p.tau);
        out += '\n';
    }
    return out;
}

std::string replications_csv(const std::vector<ReplicationOutcome> &outcomes) {
    std::string out = "replication,haltReason,xExtinct,yExtinct,n,x,y,tau,fraction\n";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto &o = outcomes[i];
        out += std::to_string(i);
        out += ',';
        out += to_string(o.halt);
        out += ',';
        out += o.x_extinct ? '1' : '0';
        out += ',';
        out += o.y_extinct ? '1' : '0';
        out += ',';
        out += std::to_string(o.final_state.n);
        out += ',';
        out += std::to_string(o.final_state.x);
        out += ',';
        out += std::to_string(o.final_state.y);
        out += ',';
        out += fmt("%.17g", o.final_state.tau);
        out += ',';
        out += fmt("%.17g", o.terminal_fraction);
        out += '\n';
    }
    return out;
}

std::string theta_path_csv(std::span<const Theta> path) {
    std::string out = "t,psi,theta\n";
    for (const auto &p : path) {
        out += fmt("%.17g", p.t);
        out += ',';
        out += fmt("%.17g", p.psi);
        out += ',';
        out += fmt("%.17g", p.theta);
        out += '\n';
    }
    return out;
}

std::string tracker_csv(std::span<const Theta> path) {
    std::string out = "n,psi,theta,t\n";
    for (std::size_t n = 0; n < path.size(); ++n) {
        out += std::to_string(n);
        out += ',';
        out += fmt("%.17g", path[n].psi);
        out += ',';
        out += fmt("%.17g", path[n].theta);
        out += ',';
        out += fmt("%.17g", path[n].t);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        f.write(content.data(), (std::streamsize)content.size());
        if (!f)
            throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Json parse_config_file(const std::filesystem::path &path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file: " + path.string());
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
}

} // namespace bpa
