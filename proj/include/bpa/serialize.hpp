#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "bpa/montecarlo.hpp"
#include "bpa/sa_ode.hpp"
#include "bpa/theory.hpp"
#include "bpa/viralmarket.hpp"

namespace bpa {

// Insertion-ordered documents + doubles rounded to 12 significant digits
// give byte-identical output for identical inputs.
using Json = nlohmann::ordered_json;

inline constexpr const char *kToolkitVersion = "0.1.0";

/// Raised on malformed configuration (bad JSON, unknown keys, wrong types).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double round_sig12(double v);

Json count_law_to_json(const CountLaw &law);
CountLaw count_law_from_json(const Json &j);
Json law_to_json(const OffspringLaw &law);
OffspringLaw law_from_json(const Json &j);
Json attack_to_json(const AttackSpec &spec);
AttackSpec attack_from_json(const Json &j);
Json model_to_json(const ModelParams &params);
ModelParams model_from_json(const Json &j);
Json stop_to_json(const StopRule &stop);
StopRule stop_from_json(const Json &j);
Json estimator_to_json(const EstimatorConfig &config);
EstimatorConfig estimator_from_json(const Json &j);
Json market_to_json(const MarketParams &market);
MarketParams market_from_json(const Json &j);
Json ode_config_to_json(const OdeConfig &config);
OdeConfig ode_config_from_json(const Json &j);

Json estimates_to_json(const ProbabilityEstimates &est);
Json theory_to_json(const TheoryReport &report);
Json fraction_to_json(const FractionStudy &study);
Json comparison_to_json(const ComparisonReport &report);
Json outcome_to_json(const ReplicationOutcome &outcome);
Json assumptions_to_json(const AssumptionReport &report);

std::string trajectory_csv(std::span<const TrajectoryPoint> points);
std::string replications_csv(const std::vector<ReplicationOutcome> &outcomes);
std::string theta_path_csv(std::span<const Theta> path);  // t,psi,theta
std::string tracker_csv(std::span<const Theta> path);     // n,psi,theta,t

/// Writes via a temporary in the same directory, then renames.
void write_file_atomic(const std::filesystem::path &path, const std::string &content);

Json parse_config_file(const std::filesystem::path &path);

/// Unknown keys are configuration errors.
void require_keys(const Json &obj, std::initializer_list<const char *> allowed,
                  const char *context);

} // namespace bpa
