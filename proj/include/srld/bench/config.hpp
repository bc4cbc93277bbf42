// Declarative experiment configuration: JSON schema parsing plus the
// compact inline target syntax used by the CLI.

#pragma once

#include "srld/dynamics.hpp"
#include "srld/targets.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srld::bench {

using json = nlohmann::json;

enum class Pairing { independent, coupled_noise };

struct MethodEntry {
  std::string name;  // unique label in reports
  ChainKind kind = ChainKind::langevin;
  SamplerConfig cfg;
  std::optional<Eigen::MatrixXd> diffusion;  // general dynamics only
  std::optional<Eigen::MatrixXd> curl;
};

struct Reporting {
  Eigen::Index keep_every = 1;
  Eigen::Index max_lag = 50;
  // MMD/W1 are evaluated on seeded subsamples of at most this many rows
  Eigen::Index metric_sample_cap = 2000;
};

struct ExperimentConfig {
  TargetSpec target;
  std::vector<MethodEntry> methods;
  Pairing pairing = Pairing::independent;
  std::vector<std::uint64_t> seeds;
  Eigen::Index reference_count = 20000;
  std::string out_dir;
  Reporting reporting;
  std::optional<Eigen::VectorXd> init;  // pinned theta0
  std::optional<Eigen::Index> match_pilot_steps;  // step-size matching
};

// Throws std::invalid_argument with field-level diagnostics.
ExperimentConfig parse_experiment_config(const json& j);
ExperimentConfig load_experiment_config(const std::string& path);
void validate(const ExperimentConfig& config);

TargetSpec parse_target_json(const json& j);
json target_to_json(const TargetSpec& spec);

// Inline syntax: "banana2d", "gaussian:d=2[,var=1]",
// "mixture:d=2[,mode=1][,var=1]" (modes at +/- mode * ones).
TargetSpec parse_target_inline(const std::string& text);

json method_to_json(const MethodEntry& entry);
MethodEntry parse_method_json(const json& j);

}  // namespace srld::bench
