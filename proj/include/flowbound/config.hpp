// Experiment configuration: TOML in, ordered JSON out. Parsing resolves every
// optional field immediately (norms computed from the target, score error
// derived from the score spec), so a loaded config is always complete and its
// JSON echo re-parses to the same value byte for byte.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowbound/json_writer.hpp"
#include "flowbound/sampler.hpp"
#include "flowbound/schedule.hpp"
#include "flowbound/target.hpp"

namespace flowbound {

// "exact" or "perturbed:<eps>".
struct ScoreSpec {
  bool perturbed = false;
  double eps = 0.0;

  static ScoreSpec parse(const std::string& text);
  std::string str() const;
  bool operator==(const ScoreSpec&) const = default;
};

struct ExperimentConfig {
  uint64_t seed = 0;
  std::string out_dir;

  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;

  TargetConstants constants;  // fully resolved; provenance has a fixed order

  std::string family;
  std::vector<double> schedule_params;

  double T = 0.0;
  long K = 0;
  long n = 0;
  ScoreSpec score;
  std::string init = "hatpt";  // "hatpt" | "stationary"

  std::string w2_method = "auto";  // auto | exact1d | gaussian | sliced | product1d
  int n_projections = 256;

  GaussianMixture target() const { return {weights, means, variances}; }
  Schedule schedule() const { return Schedule::from_name(family, schedule_params); }
  SamplerConfig sampler_config() const;
  InitMode init_mode() const;
  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
};

// require_run_sections = false tolerates a file that carries only [target]
// (and optionally [constants]); schedule/sampler fields stay at defaults.
ExperimentConfig parse_config_toml(const std::string& text,
                                   bool require_run_sections = true);
ExperimentConfig load_config_toml(const std::string& path,
                                  bool require_run_sections = true);
std::string config_to_json(const ExperimentConfig& config);
// Emits the config object into an open writer (for nesting inside sidecars).
void write_config(jsonw::JsonWriter& w, const ExperimentConfig& config);
ExperimentConfig parse_config_json(const std::string& text);

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace flowbound
