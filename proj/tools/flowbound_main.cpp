// flowbound: plan horizons and step sizes, analyze concavity profiles,
// evaluate the certified W2 error bound, draw samples with the
// exponential-integrator flow, and validate bound against measurement.
//
// Exit codes: 0 success, 1 validation failure (measured error above the
// bound), 2 usage, 3 domain or config error.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flowbound/bounds.hpp"
#include "flowbound/concavity.hpp"
#include "flowbound/config.hpp"
#include "flowbound/hyperparams.hpp"
#include "flowbound/json_writer.hpp"
#include "flowbound/metrics.hpp"
#include "flowbound/sampler.hpp"
#include "flowbound/schedule.hpp"
#include "flowbound/target.hpp"

namespace fb = flowbound;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

std::vector<double> default_params(const std::string& family) {
  if (family == "ou") return {};
  if (family == "ve_exp") return {1.0, 1.0};
  if (family == "ve_poly") return {1.0, 1.0, 1.0};
  if (family == "vp_const") return {1.0};
  if (family == "vp_linear") return {1.0, 1.0};
  if (family == "vp_poly") return {1.0, 1.0, 2.0};
  throw std::invalid_argument("unknown schedule family '" + family + "'");
}

fb::Schedule make_schedule(const std::string& family, std::vector<double> params) {
  if (params.empty()) params = default_params(family);
  return fb::Schedule::from_name(family, params);
}

// Relative paths land under $FLOWBOUND_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  const char* dir = std::getenv("FLOWBOUND_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  return (fs::path(dir) / path).string();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

void write_matrix_csv(const std::string& path, const fb::Matrix& m) {
  std::ostringstream out;
  for (long j = 0; j < m.cols; ++j) out << (j > 0 ? ",x" : "x") << j;
  out << "\n";
  for (long i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (long j = 0; j < m.cols; ++j) {
      if (j > 0) out << ',';
      out << csv_double(row[j]);
    }
    out << "\n";
  }
  write_text_file(path, out.str());
}

fb::Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::vector<std::vector<double>> rows;
  bool may_be_header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      std::string token = line.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      const size_t lo = token.find_first_not_of(" \t");
      if (lo == std::string::npos) {
        numeric = false;
        break;
      }
      token = token.substr(lo, token.find_last_not_of(" \t") - lo + 1);
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!numeric) {
      if (may_be_header) {
        may_be_header = false;
        continue;
      }
      throw std::runtime_error("malformed CSV row in '" + path + "'");
    }
    may_be_header = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows in '" + path + "'");
  fb::Matrix m(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != static_cast<size_t>(m.cols))
      throw std::runtime_error("ragged CSV rows in '" + path + "'");
    std::copy(rows[i].begin(), rows[i].end(), m.row(static_cast<long>(i)));
  }
  return m;
}

std::unique_ptr<fb::ScoreOracle> make_oracle(const fb::GaussianMixture& gmm,
                                             const fb::Schedule& schedule,
                                             const fb::ScoreSpec& spec,
                                             uint64_t seed) {
  if (spec.perturbed)
    return std::make_unique<fb::PerturbedMixtureScore>(gmm, schedule, spec.eps,
                                                       fb::derive_seed(seed, 11));
  return std::make_unique<fb::ExactMixtureScore>(gmm, schedule);
}

void write_bound_report(fb::jsonw::JsonWriter& w, const fb::BoundReport& r,
                        bool arrays) {
  w.begin_object();
  w.kv("e0", r.e0);
  w.kv("e1", r.e1);
  w.kv("e2", r.e2);
  w.kv("total", r.total);
  w.kv("tau", r.tau);
  w.kv("big_c", r.big_c);
  w.kv("theta", r.theta);
  w.kv("omega", r.omega);
  w.kv("h_bar", r.h_bar);
  w.kv("regime_split_index", r.regime_split_index);
  w.kv("vacuous", r.vacuous);
  if (arrays) {
    w.kv("gamma", r.gamma);
    w.kv("log_gamma_tailprod", r.log_gamma_tailprod);
    w.kv("nu", r.nu);
  }
  w.end_object();
}

void column_moments(const fb::Matrix& m, std::vector<double>& mean,
                    std::vector<double>& var) {
  if (m.rows < 2) throw std::invalid_argument("moment matching needs >= 2 rows");
  mean.assign(static_cast<size_t>(m.cols), 0.0);
  var.assign(static_cast<size_t>(m.cols), 0.0);
  for (long i = 0; i < m.rows; ++i)
    for (long j = 0; j < m.cols; ++j) mean[static_cast<size_t>(j)] += m.at(i, j);
  for (auto& v : mean) v /= static_cast<double>(m.rows);
  for (long i = 0; i < m.rows; ++i)
    for (long j = 0; j < m.cols; ++j) {
      const double d = m.at(i, j) - mean[static_cast<size_t>(j)];
      var[static_cast<size_t>(j)] += d * d;
    }
  for (auto& v : var) v /= static_cast<double>(m.rows - 1);
}

fb::W2Estimate compute_w2(const fb::Matrix& a, const fb::Matrix& b,
                          const std::string& method, int n_projections,
                          uint64_t seed) {
  if (a.cols != b.cols)
    throw std::invalid_argument("w2: the two samples have different dimensions");
  if (method == "exact1d" || (method == "auto" && a.cols == 1)) {
    if (a.cols != 1)
      throw std::invalid_argument("w2: exact1d applies to 1-column samples");
    return fb::w2_1d_exact(a.data, b.data);
  }
  if (method == "gaussian") {
    std::vector<double> mu1, v1, mu2, v2;
    column_moments(a, mu1, v1);
    column_moments(b, mu2, v2);
    fb::W2Estimate est = fb::w2_gaussian(mu1, v1, mu2, v2);
    est.n = a.rows;
    return est;
  }
  if (method == "product1d") return fb::w2_product_1d(a, b);
  if (method == "lp") return fb::lp_oracle(a, b);
  if (method == "sliced" || method == "auto")
    return fb::sliced_w2(a, b, n_projections, seed);
  throw std::invalid_argument("w2: unknown method '" + method + "'");
}

void write_w2_json(fb::jsonw::JsonWriter& w, const fb::W2Estimate& est) {
  w.begin_object();
  w.kv("method", fb::w2_method_name(est.method));
  w.kv("value", est.value);
  w.kv("stderr", est.stderr_);
  w.kv("n_projections", est.n_projections);
  w.kv("n", est.n);
  w.end_object();
}

struct PlanArgs {
  std::string family;
  std::vector<double> params;
  double epsilon = 0.0;
  int dim = 0;
  double x0_norm = 0.0;
  double constant_c = 1.0;
};

int cmd_plan(const PlanArgs& a) {
  if (!(a.epsilon > 0.0 && a.epsilon < 1.0)) {
    std::cerr << "error: epsilon must be in (0,1)\n";
    return kExitDomain;
  }
  const fb::Schedule schedule = make_schedule(a.family, a.params);
  const fb::Plan p = fb::plan(schedule, a.epsilon, a.dim, a.constant_c, a.x0_norm);

  fb::jsonw::JsonWriter w;
  w.begin_object();
  w.kv("family", p.family);
  w.kv("params", p.schedule_params);
  w.kv("epsilon", p.epsilon);
  w.kv("dim", p.dim);
  w.kv("constant_c", p.constant_c);
  w.kv("scale", p.scale);
  w.kv("used_x0_norm", p.used_x0_norm);
  w.kv("T", p.T);
  w.kv("h_formula", p.h_formula);
  w.kv("h", p.h);
  w.kv("K", static_cast<int64_t>(p.K));
  w.kv("score_budget", p.score_budget);
  w.end_object();
  std::cout << w.str();

  std::fprintf(stderr,
               "plan  family=%s  epsilon=%g  d=%d  scale=%g (%s)  constant_c=%g\n"
               "  horizon T         %.8g\n"
               "  step h (formula)  %.8g\n"
               "  step h (= T/K)    %.8g\n"
               "  steps K           %ld\n"
               "  score budget      %.8g\n",
               p.family.c_str(), p.epsilon, p.dim, p.scale,
               p.used_x0_norm ? "x0 norm" : "sqrt(d)", p.constant_c, p.T,
               p.h_formula, p.h, p.K, p.score_budget);
  return 0;
}

struct AnalyzeArgs {
  std::string config;
  std::string family;
  std::vector<double> params;
  double alpha0 = std::nan("");
  double m0 = 0.0;
  double l0 = std::nan("");
  double T = std::nan("");
  int points = 512;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  std::optional<fb::Schedule> schedule;
  double alpha0 = a.alpha0, m0 = a.m0, l0 = a.l0, T = a.T;
  if (!a.config.empty()) {
    const fb::ExperimentConfig c = fb::load_config_toml(a.config);
    schedule = c.schedule();
    alpha0 = c.constants.alpha0;
    m0 = c.constants.m0;
    l0 = c.constants.l0;
    T = c.T;
  } else {
    if (a.family.empty() || std::isnan(alpha0) || std::isnan(l0) || std::isnan(T)) {
      std::cerr << "error: analyze needs --config or all of "
                   "--family --alpha0 --l0 --T (--m0 defaults to 0)\n";
      return kExitUsage;
    }
    schedule = make_schedule(a.family, a.params);
  }
  if (a.points < 1) throw std::invalid_argument("analyze: --points must be >= 1");
  const fb::ConcavityProfile profile(*schedule, alpha0, m0, l0);
  const double tau = fb::tau(profile);

  std::ostringstream csv;
  csv << "t,alpha,m,k,l,k_lower_bound,after_tau\n";
  for (int i = 0; i <= a.points; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(a.points);
    csv << csv_double(t) << ',' << csv_double(fb::alpha_t(profile, t)) << ','
        << csv_double(fb::m_t(profile, t)) << ',' << csv_double(fb::k_t(profile, t))
        << ',' << csv_double(fb::lipschitz_t(profile, t)) << ','
        << csv_double(fb::k_lower_bound(profile, t)) << ',' << (t > tau ? 1 : 0)
        << "\n";
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(resolve_out(a.out), csv.str());
  }
  std::fprintf(stderr, "tau = %s\n", csv_double(tau).c_str());
  return 0;
}

int cmd_bound(const std::string& config_path) {
  const fb::ExperimentConfig config = fb::load_config_toml(config_path);
  const fb::BoundInputs inputs = fb::make_bound_inputs(
      config.schedule(), config.constants, config.T, config.K, config.dim());
  const fb::BoundReport report = fb::total_bound(inputs);
  fb::jsonw::JsonWriter w;
  write_bound_report(w, report, true);
  std::cout << w.str();
  return 0;
}

struct SampleArgs {
  std::string target;
  std::string family;
  std::vector<double> params;
  double T = 0.0;
  long K = 0;
  std::string score = "exact";
  long n = 0;
  uint64_t seed = 0;
  std::string init = "hatpt";
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  fb::ExperimentConfig config = fb::load_config_toml(a.target, false);
  config.family = a.family;
  config.schedule_params = a.params.empty() ? default_params(a.family) : a.params;
  config.T = a.T;
  config.K = a.K;
  config.n = a.n;
  config.seed = a.seed;
  config.score = fb::ScoreSpec::parse(a.score);
  config.init = a.init;
  // the flag-supplied score spec redefines a derived score-error budget
  for (const auto& [name, tag] : config.constants.provenance)
    if (name == "score_err" && tag == "derived")
      config.constants.score_err = config.score.perturbed ? config.score.eps : 0.0;

  if (config.T <= 0.0) throw std::invalid_argument("sample: T must be > 0");
  if (config.K <= 0) throw std::invalid_argument("sample: K must be >= 1");
  if (config.n <= 0) throw std::invalid_argument("sample: n must be >= 1");

  const fb::GaussianMixture gmm = config.target();
  const fb::Schedule schedule = config.schedule();
  const auto oracle = make_oracle(gmm, schedule, config.score, config.seed);

  const auto t0 = std::chrono::steady_clock::now();
  const fb::Matrix samples = fb::run(config.sampler_config(), *oracle, config.n);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

  const std::string out_csv = resolve_out(a.out);
  write_matrix_csv(out_csv, samples);

  fb::jsonw::JsonWriter w;
  w.begin_object();
  w.key("config");
  fb::write_config(w, config);
  w.key("outputs").begin_object();
  w.kv("csv", out_csv);
  w.kv("rows", static_cast<int64_t>(samples.rows));
  w.kv("cols", static_cast<int64_t>(samples.cols));
  w.end_object();
  w.end_object();
  write_text_file(out_csv + ".json", w.str());

  std::fprintf(stderr, "wrote %ld samples (d=%ld) to %s in %.2fs\n", samples.rows,
               samples.cols, out_csv.c_str(), secs);
  return 0;
}

struct W2Args {
  std::string a;
  std::string b;
  std::string method = "auto";
  int n_projections = 256;
  uint64_t seed = 0;
};

int cmd_w2(const W2Args& args) {
  const fb::Matrix a = read_matrix_csv(args.a);
  const fb::Matrix b = read_matrix_csv(args.b);
  const fb::W2Estimate est =
      compute_w2(a, b, args.method, args.n_projections, args.seed);
  fb::jsonw::JsonWriter w;
  write_w2_json(w, est);
  std::cout << w.str();
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const fb::ExperimentConfig config = fb::load_config_toml(config_path);
  const fb::GaussianMixture gmm = config.target();
  const fb::Schedule schedule = config.schedule();

  const auto oracle = make_oracle(gmm, schedule, config.score, config.seed);
  const fb::Matrix generated = fb::run(config.sampler_config(), *oracle, config.n);
  const fb::Matrix reference = gmm.sample(config.n, fb::derive_seed(config.seed, 1));

  std::string method = config.w2_method;
  if (method == "auto") {
    if (gmm.dim() == 1)
      method = "exact1d";
    else if (fb::is_product_form(gmm))
      method = "product1d";
    else
      method = "sliced";
  }
  const fb::W2Estimate est = compute_w2(generated, reference, method,
                                        config.n_projections,
                                        fb::derive_seed(config.seed, 2));

  const fb::BoundInputs inputs = fb::make_bound_inputs(
      schedule, config.constants, config.T, config.K, gmm.dim());
  const fb::BoundReport report = fb::total_bound(inputs);

  // one-sided check; 3 stderr covers projection noise of the sliced estimate
  const bool pass = est.value <= report.total + 3.0 * est.stderr_;

  fb::jsonw::JsonWriter w;
  w.begin_object();
  w.kv("pass", pass);
  w.kv("w2_empirical", est.value);
  w.kv("w2_method", fb::w2_method_name(est.method));
  w.kv("w2_stderr", est.stderr_);
  w.kv("bound_total", report.total);
  w.kv("margin", report.total - est.value);
  w.kv("vacuous", report.vacuous);
  w.key("report");
  write_bound_report(w, report, true);
  w.key("config");
  fb::write_config(w, config);
  w.end_object();
  std::cout << w.str();
  return pass ? 0 : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "probability-flow sampling with a certified 2-Wasserstein error bound"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand(
      "plan", "choose horizon, step size, and score budget for a target accuracy");
  plan_cmd->add_option("--family", plan_args.family, "schedule family")->required();
  plan_cmd->add_option("--params", plan_args.params, "schedule parameters")
      ->delimiter(',');
  plan_cmd->add_option("--epsilon", plan_args.epsilon, "target W2 accuracy")
      ->required();
  plan_cmd->add_option("--d", plan_args.dim, "sample dimension")->required();
  plan_cmd->add_option("--x0-norm", plan_args.x0_norm,
                       "replace the sqrt(d) scale with this L2 norm");
  plan_cmd->add_option("--constant-c", plan_args.constant_c,
                       "calibration constant (>= 1 tightens the plan)");

  AnalyzeArgs analyze_args;
  CLI::App* analyze_cmd = app.add_subcommand(
      "analyze", "emit concavity-profile curves (CSV) along the schedule");
  analyze_cmd->add_option("--config", analyze_args.config, "experiment config TOML");
  analyze_cmd->add_option("--family", analyze_args.family, "schedule family");
  analyze_cmd->add_option("--params", analyze_args.params, "schedule parameters")
      ->delimiter(',');
  analyze_cmd->add_option("--alpha0", analyze_args.alpha0, "convexity rate at t=0");
  analyze_cmd->add_option("--m0", analyze_args.m0, "profile magnitude at t=0");
  analyze_cmd->add_option("--l0", analyze_args.l0, "score Lipschitz bound at t=0");
  analyze_cmd->add_option("--T", analyze_args.T, "horizon");
  analyze_cmd->add_option("--points", analyze_args.points, "grid cells (default 512)");
  analyze_cmd->add_option("--out", analyze_args.out, "CSV path (default stdout)");

  std::string bound_config;
  CLI::App* bound_cmd =
      app.add_subcommand("bound", "evaluate the certified W2 error bound");
  bound_cmd->add_option("--config", bound_config, "experiment config TOML")
      ->required();

  SampleArgs sample_args;
  CLI::App* sample_cmd = app.add_subcommand(
      "sample", "run the exponential-integrator flow and write samples as CSV");
  sample_cmd->add_option("--target", sample_args.target, "TOML with a [target] table")
      ->required();
  sample_cmd
      ->add_option("--schedule,--family", sample_args.family, "schedule family")
      ->required();
  sample_cmd->add_option("--params", sample_args.params, "schedule parameters")
      ->delimiter(',');
  sample_cmd->add_option("--T", sample_args.T, "horizon")->required();
  sample_cmd->add_option("--K", sample_args.K, "number of steps")->required();
  sample_cmd->add_option("--score", sample_args.score,
                         "'exact' or 'perturbed:<eps>' (default exact)");
  sample_cmd->add_option("--n", sample_args.n, "number of samples")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "RNG seed (default 0)");
  sample_cmd->add_option("--init", sample_args.init,
                         "'hatpt' or 'stationary' (default hatpt)");
  sample_cmd->add_option("--out", sample_args.out, "output CSV path")->required();

  W2Args w2_args;
  CLI::App* w2_cmd = app.add_subcommand(
      "w2", "estimate the W2 distance between two CSV sample files");
  w2_cmd->add_option("a", w2_args.a, "first sample CSV")->required();
  w2_cmd->add_option("b", w2_args.b, "second sample CSV")->required();
  w2_cmd->add_option("--method", w2_args.method,
                     "auto|exact1d|gaussian|sliced|product1d|lp");
  w2_cmd->add_option("--n-proj", w2_args.n_projections,
                     "sliced projections (default 256)");
  w2_cmd->add_option("--seed", w2_args.seed, "projection seed (default 0)");

  std::string validate_config;
  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "sample, measure W2 against the target, and check the bound");
  validate_cmd->add_option("--config", validate_config, "experiment config TOML")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(plan_args);
    if (analyze_cmd->parsed()) return cmd_analyze(analyze_args);
    if (bound_cmd->parsed()) return cmd_bound(bound_config);
    if (sample_cmd->parsed()) return cmd_sample(sample_args);
    if (w2_cmd->parsed()) return cmd_w2(w2_args);
    if (validate_cmd->parsed()) return cmd_validate(validate_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
