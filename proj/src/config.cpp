#include "flowbound/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "flowbound/json_writer.hpp"
#include "flowbound/toml_lite.hpp"
#include "json.hpp"

namespace flowbound {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

const char* kConstantNames[] = {"alpha0",  "m0",      "l0",             "l1",
                                "score_err", "x0_norm", "score_at_origin"};

const toml::Value* need(const toml::Table& table, const std::string& key,
                        const std::string& where) {
  auto it = table.find(key);
  if (it == table.end()) fail("missing '" + key + "' in [" + where + "]");
  return &it->second;
}

double need_double(const toml::Table& table, const std::string& key,
                   const std::string& where) {
  const toml::Value* v = need(table, key, where);
  if (!v->is_number()) fail("'" + key + "' must be a number");
  return v->as_double();
}

int64_t need_int(const toml::Table& table, const std::string& key,
                 const std::string& where) {
  const toml::Value* v = need(table, key, where);
  if (!v->is_integer()) fail("'" + key + "' must be an integer");
  return v->as_integer();
}

std::vector<double> number_array(const toml::Value& v, const std::string& key) {
  if (!v.is_array()) fail("'" + key + "' must be an array");
  std::vector<double> out;
  for (const toml::Value& item : v.as_array()) {
    if (!item.is_number()) fail("'" + key + "' must contain numbers");
    out.push_back(item.as_double());
  }
  return out;
}

std::vector<std::vector<double>> nested_array(const toml::Value& v,
                                              const std::string& key) {
  if (!v.is_array()) fail("'" + key + "' must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const toml::Value& row : v.as_array()) out.push_back(number_array(row, key));
  return out;
}

// Fills the provenance vector in the fixed kConstantNames order. Fields the
// user wrote default to "user", resolved fields get the tag passed by the
// caller; explicit [constants.provenance] entries win.
void finish_provenance(TargetConstants& constants, const toml::Table* prov,
                       const std::vector<std::pair<std::string, std::string>>& resolved) {
  constants.provenance.clear();
  for (const char* name : kConstantNames) {
    std::string tag = "user";
    for (const auto& [rname, rtag] : resolved)
      if (rname == name) tag = rtag;
    if (prov != nullptr) {
      auto it = prov->find(name);
      if (it != prov->end()) {
        if (!it->second.is_string()) fail("provenance entries must be strings");
        tag = it->second.as_string();
      }
    }
    constants.provenance.emplace_back(name, tag);
  }
}

}  // namespace

ScoreSpec ScoreSpec::parse(const std::string& text) {
  if (text == "exact") return {};
  const std::string prefix = "perturbed:";
  if (text.rfind(prefix, 0) == 0) {
    ScoreSpec out;
    out.perturbed = true;
    size_t used = 0;
    try {
      out.eps = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      fail("malformed score spec '" + text + "'");
    }
    if (used != text.size() - prefix.size() || !(out.eps >= 0.0) ||
        !std::isfinite(out.eps))
      fail("malformed score spec '" + text + "'");
    return out;
  }
  fail("score must be 'exact' or 'perturbed:<eps>', got '" + text + "'");
}

std::string ScoreSpec::str() const {
  if (!perturbed) return "exact";
  return "perturbed:" + jsonw::format_double(eps);
}

SamplerConfig ExperimentConfig::sampler_config() const {
  return {schedule(), T, K, init_mode(), seed};
}

InitMode ExperimentConfig::init_mode() const {
  if (init == "hatpt") return InitMode::HatPT;
  if (init == "stationary") return InitMode::Stationary;
  fail("init must be 'hatpt' or 'stationary', got '" + init + "'");
}

ExperimentConfig parse_config_toml(const std::string& text,
                                   bool require_run_sections) {
  const toml::Table root = toml::parse(text);
  ExperimentConfig config;

  if (const toml::Value* v = toml::find_path(root, "seed")) {
    if (!v->is_integer()) fail("'seed' must be an integer");
    config.seed = static_cast<uint64_t>(v->as_integer());
  }
  if (const toml::Value* v = toml::find_path(root, "out_dir"))
    config.out_dir = v->as_string();

  const toml::Value* target = toml::find_path(root, "target");
  if (target == nullptr || !target->is_table()) fail("missing [target] table");
  const toml::Table& t = target->as_table();
  config.weights = number_array(*need(t, "weights", "target"), "weights");
  config.means = nested_array(*need(t, "means", "target"), "means");
  config.variances = nested_array(*need(t, "variances", "target"), "variances");
  const GaussianMixture gmm = config.target();  // validates the spec

  std::vector<std::pair<std::string, std::string>> resolved;
  const toml::Table* prov = nullptr;
  if (const toml::Value* v = toml::find_path(root, "constants")) {
    if (!v->is_table()) fail("[constants] must be a table");
    const toml::Table& c = v->as_table();
    auto opt = [&](const char* key, double& slot, double fallback,
                   const char* tag) {
      auto it = c.find(key);
      if (it != c.end()) {
        if (!it->second.is_number()) fail(std::string("'") + key + "' must be a number");
        slot = it->second.as_double();
      } else {
        slot = fallback;
        resolved.emplace_back(key, tag);
      }
    };
    opt("alpha0", config.constants.alpha0, 0.0, "user");
    opt("m0", config.constants.m0, 0.0, "user");
    opt("l0", config.constants.l0, 0.0, "user");
    opt("l1", config.constants.l1, 0.0, "user");
    opt("score_err", config.constants.score_err, -1.0, "derived");
    opt("x0_norm", config.constants.x0_norm, gmm.x0_l2_norm(), "computed");
    opt("score_at_origin", config.constants.score_at_origin,
        gmm.score_norm_at_origin(), "computed");
    if (const toml::Value* p = v->find("provenance")) {
      if (!p->is_table()) fail("[constants] provenance must be a table");
      prov = &p->as_table();
    }
  } else {
    config.constants.x0_norm = gmm.x0_l2_norm();
    config.constants.score_at_origin = gmm.score_norm_at_origin();
    config.constants.score_err = -1.0;
    resolved = {{"score_err", "derived"},
                {"x0_norm", "computed"},
                {"score_at_origin", "computed"}};
  }

  const toml::Value* schedule = toml::find_path(root, "schedule");
  if (schedule != nullptr && schedule->is_table()) {
    const toml::Table& s = schedule->as_table();
    config.family = need(s, "family", "schedule")->as_string();
    if (auto it = s.find("params"); it != s.end())
      config.schedule_params = number_array(it->second, "params");
    (void)config.schedule();  // validates family name and parameters
  } else if (require_run_sections) {
    fail("missing [schedule] table");
  }

  const toml::Value* sampler = toml::find_path(root, "sampler");
  if (sampler != nullptr && sampler->is_table()) {
    const toml::Table& sp = sampler->as_table();
    config.T = need_double(sp, "T", "sampler");
    config.K = need_int(sp, "K", "sampler");
    config.n = need_int(sp, "n", "sampler");
    if (auto it = sp.find("score"); it != sp.end())
      config.score = ScoreSpec::parse(it->second.as_string());
    if (auto it = sp.find("init"); it != sp.end())
      config.init = it->second.as_string();
    (void)config.init_mode();
  } else if (require_run_sections) {
    fail("missing [sampler] table");
  }

  if (const toml::Value* v = toml::find_path(root, "metrics")) {
    if (!v->is_table()) fail("[metrics] must be a table");
    const toml::Table& m = v->as_table();
    if (auto it = m.find("method"); it != m.end())
      config.w2_method = it->second.as_string();
    if (auto it = m.find("n_projections"); it != m.end())
      config.n_projections = static_cast<int>(it->second.as_integer());
  }

  // score_err sentinel from opt(): derive the budget from the score spec
  if (config.constants.score_err < 0.0)
    config.constants.score_err = config.score.perturbed ? config.score.eps : 0.0;
  finish_provenance(config.constants, prov, resolved);
  return config;
}

ExperimentConfig load_config_toml(const std::string& path,
                                  bool require_run_sections) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_toml(buffer.str(), require_run_sections);
}

void write_config(jsonw::JsonWriter& w, const ExperimentConfig& config) {
  w.begin_object();
  w.kv("seed", config.seed);
  w.kv("out_dir", config.out_dir);
  w.key("target").begin_object();
  w.kv("weights", config.weights);
  w.key("means").begin_array();
  for (const auto& row : config.means) {
    w.begin_array();
    for (double x : row) w.value(x);
    w.end_array();
  }
  w.end_array();
  w.key("variances").begin_array();
  for (const auto& row : config.variances) {
    w.begin_array();
    for (double x : row) w.value(x);
    w.end_array();
  }
  w.end_array();
  w.end_object();
  w.key("constants").begin_object();
  w.kv("alpha0", config.constants.alpha0);
  w.kv("m0", config.constants.m0);
  w.kv("l0", config.constants.l0);
  w.kv("l1", config.constants.l1);
  w.kv("score_err", config.constants.score_err);
  w.kv("x0_norm", config.constants.x0_norm);
  w.kv("score_at_origin", config.constants.score_at_origin);
  w.key("provenance").begin_object();
  for (const auto& [name, tag] : config.constants.provenance) w.kv(name, tag);
  w.end_object();
  w.end_object();
  w.key("schedule").begin_object();
  w.kv("family", config.family);
  w.kv("params", config.schedule_params);
  w.end_object();
  w.key("sampler").begin_object();
  w.kv("T", config.T);
  w.kv("K", config.K);
  w.kv("n", config.n);
  w.kv("score", config.score.str());
  w.kv("init", config.init);
  w.end_object();
  w.key("metrics").begin_object();
  w.kv("method", config.w2_method);
  w.kv("n_projections", config.n_projections);
  w.end_object();
  w.end_object();
}

std::string config_to_json(const ExperimentConfig& config) {
  jsonw::JsonWriter w;
  write_config(w, config);
  return w.str();
}

ExperimentConfig parse_config_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig config;
  config.seed = j.at("seed").get<uint64_t>();
  config.out_dir = j.at("out_dir").get<std::string>();
  const auto& t = j.at("target");
  config.weights = t.at("weights").get<std::vector<double>>();
  config.means = t.at("means").get<std::vector<std::vector<double>>>();
  config.variances = t.at("variances").get<std::vector<std::vector<double>>>();
  const auto& c = j.at("constants");
  config.constants.alpha0 = c.at("alpha0").get<double>();
  config.constants.m0 = c.at("m0").get<double>();
  config.constants.l0 = c.at("l0").get<double>();
  config.constants.l1 = c.at("l1").get<double>();
  config.constants.score_err = c.at("score_err").get<double>();
  config.constants.x0_norm = c.at("x0_norm").get<double>();
  config.constants.score_at_origin = c.at("score_at_origin").get<double>();
  for (const char* name : kConstantNames)
    config.constants.provenance.emplace_back(
        name, c.at("provenance").at(name).get<std::string>());
  const auto& s = j.at("schedule");
  config.family = s.at("family").get<std::string>();
  config.schedule_params = s.at("params").get<std::vector<double>>();
  const auto& sp = j.at("sampler");
  config.T = sp.at("T").get<double>();
  config.K = sp.at("K").get<long>();
  config.n = sp.at("n").get<long>();
  config.score = ScoreSpec::parse(sp.at("score").get<std::string>());
  config.init = sp.at("init").get<std::string>();
  const auto& m = j.at("metrics");
  config.w2_method = m.at("method").get<std::string>();
  config.n_projections = m.at("n_projections").get<int>();
  return config;
}

bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.seed == b.seed && a.out_dir == b.out_dir && a.weights == b.weights &&
         a.means == b.means && a.variances == b.variances &&
         a.constants.alpha0 == b.constants.alpha0 &&
         a.constants.m0 == b.constants.m0 && a.constants.l0 == b.constants.l0 &&
         a.constants.l1 == b.constants.l1 &&
         a.constants.score_err == b.constants.score_err &&
         a.constants.x0_norm == b.constants.x0_norm &&
         a.constants.score_at_origin == b.constants.score_at_origin &&
         a.constants.provenance == b.constants.provenance &&
         a.family == b.family && a.schedule_params == b.schedule_params &&
         a.T == b.T && a.K == b.K && a.n == b.n && a.score == b.score &&
         a.init == b.init && a.w2_method == b.w2_method &&
         a.n_projections == b.n_projections;
}

}  // namespace flowbound
