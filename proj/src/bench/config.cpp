#include "srld/bench/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace srld::bench {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config: " + field + ": " + why);
}

// `label` is the dotted path used in diagnostics; `key` is the bare field.
const json& require(const json& j, const std::string& key,
                    const std::string& label) {
  if (!j.contains(key)) fail(label, "missing required field");
  return j.at(key);
}

const json& require(const json& j, const std::string& key) {
  return require(j, key, key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

Eigen::Index integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<Eigen::Index>();
}

Eigen::VectorXd vector_field(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) fail(field, "expected an array of numbers");
    v[i++] = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_field(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected an array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Eigen::MatrixXd m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    const Eigen::VectorXd v = vector_field(row, field);
    if (cols < 0) {
      cols = v.size();
      m.resize(rows, cols);
    } else if (v.size() != cols) {
      fail(field, "ragged rows");
    }
    m.row(r++) = v.transpose();
  }
  return m;
}

}  // namespace

TargetSpec parse_target_json(const json& j) {
  if (j.is_string()) return parse_target_inline(j.get<std::string>());
  if (!j.is_object()) fail("target", "expected an object or inline string");
  const std::string variant = require(j, "variant", "target.variant").get<std::string>();
  if (variant == "banana2d") return Banana2dSpec{};
  if (variant == "isotropic_gaussian") {
    IsotropicGaussianSpec s;
    s.dim = integer(require(j, "dim", "target.dim"), "target.dim");
    s.variance = j.contains("variance")
                     ? number(j.at("variance"), "target.variance")
                     : 1.0;
    return s;
  }
  if (variant == "gauss_mixture") {
    GaussMixtureSpec s;
    const json& means = require(j, "means", "target.means");
    if (!means.is_array() || means.empty())
      fail("target.means", "expected an array of mean vectors");
    for (const auto& m : means)
      s.means.push_back(vector_field(m, "target.means"));
    for (const auto& w : require(j, "weights", "target.weights"))
      s.weights.push_back(w.get<double>());
    s.variance = j.contains("variance")
                     ? number(j.at("variance"), "target.variance")
                     : 1.0;
    return s;
  }
  if (variant == "bayes_linreg") {
    BayesLinregSpec s;
    s.design = matrix_field(require(j, "design", "target.design"), "target.design");
    s.responses =
        vector_field(require(j, "responses", "target.responses"), "target.responses");
    s.prior_precision =
        j.contains("prior_precision")
            ? number(j.at("prior_precision"), "target.prior_precision")
            : 1.0;
    s.noise_precision =
        j.contains("noise_precision")
            ? number(j.at("noise_precision"), "target.noise_precision")
            : 1.0;
    return s;
  }
  fail("target.variant", "unknown variant '" + variant + "'");
}

json target_to_json(const TargetSpec& spec) {
  json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banana2dSpec>) {
          j["variant"] = "banana2d";
        } else if constexpr (std::is_same_v<T, IsotropicGaussianSpec>) {
          j["variant"] = "isotropic_gaussian";
          j["dim"] = s.dim;
          j["variance"] = s.variance;
        } else if constexpr (std::is_same_v<T, GaussMixtureSpec>) {
          j["variant"] = "gauss_mixture";
          json means = json::array();
          for (const auto& m : s.means) {
            json row = json::array();
            for (Eigen::Index i = 0; i < m.size(); ++i) row.push_back(m[i]);
            means.push_back(row);
          }
          j["means"] = means;
          j["weights"] = s.weights;
          j["variance"] = s.variance;
        } else {
          j["variant"] = "bayes_linreg";
          json design = json::array();
          for (Eigen::Index r = 0; r < s.design.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < s.design.cols(); ++c)
              row.push_back(s.design(r, c));
            design.push_back(row);
          }
          j["design"] = design;
          json resp = json::array();
          for (Eigen::Index i = 0; i < s.responses.size(); ++i)
            resp.push_back(s.responses[i]);
          j["responses"] = resp;
          j["prior_precision"] = s.prior_precision;
          j["noise_precision"] = s.noise_precision;
        }
      },
      spec);
  return j;
}

TargetSpec parse_target_inline(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        fail("target", "expected key=value in '" + item + "'");
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        fail("target", "cannot parse value in '" + item + "'");
      }
    }
  }
  auto take = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
  };
  TargetSpec spec;
  if (head == "banana2d" || head == "banana") {
    spec = Banana2dSpec{};
  } else if (head == "gaussian") {
    IsotropicGaussianSpec s;
    s.dim = static_cast<Eigen::Index>(take("d", 2));
    s.variance = take("var", 1.0);
    spec = s;
  } else if (head == "mixture") {
    const auto d = static_cast<Eigen::Index>(take("d", 2));
    spec = symmetric_mixture(d, take("mode", 1.0), take("var", 1.0));
  } else {
    fail("target", "unknown inline target '" + head +
                       "' (expected banana2d, gaussian or mixture)");
  }
  if (!params.empty())
    fail("target", "unknown parameter '" + params.begin()->first + "'");
  return spec;
}

MethodEntry parse_method_json(const json& j) {
  if (!j.is_object()) fail("methods[]", "expected an object");
  MethodEntry e;
  const std::string kind_text =
      j.contains("kind") ? j.at("kind").get<std::string>()
                         : require(j, "name", "methods[].name").get<std::string>();
  e.kind = parse_chain_kind(kind_text);
  e.name = j.contains("name") ? j.at("name").get<std::string>()
                              : std::string(to_string(e.kind));
  SamplerConfig& c = e.cfg;
  if (j.contains("step_size"))
    c.step_size = number(j.at("step_size"), "methods[].step_size");
  if (j.contains("alpha")) c.alpha = number(j.at("alpha"), "methods[].alpha");
  if (j.contains("window"))
    c.window_size = integer(j.at("window"), "methods[].window");
  if (j.contains("thinning"))
    c.thinning = integer(j.at("thinning"), "methods[].thinning");
  if (j.contains("total_steps"))
    c.total_steps = integer(j.at("total_steps"), "methods[].total_steps");
  if (j.contains("keep_every"))
    c.keep_every = integer(j.at("keep_every"), "methods[].keep_every");
  if (j.contains("bandwidth")) {
    try {
      c.bandwidth = BandwidthPolicy::parse(j.at("bandwidth").get<std::string>());
    } catch (const std::exception& ex) {
      fail("methods[].bandwidth", ex.what());
    }
  }
  if (e.kind == ChainKind::general) {
    e.diffusion = matrix_field(require(j, "diffusion", "methods[].diffusion"),
                               "methods[].diffusion");
    e.curl = matrix_field(require(j, "curl", "methods[].curl"), "methods[].curl");
  }
  return e;
}

json method_to_json(const MethodEntry& entry) {
  json j;
  j["name"] = entry.name;
  j["kind"] = to_string(entry.kind);
  j["step_size"] = entry.cfg.step_size;
  j["alpha"] = entry.cfg.alpha;
  j["window"] = entry.cfg.window_size;
  j["thinning"] = entry.cfg.thinning;
  j["total_steps"] = entry.cfg.total_steps;
  j["keep_every"] = entry.cfg.keep_every;
  j["bandwidth"] = entry.cfg.bandwidth.to_string();
  if (entry.diffusion) {
    json d = json::array();
    for (Eigen::Index r = 0; r < entry.diffusion->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < entry.diffusion->cols(); ++c)
        row.push_back((*entry.diffusion)(r, c));
      d.push_back(row);
    }
    j["diffusion"] = d;
    json q = json::array();
    for (Eigen::Index r = 0; r < entry.curl->rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < entry.curl->cols(); ++c)
        row.push_back((*entry.curl)(r, c));
      q.push_back(row);
    }
    j["curl"] = q;
  }
  return j;
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  ExperimentConfig config;
  config.target = parse_target_json(require(j, "target"));
  const json& methods = require(j, "methods");
  if (!methods.is_array() || methods.empty())
    fail("methods", "expected a non-empty array");
  for (const auto& m : methods) config.methods.push_back(parse_method_json(m));
  if (j.contains("pairing")) {
    const std::string p = j.at("pairing").get<std::string>();
    if (p == "independent")
      config.pairing = Pairing::independent;
    else if (p == "coupled-noise")
      config.pairing = Pairing::coupled_noise;
    else
      fail("pairing", "expected 'independent' or 'coupled-noise', got '" + p +
                          "'");
  }
  const json& seeds = require(j, "seeds");
  if (!seeds.is_array() || seeds.empty())
    fail("seeds", "expected a non-empty array of integers");
  for (const auto& s : seeds) {
    if (!s.is_number_integer()) fail("seeds", "expected integers");
    config.seeds.push_back(s.get<std::uint64_t>());
  }
  if (j.contains("reference")) {
    const json& ref = j.at("reference");
    if (ref.is_object() && ref.contains("count"))
      config.reference_count = integer(ref.at("count"), "reference.count");
    else if (ref.is_number_integer())
      config.reference_count = ref.get<Eigen::Index>();
    else
      fail("reference", "expected {\"count\": n}");
  }
  if (j.contains("outputs"))
    config.out_dir = j.at("outputs").get<std::string>();
  if (j.contains("reporting")) {
    const json& r = j.at("reporting");
    if (r.contains("keep_every"))
      config.reporting.keep_every =
          integer(r.at("keep_every"), "reporting.keep_every");
    if (r.contains("max_lag"))
      config.reporting.max_lag = integer(r.at("max_lag"), "reporting.max_lag");
    if (r.contains("metric_sample_cap"))
      config.reporting.metric_sample_cap =
          integer(r.at("metric_sample_cap"), "reporting.metric_sample_cap");
  }
  if (j.contains("init"))
    config.init = vector_field(j.at("init"), "init");
  if (j.contains("match_step_sizes")) {
    const json& m = j.at("match_step_sizes");
    config.match_pilot_steps =
        integer(require(m, "pilot_steps", "match_step_sizes.pilot_steps"),
                "match_step_sizes.pilot_steps");
  }
  validate(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

void validate(const ExperimentConfig& config) {
  srld::validate(config.target);
  std::set<std::string> names;
  for (const auto& m : config.methods) {
    if (!names.insert(m.name).second)
      fail("methods", "duplicate method name '" + m.name + "'");
    srld::validate(m.cfg, m.kind);
  }
  if (config.pairing == Pairing::coupled_noise) {
    if (config.methods.size() != 2)
      fail("pairing", "coupled-noise pairing requires exactly 2 methods");
    if (config.methods[0].cfg.total_steps != config.methods[1].cfg.total_steps)
      fail("pairing", "coupled-noise methods must share total_steps");
  }
  if (config.reference_count < 2)
    fail("reference.count", "must be >= 2");
  if (config.reporting.keep_every < 1) fail("reporting.keep_every", ">= 1");
  if (config.reporting.max_lag < 1) fail("reporting.max_lag", ">= 1");
  if (config.reporting.metric_sample_cap < 2)
    fail("reporting.metric_sample_cap", ">= 2");
  if (config.match_pilot_steps && *config.match_pilot_steps < 1000)
    fail("match_step_sizes.pilot_steps", "must be >= 1000");
}

}  // namespace srld::bench
