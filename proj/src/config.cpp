#include "cpip/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cpip/errors.hpp"
#include "cpip/simulation.hpp"

namespace cpip {

namespace {

std::vector<double> number_array(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(field + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

PolicyConfig parse_policy_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  PolicyConfig cfg;

  if (!doc.contains("nu")) throw ConfigError("nu: required field is missing");
  const std::vector<double> nu = number_array(doc.at("nu"), "nu");
  const int k = static_cast<int>(nu.size());
  cfg.tilt.nu = Simplex(nu);

  if (doc.contains("actions")) {
    const auto& actions = doc.at("actions");
    if (!actions.is_array()) throw ConfigError("actions: expected an array of labels");
    for (const auto& a : actions) {
      if (!a.is_string()) throw ConfigError("actions: labels must be strings");
      cfg.tilt.actions.labels.push_back(a.get<std::string>());
    }
    if (cfg.tilt.actions.size() != k)
      throw ConfigError("actions: label count must match nu length");
  } else {
    cfg.tilt.actions = ActionSpace::indexed(k);
  }

  if (!doc.contains("cost")) throw ConfigError("cost: required field is missing");
  const auto& cost = doc.at("cost");
  if (!cost.is_array() || cost.empty()) throw ConfigError("cost: expected an array");
  if (cost.front().is_array()) {
    std::vector<double> mat;
    if (static_cast<int>(cost.size()) != k) throw ConfigError("cost: matrix must be KxK");
    for (const auto& row : cost) {
      const std::vector<double> r = number_array(row, "cost");
      if (static_cast<int>(r.size()) != k) throw ConfigError("cost: matrix must be KxK");
      mat.insert(mat.end(), r.begin(), r.end());
    }
    cfg.tilt.cost = CostSpec::matrix(std::move(mat), k);
  } else {
    cfg.tilt.cost = CostSpec::destination(number_array(cost, "cost"));
  }

  if (!doc.contains("delta")) throw ConfigError("delta: required field is missing");
  const auto& delta = doc.at("delta");
  if (delta.is_number()) {
    cfg.tilt.delta_grid = {delta.get<double>()};
  } else if (delta.is_array()) {
    cfg.tilt.delta_grid = number_array(delta, "delta");
  } else if (delta.is_object()) {
    if (!delta.contains("min") || !delta.contains("max") || !delta.contains("points"))
      throw ConfigError("delta: range form needs min, max, and points");
    const double lo = delta.at("min").get<double>();
    const double hi = delta.at("max").get<double>();
    const int points = delta.at("points").get<int>();
    if (points < 1) throw ConfigError("delta: points must be positive");
    if (!(hi > lo) && points > 1) throw ConfigError("delta: max must exceed min");
    cfg.tilt.delta_grid = linspace(lo, hi, points);
  } else {
    throw ConfigError("delta: expected a number, array, or {min, max, points}");
  }

  if (doc.contains("options")) {
    const auto& o = doc.at("options");
    if (!o.is_object()) throw ConfigError("options: expected an object");
    cfg.options.k_folds = o.value("k_folds", cfg.options.k_folds);
    cfg.options.bootstrap_draws = o.value("bootstrap", cfg.options.bootstrap_draws);
    cfg.options.alpha = o.value("alpha", cfg.options.alpha);
    cfg.options.seed = o.value("seed", cfg.options.seed);
    cfg.options.prop_floor = o.value("prop_floor", cfg.options.prop_floor);
    cfg.options.positivity_threshold =
        o.value("positivity_threshold", cfg.options.positivity_threshold);
    if (cfg.options.k_folds < 2) throw ConfigError("options.k_folds: must be at least 2");
    if (!(cfg.options.alpha > 0.0 && cfg.options.alpha < 1.0))
      throw ConfigError("options.alpha: must lie in (0, 1)");
    if (cfg.options.prop_floor < 0.0)
      throw ConfigError("options.prop_floor: must be nonnegative");
  }

  cfg.tilt.validate();
  return cfg;
}

PolicyConfig parse_policy_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_policy_config(doc);
}

PolicyConfig load_policy_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy_config_text(buf.str());
}

nlohmann::json policy_config_to_json(const PolicyConfig& cfg) {
  nlohmann::json j;
  j["actions"] = cfg.tilt.actions.labels;
  j["nu"] = cfg.tilt.nu.probs;
  if (cfg.tilt.cost.is_destination()) {
    j["cost"] = cfg.tilt.cost.dest;
  } else {
    const int k = cfg.tilt.cost.actions();
    std::vector<std::vector<double>> mat;
    for (int i = 0; i < k; ++i) {
      std::vector<double> row;
      for (int jj = 0; jj < k; ++jj) row.push_back(cfg.tilt.cost.at(i, jj));
      mat.push_back(std::move(row));
    }
    j["cost"] = mat;
  }
  j["delta"] = cfg.tilt.delta_grid;
  j["options"] = {{"k_folds", cfg.options.k_folds},
                  {"bootstrap", cfg.options.bootstrap_draws},
                  {"alpha", cfg.options.alpha},
                  {"seed", cfg.options.seed},
                  {"prop_floor", cfg.options.prop_floor},
                  {"positivity_threshold", cfg.options.positivity_threshold}};
  return j;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const PolicyConfig& cfg) {
  const std::string canon = policy_config_to_json(cfg).dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return std::string(buf);
}

}  // namespace cpip
