#include "hoplab/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace hoplab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

const std::vector<std::string> kKnownKeys = {
    "experiment",  "dimension",   "radius",      "alpha",
    "pathloss_kind", "pathloss_shift", "gamma",  "beta",
    "kmax",        "delta_center", "delta_radius", "a",
    "mu_scale",    "lambda",      "seed",        "out_dir",
    "threads",     "gammas",      "profile_points", "n_x0",
    "steps",       "burnin",      "thin",        "kernel",
    "c0",          "t_max",       "runs",        "r0_list",
    "k_budget",    "mc_budget",   "grid_n",      "inner_grid",
    "game_json",   "field_tol",   "r0_scale",
};

const std::map<std::string, std::vector<std::string>> kRequired = {
    {"limit-profiles",
     {"dimension", "radius", "alpha", "pathloss_kind", "gamma", "kmax"}},
    {"relay-map",
     {"dimension", "radius", "alpha", "pathloss_kind", "gamma", "kmax"}},
    {"mcmc",
     {"dimension", "radius", "alpha", "pathloss_kind", "gamma", "beta",
      "kmax", "lambda", "steps"}},
    {"anneal",
     {"dimension", "radius", "alpha", "pathloss_kind", "gamma", "beta",
      "kmax", "lambda", "t_max"}},
    {"asymptotics", {"alpha", "gamma"}},
    {"dense-subarea",
     {"dimension", "radius", "alpha", "pathloss_kind", "gamma", "kmax",
      "delta_center", "delta_radius"}},
    {"game", {"game_json"}},
};

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  return kKnownKeys;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                            " is not key = value",
                        stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) ==
        kKnownKeys.end()) {
      throw ConfigError("unknown config key", key);
    }
    config.values_[key] = value;
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) {
    out << key << " = " << value << "\n";
  }
  return out.str();
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key", key);
  return it->second;
}

double ExperimentConfig::number(const std::string& key) const {
  const std::string& text = raw(key);
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) throw ConfigError("not a number", key);
  return value;
}

double ExperimentConfig::number_or(const std::string& key,
                                   double fallback) const {
  return has(key) ? number(key) : fallback;
}

int ExperimentConfig::integer(const std::string& key) const {
  const std::string& text = raw(key);
  std::size_t used = 0;
  const int value = std::stoi(text, &used);
  if (used != text.size()) throw ConfigError("not an integer", key);
  return value;
}

int ExperimentConfig::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string ExperimentConfig::text_or(const std::string& key,
                                      const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

std::vector<double> ExperimentConfig::number_list(
    const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(raw(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (t == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (!t.empty()) {
      out.push_back(std::stod(t));
    }
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) ==
      kKnownKeys.end()) {
    throw ConfigError("unknown config key", key);
  }
  values_[key] = value;
}

NetworkGeometry ExperimentConfig::geometry() const {
  NetworkGeometry geom;
  geom.dimension = integer("dimension");
  geom.radius = number("radius");
  geom.gamma = number("gamma");
  geom.beta = number_or("beta", 0.0);
  geom.k_max = integer("kmax");
  geom.mu_scale = number_or("mu_scale", 1.0);
  if (has("delta_radius")) {
    DenseSubarea sub;
    sub.radius = number("delta_radius");
    sub.weight = number_or("a", 0.0);
    if (has("delta_center")) {
      const std::vector<double> c = number_list("delta_center");
      sub.center = Vec2(c.at(0), c.size() > 1 ? c[1] : 0.0);
    }
    geom.subarea = sub;
  }
  geom.validate();
  return geom;
}

PathLossModel ExperimentConfig::pathloss() const {
  const std::string kind = raw("pathloss_kind");
  const double alpha = number("alpha");
  if (kind == "ideal_hertz") return PathLossModel::ideal_hertz(alpha);
  if (kind == "shifted_power") {
    return PathLossModel::shifted_power(number_or("pathloss_shift", 1.0),
                                        alpha);
  }
  if (kind == "exponential") return PathLossModel::exponential(alpha);
  throw ConfigError("unknown path loss kind", kind);
}

std::string ExperimentConfig::experiment() const {
  const std::string name = raw("experiment");
  validate_for(name);
  return name;
}

void ExperimentConfig::validate_for(const std::string& experiment) const {
  const auto it = kRequired.find(experiment);
  if (it == kRequired.end()) {
    throw ConfigError("unknown experiment", experiment);
  }
  for (const std::string& key : it->second) {
    if (!has(key)) throw ConfigError("missing required key", key);
  }
}

}  // namespace hoplab
