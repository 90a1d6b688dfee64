#include "dtnlab/experiments.hpp"

#include "dtnlab/fields.hpp"
#include "dtnlab/metric.hpp"
#include "dtnlab/semilinear.hpp"
#include "dtnlab/xray.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dtnlab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment", "output", "mesh", "mesh_file", "metric", "potential", "trace", "nonlinearity", "t_k", "m", "eps_max",
      "eigen_count", "zeta_count", "seed", "l_max", "xray_boundary", "xray_angles", "xray_field", "waist_metric"};
  return keys;
}

const std::set<std::string>& catalog_keys() {
  static const std::set<std::string> keys = {"mesh", "metric", "potential", "trace", "nonlinearity", "xray_field",
                                             "waist_metric"};
  return keys;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"dtn",      "eigs",      "conformal", "rigidity", "convexity",
                                                 "semilinear", "holomorphy", "xray",      "all"};
  return names;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (key.rfind("tol.", 0) != 0 && known_keys().count(key) == 0) throw ConfigError("unknown config key '" + key + "'");
    if (cfg.entries.count(key)) throw ConfigError("duplicate config key '" + key + "'");
    cfg.entries[key] = value;
  }
  if (!cfg.has("experiment")) throw ConfigError("missing required key 'experiment'");
  cfg.experiment = cfg.entries.at("experiment");
  if (cfg.has("seed")) {
    const std::string& s = cfg.entries.at("seed");
    std::uint64_t seed = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("key 'seed': not an unsigned integer");
    cfg.seed = seed;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto it = entries.find(key);
  if (it == entries.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
  }
}

int ExperimentConfig::integer(const std::string& key, int fallback) const {
  const double v = number(key, fallback);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "': not an integer");
  return static_cast<int>(v);
}

double ExperimentConfig::tolerance(const std::string& check_id, double fallback) const {
  std::size_t best = 0;
  double value = fallback;
  for (const auto& [key, raw] : entries) {
    if (key.rfind("tol.", 0) != 0) continue;
    const std::string prefix = key.substr(4);
    if (check_id.rfind(prefix, 0) == 0 && prefix.size() >= best) {
      best = prefix.size();
      value = number(key, fallback);
    }
  }
  return value;
}

void ExperimentConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("key 'experiment': unknown experiment '" + experiment + "'");
  for (const auto& [key, raw] : entries) {
    if (key.rfind("tol.", 0) == 0) {
      if (number(key, 0.0) < 0.0) throw ConfigError("key '" + key + "': tolerance must be nonnegative");
    }
  }
  for (const char* key : {"t_k", "eps_max", "l_max"}) number(key, 1.0);
  for (const char* key : {"m", "eigen_count", "zeta_count", "xray_boundary", "xray_angles"}) {
    if (has(key) && integer(key, 1) < 1) throw ConfigError(std::string("key '") + key + "': must be positive");
  }
  if (has("m") && integer("m", 2) < 2) throw ConfigError("key 'm': must be at least 2");

  // Catalog keys are checked against a small probe mesh.
  const TriangleMesh probe = generate_mesh(ShapeSpec{}, 0.4);
  for (const auto& key : catalog_keys()) {
    if (!has(key)) continue;
    try {
      const CatalogSpec spec = CatalogSpec::parse(entries.at(key));
      if (key == "mesh") {
        const ShapeSpec shape = ShapeSpec::from_catalog(spec);
        if (spec.has("h") && !(spec.get("h", 0.1) > 0.0 && spec.get("h", 0.1) < 0.5 * shape.diameter()))
          throw ContractError("mesh resolution h outside (0, diameter / 2)");
      } else if (key == "metric" || key == "waist_metric") {
        MetricField::from_spec(spec);
      } else if (key == "potential") {
        make_potential(spec, probe);
      } else if (key == "trace") {
        make_trace(spec, probe);
      } else if (key == "nonlinearity") {
        if (spec.key == "power") {
          spec.require_only({"m"});
        } else {
          ScalarProfile::from_spec(spec);
        }
      } else if (key == "xray_field") {
        make_plane_field(spec);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  if (has("mesh_file") && !std::filesystem::exists(entries.at("mesh_file")))
    throw ConfigError("key 'mesh_file': file not found '" + entries.at("mesh_file") + "'");
}

}  // namespace dtnlab
