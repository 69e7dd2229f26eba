#include "fgmm/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

#include "fgmm/harness/csv.hpp"

namespace fgmm::harness {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::phase: return "phase";
    case ExperimentKind::bench: return "bench";
    case ExperimentKind::estimate: return "estimate";
    case ExperimentKind::order: return "order";
  }
  return "phase";
}
std::string to_string(Geometry g) { return g == Geometry::simplex ? "simplex" : "sphere"; }
std::string to_string(Orientation o) { return o == Orientation::aligned ? "aligned" : "random"; }
std::string to_string(WeightScheme w) { return w == WeightScheme::equal ? "equal" : "dirichlet"; }
std::string to_string(DesignScheme s) { return s == DesignScheme::ball ? "ball" : "directional"; }
std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::phase, ExperimentKind::bench, ExperimentKind::estimate, ExperimentKind::order})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown experiment kind '" + s + "' (phase|bench|estimate|order)");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + s + "' (csv|json)");
}

namespace {

Geometry parse_geometry(const std::string& s) {
  if (s == "simplex") return Geometry::simplex;
  if (s == "sphere") return Geometry::sphere;
  throw ConfigError("unknown geometry '" + s + "' (simplex|sphere)");
}
Orientation parse_orientation(const std::string& s) {
  if (s == "aligned") return Orientation::aligned;
  if (s == "random") return Orientation::random;
  throw ConfigError("unknown orientation '" + s + "' (aligned|random)");
}
WeightScheme parse_weights(const std::string& s) {
  if (s == "equal") return WeightScheme::equal;
  if (s == "dirichlet") return WeightScheme::dirichlet;
  throw ConfigError("unknown weight scheme '" + s + "' (equal|dirichlet)");
}
DesignScheme parse_design(const std::string& s) {
  if (s == "ball") return DesignScheme::ball;
  if (s == "directional") return DesignScheme::directional;
  throw ConfigError("unknown design '" + s + "' (ball|directional)");
}

struct Key {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
Key field(const char* name, T ExperimentConfig::*member) {
  Key key;
  key.name = name;
  key.get = [member](const ExperimentConfig& c) -> std::string {
    const T& v = c.*member;
    if constexpr (std::is_same_v<T, double>) return format_double(v);
    else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::string>) return v;
    else if constexpr (std::is_integral_v<T>) return std::to_string(v);
    else return to_string(v);
  };
  key.set = [member, name = std::string(name)](ExperimentConfig& c, const std::string& text) {
    T& v = c.*member;
    try {
      if constexpr (std::is_same_v<T, double>) v = parse_double(text, name);
      else if constexpr (std::is_same_v<T, bool>) v = parse_bool(text, name);
      else if constexpr (std::is_same_v<T, std::string>) v = text;
      else if constexpr (std::is_same_v<T, std::uint64_t>) v = parse_u64(text, name);
      else if constexpr (std::is_integral_v<T>) v = T(parse_int(text, name));
      else if constexpr (std::is_same_v<T, ExperimentKind>) v = parse_kind(text);
      else if constexpr (std::is_same_v<T, Geometry>) v = parse_geometry(text);
      else if constexpr (std::is_same_v<T, Orientation>) v = parse_orientation(text);
      else if constexpr (std::is_same_v<T, WeightScheme>) v = parse_weights(text);
      else if constexpr (std::is_same_v<T, DesignScheme>) v = parse_design(text);
      else if constexpr (std::is_same_v<T, OutputFormat>) v = parse_format(text);
      else if constexpr (std::is_same_v<T, OrderRule>) v = parse_order_rule(text);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name + ": " + e.what());
    }
  };
  return key;
}

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  static const std::vector<Key> table = {
      field("kind", &C::kind),
      field("k", &C::k),
      field("d", &C::d),
      field("sigma", &C::sigma),
      field("geometry", &C::geometry),
      field("delta", &C::delta),
      field("radius", &C::radius),
      field("orientation", &C::orientation),
      field("weights", &C::weights),
      field("design", &C::design),
      field("points_per_component", &C::points_per_component),
      field("points", &C::points),
      field("mean_points_per_component", &C::mean_points_per_component),
      field("ball_radius", &C::ball_radius),
      field("translations", &C::translations),
      field("directions", &C::directions),
      field("steps", &C::steps),
      field("tau", &C::tau),
      field("design_confidence", &C::design_confidence),
      field("log10_n_min", &C::log10_n_min),
      field("log10_n_max", &C::log10_n_max),
      field("log10_n_step", &C::log10_n_step),
      field("delta_min", &C::delta_min),
      field("delta_max", &C::delta_max),
      field("delta_step", &C::delta_step),
      field("trials", &C::trials),
      field("n_min", &C::n_min),
      field("n_max", &C::n_max),
      field("n_step", &C::n_step),
      field("run_em", &C::run_em),
      field("order_rule", &C::order_rule),
      field("epsilon", &C::epsilon),
      field("gamma", &C::gamma),
      field("max_steps", &C::max_steps),
      field("grad_tol", &C::grad_tol),
      field("dedup_delta", &C::dedup_delta),
      field("max_starts", &C::max_starts),
      field("pca_centered", &C::pca_centered),
      field("em_max_iter", &C::em_max_iter),
      field("em_tol", &C::em_tol),
      field("seed", &C::seed),
      field("workers", &C::workers),
      field("out", &C::out),
      field("format", &C::format),
      field("input", &C::input),
      field("design_points", &C::design_points),
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const Key& k : keys())
    if (k.name == name) return &k;
  return nullptr;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Key& k : keys()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  k->set(cfg, value);
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    std::string_view line = raw;
    // '#' opens a comment at line start or after whitespace, so paths may contain it.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const Key* k = find_key(key);
    if (!k) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      k->set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const Key& k : keys()) out[k.name] = k.get(cfg);
  return out;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return config_entries(a) == config_entries(b); }

GdSettings ExperimentConfig::gd_settings() const {
  GdSettings s;
  s.gamma = gamma;
  s.max_steps = int(max_steps);
  s.grad_tol = grad_tol;
  s.dedup_delta = dedup_delta;
  s.max_starts = max_starts;
  return s;
}

void ExperimentConfig::validate() const {
  check(k >= 1 && d >= 1, "k and d must be >= 1");
  check(sigma >= 0 && std::isfinite(sigma), "sigma must be finite and >= 0");
  check(delta >= 0 && radius >= 0, "delta and radius must be >= 0");
  check(points_per_component >= 1 && mean_points_per_component >= 1, "points per component must be >= 1");
  check(points >= 0 && translations >= 0 && directions >= 0 && steps >= 0, "counts must be >= 0");
  check(ball_radius >= 0, "ball_radius must be >= 0");
  check(tau >= 0, "tau must be >= 0");
  check(design_confidence > 0 && design_confidence < 1, "design_confidence must be in (0, 1)");
  check(log10_n_step > 0 && delta_step > 0 && n_step > 0, "step sizes must be > 0");
  check(log10_n_min <= log10_n_max && delta_min <= delta_max && n_min <= n_max, "ranges must be nonempty");
  check(n_min >= 1 && log10_n_min >= 0, "sample sizes must be >= 1");
  check(trials >= 1, "trials must be >= 1");
  check(epsilon > 0, "epsilon must be > 0");
  check(gamma > 0 && max_steps >= 1 && grad_tol >= 0 && dedup_delta >= 0 && max_starts >= 0,
        "invalid descent settings");
  check(em_max_iter >= 1 && em_tol >= 0, "invalid EM settings");
  check(workers >= 1, "workers must be >= 1");
}

std::vector<double> grid_axis(double lo, double hi, double step) {
  require(step > 0 && hi >= lo, "grid_axis: need step > 0 and hi >= lo");
  const Index intervals = Index(std::llround((hi - lo) / step));
  if (intervals == 0) return {lo};
  std::vector<double> out(static_cast<std::size_t>(intervals + 1));
  for (Index i = 0; i <= intervals; ++i) out[i] = lo + (hi - lo) * double(i) / double(intervals);
  out.back() = hi;
  return out;
}

std::vector<Index> n_schedule(const ExperimentConfig& cfg) {
  std::vector<Index> out;
  for (Index n = cfg.n_min; n <= cfg.n_max; n += cfg.n_step) out.push_back(n);
  return out;
}

}  // namespace fgmm::harness
