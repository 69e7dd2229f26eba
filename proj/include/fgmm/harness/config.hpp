#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fgmm/music.hpp"
#include "fgmm/order.hpp"
#include "fgmm/types.hpp"

namespace fgmm::harness {

enum class ExperimentKind { phase, bench, estimate, order };
enum class Geometry { simplex, sphere };
enum class Orientation { aligned, random };
enum class WeightScheme { equal, dirichlet };
enum class DesignScheme { ball, directional };
enum class OutputFormat { csv, json };

/// Every field maps to one config key of the same name (see README).
/// Zero in a count field means "derive it".
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::phase;

  // model
  Index k = 3;
  Index d = 10;
  double sigma = 1.0;
  Geometry geometry = Geometry::simplex;
  double delta = 7.0;   // simplex edge; also the separation guess for tau
  double radius = 4.0;  // sphere radius
  // simplex placement: the first k-1 axes, or a fresh Haar rotation per trial
  Orientation orientation = Orientation::random;
  WeightScheme weights = WeightScheme::equal;

  // designs: the order stage lives in R^d, the mean stage in R^k (or R^d when k >= d)
  DesignScheme design = DesignScheme::ball;
  Index points_per_component = 3;       // order-stage L = this * k
  Index points = 0;                     // explicit order-stage L
  Index mean_points_per_component = 5;  // mean-stage L = this * k
  double ball_radius = 0.5;
  Index translations = 0;  // M+1; 0 means working dimension + 1
  Index directions = 0;    // J; 0 means ceil(log2(1 / design_confidence))
  Index steps = 0;         // S; 0 means k
  double tau = 0.0;        // 0 means pi / (2 delta)
  double design_confidence = 0.1;

  // phase grid
  double log10_n_min = 3.0;
  double log10_n_max = 5.0;
  double log10_n_step = 0.0513;
  double delta_min = 2.0;
  double delta_max = 7.0;
  double delta_step = 0.128;
  Index trials = 96;

  // bench schedule
  Index n_min = 5000;
  Index n_max = 50000;
  Index n_step = 5000;
  bool run_em = true;

  // solvers
  OrderRule order_rule = OrderRule::ratio_thresholded;
  double epsilon = 1e-3;
  double gamma = 0.5;
  Index max_steps = 50;
  double grad_tol = 1e-8;
  double dedup_delta = 1.0;
  Index max_starts = 0;
  bool pca_centered = true;
  Index em_max_iter = 1000;
  double em_tol = 1e-6;

  // run
  std::uint64_t seed = 1;
  Index workers = 1;
  std::string out = "out";
  OutputFormat format = OutputFormat::csv;
  std::string input;
  std::string design_points;  // optional CSV of explicit order-stage points (one per row)

  void validate() const;
  GdSettings gd_settings() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string to_string(ExperimentKind kind);
std::string to_string(Geometry g);
std::string to_string(Orientation o);
std::string to_string(WeightScheme w);
std::string to_string(DesignScheme s);
std::string to_string(OutputFormat f);
ExperimentKind parse_kind(const std::string& s);
OutputFormat parse_format(const std::string& s);

/// `key = value` lines; `#` starts a comment. Keys not in the schema,
/// duplicates, and ill-typed values are errors that name the line.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one `key=value` override (used by the CLI).
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);
std::map<std::string, std::string> config_entries(const ExperimentConfig& cfg);
const std::vector<std::string>& config_keys();

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Grid axis as a linspace: the step is snapped so both end points are hit.
std::vector<double> grid_axis(double lo, double hi, double step);
std::vector<Index> n_schedule(const ExperimentConfig& cfg);

}  // namespace fgmm::harness
