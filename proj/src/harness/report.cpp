#include "fgmm/harness/report.hpp"

#include <fstream>
#include <sstream>

#include "fgmm/harness/csv.hpp"

namespace fgmm::harness {

namespace {

Json vector_json(const Vectord& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json columns_json(const Matrixd& m) {
  Json out = Json::array();
  for (Index j = 0; j < m.cols(); ++j) out.push_back(vector_json(m.col(j)));
  return out;
}

Json timings_json(const PhaseTimings& t) {
  return {{"measure_ms", t.measure_ms},
          {"svd_ms", t.svd_ms},
          {"descent_ms", t.descent_ms},
          {"weights_ms", t.weights_ms},
          {"em_ms", t.em_ms}};
}

std::filesystem::path prepare(const ExperimentConfig& cfg, const std::string& name) {
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw OutputError("cannot create output directory '" + dir.string() + "'");
  return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

template <typename F>
std::string capture(F&& f) {
  std::ostringstream s;
  f(s);
  return s.str();
}

}  // namespace

Json config_json(const ExperimentConfig& cfg) {
  Json out = Json::object();
  for (const auto& [key, value] : config_entries(cfg)) out[key] = value;
  return out;
}

Json order_json(const OrderReport& rep) {
  const auto& s = rep.selection;
  return {{"k_hat", s.k_hat},
          {"rule", to_string(s.rule)},
          {"epsilon", s.epsilon},
          {"below_floor", s.below_floor},
          {"singular_values", vector_json(s.singular_values)},
          {"ratios", vector_json(s.ratios)},
          {"L", rep.L},
          {"translations", rep.translation_count},
          {"radius_bound", rep.radius_bound},
          {"n", rep.n},
          {"d", rep.d},
          {"timings", timings_json(rep.timings)}};
}

Json estimate_json(const EstimateReport& rep) {
  const FourierFit& fit = rep.fit;
  Json out = {{"order", order_json(rep.order)},
              {"k_hat", rep.order.selection.k_hat},
              {"centers", columns_json(fit.centers)},
              {"weights", vector_json(fit.weights)},
              {"mean_stage_spectrum", vector_json(fit.spectrum)},
              {"used_pca", fit.used_pca},
              {"starts_tried", fit.starts},
              {"starts_exhausted", fit.exhausted},
              {"timings", timings_json(fit.timings)}};
  if (fit.weight_info) {
    out["weight_objective"] = fit.weight_info->objective;
    out["weight_kkt_residual"] = fit.weight_info->kkt_residual;
    out["weight_gram_condition"] = fit.weight_info->gram_condition;
    out["weight_ill_conditioned"] = fit.weight_info->ill_conditioned;
    out["weight_degenerate"] = fit.weight_info->degenerate;
  }
  return out;
}

Json phase_json(const PhaseGridResult& grid) {
  Json cells = Json::array();
  for (const PhaseCell& c : grid.cells)
    cells.push_back({{"k", c.k},
                     {"d", c.d},
                     {"delta", c.delta},
                     {"log10_n", c.log10_n},
                     {"n", c.n},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"success_rate", c.success_rate}});
  return {{"deltas", grid.deltas}, {"log10_n", grid.log10_n}, {"cells", cells}};
}

Json bench_json(const BenchResult& bench) {
  Json rows = Json::array();
  for (const BenchRow& r : bench.rows)
    rows.push_back({{"method", r.method},
                    {"k", r.k},
                    {"d", r.d},
                    {"n", r.n},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"w1", r.w1},
                    {"runtime_ms", r.runtime_ms}});
  Json summary = Json::array();
  for (const BenchSummary& s : bench.summary)
    summary.push_back({{"method", s.method},
                       {"n", s.n},
                       {"trials", s.trials},
                       {"w1_mean", s.w1_mean},
                       {"w1_std", s.w1_std},
                       {"runtime_mean_ms", s.runtime_mean_ms}});
  return {{"rows", rows}, {"summary", summary}, {"em_loglik_monotone", bench.em_monotone}};
}

Heatmap phase_heatmap(const PhaseGridResult& grid, const ExperimentConfig& cfg) {
  Heatmap map;
  map.x = grid.log10_n;
  map.y = grid.deltas;
  map.values.resize(Index(grid.deltas.size()), Index(grid.log10_n.size()));
  for (Index r = 0; r < map.values.rows(); ++r)
    for (Index c = 0; c < map.values.cols(); ++c) map.values(r, c) = grid.cell(r, c).success_rate;
  map.title = "order selection success rate, k = " + std::to_string(cfg.k) + ", d = " + std::to_string(cfg.d) +
              ", " + std::to_string(cfg.trials) + " trials per cell";
  map.x_label = "log10 n";
  map.y_label = "separation";
  return map;
}

std::vector<std::filesystem::path> write_phase_outputs(const PhaseGridResult& grid, const ExperimentConfig& cfg) {
  std::vector<std::filesystem::path> out;
  if (cfg.format == OutputFormat::csv) {
    out.push_back(prepare(cfg, "phase.csv"));
    write_file(out.back(), capture([&](std::ostream& s) { write_phase_csv(s, grid.cells); }));
  } else {
    out.push_back(prepare(cfg, "phase.json"));
    write_file(out.back(), phase_json(grid).dump(2) + "\n");
  }
  out.push_back(prepare(cfg, "phase_trials.csv"));
  write_file(out.back(), capture([&](std::ostream& s) { write_trial_csv(s, grid.trials); }));
  out.push_back(prepare(cfg, "phase.svg"));
  write_file(out.back(), render_svg(phase_heatmap(grid, cfg)));
  return out;
}

std::vector<std::filesystem::path> write_bench_outputs(const BenchResult& bench, const ExperimentConfig& cfg) {
  std::vector<std::filesystem::path> out;
  if (cfg.format == OutputFormat::csv) {
    out.push_back(prepare(cfg, "bench.csv"));
    write_file(out.back(), capture([&](std::ostream& s) { write_bench_csv(s, bench.rows); }));
  } else {
    out.push_back(prepare(cfg, "bench.json"));
    write_file(out.back(), bench_json(bench).dump(2) + "\n");
  }
  out.push_back(prepare(cfg, "bench_summary.csv"));
  write_file(out.back(), capture([&](std::ostream& s) {
               s << "method,n,trials,w1_mean,w1_std,runtime_mean_ms\n";
               for (const BenchSummary& m : bench.summary)
                 s << m.method << ',' << m.n << ',' << m.trials << ',' << format_double(m.w1_mean) << ','
                   << format_double(m.w1_std) << ',' << format_double(m.runtime_mean_ms) << '\n';
             }));
  out.push_back(prepare(cfg, "bench_trials.csv"));
  write_file(out.back(), capture([&](std::ostream& s) { write_trial_csv(s, bench.trials); }));
  return out;
}

std::vector<std::filesystem::path> write_order_outputs(const OrderReport& rep, const ExperimentConfig& cfg) {
  std::vector<std::filesystem::path> out;
  Json doc = order_json(rep);
  doc["config"] = config_json(cfg);
  out.push_back(prepare(cfg, "order.json"));
  write_file(out.back(), doc.dump(2) + "\n");
  if (cfg.format == OutputFormat::csv) {
    out.push_back(prepare(cfg, "spectrum.csv"));
    write_file(out.back(), capture([&](std::ostream& s) {
                 s << "index,singular_value\n";
                 const Vectord& sv = rep.selection.singular_values;
                 for (Index i = 0; i < sv.size(); ++i) s << i + 1 << ',' << format_double(sv(i)) << '\n';
               }));
  }
  return out;
}

std::vector<std::filesystem::path> write_estimate_outputs(const EstimateReport& rep, const ExperimentConfig& cfg) {
  std::vector<std::filesystem::path> out;
  Json doc = estimate_json(rep);
  doc["config"] = config_json(cfg);
  out.push_back(prepare(cfg, "estimate.json"));
  write_file(out.back(), doc.dump(2) + "\n");
  if (cfg.format == OutputFormat::csv) {
    out.push_back(prepare(cfg, "estimate.csv"));
    write_file(out.back(), capture([&](std::ostream& s) {
                 const Matrixd& c = rep.fit.centers;
                 s << "weight";
                 for (Index a = 0; a < c.rows(); ++a) s << ",x" << a + 1;
                 s << '\n';
                 for (Index j = 0; j < c.cols(); ++j) {
                   s << format_double(rep.fit.weights(j));
                   for (Index a = 0; a < c.rows(); ++a) s << ',' << format_double(c(a, j));
                   s << '\n';
                 }
               }));
  }
  return out;
}

}  // namespace fgmm::harness
