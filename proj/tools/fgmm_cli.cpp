// fgmm: order selection, mixture estimation and the phase / bench studies.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgmm/harness/config.hpp"
#include "fgmm/harness/csv.hpp"
#include "fgmm/harness/experiments.hpp"
#include "fgmm/harness/report.hpp"

using namespace fgmm;
using namespace fgmm::harness;

namespace {

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

void print_vector(const char* label, const Vectord& v) {
  std::cout << label;
  for (Index i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << format_double(v(i));
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-based learning of Gaussian location mixtures"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<Index> workers;
  std::optional<std::string> format;
  std::vector<std::string> overrides;
  bool print_config = false;

  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "root seed (u64)");
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--set", overrides, "override a config key: --set key=value (repeatable)");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  std::string input;
  auto* order_cmd = app.add_subcommand("order", "select the number of components of a sample file");
  order_cmd->add_option("samples", input, "CSV of samples, one per row")->check(CLI::ExistingFile);
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate order, centers and weights of a sample file");
  estimate_cmd->add_option("samples", input, "CSV of samples, one per row")->check(CLI::ExistingFile);
  auto* phase_cmd = app.add_subcommand("phase", "order-selection success over a (separation, log10 n) grid");
  auto* bench_cmd = app.add_subcommand("bench", "accuracy and runtime against EM over an n schedule");
  for (auto* sub : {order_cmd, estimate_cmd, phase_cmd, bench_cmd}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      set_config_value(cfg, std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
    }
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (workers) cfg.workers = *workers;
    if (format) cfg.format = parse_format(*format);
    if (!input.empty()) cfg.input = input;
    if (order_cmd->parsed()) cfg.kind = ExperimentKind::order;
    if (estimate_cmd->parsed()) cfg.kind = ExperimentKind::estimate;
    if (phase_cmd->parsed()) cfg.kind = ExperimentKind::phase;
    if (bench_cmd->parsed()) cfg.kind = ExperimentKind::bench;
    cfg.validate();

    if (print_config) {
      std::cout << render_config(cfg);
      return 0;
    }

    switch (cfg.kind) {
      case ExperimentKind::phase: {
        const PhaseGridResult grid = run_phase_grid(cfg);
        print_paths(write_phase_outputs(grid, cfg));
        break;
      }
      case ExperimentKind::bench: {
        const BenchResult bench = run_bench(cfg);
        for (const BenchSummary& s : bench.summary)
          std::cout << s.method << " n=" << s.n << " w1=" << format_double(s.w1_mean) << " +- "
                    << format_double(s.w1_std) << " runtime_ms=" << format_double(s.runtime_mean_ms) << '\n';
        print_paths(write_bench_outputs(bench, cfg));
        break;
      }
      case ExperimentKind::order:
      case ExperimentKind::estimate: {
        if (cfg.input.empty()) throw ConfigError("no sample file: pass it as an argument or set 'input'");
        const SampleSet<double> samples = read_samples_csv(cfg.input);
        if (cfg.kind == ExperimentKind::order) {
          const OrderReport rep = run_order(samples, cfg);
          std::cout << "k_hat " << rep.selection.k_hat << (rep.selection.below_floor ? " (below floor)" : "")
                    << '\n';
          print_vector("singular_values ", rep.selection.singular_values);
          print_paths(write_order_outputs(rep, cfg));
        } else {
          const EstimateReport rep = run_estimate(samples, cfg);
          std::cout << "k_hat " << rep.order.selection.k_hat << '\n';
          print_vector("weights ", rep.fit.weights);
          for (Index j = 0; j < rep.fit.centers.cols(); ++j) print_vector("center ", rep.fit.centers.col(j));
          print_paths(write_estimate_outputs(rep, cfg));
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "fgmm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
