#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fgmm/harness/config.hpp"
#include "fgmm/harness/experiments.hpp"
#include "fgmm/harness/heatmap.hpp"
#include "json.hpp"

namespace fgmm::harness {

using Json = nlohmann::json;

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json config_json(const ExperimentConfig& cfg);
Json order_json(const OrderReport& rep);
Json estimate_json(const EstimateReport& rep);
Json phase_json(const PhaseGridResult& grid);
Json bench_json(const BenchResult& bench);

Heatmap phase_heatmap(const PhaseGridResult& grid, const ExperimentConfig& cfg);

/// Writers create `cfg.out` if needed and return the files written.
/// phase: phase.{csv|json}, phase_trials.csv, phase.svg
std::vector<std::filesystem::path> write_phase_outputs(const PhaseGridResult& grid, const ExperimentConfig& cfg);
/// bench: bench.{csv|json}, bench_summary.csv, bench_trials.csv
std::vector<std::filesystem::path> write_bench_outputs(const BenchResult& bench, const ExperimentConfig& cfg);
/// order: order.json, plus spectrum.csv in csv format
std::vector<std::filesystem::path> write_order_outputs(const OrderReport& rep, const ExperimentConfig& cfg);
/// estimate: estimate.json, plus estimate.csv (weight and center per row) in csv format
std::vector<std::filesystem::path> write_estimate_outputs(const EstimateReport& rep, const ExperimentConfig& cfg);

}  // namespace fgmm::harness
