#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fgmm/design.hpp"
#include "fgmm/fourier.hpp"
#include "fgmm/harness/config.hpp"
#include "fgmm/harness/records.hpp"
#include "fgmm/model.hpp"
#include "fgmm/order.hpp"
#include "fgmm/weights.hpp"

namespace fgmm::harness {

/// Runs f(0..count-1) on `workers` threads. Each index runs exactly once;
/// the first exception is rethrown after all workers stop.
void parallel_for(Index count, Index workers, const std::function<void(Index)>& f);

// Sub-stream tags under a trial seed.
inline constexpr std::uint64_t stream_samples = 1;
inline constexpr std::uint64_t stream_design = 2;
inline constexpr std::uint64_t stream_em_init = 3;
inline constexpr std::uint64_t stream_mean_design = 4;
inline constexpr std::uint64_t stream_model = 0x6d6f64656cULL;

/// Order-stage design in R^dim: ball or directional points (or the explicit
/// file), orthonormal translations.
FrequencyDesign<double> order_design(const ExperimentConfig& cfg, Index dim, std::uint64_t seed);
/// Mean-stage design in R^dim sized for k components.
FrequencyDesign<double> mean_design(const ExperimentConfig& cfg, Index dim, Index k, std::uint64_t seed);

struct PhaseGridResult {
  std::vector<double> deltas;       // grid rows
  std::vector<double> log10_n;      // grid columns
  std::vector<PhaseCell> cells;     // row-major: delta outer, log10 n inner
  std::vector<TrialRecord> trials;  // cell order, trial inner

  const PhaseCell& cell(Index row, Index col) const { return cells[std::size_t(row) * log10_n.size() + col]; }
};

inline Index cell_sample_size(double log10_n) { return Index(std::llround(std::pow(10.0, log10_n))); }

/// Simplex means with edge `delta`, rotated by a Haar draw from `seed` when
/// cfg.orientation is random.
Matrixd placed_simplex(const ExperimentConfig& cfg, double delta, std::uint64_t seed);

/// One seeded order selection on a simplex model with edge `delta`.

TrialRecord run_phase_trial(const ExperimentConfig& cfg, Index row, Index col, Index trial, double delta, Index n);
PhaseGridResult run_phase_grid(const ExperimentConfig& cfg);

/// Known-k Fourier pipeline: (PCA when k < d) -> measurements -> spectrum ->
/// score-initialised descent -> simplex weights.
struct FourierFit {
  Matrixd centers;  // d x (#found)
  Vectord weights;
  PhaseTimings timings;
  Index starts = 0;
  bool exhausted = false;  // fewer than k centers were found
  bool used_pca = false;
  Vectord spectrum;
  std::optional<WeightEstimate<double>> weight_info;
};

FourierFit fourier_fit(const SampleSet<double>& samples, Index k, const NoiseCovariance<double>& noise,
                       const ExperimentConfig& cfg, std::uint64_t design_seed);

/// Model for bench trial `trial`. Depends on (root seed, trial) only, so every
/// n in the schedule sees the same models.
GmmModel<double> bench_model(const ExperimentConfig& cfg, Index trial);

struct BenchTrialResult {
  TrialRecord record;
  BenchRow fourier;
  std::optional<BenchRow> em;
  std::vector<double> em_loglik;
};

BenchTrialResult run_bench_trial(const ExperimentConfig& cfg, Index n_index, Index n, Index trial);

struct BenchSummary {
  std::string method;
  Index n = 0;
  Index trials = 0;
  double w1_mean = 0;
  double w1_std = 0;
  double runtime_mean_ms = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;  // n outer, trial, then method
  std::vector<TrialRecord> trials;
  std::vector<BenchSummary> summary;  // n outer, method inner
  bool em_monotone = true;            // every EM trace was nondecreasing within 1e-9
};

BenchResult run_bench(const ExperimentConfig& cfg);
std::vector<BenchSummary> summarize_bench(const std::vector<BenchRow>& rows);

struct OrderReport {
  OrderSelection<double> selection;
  Index L = 0;
  Index translation_count = 0;
  double radius_bound = 0;
  Index n = 0;
  Index d = 0;
  PhaseTimings timings;
};

OrderReport run_order(const SampleSet<double>& samples, const ExperimentConfig& cfg);

struct EstimateReport {
  OrderReport order;
  FourierFit fit;
};

/// Order selection, then the Fourier pipeline with k = k_hat. Throws if no
/// order could be selected.
EstimateReport run_estimate(const SampleSet<double>& samples, const ExperimentConfig& cfg);

}  // namespace fgmm::harness
