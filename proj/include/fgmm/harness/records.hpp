#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "fgmm/types.hpp"

namespace fgmm::harness {

/// One (delta, log10 n) cell of a phase grid.
struct PhaseCell {
  Index k = 0;
  Index d = 0;
  double delta = 0;
  double log10_n = 0;
  Index n = 0;
  Index trials = 0;
  Index successes = 0;
  double success_rate = 0;

  bool operator==(const PhaseCell&) const = default;
};

/// One method on one bench trial.
struct BenchRow {
  std::string method;
  Index k = 0;
  Index d = 0;
  Index n = 0;
  Index trial = 0;
  std::uint64_t seed = 0;
  double w1 = 0;
  double runtime_ms = 0;

  bool operator==(const BenchRow&) const = default;
};

/// Wall-clock milliseconds around compute only, never I/O.
struct PhaseTimings {
  double measure_ms = 0;
  double svd_ms = 0;
  double descent_ms = 0;
  double weights_ms = 0;
  double em_ms = 0;

  double fourier_total() const { return measure_ms + svd_ms + descent_ms + weights_ms; }
  bool operator==(const PhaseTimings&) const = default;
};

struct TrialRecord {
  std::string experiment;
  Index row = 0;  // delta index (phase) or n index (bench)
  Index col = 0;  // log10 n index (phase); 0 for bench
  Index trial = 0;
  std::uint64_t seed = 0;
  Index n = 0;
  Index k_true = 0;
  Index k_hat = 0;
  bool success = false;
  double w1_error = std::numeric_limits<double>::quiet_NaN();
  double em_w1_error = std::numeric_limits<double>::quiet_NaN();
  PhaseTimings timings;
  Index descent_starts = 0;
  Index em_iterations = 0;
  bool em_monotone = true;

  // NaN-aware, so parse(emit(r)) == r holds for records without W1 values.
  bool operator==(const TrialRecord& o) const;
};

}  // namespace fgmm::harness
