#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fgmm/harness/records.hpp"
#include "fgmm/model.hpp"

namespace fgmm::harness {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double v);
/// Whole-string parses; throw ParseError mentioning `what` on failure.
double parse_double(std::string_view s, const std::string& what);
std::int64_t parse_int(std::string_view s, const std::string& what);
std::uint64_t parse_u64(std::string_view s, const std::string& what);
bool parse_bool(std::string_view s, const std::string& what);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_fields(std::string_view line);

/// One sample per row, d decimal columns, optional header row. Blank lines
/// are skipped; any other malformed row is an error naming its line.
SampleSet<double> parse_samples_csv(std::istream& in, const std::string& source = "input");
SampleSet<double> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(std::ostream& out, const Matrixd& data);
/// Columns as rows: reads an L x d file into a d x L matrix.
Matrixd read_points_csv(const std::filesystem::path& path);

inline constexpr std::string_view phase_header = "k,d,delta,log10_n,n,trials,successes,success_rate";
inline constexpr std::string_view bench_header = "method,k,d,n,trial,seed,w1,runtime_ms";
inline constexpr std::string_view trial_header =
    "experiment,row,col,trial,seed,n,k_true,k_hat,success,w1,em_w1,measure_ms,svd_ms,descent_ms,weights_ms,em_ms,"
    "descent_starts,em_iterations,em_monotone";

void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells);
std::vector<PhaseCell> parse_phase_csv(std::istream& in);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
std::vector<BenchRow> parse_bench_csv(std::istream& in);
void write_trial_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_trial_csv(std::istream& in);

}  // namespace fgmm::harness
