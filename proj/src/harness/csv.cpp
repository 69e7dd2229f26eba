#include "fgmm/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fgmm::harness {

namespace {

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::string> data_lines(std::istream& in, std::string_view header, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(what + ": empty input");
  if (trim(line) != header) throw ParseError(what + ": line 1: expected header '" + std::string(header) + "'");
  std::vector<std::string> out;
  while (std::getline(in, line))
    if (!trim(line).empty()) out.push_back(line);
  return out;
}

std::string at_line(const std::string& what, std::size_t line) { return what + " line " + std::to_string(line); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s, const std::string& what) {
  s = trim(s);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

std::int64_t parse_int(std::string_view s, const std::string& what) {
  s = trim(s);
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(what + ": '" + std::string(s) + "' is not an integer");
  return v;
}

std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(what + ": '" + std::string(s) + "' is not an unsigned 64-bit integer");
  return v;
}

bool parse_bool(std::string_view s, const std::string& what) {
  s = trim(s);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(what + ": '" + std::string(s) + "' is not a boolean (true/false)");
}

SampleSet<double> parse_samples_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  Index d = 0;
  Index rows = 0;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    std::vector<double> row;
    row.reserve(fields.size());
    std::size_t bad = 0;
    for (std::string_view f : fields) {
      try {
        row.push_back(parse_double(f, ""));
      } catch (const ParseError&) {
        ++bad;
      }
    }
    const bool first = !seen_content;
    seen_content = true;
    if (bad == fields.size() && first) continue;  // header: no numeric field at all
    if (bad > 0)
      throw ParseError(source + ": line " + std::to_string(lineno) + ": malformed row (non-numeric field)");
    for (double v : row)
      if (!std::isfinite(v)) throw ParseError(source + ": line " + std::to_string(lineno) + ": non-finite value");
    if (d == 0) d = Index(row.size());
    if (Index(row.size()) != d)
      throw ParseError(source + ": line " + std::to_string(lineno) + ": expected " + std::to_string(d) +
                       " columns, found " + std::to_string(row.size()));
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ParseError(source + ": no samples");
  Matrixd data = Eigen::Map<const Matrixd>(values.data(), d, rows);
  return SampleSet<double>(std::move(data));
}

SampleSet<double> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_samples_csv(in, path.string());
}

void write_samples_csv(std::ostream& out, const Matrixd& data) {
  for (Index j = 0; j < data.cols(); ++j) {
    for (Index a = 0; a < data.rows(); ++a) out << (a ? "," : "") << format_double(data(a, j));
    out << '\n';
  }
}

Matrixd read_points_csv(const std::filesystem::path& path) { return read_samples_csv(path).data; }

void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells) {
  out << phase_header << '\n';
  for (const PhaseCell& c : cells)
    out << c.k << ',' << c.d << ',' << format_double(c.delta) << ',' << format_double(c.log10_n) << ',' << c.n << ','
        << c.trials << ',' << c.successes << ',' << format_double(c.success_rate) << '\n';
}

std::vector<PhaseCell> parse_phase_csv(std::istream& in) {
  const std::string what = "phase csv";
  std::vector<PhaseCell> out;
  std::size_t lineno = 1;
  for (const std::string& line : data_lines(in, phase_header, what)) {
    const std::string where = at_line(what, ++lineno);
    const auto f = split_fields(line);
    if (f.size() != 8) throw ParseError(where + ": expected 8 fields");
    PhaseCell c;
    c.k = parse_int(f[0], where);
    c.d = parse_int(f[1], where);
    c.delta = parse_double(f[2], where);
    c.log10_n = parse_double(f[3], where);
    c.n = parse_int(f[4], where);
    c.trials = parse_int(f[5], where);
    c.successes = parse_int(f[6], where);
    c.success_rate = parse_double(f[7], where);
    out.push_back(c);
  }
  return out;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << bench_header << '\n';
  for (const BenchRow& r : rows)
    out << r.method << ',' << r.k << ',' << r.d << ',' << r.n << ',' << r.trial << ',' << r.seed << ','
        << format_double(r.w1) << ',' << format_double(r.runtime_ms) << '\n';
}

std::vector<BenchRow> parse_bench_csv(std::istream& in) {
  const std::string what = "bench csv";
  std::vector<BenchRow> out;
  std::size_t lineno = 1;
  for (const std::string& line : data_lines(in, bench_header, what)) {
    const std::string where = at_line(what, ++lineno);
    const auto f = split_fields(line);
    if (f.size() != 8) throw ParseError(where + ": expected 8 fields");
    BenchRow r;
    r.method = std::string(f[0]);
    r.k = parse_int(f[1], where);
    r.d = parse_int(f[2], where);
    r.n = parse_int(f[3], where);
    r.trial = parse_int(f[4], where);
    r.seed = parse_u64(f[5], where);
    r.w1 = parse_double(f[6], where);
    r.runtime_ms = parse_double(f[7], where);
    out.push_back(r);
  }
  return out;
}

void write_trial_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << trial_header << '\n';
  for (const TrialRecord& r : records) {
    const PhaseTimings& t = r.timings;
    out << r.experiment << ',' << r.row << ',' << r.col << ',' << r.trial << ',' << r.seed << ',' << r.n << ','
        << r.k_true << ',' << r.k_hat << ',' << (r.success ? "true" : "false") << ',' << format_double(r.w1_error)
        << ',' << format_double(r.em_w1_error) << ',' << format_double(t.measure_ms) << ','
        << format_double(t.svd_ms) << ',' << format_double(t.descent_ms) << ',' << format_double(t.weights_ms) << ','
        << format_double(t.em_ms) << ',' << r.descent_starts << ',' << r.em_iterations << ','
        << (r.em_monotone ? "true" : "false") << '\n';
  }
}

std::vector<TrialRecord> parse_trial_csv(std::istream& in) {
  const std::string what = "trial csv";
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  for (const std::string& line : data_lines(in, trial_header, what)) {
    const std::string where = at_line(what, ++lineno);
    const auto f = split_fields(line);
    if (f.size() != 19) throw ParseError(where + ": expected 19 fields");
    TrialRecord r;
    r.experiment = std::string(f[0]);
    r.row = parse_int(f[1], where);
    r.col = parse_int(f[2], where);
    r.trial = parse_int(f[3], where);
    r.seed = parse_u64(f[4], where);
    r.n = parse_int(f[5], where);
    r.k_true = parse_int(f[6], where);
    r.k_hat = parse_int(f[7], where);
    r.success = parse_bool(f[8], where);
    r.w1_error = parse_double(f[9], where);
    r.em_w1_error = parse_double(f[10], where);
    r.timings.measure_ms = parse_double(f[11], where);
    r.timings.svd_ms = parse_double(f[12], where);
    r.timings.descent_ms = parse_double(f[13], where);
    r.timings.weights_ms = parse_double(f[14], where);
    r.timings.em_ms = parse_double(f[15], where);
    r.descent_starts = parse_int(f[16], where);
    r.em_iterations = parse_int(f[17], where);
    r.em_monotone = parse_bool(f[18], where);
    out.push_back(r);
  }
  return out;
}

bool TrialRecord::operator==(const TrialRecord& o) const {
  return experiment == o.experiment && row == o.row && col == o.col && trial == o.trial && seed == o.seed &&
         n == o.n && k_true == o.k_true && k_hat == o.k_hat && success == o.success &&
         same_double(w1_error, o.w1_error) && same_double(em_w1_error, o.em_w1_error) && timings == o.timings &&
         descent_starts == o.descent_starts && em_iterations == o.em_iterations && em_monotone == o.em_monotone;
}

}  // namespace fgmm::harness
