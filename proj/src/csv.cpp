#include "netrand/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "netrand/errors.hpp"

namespace netrand::csv {

std::string format_number(double v) {
  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

double parse_number(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.model << ',' << r.n << ',' << to_string(r.policy) << ',' << format_number(r.bias) << ','
        << format_optional(r.p) << ',' << format_optional(r.p_in) << ',' << format_optional(r.p_out) << ','
        << format_optional(r.sigma2) << ',' << r.replicate << ',' << format_number(r.imbalance) << ','
        << format_number(r.squared) << ',' << format_number(r.fourth) << ',' << format_number(r.two_over_n) << ','
        << format_optional(r.estimate) << ',' << r.seed << '\n';
  }
}

void write_summaries(std::ostream& out, std::span<const MomentSummary> summaries) {
  out << kSummaryHeader << '\n';
  for (const auto& s : summaries) {
    out << s.model << ',' << s.n << ',' << to_string(s.policy) << ',' << format_number(s.two_over_n.mean) << ','
        << format_number(s.ci_lower) << ',' << format_number(s.ci_upper) << ',' << format_number(s.iqr_lower) << ','
        << format_number(s.iqr_upper) << ',' << s.reps << '\n';
  }
}

void write_reductions(std::ostream& out, std::span<const ReductionReport> reports) {
  out << kReductionHeader << '\n';
  for (const auto& r : reports) {
    out << r.n << ',' << r.reps << ',' << format_number(r.adaptive.mean) << ',' << format_number(r.adaptive.se)
        << ',' << format_number(r.random.mean) << ',' << format_number(r.random.se) << ','
        << format_number(r.reduction) << ',' << (r.zero_denominator ? 1 : 0) << ','
        << format_optional(r.mean_density) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> optional_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_number(s);
}

}  // namespace

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kResultHeader) throw ParseError(lineno, "unexpected result header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 15) throw ParseError(lineno, "expected 15 fields, found " + std::to_string(f.size()));
    try {
      ResultRow r;
      r.model = f[0];
      r.n = std::stoull(f[1]);
      if (f[2] == "adaptive") {
        r.policy = Policy::Adaptive;
      } else if (f[2] == "random") {
        r.policy = Policy::Random;
      } else {
        throw std::invalid_argument("unknown policy " + f[2]);
      }
      r.bias = parse_number(f[3]);
      r.p = optional_number(f[4]);
      r.p_in = optional_number(f[5]);
      r.p_out = optional_number(f[6]);
      r.sigma2 = optional_number(f[7]);
      r.replicate = std::stoull(f[8]);
      r.imbalance = parse_number(f[9]);
      r.squared = parse_number(f[10]);
      r.fourth = parse_number(f[11]);
      r.two_over_n = parse_number(f[12]);
      r.estimate = optional_number(f[13]);
      r.seed = std::stoull(f[14]);
      rows.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, e.what());
    } catch (const std::out_of_range& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return rows;
}

}  // namespace netrand::csv
