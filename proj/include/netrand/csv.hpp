#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netrand/montecarlo.hpp"

namespace netrand::csv {

inline constexpr const char* kResultHeader =
    "model,n,policy,b,p,p_in,p_out,sigma2,replicate,I,I2,I4,two_I_over_n,W,seed";
inline constexpr const char* kSummaryHeader =
    "model,n,policy,mean_two_I_over_n,ci_lower,ci_upper,iqr_lower,iqr_upper,reps";
inline constexpr const char* kReductionHeader =
    "n,reps,adaptive_mean_I,adaptive_se,random_mean_I,random_se,reduction,zero_denominator,mean_density";

/// Shortest fixed-notation text that parses back to the same double.
/// Integer-valued doubles print without a fractional part.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);
double parse_number(const std::string& text);

void write_results(std::ostream& out, std::span<const ResultRow> rows);
void write_summaries(std::ostream& out, std::span<const MomentSummary> summaries);
void write_reductions(std::ostream& out, std::span<const ReductionReport> reports);

/// Parses a file written by write_results; throws ParseError on schema mismatch.
std::vector<ResultRow> read_results(std::istream& in);

}  // namespace netrand::csv
