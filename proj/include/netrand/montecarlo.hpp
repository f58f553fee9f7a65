#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netrand/design.hpp"
#include "netrand/graph.hpp"
#include "netrand/outcome.hpp"

namespace netrand {

enum class Model { ER, SBM, GOE, Real };
enum class PolicySet { Adaptive, Random, Both };

const char* to_string(Model m) noexcept;

struct ExperimentSpec {
  Model model = Model::ER;
  std::vector<std::size_t> sizes;
  double p = 0.2;
  double p_in = 0.3;
  double p_out = 0.1;
  double sigma2 = 0.16;
  /// When set, ER uses p_n = log(n) / (c n) and GOE uses sigma_n^2 = p_n (1 - p_n).
  std::optional<double> sparse_log_divisor;
  PolicySet policies = PolicySet::Both;
  double bias = 0.95;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  std::optional<OutcomeParams> outcome;
  /// Parent network for Model::Real; `sizes` are then sample sizes.
  const SparseGraph* source = nullptr;
  bool allow_odd = false;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
  /// Edge probability (ER) or variance (GOE) used for size n.
  double p_for(std::size_t n) const;
  double sigma2_for(std::size_t n) const;
};

struct ResultRow {
  std::string model;
  std::size_t n = 0;
  Policy policy = Policy::Adaptive;
  double bias = 0.0;
  std::optional<double> p;  // edge probability, or sample density for real data
  std::optional<double> p_in;
  std::optional<double> p_out;
  std::optional<double> sigma2;
  std::size_t replicate = 0;
  double imbalance = 0.0;  // I_n
  double squared = 0.0;    // I_n^2 (exact integer for binary graphs)
  double fourth = 0.0;     // I_n^4
  double two_over_n = 0.0; // 2 I_n / n
  std::optional<double> estimate;  // W
  std::uint64_t seed = 0;          // replicate root seed

  bool operator==(const ResultRow&) const = default;
};

struct SampleMoments {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n-1)
  double se = 0.0;
  std::size_t count = 0;
};

SampleMoments sample_moments(std::span<const double> xs);
/// Linear-interpolation quantile (type 7), q in [0,1].
double quantile(std::vector<double> xs, double q);

struct MomentSummary {
  std::string model;
  std::size_t n = 0;
  Policy policy = Policy::Adaptive;
  std::size_t reps = 0;
  SampleMoments imbalance;    // I
  SampleMoments squared;      // I^2
  SampleMoments fourth;       // I^4
  SampleMoments two_over_n;   // 2I/n, the metric of record
  double ci_lower = 0.0;      // normal 95% CI of mean 2I/n
  double ci_upper = 0.0;
  double iqr_lower = 0.0;     // quartiles of 2I/n
  double iqr_upper = 0.0;
  std::optional<SampleMoments> estimate;  // W
};

/// Groups rows by (model, n, policy) in order of first appearance.
std::vector<MomentSummary> summarize(std::span<const ResultRow> rows);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<MomentSummary> summaries;
};

/// Replicate r of size index i derives its root seed as derive_seed(seed, i, r);
/// graph, design and outcome streams branch from that root, so results do
/// not depend on scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// E ||A(1 - 2T)||^2 under random design on ER(n, p): n^2 p(1-p) + n(1-2p)(1-p).
double theorem1_exact(std::size_t n, double p);
/// Upper bound on limsup E[I^4]/n^4 for the adaptive design on ER(n, p).
double theorem2_bound(double p, double b);
/// Upper bound on limsup E[I^4]/(n^4 sigma^4) for the adaptive design on GOE.
double theorem3_bound(double b);

struct ReductionReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  SampleMoments adaptive;  // final I
  SampleMoments random;
  /// 1 - adaptive/random, or 0 with zero_denominator set when random mean is 0.
  double reduction = 0.0;
  bool zero_denominator = false;
  std::optional<double> mean_density;
};

ReductionReport make_reduction(std::size_t n, const SampleMoments& adaptive, const SampleMoments& random);

/// Both policies on the same fixed graph, independent design seeds per replicate.
ReductionReport reduction_report(const Graph& g, double b, std::size_t reps, std::uint64_t seed);

/// One report per n from rows holding both policies (real-data sweeps).
std::vector<ReductionReport> reductions(std::span<const ResultRow> rows);

}  // namespace netrand
