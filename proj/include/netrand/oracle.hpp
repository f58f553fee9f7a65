#pragma once

#include <cstddef>
#include <optional>

#include "netrand/design.hpp"
#include "netrand/graph.hpp"

namespace netrand {

inline constexpr std::size_t kBruteForceMaxN = 20;
inline constexpr std::size_t kExactTreeMaxN = 16;

struct OracleResult {
  /// min ||A tau||^2 over all pairwise-balanced sign vectors.
  double min_squared = 0.0;
  /// Number of minimizing sign vectors (tau and -tau counted separately).
  std::size_t argmin_count = 0;
  /// Exact E[I_n^2] under a policy, when requested.
  std::optional<double> expected_squared;
  /// Some reachable decision in the tree was an exact tie.
  bool tie_branch = false;
};

/// Enumerates all 2^{n/2} pairwise-balanced sign vectors. Even n <= 20.
OracleResult brute_force_min(const Graph& g);

/// Walks the full decision tree of the procedure (first-pair coin, then
/// smaller/larger/tie branches with probabilities b, 1-b, 1/2-1/2), scoring
/// every node by direct recomputation. Even n <= 16.
OracleResult exact_policy_expectation(const Graph& g, const DesignConfig& cfg);

/// Uniform average of ||A tau||^2 over all balanced sign vectors.
double balanced_average(const Graph& g);

struct UbqpCheck {
  double norm_squared = 0.0;  // ||A tau||^2
  double quadratic = 0.0;     // tau^T H tau, H = A^2
  double penalized = 0.0;     // tau^T (H + lambda 11^T) tau
  bool norm_matches = false;
  /// Penalized form equals tau^T H tau + lambda (1^T tau)^2 (so equal to it when balanced).
  bool penalty_matches = false;
  /// H_ij is the common-neighbour count (self loops included); binary only.
  bool common_neighbors_match = false;
};

UbqpCheck ubqp_crosscheck(const Graph& g, const SignVector& tau, double lambda);

}  // namespace netrand
