#pragma once

#include <cstddef>
#include <vector>

#include "netrand/design.hpp"
#include "netrand/graph.hpp"
#include "netrand/random.hpp"

namespace netrand {

/// X_i = mu0 (1 - T_i) + mu1 T_i + A_{i*} Z + eps_i with Z ~ N(0, sigma_z^2 I)
/// and eps_i ~ N(0, sigma_eps^2) iid.
struct OutcomeParams {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double sigma_z = 1.0;
  double sigma_eps = 1.0;

  void validate() const;
};

struct TrialOutcome {
  std::vector<double> outcomes;
  /// (2/n') tau^T X over the first n' subjects, n' = n rounded down to even.
  double estimate = 0.0;
  std::size_t paired_subjects = 0;
};

/// Draws Z (n normals) then eps (n normals) from `rng`.
TrialOutcome simulate_outcomes(const Graph& g, const SignVector& tau, const OutcomeParams& params, Rng& rng);

/// (4/n'^2) ||A tau'||^2 sigma_z^2 + (4/n') sigma_eps^2, where tau' is tau
/// with an unpaired trailing subject zeroed out.
double analytic_variance(const Graph& g, const SignVector& tau, const OutcomeParams& params);

/// ||A tau'||^2 over the full matrix (tau' as above).
double full_imbalance_squared(const Graph& g, const SignVector& tau);

struct EstimatorCheck {
  double mean = 0.0;
  double standard_error = 0.0;
  double variance = 0.0;  // sample variance of W
  std::size_t reps = 0;
};

EstimatorCheck unbiasedness_check(const Graph& g, const SignVector& tau, const OutcomeParams& params,
                                  std::size_t reps, Rng& rng);

}  // namespace netrand
