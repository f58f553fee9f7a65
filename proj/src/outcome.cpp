#include "netrand/outcome.hpp"

#include <bit>
#include <cmath>

#include "netrand/errors.hpp"

namespace netrand {

void OutcomeParams::validate() const {
  if (!(sigma_z >= 0.0) || !(sigma_eps >= 0.0)) throw ParameterError("outcome standard deviations must be >= 0");
  if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(sigma_z) || !std::isfinite(sigma_eps))
    throw ParameterError("outcome parameters must be finite");
}

namespace {

void require_complete(const Graph& g, const SignVector& tau) {
  if (tau.size() != g.size())
    throw ContractError("sign vector covers " + std::to_string(tau.size()) + " of " + std::to_string(g.size()) +
                        " subjects");
}

// y = A x over the full matrix.
std::vector<double> multiply(const Graph& g, const std::vector<double>& x) {
  const std::size_t n = g.size();
  std::vector<double> y(n, 0.0);
  if (g.is_binary()) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = g.bit_row(i);
      double s = 0.0;
      for (std::size_t w = 0; w < row.size(); ++w)
        for (std::uint64_t bits = row[w]; bits != 0; bits &= bits - 1)
          s += x[w * 64 + static_cast<std::size_t>(std::countr_zero(bits))];
      y[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto prefix = g.weight_row_prefix(i);
      for (std::size_t j = 0; j < i; ++j) {
        y[i] += prefix[j] * x[j];
        y[j] += prefix[j] * x[i];
      }
      y[i] += prefix[i] * x[i];
    }
  }
  return y;
}

std::size_t paired(std::size_t n) { return n - n % 2; }

}  // namespace

double full_imbalance_squared(const Graph& g, const SignVector& tau) {
  require_complete(g, tau);
  const std::size_t np = paired(g.size());
  std::vector<double> t(g.size(), 0.0);
  for (std::size_t i = 0; i < np; ++i) t[i] = tau[i];
  double sq = 0.0;
  for (double v : multiply(g, t)) sq += v * v;
  return sq;
}

TrialOutcome simulate_outcomes(const Graph& g, const SignVector& tau, const OutcomeParams& params, Rng& rng) {
  require_complete(g, tau);
  params.validate();
  const std::size_t n = g.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n), eps(n);
  for (double& v : z) v = params.sigma_z * normal(rng);
  for (double& v : eps) v = params.sigma_eps * normal(rng);
  const auto az = multiply(g, z);

  TrialOutcome out;
  out.outcomes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.outcomes[i] = (tau.treatment(i) == 0 ? params.mu0 : params.mu1) + az[i] + eps[i];

  out.paired_subjects = paired(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < out.paired_subjects; ++i) acc += tau[i] * out.outcomes[i];
  out.estimate = 2.0 * acc / static_cast<double>(out.paired_subjects);
  return out;
}

double analytic_variance(const Graph& g, const SignVector& tau, const OutcomeParams& params) {
  params.validate();
  const double np = static_cast<double>(paired(g.size()));
  return 4.0 / (np * np) * full_imbalance_squared(g, tau) * params.sigma_z * params.sigma_z +
         4.0 / np * params.sigma_eps * params.sigma_eps;
}

EstimatorCheck unbiasedness_check(const Graph& g, const SignVector& tau, const OutcomeParams& params,
                                  std::size_t reps, Rng& rng) {
  if (reps < 2) throw ParameterError("unbiasedness check needs at least two replicates");
  // Welford keeps the zero-noise case at exactly zero variance.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const double w = simulate_outcomes(g, tau, params, rng).estimate;
    const double delta = w - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (w - mean);
  }
  EstimatorCheck c;
  c.reps = reps;
  c.mean = mean;
  c.variance = m2 / static_cast<double>(reps - 1);
  c.standard_error = std::sqrt(c.variance / static_cast<double>(reps));
  return c;
}

}  // namespace netrand
