#include "netrand/oracle.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "netrand/errors.hpp"

namespace netrand {

namespace {

void require_even_size(const Graph& g, std::size_t limit, const char* what) {
  if (g.size() % 2 != 0 || g.size() < 2) throw ParameterError(std::string(what) + " needs an even n >= 2");
  if (g.size() > limit)
    throw LimitError(std::string(what) + " limited to n <= " + std::to_string(limit) + ", got " +
                     std::to_string(g.size()));
}

SignVector from_mask(std::size_t pairs, std::uint64_t mask) {
  SignVector tau;
  for (std::size_t j = 0; j < pairs; ++j) {
    const int s = ((mask >> j) & 1ULL) ? -1 : 1;
    tau.push_back(s);
    tau.push_back(-s);
  }
  return tau;
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct TreeWalk {
  const Graph& g;
  double bias;
  bool tie = false;

  // Expected final I^2 given the assigned prefix.
  double expand(SignVector& tau) {
    if (tau.size() == g.size()) return imbalance_recompute(g, tau, tau.size());
    const std::size_t upto = tau.size() + 2;
    tau.push_back(1);
    tau.push_back(-1);
    const double zero_one = imbalance_recompute(g, tau, upto);
    tau.pop_back();
    tau.pop_back();
    tau.push_back(-1);
    tau.push_back(1);
    const double one_zero = imbalance_recompute(g, tau, upto);
    tau.pop_back();
    tau.pop_back();

    double p_zero_one = 0.5;
    if (zero_one < one_zero) {
      p_zero_one = bias;
    } else if (zero_one > one_zero) {
      p_zero_one = 1.0 - bias;
    } else {
      tie = true;
    }
    double total = 0.0;
    if (p_zero_one > 0.0) total += p_zero_one * branch(tau, 1);
    if (p_zero_one < 1.0) total += (1.0 - p_zero_one) * branch(tau, -1);
    return total;
  }

  double branch(SignVector& tau, int s) {
    tau.push_back(s);
    tau.push_back(-s);
    const double v = expand(tau);
    tau.pop_back();
    tau.pop_back();
    return v;
  }
};

}  // namespace

OracleResult brute_force_min(const Graph& g) {
  require_even_size(g, kBruteForceMaxN, "brute-force search");
  const std::size_t pairs = g.size() / 2;
  OracleResult res;
  res.min_squared = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) {
    const double v = imbalance_recompute(g, from_mask(pairs, mask), g.size());
    if (v < res.min_squared) {
      res.min_squared = v;
      res.argmin_count = 1;
    } else if (v == res.min_squared) {
      ++res.argmin_count;
    }
  }
  return res;
}

double balanced_average(const Graph& g) {
  require_even_size(g, kBruteForceMaxN, "balanced average");
  const std::size_t pairs = g.size() / 2;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask)
    total += imbalance_recompute(g, from_mask(pairs, mask), g.size());
  return total / static_cast<double>(1ULL << pairs);
}

OracleResult exact_policy_expectation(const Graph& g, const DesignConfig& cfg) {
  require_even_size(g, kExactTreeMaxN, "exact policy expectation");
  cfg.validate();
  OracleResult res = brute_force_min(g);
  TreeWalk walk{g, cfg.effective_bias()};
  SignVector tau;
  res.expected_squared = 0.5 * walk.branch(tau, 1) + 0.5 * walk.branch(tau, -1);
  res.tie_branch = walk.tie;
  return res;
}

UbqpCheck ubqp_crosscheck(const Graph& g, const SignVector& tau, double lambda) {
  const std::size_t n = g.size();
  if (tau.size() != n) throw ContractError("UBQP check needs a complete sign vector");

  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += g.at(i, k) * g.at(k, j);
      h[i * n + j] = s;
    }

  UbqpCheck c;
  c.norm_squared = imbalance_recompute(g, tau, n);
  const double ones = static_cast<double>(tau.sum());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      c.quadratic += tau[i] * h[i * n + j] * tau[j];
      c.penalized += tau[i] * (h[i * n + j] + lambda) * tau[j];
    }
  c.norm_matches = g.is_binary() ? c.norm_squared == c.quadratic : nearly_equal(c.norm_squared, c.quadratic);
  c.penalty_matches = nearly_equal(c.penalized, c.quadratic + lambda * ones * ones);

  if (g.is_binary()) {
    c.common_neighbors_match = true;
    for (std::size_t i = 0; i < n && c.common_neighbors_match; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto ri = g.bit_row(i), rj = g.bit_row(j);
        std::size_t common = 0;
        for (std::size_t w = 0; w < ri.size(); ++w) common += static_cast<std::size_t>(std::popcount(ri[w] & rj[w]));
        if (static_cast<double>(common) != h[i * n + j]) {
          c.common_neighbors_match = false;
          break;
        }
      }
  }
  return c;
}

}  // namespace netrand
