#pragma once

#include <cstdint>
#include <vector>

#include "netrand/design.hpp"
#include "netrand/graph.hpp"
#include "netrand/random.hpp"

namespace testing {

using Dense = std::vector<std::vector<double>>;

inline Dense to_matrix(const netrand::Graph& g) {
  Dense m(g.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) m[i][j] = g.at(i, j);
  return m;
}

/// Plain matrix-vector product on the leading k x k block.
inline std::vector<double> multiply(const Dense& a, const std::vector<int>& tau, std::size_t k) {
  std::vector<double> s(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) s[i] += a[i][j] * tau[j];
  return s;
}

inline double norm2(const std::vector<double>& s) {
  double t = 0.0;
  for (double x : s) t += x * x;
  return t;
}

inline std::vector<int> signs_of(const netrand::SignVector& v) {
  std::vector<int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

/// Binary graph from an explicit Bernoulli sweep, independent of gen_er.
inline netrand::Graph random_binary(std::size_t n, double p, netrand::Rng& rng) {
  auto g = netrand::Graph::binary(n);
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) g.set_edge(i, j);
  return g;
}

inline netrand::Graph identity_plus(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  auto g = netrand::Graph::binary(n);
  for (auto [i, j] : edges) g.set_edge(i, j);
  return g;
}

}  // namespace testing
