#include "netrand/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "netrand/errors.hpp"

namespace netrand {

namespace {

bool open_unit(double p) { return p > 0.0 && p < 1.0; }
bool closed_unit(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

Graph::Graph(std::size_t n, GraphKind kind) : n_(n), kind_(kind) {
  if (kind == GraphKind::Binary) {
    words_per_row_ = (n + 63) / 64;
    bits_.assign(n * words_per_row_, 0);
    for (std::size_t i = 0; i < n; ++i) bits_[i * words_per_row_ + i / 64] |= 1ULL << (i % 64);
  } else {
    weights_.assign(n * (n + 1) / 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) weights_[tri_index(i, i)] = 1.0;
  }
}

Graph Graph::binary(std::size_t n) { return Graph(n, GraphKind::Binary); }
Graph Graph::weighted(std::size_t n) { return Graph(n, GraphKind::Weighted); }

Graph Graph::complete(std::size_t n) {
  Graph g(n, GraphKind::Binary);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t w = 0; w < g.words_per_row_; ++w) g.bits_[i * g.words_per_row_ + w] = ~0ULL;
    if (n % 64 != 0) g.bits_[i * g.words_per_row_ + g.words_per_row_ - 1] = (1ULL << (n % 64)) - 1;
  }
  return g;
}

void Graph::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_)
    throw ContractError("graph index (" + std::to_string(i) + "," + std::to_string(j) +
                        ") out of range for n=" + std::to_string(n_));
}

double Graph::at(std::size_t i, std::size_t j) const {
  check_index(i, j);
  if (kind_ == GraphKind::Binary) return ((bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1ULL) ? 1.0 : 0.0;
  return weights_[tri_index(i, j)];
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
  if (kind_ != GraphKind::Binary) throw UnsupportedKind("has_edge requires a binary graph");
  check_index(i, j);
  return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1ULL;
}

void Graph::set_edge(std::size_t i, std::size_t j, bool present) {
  if (kind_ != GraphKind::Binary) throw UnsupportedKind("set_edge requires a binary graph");
  check_index(i, j);
  if (i == j) {
    if (!present) throw ContractError("self loops are fixed to 1");
    return;
  }
  const std::uint64_t mi = 1ULL << (j % 64), mj = 1ULL << (i % 64);
  auto& wi = bits_[i * words_per_row_ + j / 64];
  auto& wj = bits_[j * words_per_row_ + i / 64];
  if (present) {
    wi |= mi;
    wj |= mj;
  } else {
    wi &= ~mi;
    wj &= ~mj;
  }
}

void Graph::set_weight(std::size_t i, std::size_t j, double w) {
  if (kind_ != GraphKind::Weighted) throw UnsupportedKind("set_weight requires a weighted graph");
  check_index(i, j);
  if (!std::isfinite(w)) throw ParameterError("weights must be finite");
  weights_[tri_index(i, j)] = w;
}

std::span<const std::uint64_t> Graph::bit_row(std::size_t r) const {
  if (kind_ != GraphKind::Binary) throw UnsupportedKind("bit_row requires a binary graph");
  check_index(r, r);
  return {bits_.data() + r * words_per_row_, words_per_row_};
}

std::span<const double> Graph::weight_row_prefix(std::size_t r) const {
  if (kind_ != GraphKind::Weighted) throw UnsupportedKind("weight_row_prefix requires a weighted graph");
  check_index(r, r);
  return {weights_.data() + r * (r + 1) / 2, r + 1};
}

Graph Graph::scaled(double c) const {
  if (kind_ != GraphKind::Weighted) throw UnsupportedKind("only weighted graphs can be scaled");
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("scale factor must be positive and finite");
  Graph out = *this;
  for (double& w : out.weights_) w *= c;
  return out;
}

std::size_t Graph::edge_count() const {
  if (kind_ != GraphKind::Binary) throw UnsupportedKind("edge_count requires a binary graph");
  std::size_t ones = 0;
  for (std::uint64_t w : bits_) ones += static_cast<std::size_t>(std::popcount(w));
  return (ones - n_) / 2;
}

// RevealedView ---------------------------------------------------------------

RevealedView::RevealedView(const Graph& g, std::size_t revealed) : g_(&g), revealed_(0) { reveal(revealed); }

void RevealedView::reveal(std::size_t k) {
  if (k > g_->size()) throw ContractError("cannot reveal beyond the graph size");
  revealed_ = k;
}

void RevealedView::touch(std::size_t i) const {
  if (i >= revealed_)
    throw ContractError("read of index " + std::to_string(i) + " outside revealed prefix " +
                        std::to_string(revealed_));
  max_read_ = std::max(max_read_, i);
}

double RevealedView::at(std::size_t i, std::size_t j) const {
  touch(i);
  touch(j);
  return g_->at(i, j);
}

std::span<const std::uint64_t> RevealedView::bit_row_prefix(std::size_t r, std::size_t len) const {
  touch(r);
  if (len > revealed_) throw ContractError("row prefix longer than revealed block");
  if (len > 0) touch(len - 1);
  return g_->bit_row(r).first((len + 63) / 64);
}

std::span<const double> RevealedView::weight_row_prefix(std::size_t r, std::size_t len) const {
  touch(r);
  if (len > r + 1) throw ContractError("weighted row prefix limited to the lower triangle");
  if (len > 0) touch(len - 1);
  return g_->weight_row_prefix(r).first(len);
}

// Generators -----------------------------------------------------------------

Graph gen_er(const ErParams& params, std::uint64_t seed) {
  if (params.n < 2) throw ParameterError("ER graph needs n >= 2");
  if (!open_unit(params.p)) throw ParameterError("ER edge probability must lie in (0,1)");
  Rng rng(seed);
  Graph g = Graph::binary(params.n);
  for (std::size_t i = 0; i < params.n; ++i)
    for (std::size_t j = i + 1; j < params.n; ++j)
      if (bernoulli(rng, params.p)) g.set_edge(i, j);
  return g;
}

Graph gen_sbm_labeled(const SbmParams& params, std::span<const int> labels, std::uint64_t seed) {
  if (params.n < 2) throw ParameterError("SBM graph needs n >= 2");
  if (!closed_unit(params.p_in) || !closed_unit(params.p_out))
    throw ParameterError("SBM rates must lie in [0,1]");
  if (labels.size() != params.n) throw ParameterError("SBM label vector must have n entries");
  Rng rng(seed);
  Graph g = Graph::binary(params.n);
  for (std::size_t i = 0; i < params.n; ++i)
    for (std::size_t j = i + 1; j < params.n; ++j) {
      const double p = labels[i] == labels[j] ? params.p_in : params.p_out;
      if (bernoulli(rng, p)) g.set_edge(i, j);
    }
  return g;
}

Graph gen_sbm(const SbmParams& params, std::uint64_t seed) {
  if (params.n < 2) throw ParameterError("SBM graph needs n >= 2");
  if (!open_unit(params.p_in) || !open_unit(params.p_out) || params.p_out > params.p_in)
    throw ParameterError("SBM rates must satisfy 0 < p_out <= p_in < 1");
  // Labels come from their own stream so edge draws do not depend on them.
  Rng label_rng(splitmix64(seed ^ 0x5BD1E995ULL));
  std::vector<int> labels(params.n);
  for (int& l : labels) l = bernoulli(label_rng, 0.5) ? 1 : 0;
  return gen_sbm_labeled(params, labels, seed);
}

Graph gen_goe(const GoeParams& params, std::uint64_t seed) {
  if (params.n < 2) throw ParameterError("GOE graph needs n >= 2");
  if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2))
    throw ParameterError("GOE variance must be positive and finite");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(params.sigma2));
  Graph g = Graph::weighted(params.n);
  for (std::size_t i = 0; i < params.n; ++i)
    for (std::size_t j = i + 1; j < params.n; ++j) g.set_weight(i, j, normal(rng));
  return g;
}

double density(const Graph& g) {
  if (!g.is_binary()) throw UnsupportedKind("density is defined for binary graphs only");
  const double n = static_cast<double>(g.size());
  if (g.size() < 2) throw ParameterError("density needs n >= 2");
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

// Sampling -------------------------------------------------------------------

namespace {

// Partial Fisher-Yates: the first k slots form a uniform k-subset in uniform order.
std::vector<std::size_t> sample_order(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ParameterError("subgraph sample needs k >= 2");
  if (k > n) throw ParameterError("sample size " + std::to_string(k) + " exceeds graph size " + std::to_string(n));
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace

SampledSubgraph induced_subgraph_sample(const Graph& g, std::size_t k, std::uint64_t seed) {
  auto nodes = sample_order(g.size(), k, seed);
  Graph sub = g.is_binary() ? Graph::binary(k) : Graph::weighted(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      if (g.is_binary()) {
        if (g.has_edge(nodes[a], nodes[b])) sub.set_edge(a, b);
      } else {
        sub.set_weight(a, b, g.at(nodes[a], nodes[b]));
      }
    }
  return {std::move(sub), std::move(nodes)};
}

SampledSubgraph induced_subgraph_sample(const SparseGraph& g, std::size_t k, std::uint64_t seed) {
  auto nodes = sample_order(g.size(), k, seed);
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> position(g.size(), kAbsent);
  for (std::size_t a = 0; a < k; ++a) position[nodes[a]] = a;
  Graph sub = Graph::binary(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::uint32_t nb : g.neighbors(nodes[a]))
      if (position[nb] != kAbsent && position[nb] > a) sub.set_edge(a, position[nb]);
  return {std::move(sub), std::move(nodes)};
}

}  // namespace netrand
