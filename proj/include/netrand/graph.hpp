#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netrand/random.hpp"

namespace netrand {

enum class GraphKind { Binary, Weighted };

/// Symmetric adjacency matrix with self loops.
///
/// Binary graphs keep one bit per entry in full rows (n * ceil(n/64) words),
/// so a 10000-node graph costs ~12.5 MB and both A[i][j] and A[j][i] are
/// single bit reads. Weighted graphs keep the packed lower triangle,
/// diagonal included; the prefix A[r][0..r] of row r is contiguous.
class Graph {
 public:
  /// Identity-only binary graph (self loops, no edges).
  static Graph binary(std::size_t n);
  /// Weighted graph with unit diagonal and zero off-diagonal weights.
  static Graph weighted(std::size_t n);
  static Graph complete(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  GraphKind kind() const noexcept { return kind_; }
  bool is_binary() const noexcept { return kind_ == GraphKind::Binary; }

  double at(std::size_t i, std::size_t j) const;
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Sets the symmetric pair (i,j)/(j,i). Self loops cannot be removed.
  void set_edge(std::size_t i, std::size_t j, bool present = true);
  void set_weight(std::size_t i, std::size_t j, double w);

  /// Words of binary row r; bit j of the row lives in word j/64, bit j%64.
  std::span<const std::uint64_t> bit_row(std::size_t r) const;
  /// Weighted row prefix A[r][0..r] (length r+1, diagonal last).
  std::span<const double> weight_row_prefix(std::size_t r) const;

  std::size_t words_per_row() const noexcept { return words_per_row_; }

  /// Copy with every entry, diagonal included, multiplied by c (weighted only).
  Graph scaled(double c) const;

  /// Number of undirected off-diagonal edges (binary only).
  std::size_t edge_count() const;

  bool operator==(const Graph&) const = default;

 private:
  Graph(std::size_t n, GraphKind kind);
  static std::size_t tri_index(std::size_t i, std::size_t j) noexcept {
    return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
  }
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  GraphKind kind_ = GraphKind::Binary;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<double> weights_;
};

/// Read-only window onto the principal submatrix A^{(revealed)}.
///
/// Any access with an index >= revealed throws ContractError. The view also
/// records the largest index it served, which lets tests confirm that the
/// design engine stays inside the revealed block.
class RevealedView {
 public:
  explicit RevealedView(const Graph& g, std::size_t revealed = 0);

  const Graph& graph() const noexcept { return *g_; }
  std::size_t revealed() const noexcept { return revealed_; }
  void reveal(std::size_t k);

  double at(std::size_t i, std::size_t j) const;
  /// Binary row r restricted to columns [0, len): the words covering the
  /// range, with bits >= len cleared in the last word by the caller's mask.
  std::span<const std::uint64_t> bit_row_prefix(std::size_t r, std::size_t len) const;
  std::span<const double> weight_row_prefix(std::size_t r, std::size_t len) const;

  /// Largest row/column index read so far (0 if nothing read).
  std::size_t max_index_read() const noexcept { return max_read_; }

 private:
  void touch(std::size_t i) const;

  const Graph* g_;
  std::size_t revealed_;
  mutable std::size_t max_read_ = 0;
};

struct ErParams {
  std::size_t n = 0;
  double p = 0.0;
};

struct SbmParams {
  std::size_t n = 0;
  double p_in = 0.0;
  double p_out = 0.0;
};

struct GoeParams {
  std::size_t n = 0;
  double sigma2 = 0.0;
};

Graph gen_er(const ErParams& params, std::uint64_t seed);
Graph gen_sbm(const SbmParams& params, std::uint64_t seed);
/// SBM with caller-fixed group labels (0/1 per node). Accepts closed rates
/// in [0,1] so degenerate block structures can be built in tests.
Graph gen_sbm_labeled(const SbmParams& params, std::span<const int> labels, std::uint64_t seed);
Graph gen_goe(const GoeParams& params, std::uint64_t seed);

/// Off-diagonal density: (#off-diagonal ones) / (n(n-1)). Binary only.
double density(const Graph& g);

/// Sparse undirected graph as loaded from an edge list. Self loops are
/// implicit; neighbour lists are sorted and exclude the node itself.
class SparseGraph {
 public:
  SparseGraph() = default;
  SparseGraph(std::vector<std::string> labels, std::vector<std::vector<std::uint32_t>> adjacency);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const { return adjacency_.at(i); }
  /// Entry of the adjacency matrix with unit diagonal; O(log degree).
  bool has_edge(std::size_t i, std::size_t j) const;

  Graph to_dense() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::size_t edges_ = 0;
};

double density(const SparseGraph& g);

/// Parses the SNAP text format: '#' comment lines, two whitespace-separated
/// node tokens per data line. Tokens are remapped to 0..n-1 in order of first
/// appearance; duplicates and self loops are dropped.
SparseGraph from_edge_list(std::istream& in);
SparseGraph read_edge_list_file(const std::string& path);

/// Writes one "i j" line per undirected edge with i < j, using node labels
/// when `g` carries them.
void write_edge_list(const Graph& g, std::ostream& out);
void write_edge_list(const SparseGraph& g, std::ostream& out);

struct SampledSubgraph {
  Graph graph;
  /// nodes[i] is the parent index of subject i (arrival order).
  std::vector<std::size_t> nodes;
};

/// Uniform k-subset of nodes without replacement, in uniformly random order,
/// with the induced adjacency.
SampledSubgraph induced_subgraph_sample(const Graph& g, std::size_t k, std::uint64_t seed);
SampledSubgraph induced_subgraph_sample(const SparseGraph& g, std::size_t k, std::uint64_t seed);

}  // namespace netrand
