#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "netrand/errors.hpp"
#include "netrand/graph.hpp"

namespace netrand {

namespace {

bool is_identifier(const std::string& token) {
  return std::all_of(token.begin(), token.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':';
  });
}

}  // namespace

SparseGraph::SparseGraph(std::vector<std::string> labels, std::vector<std::vector<std::uint32_t>> adjacency)
    : labels_(std::move(labels)), adjacency_(std::move(adjacency)) {
  if (labels_.size() != adjacency_.size()) throw ContractError("one label per node required");
  std::size_t half_edges = 0;
  for (std::size_t i = 0; i < adjacency_.size(); ++i) {
    auto& nb = adjacency_[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    std::erase(nb, static_cast<std::uint32_t>(i));
    half_edges += nb.size();
  }
  edges_ = half_edges / 2;
}

bool SparseGraph::has_edge(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw ContractError("sparse graph index out of range");
  if (i == j) return true;
  const auto& nb = adjacency_[i];
  return std::binary_search(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
}

Graph SparseGraph::to_dense() const {
  Graph g = Graph::binary(size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::uint32_t j : adjacency_[i])
      if (j > i) g.set_edge(i, j);
  return g;
}

double density(const SparseGraph& g) {
  if (g.size() < 2) throw ParameterError("density needs n >= 2");
  const double n = static_cast<double>(g.size());
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

SparseGraph from_edge_list(std::istream& in) {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::string> labels;
  std::vector<std::vector<std::uint32_t>> adjacency;

  auto intern = [&](const std::string& token) {
    auto [it, inserted] = index.try_emplace(token, static_cast<std::uint32_t>(labels.size()));
    if (inserted) {
      labels.push_back(token);
      adjacency.emplace_back();
    }
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank
    if (line[first] == '#') continue;

    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError(lineno, "expected two node identifiers");
    if (fields >> extra) throw ParseError(lineno, "expected exactly two tokens, found more");
    if (!is_identifier(a) || !is_identifier(b)) throw ParseError(lineno, "node identifiers must be alphanumeric");

    const std::uint32_t u = intern(a);
    const std::uint32_t v = intern(b);
    if (u == v) continue;
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
  }
  if (labels.empty()) throw ParseError(lineno, "edge list contains no nodes");
  return SparseGraph(std::move(labels), std::move(adjacency));
}

SparseGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open edge list '" + path + "'");
  return from_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  if (!g.is_binary()) throw UnsupportedKind("edge lists describe binary graphs");
  out << "# nodes: " << g.size() << " edges: " << g.edge_count() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.has_edge(i, j)) out << i << '\t' << j << '\n';
}

void write_edge_list(const SparseGraph& g, std::ostream& out) {
  out << "# nodes: " << g.size() << " edges: " << g.edge_count() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::uint32_t j : g.neighbors(i))
      if (j > i) out << g.label(i) << '\t' << g.label(j) << '\n';
}

}  // namespace netrand
