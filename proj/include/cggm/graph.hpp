#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cggm {

using NodeSet = std::vector<int>;  // sorted ascending, 0-based
using Edge = std::pair<int, int>;  // first < second, 0-based

/// Dense symmetric 0/1 adjacency over q nodes. No chordality requirement;
/// thresholded posterior graphs live here.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int node_count);
  static Graph from_edges(int node_count, const std::vector<Edge>& edges);
  /// Rejects non-symmetric input with InvalidArgument. The diagonal is ignored.
  static Graph from_adjacency(const std::vector<std::vector<int>>& adjacency);

  int node_count() const noexcept { return q_; }
  int edge_count() const noexcept { return edges_; }
  bool has_edge(int i, int j) const { return i != j && adj_[index(i, j)] != 0; }
  void set_edge(int i, int j, bool present);
  void toggle(int i, int j) { set_edge(i, j, !has_edge(i, j)); }

  std::vector<Edge> edges() const;
  std::vector<int> neighbors(int v) const;
  int degree(int v) const;
  /// q x q 0/1 matrix with unit diagonal.
  Eigen::MatrixXi adjacency() const;

  bool operator==(const Graph& other) const = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * q_ + j; }

  int q_ = 0;
  int edges_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// Ordered cliques C_1..C_k with separators S_j = C_j ∩ (C_1 ∪ ... ∪ C_{j-1}).
/// separators[j] pairs with cliques[j]; separators[0] is always empty.
struct JunctionTree {
  std::vector<NodeSet> cliques;
  std::vector<NodeSet> separators;
};

/// Chordality test by maximum cardinality search plus zero fill-in check.
bool is_decomposable(const Graph& g);
/// Throws InvalidArgument when the matrix is not square and symmetric.
bool is_decomposable(const std::vector<std::vector<int>>& adjacency);

/// A graph that is known to be chordal. Construction checks it.
class DecomposableGraph {
 public:
  DecomposableGraph() = default;
  explicit DecomposableGraph(int node_count);  // empty graph
  /// Throws InvalidState if `g` is not chordal.
  explicit DecomposableGraph(Graph g);
  static DecomposableGraph complete(int node_count);

  const Graph& graph() const noexcept { return g_; }
  int node_count() const noexcept { return g_.node_count(); }
  int edge_count() const noexcept { return g_.edge_count(); }
  bool has_edge(int i, int j) const { return g_.has_edge(i, j); }
  std::vector<Edge> edges() const { return g_.edges(); }

  bool operator==(const DecomposableGraph& other) const = default;

 private:
  Graph g_;
};

/// Maximal cliques in a running-intersection order derived from MCS.
/// Lowest node index breaks MCS ties, so the result is reproducible.
JunctionTree junction_tree(const DecomposableGraph& g);
/// Throws InvalidState for a non-chordal graph.
JunctionTree junction_tree(const Graph& g);

enum class ToggleShape { add, remove, stay, rejected_nondecomposable };

struct EdgeProposal {
  DecomposableGraph graph;
  Edge pair{0, 0};
  double log_hastings = 0.0;
  ToggleShape shape = ToggleShape::stay;
};

/// Add-delete proposal: pick an off-diagonal pair uniformly, add an absent
/// edge w.p. eta or delete a present one w.p. 1 - eta, otherwise stay.
EdgeProposal propose_edge_toggle(const DecomposableGraph& g, double eta, std::mt19937_64& rng);

/// Independent Bernoulli(alpha) edges: |E| log a + (q(q-1)/2 - |E|) log(1 - a).
double log_prior_graph(const Graph& g, double alpha);
inline double log_prior_graph(const DecomposableGraph& g, double alpha) {
  return log_prior_graph(g.graph(), alpha);
}

/// Components present only in one of the two junction trees (multiset
/// difference). Empty separators are omitted; they carry no weight.
struct ComponentDiff {
  std::vector<NodeSet> removed_cliques;
  std::vector<NodeSet> removed_separators;
  std::vector<NodeSet> added_cliques;
  std::vector<NodeSet> added_separators;
};

/// `before` and `after` must differ in exactly the edge `toggled`.
ComponentDiff affected_components(const DecomposableGraph& before, const JunctionTree& tree_before,
                                  const DecomposableGraph& after, const JunctionTree& tree_after,
                                  Edge toggled);
ComponentDiff affected_components(const DecomposableGraph& before, const DecomposableGraph& after,
                                  Edge toggled);

}  // namespace cggm
