#include "cggm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cggm/errors.hpp"

namespace cggm {

Graph::Graph(int node_count) : q_(node_count) {
  if (node_count < 0) throw InvalidArgument("graph: negative node count");
  adj_.assign(static_cast<std::size_t>(node_count) * node_count, 0);
}

Graph Graph::from_edges(int node_count, const std::vector<Edge>& edges) {
  Graph g(node_count);
  for (auto [i, j] : edges) g.set_edge(i, j, true);
  return g;
}

Graph Graph::from_adjacency(const std::vector<std::vector<int>>& adjacency) {
  const int q = static_cast<int>(adjacency.size());
  for (const auto& row : adjacency) {
    if (static_cast<int>(row.size()) != q) throw InvalidArgument("adjacency matrix is not square");
  }
  Graph g(q);
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      const bool a = adjacency[i][j] != 0;
      const bool b = adjacency[j][i] != 0;
      if (a != b) {
        throw InvalidArgument("adjacency matrix is not symmetric at (" + std::to_string(i + 1) +
                              "," + std::to_string(j + 1) + ")");
      }
      if (a) g.set_edge(i, j, true);
    }
  }
  return g;
}

void Graph::set_edge(int i, int j, bool present) {
  if (i < 0 || j < 0 || i >= q_ || j >= q_ || i == j) {
    throw InvalidArgument("graph: invalid edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  const bool had = adj_[index(i, j)] != 0;
  if (had == present) return;
  adj_[index(i, j)] = adj_[index(j, i)] = present ? 1 : 0;
  edges_ += present ? 1 : -1;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (int i = 0; i < q_; ++i)
    for (int j = i + 1; j < q_; ++j)
      if (adj_[index(i, j)]) out.emplace_back(i, j);
  return out;
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < q_; ++u)
    if (u != v && adj_[index(v, u)]) out.push_back(u);
  return out;
}

int Graph::degree(int v) const {
  int d = 0;
  for (int u = 0; u < q_; ++u) d += (u != v && adj_[index(v, u)]) ? 1 : 0;
  return d;
}

Eigen::MatrixXi Graph::adjacency() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Identity(q_, q_);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j)
      if (i != j && adj_[index(i, j)]) a(i, j) = 1;
  return a;
}

namespace {

// Maximum cardinality search. Returns the visit order; `earlier[v]` receives
// the neighbours of v visited before it.
std::vector<int> mcs_order(const Graph& g, std::vector<std::vector<int>>* earlier) {
  const int q = g.node_count();
  std::vector<int> weight(q, 0);
  std::vector<char> visited(q, 0);
  std::vector<int> order;
  order.reserve(q);
  if (earlier) earlier->assign(q, {});
  for (int step = 0; step < q; ++step) {
    int best = -1;
    for (int v = 0; v < q; ++v) {
      if (!visited[v] && (best < 0 || weight[v] > weight[best])) best = v;
    }
    visited[best] = 1;
    order.push_back(best);
    for (int u = 0; u < q; ++u) {
      if (u == best || !g.has_edge(best, u)) continue;
      if (visited[u]) {
        if (earlier) (*earlier)[best].push_back(u);
      } else {
        ++weight[u];
      }
    }
  }
  return order;
}

bool zero_fill_in(const Graph& g, const std::vector<int>& order,
                  const std::vector<std::vector<int>>& earlier) {
  const int q = g.node_count();
  std::vector<int> pos(q);
  for (int i = 0; i < q; ++i) pos[order[i]] = i;
  for (int v : order) {
    const auto& prev = earlier[v];
    if (prev.size() < 2) continue;
    // The latest-visited earlier neighbour must see all the others.
    int follower = prev.front();
    for (int u : prev)
      if (pos[u] > pos[follower]) follower = u;
    for (int u : prev)
      if (u != follower && !g.has_edge(u, follower)) return false;
  }
  return true;
}

}  // namespace

bool is_decomposable(const Graph& g) {
  std::vector<std::vector<int>> earlier;
  const auto order = mcs_order(g, &earlier);
  return zero_fill_in(g, order, earlier);
}

bool is_decomposable(const std::vector<std::vector<int>>& adjacency) {
  if (adjacency.empty()) throw InvalidArgument("is_decomposable: need at least one node");
  return is_decomposable(Graph::from_adjacency(adjacency));
}

DecomposableGraph::DecomposableGraph(int node_count) : g_(node_count) {}

DecomposableGraph::DecomposableGraph(Graph g) : g_(std::move(g)) {
  if (!is_decomposable(g_)) throw InvalidState("graph is not decomposable");
}

DecomposableGraph DecomposableGraph::complete(int node_count) {
  Graph g(node_count);
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) g.set_edge(i, j, true);
  return DecomposableGraph(std::move(g));
}

JunctionTree junction_tree(const Graph& g) {
  std::vector<std::vector<int>> earlier;
  const auto order = mcs_order(g, &earlier);
  if (!zero_fill_in(g, order, earlier)) throw InvalidState("junction_tree: graph is not decomposable");

  JunctionTree tree;
  std::size_t previous_size = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int v = order[i];
    const auto& prev = earlier[v];
    if (i == 0 || prev.size() <= previous_size) {
      NodeSet clique = prev;
      clique.push_back(v);
      tree.cliques.push_back(std::move(clique));
    } else {
      tree.cliques.back().push_back(v);
    }
    previous_size = prev.size();
  }

  std::vector<char> seen(g.node_count(), 0);
  for (auto& clique : tree.cliques) {
    std::sort(clique.begin(), clique.end());
    NodeSet sep;
    for (int v : clique)
      if (seen[v]) sep.push_back(v);
    for (int v : clique) seen[v] = 1;
    tree.separators.push_back(std::move(sep));
  }
  return tree;
}

JunctionTree junction_tree(const DecomposableGraph& g) { return junction_tree(g.graph()); }

EdgeProposal propose_edge_toggle(const DecomposableGraph& g, double eta, std::mt19937_64& rng) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("propose_edge_toggle: eta must lie in (0,1)");
  EdgeProposal out{g, {0, 0}, 0.0, ToggleShape::stay};
  const int q = g.node_count();
  const long pairs = static_cast<long>(q) * (q - 1) / 2;
  if (pairs == 0) return out;

  long k = std::uniform_int_distribution<long>(0, pairs - 1)(rng);
  int i = 0;
  while (k >= q - 1 - i) {
    k -= q - 1 - i;
    ++i;
  }
  const int j = i + 1 + static_cast<int>(k);
  out.pair = {i, j};

  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const bool present = g.has_edge(i, j);
  if (!present && u >= eta) return out;
  if (present && u >= 1.0 - eta) return out;

  Graph candidate = g.graph();
  candidate.toggle(i, j);
  if (!is_decomposable(candidate)) {
    out.shape = ToggleShape::rejected_nondecomposable;
    return out;
  }
  out.graph = DecomposableGraph(std::move(candidate));
  if (present) {
    out.shape = ToggleShape::remove;
    out.log_hastings = std::log(eta / (1.0 - eta));
  } else {
    out.shape = ToggleShape::add;
    out.log_hastings = std::log((1.0 - eta) / eta);
  }
  return out;
}

double log_prior_graph(const Graph& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("log_prior_graph: alpha must lie in (0,1)");
  const double q = g.node_count();
  const double e = g.edge_count();
  return e * std::log(alpha) + (q * (q - 1.0) / 2.0 - e) * std::log1p(-alpha);
}

namespace {

std::vector<NodeSet> sorted_nonempty(const std::vector<NodeSet>& sets) {
  std::vector<NodeSet> out;
  for (const auto& s : sets)
    if (!s.empty()) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeSet> multiset_minus(const std::vector<NodeSet>& a, const std::vector<NodeSet>& b) {
  std::vector<NodeSet> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

ComponentDiff affected_components(const DecomposableGraph& before, const JunctionTree& tree_before,
                                  const DecomposableGraph& after, const JunctionTree& tree_after,
                                  Edge toggled) {
  const int q = before.node_count();
  if (after.node_count() != q) throw InvalidArgument("affected_components: node counts differ");
  auto [a, b] = toggled;
  if (a > b) std::swap(a, b);
  int differing = 0;
  bool toggled_differs = false;
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      if (before.has_edge(i, j) != after.has_edge(i, j)) {
        ++differing;
        toggled_differs = toggled_differs || (i == a && j == b);
      }
    }
  }
  if (differing != 1 || !toggled_differs) {
    throw InvalidArgument("affected_components: graphs must differ in exactly the toggled edge");
  }

  const auto cb = sorted_nonempty(tree_before.cliques);
  const auto ca = sorted_nonempty(tree_after.cliques);
  const auto sb = sorted_nonempty(tree_before.separators);
  const auto sa = sorted_nonempty(tree_after.separators);
  return ComponentDiff{multiset_minus(cb, ca), multiset_minus(sb, sa), multiset_minus(ca, cb),
                       multiset_minus(sa, sb)};
}

ComponentDiff affected_components(const DecomposableGraph& before, const DecomposableGraph& after,
                                  Edge toggled) {
  return affected_components(before, junction_tree(before), after, junction_tree(after), toggled);
}

}  // namespace cggm
