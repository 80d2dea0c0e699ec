#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace deepcomm {

using NodeId = int;

/// Undirected edge stored with u < v.
struct Edge {
  NodeId u = -1;
  NodeId v = -1;

  static Edge make(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
  auto operator<=>(const Edge &) const = default;
};

/// Undirected simple graph over a fixed index space [0, n).
///
/// Removals never renumber nodes: a removed node stays in the index space,
/// is marked inactive and loses all its edges. Every query that talks about
/// "the graph" (components, Laplacian spectra, centralities) only looks at
/// active nodes. Values are immutable; the removal functions return copies.
class Graph {
public:
  Graph() = default;
  explicit Graph(int n);

  int num_nodes() const { return static_cast<int>(adj_.size()); }
  int num_edges() const { return m_; }
  int num_active() const { return active_count_; }

  bool is_active(NodeId i) const { return active_[i] != 0; }
  bool valid(NodeId i) const { return i >= 0 && i < num_nodes(); }

  /// Sorted ascending.
  std::span<const NodeId> neighbors(NodeId i) const { return adj_[i]; }
  int degree(NodeId i) const { return static_cast<int>(adj_[i].size()); }
  int max_degree() const;
  bool has_edge(NodeId i, NodeId j) const;

  std::vector<Edge> edges() const;
  std::vector<NodeId> active_nodes() const;

  friend Graph build_graph(std::span<const Edge> edges, int n);
  friend Graph remove_node(const Graph &g, NodeId i);
  friend Graph remove_nodes(const Graph &g, std::span<const NodeId> nodes);
  friend Graph remove_edge(const Graph &g, NodeId i, NodeId j);
  friend Graph induced_subgraph(const Graph &g, std::span<const NodeId> keep);

private:
  void drop_node(NodeId i);

  std::vector<std::vector<NodeId>> adj_;
  std::vector<std::uint8_t> active_;
  int m_ = 0;
  int active_count_ = 0;
};

/// Deduplicates, symmetrizes and sorts. Throws InvalidArgument on
/// out-of-range ids or self-loops.
Graph build_graph(std::span<const Edge> edges, int n);

Graph remove_node(const Graph &g, NodeId i);
Graph remove_nodes(const Graph &g, std::span<const NodeId> nodes);
/// Throws InvalidArgument if (i, j) is not an edge.
Graph remove_edge(const Graph &g, NodeId i, NodeId j);
/// Keeps ids; nodes outside `keep` become inactive.
Graph induced_subgraph(const Graph &g, std::span<const NodeId> keep);

/// Compacted copy of the active part: node k of `graph` is `original[k]`.
struct CompactGraph {
  Graph graph;
  std::vector<NodeId> original;
  std::vector<NodeId> position; // original id -> compact id, -1 if dropped
};
CompactGraph compact(const Graph &g);

struct ComponentPartition {
  std::vector<int> labels; // node -> component id, -1 for inactive nodes
  std::vector<int> sizes;  // component id -> node count
  int nonSingletonCount = 0;

  int count() const { return static_cast<int>(sizes.size()); }
  /// Component ids are assigned in order of their smallest node, so the
  /// first maximum is the largest component with the smallest contained id.
  int largest() const;
  int largest_non_singleton_size() const;
  std::vector<NodeId> members(int component) const;
  std::vector<std::vector<NodeId>> non_singleton_members() const;
};

ComponentPartition connected_components(const Graph &g);
/// Active nodes of the largest component (ties: smallest contained id).
std::vector<NodeId> largest_component(const Graph &g);
bool is_connected(const Graph &g);

/// Laplacian L = D - A over the full index space (inactive rows are zero).
template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> laplacian(const Graph &g) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(static_cast<std::size_t>(g.num_nodes() + 2 * g.num_edges()));
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.degree(i) > 0)
      t.emplace_back(i, i, static_cast<Scalar>(g.degree(i)));
    for (NodeId j : g.neighbors(i))
      t.emplace_back(i, j, Scalar(-1));
  }
  Eigen::SparseMatrix<Scalar> L(g.num_nodes(), g.num_nodes());
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

/// Dense Laplacian restricted to `nodes` (rows/cols in the given order).
/// Degrees are those of `g`, so the result is a principal submatrix of
/// the full Laplacian; for a union of components it is itself a Laplacian.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
laplacian_dense(const Graph &g, std::span<const NodeId> nodes) {
  const auto k = static_cast<Eigen::Index>(nodes.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k, k);
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(g.num_nodes()), -1);
  for (Eigen::Index a = 0; a < k; ++a)
    pos[nodes[a]] = a;
  for (Eigen::Index a = 0; a < k; ++a) {
    const NodeId i = nodes[a];
    L(a, a) = static_cast<Scalar>(g.degree(i));
    for (NodeId j : g.neighbors(i))
      if (pos[j] >= 0)
        L(a, pos[j]) = Scalar(-1);
  }
  return L;
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian_dense(const Graph &g) {
  std::vector<NodeId> all(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    all[i] = i;
  return laplacian_dense<Scalar>(g, all);
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
adjacency_dense(const Graph &g, std::span<const NodeId> nodes) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A = -laplacian_dense<Scalar>(g, nodes);
  A.diagonal().setZero();
  return A;
}

/// Eigenvalue-is-zero threshold used for Laplacian ranks.
inline double rank_tolerance(double lambda_max) { return 1e-8 * std::max(1.0, lambda_max); }

/// Upper bounds on the number of non-singleton components left after
/// removing `removed` nodes: n - q - rank(L~) and n - q - 2m~/lambda_n(L~).
struct CommunityCountBound {
  int epsilon = 0; // actual non-singleton component count
  int rank = 0;
  int exactBound = 0;
  std::optional<double> relaxedBound; // empty when the graph has no edges
  double lambdaMax = 0.0;
};
CommunityCountBound community_count_bound(const Graph &g_after, int removed);

/// Largest non-singleton component size read off the null space of the
/// Laplacian: rows of the null-space projector are grouped into binary
/// indicator columns, one per component (isolated nodes included).
struct NullBasisResult {
  Eigen::MatrixXd basis; // n x components, binary columns
  int largest = 0;       // 0 when every component is a singleton
  bool orthogonal = false;
  double nullResidual = 0.0; // max |L X|
};
NullBasisResult largest_component_via_null_basis(const Graph &g);

} // namespace deepcomm
