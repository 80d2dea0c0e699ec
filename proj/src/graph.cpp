#include "deepcomm/graph.hpp"

#include <algorithm>
#include <string>

#include "deepcomm/errors.hpp"

namespace deepcomm {

Graph::Graph(int n)
    : adj_(static_cast<std::size_t>(n)), active_(static_cast<std::size_t>(n), 1), active_count_(n) {
  if (n < 0)
    throw InvalidArgument("graph: negative node count");
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto &nb : adj_)
    d = std::max(d, static_cast<int>(nb.size()));
  return d;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  if (!valid(i) || !valid(j))
    return false;
  return std::binary_search(adj_[i].begin(), adj_[i].end(), j);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(m_));
  for (NodeId i = 0; i < num_nodes(); ++i)
    for (NodeId j : adj_[i])
      if (i < j)
        out.push_back({i, j});
  return out;
}

std::vector<NodeId> Graph::active_nodes() const {
  std::vector<NodeId> out;
  out.reserve(static_cast<std::size_t>(active_count_));
  for (NodeId i = 0; i < num_nodes(); ++i)
    if (active_[i])
      out.push_back(i);
  return out;
}

void Graph::drop_node(NodeId i) {
  if (!active_[i])
    return;
  for (NodeId j : adj_[i]) {
    auto &nb = adj_[j];
    nb.erase(std::lower_bound(nb.begin(), nb.end(), i));
  }
  m_ -= static_cast<int>(adj_[i].size());
  adj_[i].clear();
  active_[i] = 0;
  --active_count_;
}

Graph build_graph(std::span<const Edge> edges, int n) {
  Graph g(n);
  for (const Edge &e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InvalidArgument("build_graph: node id out of range [0, " + std::to_string(n) +
                            ") in edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")");
    if (e.u == e.v)
      throw InvalidArgument("build_graph: self-loop on node " + std::to_string(e.u));
    g.adj_[e.u].push_back(e.v);
    g.adj_[e.v].push_back(e.u);
  }
  std::size_t twice_m = 0;
  for (auto &nb : g.adj_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    twice_m += nb.size();
  }
  g.m_ = static_cast<int>(twice_m / 2);
  return g;
}

Graph remove_node(const Graph &g, NodeId i) {
  if (!g.valid(i))
    throw InvalidArgument("remove_node: invalid node id " + std::to_string(i));
  Graph out = g;
  out.drop_node(i);
  return out;
}

Graph remove_nodes(const Graph &g, std::span<const NodeId> nodes) {
  Graph out = g;
  for (NodeId i : nodes) {
    if (!g.valid(i))
      throw InvalidArgument("remove_nodes: invalid node id " + std::to_string(i));
    out.drop_node(i);
  }
  return out;
}

Graph remove_edge(const Graph &g, NodeId i, NodeId j) {
  if (!g.has_edge(i, j))
    throw InvalidArgument("remove_edge: edge (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is absent");
  Graph out = g;
  auto &a = out.adj_[i];
  a.erase(std::lower_bound(a.begin(), a.end(), j));
  auto &b = out.adj_[j];
  b.erase(std::lower_bound(b.begin(), b.end(), i));
  --out.m_;
  return out;
}

Graph induced_subgraph(const Graph &g, std::span<const NodeId> keep) {
  std::vector<std::uint8_t> kept(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId i : keep) {
    if (!g.valid(i))
      throw InvalidArgument("induced_subgraph: invalid node id " + std::to_string(i));
    kept[i] = 1;
  }
  Graph out = g;
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    if (!kept[i])
      out.drop_node(i);
  return out;
}

CompactGraph compact(const Graph &g) {
  CompactGraph c;
  c.original = g.active_nodes();
  c.position.assign(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t k = 0; k < c.original.size(); ++k)
    c.position[c.original[k]] = static_cast<NodeId>(k);
  std::vector<Edge> e;
  e.reserve(static_cast<std::size_t>(g.num_edges()));
  for (const Edge &x : g.edges())
    e.push_back({c.position[x.u], c.position[x.v]});
  c.graph = build_graph(e, static_cast<int>(c.original.size()));
  return c;
}

int ComponentPartition::largest() const {
  if (sizes.empty())
    return -1;
  return static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
}

int ComponentPartition::largest_non_singleton_size() const {
  int best = 0;
  for (int s : sizes)
    if (s >= 2)
      best = std::max(best, s);
  return best;
}

std::vector<NodeId> ComponentPartition::members(int component) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < static_cast<NodeId>(labels.size()); ++i)
    if (labels[i] == component)
      out.push_back(i);
  return out;
}

std::vector<std::vector<NodeId>> ComponentPartition::non_singleton_members() const {
  std::vector<std::vector<NodeId>> out(sizes.size());
  for (NodeId i = 0; i < static_cast<NodeId>(labels.size()); ++i)
    if (labels[i] >= 0 && sizes[labels[i]] >= 2)
      out[labels[i]].push_back(i);
  std::erase_if(out, [](const auto &c) { return c.empty(); });
  return out;
}

ComponentPartition connected_components(const Graph &g) {
  ComponentPartition p;
  p.labels.assign(static_cast<std::size_t>(g.num_nodes()), -1);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (!g.is_active(s) || p.labels[s] >= 0)
      continue;
    const int id = p.count();
    int size = 0;
    p.labels[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId i = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId j : g.neighbors(i))
        if (p.labels[j] < 0) {
          p.labels[j] = id;
          stack.push_back(j);
        }
    }
    p.sizes.push_back(size);
    if (size >= 2)
      ++p.nonSingletonCount;
  }
  return p;
}

std::vector<NodeId> largest_component(const Graph &g) {
  const auto p = connected_components(g);
  const int c = p.largest();
  return c < 0 ? std::vector<NodeId>{} : p.members(c);
}

bool is_connected(const Graph &g) { return connected_components(g).count() == 1; }

CommunityCountBound community_count_bound(const Graph &g_after, int removed) {
  if (removed < 0)
    throw InvalidArgument("community_count_bound: negative removal count");
  CommunityCountBound b;
  const auto parts = connected_components(g_after);
  b.epsilon = parts.nonSingletonCount;

  // L~ is block diagonal over components (isolated and removed nodes give
  // zero blocks), so its spectrum is the union of the per-component spectra.
  std::vector<Eigen::VectorXd> spectra;
  for (int c = 0; c < parts.count(); ++c) {
    if (parts.sizes[c] < 2)
      continue;
    const auto nodes = parts.members(c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_dense(g_after, nodes),
                                                      Eigen::EigenvaluesOnly);
    spectra.push_back(es.eigenvalues());
    b.lambdaMax = std::max(b.lambdaMax, es.eigenvalues().maxCoeff());
  }
  const double tol = rank_tolerance(b.lambdaMax);
  for (const auto &ev : spectra)
    b.rank += static_cast<int>((ev.array() > tol).count());
  const int n = g_after.num_nodes();
  b.exactBound = n - removed - b.rank;
  if (b.lambdaMax > 0.0)
    b.relaxedBound = n - removed - 2.0 * g_after.num_edges() / b.lambdaMax;
  return b;
}

NullBasisResult largest_component_via_null_basis(const Graph &g) {
  const int n = g.num_nodes();
  NullBasisResult r;
  if (n == 0)
    return r;
  // Orthonormal null basis V of L, then the projector P = V V^T. P_ij is
  // 1/|C| when i and j share component C and 0 otherwise, so grouping rows
  // of P recovers the binary indicator basis.
  const Eigen::MatrixXd L = laplacian_dense(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const double tol = rank_tolerance(es.eigenvalues().maxCoeff());
  Eigen::Index k = 0;
  while (k < n && es.eigenvalues()[k] <= tol)
    ++k;
  const Eigen::MatrixXd V = es.eigenvectors().leftCols(k);
  const Eigen::MatrixXd P = V * V.transpose();

  std::vector<int> group(static_cast<std::size_t>(n), -1);
  int groups = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (group[i] >= 0)
      continue;
    for (NodeId j = i; j < n; ++j)
      if (group[j] < 0 && P(i, j) > 0.5 * P(i, i))
        group[j] = groups;
    ++groups;
  }
  r.basis = Eigen::MatrixXd::Zero(n, groups);
  for (NodeId i = 0; i < n; ++i)
    r.basis(i, group[i]) = 1.0;

  const Eigen::MatrixXd gram = r.basis.transpose() * r.basis;
  const Eigen::MatrixXd offdiag = gram - Eigen::MatrixXd(gram.diagonal().asDiagonal());
  r.orthogonal = groups == k && offdiag.cwiseAbs().maxCoeff() == 0.0;
  r.nullResidual = (L * r.basis).cwiseAbs().maxCoeff();

  for (Eigen::Index c = 0; c < r.basis.cols(); ++c) {
    const int l1 = static_cast<int>(r.basis.col(c).lpNorm<1>());
    if (l1 >= 2)
      r.largest = std::max(r.largest, l1);
  }
  return r;
}

} // namespace deepcomm
