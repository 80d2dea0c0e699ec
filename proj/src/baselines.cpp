#include "deepcomm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "deepcomm/errors.hpp"
#include "deepcomm/sbm.hpp"
#include "deepcomm/spectral.hpp"

namespace deepcomm {

// ---------------------------------------------------------------------------
// Modularity

ModularitySplit modularity_partition(const Graph &g) {
  if (g.num_edges() == 0)
    throw InvalidArgument("modularity_partition: graph has no edges");
  const Eigen::MatrixXd B = modularity_matrix(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const auto n = B.rows();
  Eigen::VectorXd lead = es.eigenvectors().col(n - 1);
  fix_sign(lead);
  ModularitySplit s;
  s.leadingEigenvalue = es.eigenvalues()[n - 1];
  s.labels.resize(static_cast<std::size_t>(n));
  Eigen::VectorXd sv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.labels[i] = lead[i] >= 0.0 ? 1 : -1;
    sv[i] = s.labels[i];
  }
  s.Q = sv.dot(B * sv) / (4.0 * g.num_edges());
  return s;
}

double modularity_of_split(const Graph &g, std::span<const int> labels) {
  const Eigen::MatrixXd B = modularity_matrix(g);
  if (static_cast<Eigen::Index>(labels.size()) != B.rows())
    throw InvalidArgument("modularity_of_split: label count does not match active nodes");
  Eigen::VectorXd s(B.rows());
  for (Eigen::Index i = 0; i < B.rows(); ++i)
    s[i] = labels[i];
  return s.dot(B * s) / (4.0 * g.num_edges());
}

double partition_modularity(const Graph &g, const std::vector<std::vector<NodeId>> &communities) {
  const auto nodes = g.active_nodes();
  const Eigen::MatrixXd B = modularity_matrix(g);
  std::vector<int> pos(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    pos[nodes[k]] = static_cast<int>(k);
  double q = 0.0;
  for (const auto &c : communities)
    for (NodeId i : c)
      for (NodeId j : c)
        q += B(pos[i], pos[j]);
  return q / (2.0 * g.num_edges());
}

namespace {

struct Bisection {
  double gain = 0.0;
  std::vector<int> members; // positions into the active node list
  std::vector<int> labels;
};

// Newman's generalized modularity matrix for subdividing `members`:
// B(g)_ij = B_ij - delta_ij sum_{k in g} B_ik.
Bisection try_bisect(const Eigen::MatrixXd &B, const std::vector<int> &members, double two_m) {
  const auto k = static_cast<Eigen::Index>(members.size());
  Bisection b;
  b.members = members;
  if (k < 2)
    return b;
  Eigen::MatrixXd Bg(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index c = 0; c < k; ++c)
      Bg(a, c) = B(members[a], members[c]);
  const Eigen::VectorXd rows = Bg.rowwise().sum();
  Bg.diagonal() -= rows;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Bg);
  if (es.eigenvalues()[k - 1] <= 1e-10)
    return b;
  Eigen::VectorXd lead = es.eigenvectors().col(k - 1);
  fix_sign(lead);
  Eigen::VectorXd s(k);
  b.labels.resize(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    b.labels[a] = lead[a] >= 0.0 ? 1 : -1;
    s[a] = b.labels[a];
  }
  b.gain = s.dot(Bg * s) / (2.0 * two_m);
  return b;
}

} // namespace

CommunityAssignment recursive_modularity(const Graph &g, int count) {
  if (count < 2)
    throw InvalidArgument("recursive_modularity: community count must be at least 2");
  if (g.num_edges() == 0)
    throw InvalidArgument("recursive_modularity: graph has no edges");
  const auto nodes = g.active_nodes();
  const Eigen::MatrixXd B = modularity_matrix(g);
  const double two_m = 2.0 * g.num_edges();

  std::vector<std::vector<int>> groups(1);
  groups[0].resize(nodes.size());
  std::iota(groups[0].begin(), groups[0].end(), 0);

  CommunityAssignment a;
  while (static_cast<int>(groups.size()) < count) {
    int best = -1;
    Bisection best_split;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      auto split = try_bisect(B, groups[c], two_m);
      if (split.gain > 1e-12 && (best < 0 || split.gain > best_split.gain)) {
        best = static_cast<int>(c);
        best_split = std::move(split);
      }
    }
    if (best < 0) {
      a.warnings.push_back("recursive_modularity: no split increases modularity; stopped at " +
                           std::to_string(groups.size()) + " of " + std::to_string(count) +
                           " communities");
      break;
    }
    std::vector<int> plus, minus;
    for (std::size_t k = 0; k < best_split.members.size(); ++k)
      (best_split.labels[k] > 0 ? plus : minus).push_back(best_split.members[k]);
    groups[best] = std::move(plus);
    groups.push_back(std::move(minus));
  }

  for (const auto &grp : groups) {
    std::vector<NodeId> c;
    for (int p : grp)
      c.push_back(nodes[p]);
    std::sort(c.begin(), c.end());
    a.communities.push_back(std::move(c));
  }
  std::sort(a.communities.begin(), a.communities.end());
  return a;
}

// ---------------------------------------------------------------------------
// Spectral clustering

std::vector<int> kmeans(const Eigen::MatrixXd &points, int k, const KMeansOptions &opts) {
  const auto n = points.rows();
  if (k < 1 || k > n)
    throw InvalidArgument("kmeans: k outside [1, rows]");
  Rng rng(opts.seed);
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < opts.restarts; ++restart) {
    // k-means++ seeding.
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd d2(n);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = (points.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double target = rng.uniform() * total;
        for (pick = 0; pick < n - 1; ++pick) {
          target -= d2[pick];
          if (target < 0.0)
            break;
        }
      } else {
        pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
      }
      centers.row(c) = points.row(pick);
      for (Eigen::Index i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], (points.row(i) - centers.row(c)).squaredNorm());
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int iter = 0; iter < opts.maxIterations; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        inertia += best;
        if (labels[i] != arg) {
          labels[i] = arg;
          changed = true;
        }
      }
      if (!changed)
        break;
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[i]) += points.row(i);
        ++counts[labels[i]];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) {
          centers.row(c) = sums.row(c) / counts[c];
        } else {
          // Empty cluster: move it to the point farthest from its center.
          Eigen::Index far = 0;
          double far_d = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (points.row(i) - centers.row(labels[i])).squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          centers.row(c) = points.row(far);
        }
      }
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }

  // Relabel by first appearance.
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int &l : best_labels) {
    if (remap[l] < 0)
      remap[l] = next++;
    l = remap[l];
  }
  return best_labels;
}

CommunityAssignment spectral_clustering(const Graph &g, int count, const KMeansOptions &opts) {
  const auto nodes = g.active_nodes();
  if (count < 2 || count > static_cast<int>(nodes.size()))
    throw InvalidArgument("spectral_clustering: community count " + std::to_string(count) +
                          " outside [2, " + std::to_string(nodes.size()) + "]");
  if (!is_connected(g))
    throw InvalidArgument("spectral_clustering: graph must be connected");
  const Eigen::MatrixXd U = spectral_embedding(g, count);
  const auto labels = kmeans(U, count, opts);
  CommunityAssignment a;
  a.communities.resize(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < nodes.size(); ++k)
    a.communities[labels[k]].push_back(nodes[k]);
  std::erase_if(a.communities, [](const auto &c) { return c.empty(); });
  std::sort(a.communities.begin(), a.communities.end());
  return a;
}

// ---------------------------------------------------------------------------
// L1 norm test

namespace {

Eigen::VectorXd eigenvector_l1_norms(const Graph &g) {
  const auto spectrum = modularity_spectrum(g);
  Eigen::VectorXd l1(static_cast<Eigen::Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    l1[static_cast<Eigen::Index>(i)] = spectrum[i].vector.lpNorm<1>();
  return l1;
}

} // namespace

L1NullModel build_l1_null_model(int n, double p_out, int null_trials, std::uint64_t seed) {
  if (!(p_out > 0.0 && p_out < 1.0))
    throw InvalidArgument("l1 null model: p_out must lie in (0, 1)");
  if (null_trials < 2)
    throw InvalidArgument("l1 null model: need at least two null trials");
  L1NullModel m;
  m.n = n;
  m.pOut = p_out;
  m.trials = null_trials;
  m.seed = seed;
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<std::size_t>(null_trials));
  for (int t = 0; t < null_trials; ++t) {
    const Graph er = erdos_renyi(n, p_out, trial_seed(seed, static_cast<std::uint64_t>(t)));
    if (er.num_edges() == 0)
      continue;
    samples.push_back(eigenvector_l1_norms(er));
  }
  if (samples.size() < 2)
    throw NumericalError("l1 null model: fewer than two null graphs had edges");
  const double count = static_cast<double>(samples.size());
  m.mean = Eigen::VectorXd::Zero(n);
  for (const auto &s : samples)
    m.mean += s;
  m.mean /= count;
  m.stddev = Eigen::VectorXd::Zero(n);
  for (const auto &s : samples)
    m.stddev.array() += (s - m.mean).array().square();
  m.stddev = (m.stddev / (count - 1.0)).cwiseSqrt();
  return m;
}

L1TestResult l1_subgraph_test(const Graph &g, const L1NullModel &null_model, int n_in) {
  const auto nodes = g.active_nodes();
  if (static_cast<int>(nodes.size()) != null_model.n)
    throw InvalidArgument("l1_subgraph_test: null model built for n = " +
                          std::to_string(null_model.n));
  if (n_in < 0 || n_in > null_model.n)
    throw InvalidArgument("l1_subgraph_test: n_in outside [0, n]");
  const auto spectrum = modularity_spectrum(g);
  L1TestResult r;
  r.l1Norms.resize(static_cast<Eigen::Index>(spectrum.size()));
  r.t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    r.l1Norms[idx] = spectrum[i].vector.lpNorm<1>();
    if (null_model.stddev[idx] <= 0.0) {
      ++r.excludedIndices;
      continue;
    }
    const double z = (r.l1Norms[idx] - null_model.mean[idx]) / null_model.stddev[idx];
    if (z < r.t) {
      r.t = z;
      r.iStar = static_cast<int>(i);
    }
  }
  if (r.excludedIndices > 0)
    r.warnings.push_back("l1_subgraph_test: " + std::to_string(r.excludedIndices) +
                         " eigenvector indices have zero null deviation and were excluded");
  if (r.iStar < 0)
    throw NumericalError("l1_subgraph_test: every index has zero null deviation");
  r.declared = std::abs(r.t) >= 2.0;

  const Eigen::VectorXd &v = spectrum[static_cast<std::size_t>(r.iStar)].vector;
  std::vector<int> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&v](int a, int b) { return std::abs(v[a]) > std::abs(v[b]); });
  for (int k = 0; k < n_in; ++k)
    r.selectedNodes.push_back(nodes[order[k]]);
  std::sort(r.selectedNodes.begin(), r.selectedNodes.end());
  return r;
}

L1TestResult l1_subgraph_test(const Graph &g, double p_out, int n_in, int null_trials,
                              std::uint64_t seed) {
  const auto null_model = build_l1_null_model(g.num_active(), p_out, null_trials, seed);
  return l1_subgraph_test(g, null_model, n_in);
}

// ---------------------------------------------------------------------------
// Centralities

std::string to_string(CentralityKind k) {
  switch (k) {
  case CentralityKind::Degree:
    return "degree";
  case CentralityKind::Betweenness:
    return "betweenness";
  case CentralityKind::Closeness:
    return "closeness";
  case CentralityKind::Eigen:
    return "eigen";
  case CentralityKind::Ego:
    return "ego";
  case CentralityKind::Lfvc:
    return "lfvc";
  }
  return "unknown";
}

CentralityKind centrality_kind_from_string(const std::string &name) {
  for (auto k : {CentralityKind::Degree, CentralityKind::Betweenness, CentralityKind::Closeness,
                 CentralityKind::Eigen, CentralityKind::Ego, CentralityKind::Lfvc})
    if (to_string(k) == name)
      return k;
  throw InvalidArgument("unknown centrality '" + name + "'");
}

namespace {

std::vector<double> betweenness(const Graph &g) {
  const int n = g.num_nodes();
  std::vector<double> bc(static_cast<std::size_t>(n), 0.0);
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<double> sigma(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<NodeId> order;
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    if (!g.is_active(s))
      continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1)
          sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : g.neighbors(w))
        if (dist[v] == dist[w] - 1)
          delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s)
        bc[w] += delta[w];
    }
  }
  // Every unordered pair was counted from both endpoints.
  for (double &x : bc)
    x *= 0.5;
  return bc;
}

std::vector<double> closeness(const Graph &g) {
  const int n = g.num_nodes();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    if (!g.is_active(s))
      continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.push_back(s);
    long long total = 0;
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      total += dist[v];
      for (NodeId w : g.neighbors(v))
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
    }
    out[s] = total > 0 ? 1.0 / static_cast<double>(total) : 0.0;
  }
  return out;
}

std::vector<double> eigen_centrality(const Graph &g) {
  std::vector<double> out(static_cast<std::size_t>(g.num_nodes()), 0.0);
  const auto parts = connected_components(g);
  for (int c = 0; c < parts.count(); ++c) {
    const auto members = parts.members(c);
    if (members.size() < 2)
      continue;
    const auto p = leading_adjacency_eigenpair(induced_subgraph(g, members));
    for (std::size_t k = 0; k < members.size(); ++k)
      out[members[k]] = p.vector[static_cast<Eigen::Index>(k)];
  }
  return out;
}

std::vector<double> ego(const Graph &g) {
  std::vector<double> out(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const auto nb = g.neighbors(i);
    double total = 0.0;
    // Pairs involving i itself are adjacent to i and contribute nothing;
    // adjacent neighbor pairs are masked by (I - A(i)).
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        const NodeId k = nb[a];
        const NodeId j = nb[b];
        if (g.has_edge(k, j))
          continue;
        // Two-hop walks k - x - j inside the ego network: x = i or a
        // common neighbor of k and j that is also a neighbor of i.
        int walks = 1;
        for (NodeId x : nb)
          if (x != k && x != j && g.has_edge(k, x) && g.has_edge(x, j))
            ++walks;
        total += 1.0 / walks;
      }
    out[i] = total;
  }
  return out;
}

} // namespace

std::vector<double> centrality(const Graph &g, CentralityKind kind) {
  switch (kind) {
  case CentralityKind::Degree: {
    std::vector<double> out(static_cast<std::size_t>(g.num_nodes()));
    for (NodeId i = 0; i < g.num_nodes(); ++i)
      out[i] = g.degree(i);
    return out;
  }
  case CentralityKind::Betweenness:
    return betweenness(g);
  case CentralityKind::Closeness:
    return closeness(g);
  case CentralityKind::Eigen:
    return eigen_centrality(g);
  case CentralityKind::Ego:
    return ego(g);
  case CentralityKind::Lfvc: {
    std::vector<double> out(static_cast<std::size_t>(g.num_nodes()), 0.0);
    const auto comp = largest_component(g);
    if (comp.size() < 2)
      return out;
    return node_lfvc(g, fiedler(g, comp)).nodeScores;
  }
  }
  return {};
}

RemovalTrace centrality_removal_loop(const Graph &g, CentralityKind kind, RemovalBudget budget,
                                     const SolverOptions &opts) {
  if (kind == CentralityKind::Lfvc)
    return greedy_node_removal(g, budget, opts);
  const NodeScorer scorer = [kind](const Graph &cur, const FiedlerResult &f) {
    const auto all = centrality(induced_subgraph(cur, f.nodes), kind);
    std::vector<double> out;
    out.reserve(f.nodes.size());
    for (NodeId i : f.nodes)
      out.push_back(all[i]);
    return out;
  };
  return greedy_removal(g, scorer, budget, to_string(kind), opts);
}

} // namespace deepcomm
