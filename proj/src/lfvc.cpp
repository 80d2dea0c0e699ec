#include "deepcomm/lfvc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "deepcomm/errors.hpp"

namespace deepcomm {

namespace {

void check_source(const Graph &g, const FiedlerResult &f) {
  if (f.y.size() != f.size())
    throw InvalidArgument("lfvc: Fiedler vector length does not match its node list");
  for (NodeId i : f.nodes)
    if (!g.valid(i) || !g.is_active(i))
      throw InvalidArgument("lfvc: stale Fiedler result (node " + std::to_string(i) +
                            " is not an active node of the graph)");
}

double sq(double x) { return x * x; }

std::vector<NodeId> checked_set(const Graph &g, const FiedlerResult &f,
                                std::span<const NodeId> removal) {
  std::vector<NodeId> r(removal.begin(), removal.end());
  std::sort(r.begin(), r.end());
  if (std::adjacent_find(r.begin(), r.end()) != r.end())
    throw InvalidArgument("f_set: removal set contains duplicates");
  for (NodeId i : r)
    if (!g.valid(i) || f.position(i) < 0)
      throw InvalidArgument("f_set: node " + std::to_string(i) +
                            " is not in the Fiedler component");
  return r;
}

bool contains(const std::vector<NodeId> &sorted, NodeId i) {
  return std::binary_search(sorted.begin(), sorted.end(), i);
}

} // namespace

double LfvcScores::edge(NodeId i, NodeId j) const {
  const Edge e = Edge::make(i, j);
  const auto it = std::lower_bound(edgeScores.begin(), edgeScores.end(), e,
                                   [](const EdgeScore &s, const Edge &x) { return s.edge < x; });
  if (it == edgeScores.end() || it->edge != e)
    throw InvalidArgument("lfvc: (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is not an edge");
  return it->score;
}

LfvcScores edge_lfvc(const Graph &g, const FiedlerResult &f) {
  check_source(g, f);
  LfvcScores s;
  s.source = f;
  s.nodeScores.assign(static_cast<std::size_t>(g.num_nodes()), 0.0);
  for (const Edge &e : g.edges()) {
    const int a = f.position(e.u);
    const int b = f.position(e.v);
    const double score = (a >= 0 && b >= 0) ? sq(f.y[a] - f.y[b]) : 0.0;
    s.edgeScores.push_back({e, score});
  }
  for (NodeId i : f.nodes) {
    double total = 0.0;
    for (NodeId j : g.neighbors(i))
      total += s.edge(i, j);
    s.nodeScores[i] = total;
  }
  return s;
}

LfvcScores node_lfvc(const Graph &g, const FiedlerResult &f) { return edge_lfvc(g, f); }

double f_set(const Graph &g, const FiedlerResult &f, std::span<const NodeId> removal) {
  check_source(g, f);
  const auto r = checked_set(g, f, removal);
  double incident = 0.0;
  double inside = 0.0;
  for (NodeId i : r) {
    const double yi = f.value(i);
    for (NodeId j : g.neighbors(i)) {
      const int pj = f.position(j);
      if (pj < 0)
        continue;
      const double d = sq(yi - f.y[pj]);
      incident += d;
      if (contains(r, j))
        inside += d;
    }
  }
  return incident - 0.5 * inside;
}

double f_set_split_form(const Graph &g, const FiedlerResult &f, std::span<const NodeId> removal) {
  check_source(g, f);
  const auto r = checked_set(g, f, removal);
  double incident = 0.0;
  double crossing = 0.0;
  for (NodeId i : r) {
    const double yi = f.value(i);
    for (NodeId j : g.neighbors(i)) {
      const int pj = f.position(j);
      if (pj < 0)
        continue;
      const double d = sq(yi - f.y[pj]);
      incident += d;
      if (!contains(r, j))
        crossing += d;
    }
  }
  return 0.5 * incident + 0.5 * crossing;
}

std::string to_string(RemovalMode m) { return m == RemovalMode::Node ? "node" : "edge"; }

std::string to_string(StopReason r) {
  switch (r) {
  case StopReason::BudgetExhausted:
    return "budget-exhausted";
  case StopReason::Disconnected:
    return "disconnected";
  case StopReason::Degenerate:
    return "degenerate";
  }
  return "unknown";
}

std::vector<NodeId> RemovalTrace::removed_nodes() const {
  std::vector<NodeId> out;
  for (const auto &s : steps)
    if (const auto *i = std::get_if<NodeId>(&s.item))
      out.push_back(*i);
  return out;
}

std::vector<Edge> RemovalTrace::removed_edges() const {
  std::vector<Edge> out;
  for (const auto &s : steps)
    if (const auto *e = std::get_if<Edge>(&s.item))
      out.push_back(*e);
  return out;
}

Graph apply_trace(const Graph &g, const RemovalTrace &trace, std::size_t steps) {
  Graph out = g;
  steps = std::min(steps, trace.steps.size());
  for (std::size_t k = 0; k < steps; ++k) {
    const auto &item = trace.steps[k].item;
    if (const auto *i = std::get_if<NodeId>(&item))
      out = remove_node(out, *i);
    else {
      const Edge &e = std::get<Edge>(item);
      out = remove_edge(out, e.u, e.v);
    }
  }
  return out;
}

Graph apply_trace(const Graph &g, const RemovalTrace &trace) {
  return apply_trace(g, trace, trace.steps.size());
}

namespace {

struct Split {
  int pieces = 0;       // components the processed set fell into
  int nonSingleton = 0; // of which have two or more nodes
};

Split split_of(const ComponentPartition &parts, std::span<const NodeId> remainder) {
  std::vector<int> seen;
  Split s;
  for (NodeId i : remainder) {
    const int c = parts.labels[i];
    if (c < 0 || std::find(seen.begin(), seen.end(), c) != seen.end())
      continue;
    seen.push_back(c);
    ++s.pieces;
    if (parts.sizes[c] >= 2)
      ++s.nonSingleton;
  }
  return s;
}

// Shared stage loop. `pick` chooses and applies one removal on the current
// graph given the Fiedler result of the processed component, returning the
// removed item and its score.
template <typename Pick>
RemovalTrace stage_loop(const Graph &g, RemovalMode mode, RemovalBudget budget,
                        std::string scorer_name, const SolverOptions &opts, Pick pick) {
  RemovalTrace trace;
  trace.mode = mode;
  trace.scorer = std::move(scorer_name);
  trace.n = g.num_nodes();
  const auto initial = connected_components(g);
  trace.initialComponentCount = initial.nonSingletonCount;
  trace.initialLargestSize = initial.largest_non_singleton_size();

  if (!budget.adaptive) {
    if (budget.count < 0)
      throw InvalidArgument("greedy removal: negative budget");
    const int size = initial.largest() < 0 ? 0 : initial.sizes[initial.largest()];
    if (mode == RemovalMode::Node && budget.count > size - 2)
      throw InvalidArgument("greedy removal: budget " + std::to_string(budget.count) +
                            " exceeds largest component size - 2 (" +
                            std::to_string(size - 2) + ")");
    if (mode == RemovalMode::Edge) {
      const auto comp = initial.largest() < 0 ? std::vector<NodeId>{} : initial.members(initial.largest());
      int edges = 0;
      for (NodeId i : comp)
        edges += g.degree(i);
      if (budget.count > edges / 2)
        throw InvalidArgument("greedy removal: budget " + std::to_string(budget.count) +
                              " exceeds the edge count of the largest component (" +
                              std::to_string(edges / 2) + ")");
    }
  }

  Graph cur = g;
  std::optional<FiedlerResult> cached;
  trace.stopReason = StopReason::BudgetExhausted;
  while (budget.adaptive || static_cast<int>(trace.steps.size()) < budget.count) {
    const auto comp = largest_component(cur);
    const std::size_t min_size = budget.adaptive ? 3 : 2;
    if (comp.size() < min_size) {
      trace.stopReason = StopReason::Degenerate;
      break;
    }
    FiedlerResult f = (cached && cached->nodes == comp) ? std::move(*cached) : fiedler(cur, comp, opts);
    cached.reset();

    RemovalStep step;
    step.lambda2Before = f.lambda2;
    step.degenerate = f.degenerate;
    auto [item, score] = pick(cur, f);
    step.item = item;
    step.score = score;
    if (const auto *i = std::get_if<NodeId>(&item))
      cur = remove_node(cur, *i);
    else
      cur = remove_edge(cur, std::get<Edge>(item).u, std::get<Edge>(item).v);

    std::vector<NodeId> remainder;
    remainder.reserve(comp.size());
    for (NodeId i : comp)
      if (cur.is_active(i))
        remainder.push_back(i);

    const auto parts = connected_components(cur);
    const Split split = split_of(parts, remainder);
    step.componentCountAfter = parts.nonSingletonCount;
    step.largestSizeAfter = parts.largest_non_singleton_size();
    if (split.pieces == 1 && remainder.size() >= 2) {
      cached = fiedler(cur, remainder, opts);
      step.lambda2After = cached->lambda2;
    }
    trace.steps.push_back(step);

    if (budget.adaptive && split.nonSingleton >= 2) {
      trace.stopReason = StopReason::Disconnected;
      break;
    }
  }
  return trace;
}

} // namespace

RemovalTrace greedy_removal(const Graph &g, const NodeScorer &scorer, RemovalBudget budget,
                            std::string scorer_name, const SolverOptions &opts) {
  return stage_loop(g, RemovalMode::Node, budget, std::move(scorer_name), opts,
                    [&scorer](const Graph &cur, const FiedlerResult &f) {
                      const auto scores = scorer(cur, f);
                      if (scores.size() != f.nodes.size())
                        throw InvalidArgument("greedy removal: scorer returned " +
                                              std::to_string(scores.size()) + " scores for " +
                                              std::to_string(f.nodes.size()) + " nodes");
                      // First maximum over ascending ids: lowest id wins ties.
                      std::size_t best = 0;
                      for (std::size_t k = 1; k < scores.size(); ++k)
                        if (scores[k] > scores[best])
                          best = k;
                      return std::pair<RemovedItem, double>{f.nodes[best], scores[best]};
                    });
}

RemovalTrace greedy_node_removal(const Graph &g, RemovalBudget budget, const SolverOptions &opts) {
  const NodeScorer lfvc = [](const Graph &cur, const FiedlerResult &f) {
    const auto s = node_lfvc(cur, f);
    std::vector<double> out;
    out.reserve(f.nodes.size());
    for (NodeId i : f.nodes)
      out.push_back(s.node(i));
    return out;
  };
  return greedy_removal(g, lfvc, budget, "lfvc", opts);
}

RemovalTrace greedy_edge_removal(const Graph &g, RemovalBudget budget, const SolverOptions &opts) {
  return stage_loop(g, RemovalMode::Edge, budget, "lfvc", opts,
                    [](const Graph &cur, const FiedlerResult &f) {
                      const auto s = edge_lfvc(cur, f);
                      // edgeScores is lexicographic, so the first maximum is
                      // the smallest (min id, max id) pair.
                      const EdgeScore *best = nullptr;
                      for (const auto &e : s.edgeScores) {
                        if (f.position(e.edge.u) < 0)
                          continue;
                        if (!best || e.score > best->score)
                          best = &e;
                      }
                      if (!best)
                        throw NumericalError("greedy edge removal: component has no edges");
                      return std::pair<RemovedItem, double>{best->edge, best->score};
                    });
}

std::vector<NodeId> CommunityAssignment::deep_community(int k) const {
  std::vector<NodeId> out = communities.at(static_cast<std::size_t>(k));
  for (const auto &[node, ids] : membership)
    if (std::find(ids.begin(), ids.end(), k) != ids.end())
      out.push_back(node);
  std::sort(out.begin(), out.end());
  return out;
}

CommunityAssignment assign_communities(const Graph &original, const Graph &after,
                                       std::span<const NodeId> removed) {
  CommunityAssignment a;
  const auto parts = connected_components(after);
  // Component ids follow smallest member, so communities come out ordered
  // by their smallest surviving node.
  std::vector<int> community_of(static_cast<std::size_t>(parts.count()), -1);
  for (int c = 0; c < parts.count(); ++c)
    if (parts.sizes[c] >= 2)
      community_of[c] = a.count(), a.communities.emplace_back();
  for (NodeId i = 0; i < after.num_nodes(); ++i) {
    const int c = parts.labels[i];
    if (c < 0)
      continue;
    if (community_of[c] >= 0)
      a.communities[community_of[c]].push_back(i);
    else
      a.singletonSurvivors.push_back(i);
  }
  a.removedNodes.assign(removed.begin(), removed.end());
  std::sort(a.removedNodes.begin(), a.removedNodes.end());
  for (NodeId r : a.removedNodes) {
    std::vector<int> ids;
    for (NodeId j : original.neighbors(r)) {
      const int c = parts.labels[j];
      if (c >= 0 && community_of[c] >= 0)
        ids.push_back(community_of[c]);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    a.membership[r] = std::move(ids);
  }
  return a;
}

CommunityAssignment extract_deep_communities(const Graph &original, const RemovalTrace &trace) {
  const Graph after = apply_trace(original, trace);
  const auto removed = trace.removed_nodes();
  return assign_communities(original, after, removed);
}

RemovalSet brute_force_optimal_removal(const Graph &g, const FiedlerResult &f, int q) {
  check_source(g, f);
  const int n = f.size();
  if (q < 0 || q > n)
    throw InvalidArgument("brute_force_optimal_removal: q outside [0, component size]");
  double combos = 1.0;
  for (int k = 0; k < q; ++k)
    combos = combos * (n - k) / (k + 1);
  if (combos > 1e6)
    throw InvalidArgument("brute_force_optimal_removal: C(" + std::to_string(n) + ", " +
                          std::to_string(q) + ") exceeds 10^6 subsets");
  RemovalSet best;
  if (q == 0)
    return best;

  std::vector<int> idx(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k)
    idx[k] = k;
  std::vector<NodeId> subset(static_cast<std::size_t>(q));
  bool first = true;
  for (;;) {
    for (int k = 0; k < q; ++k)
      subset[k] = f.nodes[idx[k]];
    const double v = f_set(g, f, subset);
    if (first || v > best.value) {
      best.nodes = subset;
      best.value = v;
      first = false;
    }
    int k = q - 1;
    while (k >= 0 && idx[k] == n - q + k)
      --k;
    if (k < 0)
      break;
    ++idx[k];
    for (int t = k + 1; t < q; ++t)
      idx[t] = idx[t - 1] + 1;
  }
  return best;
}

RemovalSet greedy_fixed_fiedler(const Graph &g, const FiedlerResult &f, int q) {
  check_source(g, f);
  if (q < 0 || q > f.size())
    throw InvalidArgument("greedy_fixed_fiedler: q outside [0, component size]");
  RemovalSet r;
  std::vector<std::uint8_t> taken(static_cast<std::size_t>(g.num_nodes()), 0);
  for (int step = 0; step < q; ++step) {
    NodeId best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (NodeId v : f.nodes) {
      if (taken[v])
        continue;
      double gain = 0.0;
      const double yv = f.value(v);
      for (NodeId j : g.neighbors(v)) {
        const int pj = f.position(j);
        if (pj >= 0 && !taken[j])
          gain += sq(yv - f.y[pj]);
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    taken[best] = 1;
    r.nodes.push_back(best);
  }
  r.value = f_set(g, f, r.nodes);
  return r;
}

GreedyBoundReport greedy_bound_check(const Graph &g, int q, const SolverOptions &opts) {
  if (q < 1)
    throw InvalidArgument("greedy_bound_check: q must be at least 1");
  const FiedlerResult f = fiedler(g, opts);
  GreedyBoundReport rep;
  rep.q = q;
  const auto opt = brute_force_optimal_removal(g, f, q);
  const auto greedy = greedy_fixed_fiedler(g, f, q);
  rep.fOptimal = opt.value;
  rep.fGreedy = greedy.value;
  rep.optimalSet = opt.nodes;
  rep.greedySet = greedy.nodes;
  rep.guaranteeFactor = 1.0 - std::pow(1.0 - 1.0 / q, q);
  rep.guaranteeHolds = rep.fGreedy >= rep.guaranteeFactor * rep.fOptimal - 1e-12;
  rep.lambda2 = f.lambda2;
  rep.lambda2AfterGreedy = algebraic_connectivity(remove_nodes(g, greedy.nodes));
  rep.lambda2Bound = f.lambda2 - (1.0 - std::exp(-1.0)) * rep.fOptimal;
  rep.lambda2BoundHolds = rep.lambda2AfterGreedy <= rep.lambda2Bound + 1e-9;
  return rep;
}

} // namespace deepcomm
