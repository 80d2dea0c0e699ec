#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "deepcomm/graph.hpp"
#include "deepcomm/spectral.hpp"

namespace deepcomm {

struct EdgeScore {
  Edge edge;
  double score = 0.0;
};

/// Local Fiedler vector centrality of every active node and edge.
///
/// edge-LFVC(i, j) = (y_i - y_j)^2 and node-LFVC(i) is the sum of the edge
/// scores of i's incident edges, summed in neighbor order so the identity
/// holds bit-for-bit. Nodes and edges outside the Fiedler component score 0.
struct LfvcScores {
  std::vector<double> nodeScores;    // indexed by node id
  std::vector<EdgeScore> edgeScores; // every active edge, lexicographic
  FiedlerResult source;

  double node(NodeId i) const { return nodeScores[i]; }
  double edge(NodeId i, NodeId j) const;
};

/// Both throw InvalidArgument when `f` does not describe nodes of `g`.
LfvcScores edge_lfvc(const Graph &g, const FiedlerResult &f);
LfvcScores node_lfvc(const Graph &g, const FiedlerResult &f);

/// f(R) = sum_{i in R} sum_{j in N_i} (y_i-y_j)^2
///        - 1/2 sum_{i,j in R} A_ij (y_i-y_j)^2
/// for the fixed Fiedler vector in `f`.
double f_set(const Graph &g, const FiedlerResult &f, std::span<const NodeId> removal);
/// Same set function written as 1/2 sum_{i in R} sum_{j in N_i} (y_i-y_j)^2
/// + 1/2 sum_{i in R, j notin R} A_ij (y_i-y_j)^2.
double f_set_split_form(const Graph &g, const FiedlerResult &f, std::span<const NodeId> removal);

// ---------------------------------------------------------------------------
// Greedy removal

enum class RemovalMode { Node, Edge };
enum class StopReason { BudgetExhausted, Disconnected, Degenerate };

std::string to_string(RemovalMode m);
std::string to_string(StopReason r);

struct RemovalBudget {
  int count = 1;
  bool adaptive = false;

  static RemovalBudget fixed(int q) { return {q, false}; }
  /// Stop once the processed component splits into two or more
  /// non-singleton pieces.
  static RemovalBudget until_split() { return {0, true}; }
};

using RemovedItem = std::variant<NodeId, Edge>;

struct RemovalStep {
  RemovedItem item;
  double score = 0.0;
  double lambda2Before = 0.0; // of the component the item was taken from
  double lambda2After = 0.0;  // of what is left of it; 0 once it splits
  int componentCountAfter = 0; // non-singleton components of the whole graph
  int largestSizeAfter = 0;    // largest non-singleton component size
  bool degenerate = false;     // Fiedler eigenvalue was (near) repeated
};

struct RemovalTrace {
  RemovalMode mode = RemovalMode::Node;
  std::string scorer = "lfvc";
  int n = 0;
  int initialComponentCount = 0;
  int initialLargestSize = 0;
  std::vector<RemovalStep> steps;
  StopReason stopReason = StopReason::BudgetExhausted;

  std::vector<NodeId> removed_nodes() const;
  std::vector<Edge> removed_edges() const;
};

/// Scores the nodes of the component described by `f` (aligned with
/// f.nodes). The greedy loop removes the first maximum, i.e. the lowest id.
using NodeScorer = std::function<std::vector<double>(const Graph &, const FiedlerResult &)>;

/// Generic stage-wise removal: at each stage take the largest component
/// (ties: smallest contained id), compute its Fiedler vector, score its
/// nodes and remove the best one.
RemovalTrace greedy_removal(const Graph &g, const NodeScorer &scorer, RemovalBudget budget,
                            std::string scorer_name, const SolverOptions &opts = {});

/// Greedy node-LFVC removal with the Fiedler vector recomputed per stage.
RemovalTrace greedy_node_removal(const Graph &g, RemovalBudget budget,
                                 const SolverOptions &opts = {});
/// Greedy edge-LFVC removal; ties broken lexicographically on (min, max).
RemovalTrace greedy_edge_removal(const Graph &g, RemovalBudget budget,
                                 const SolverOptions &opts = {});

/// Replays the removals of `trace` on `g`.
Graph apply_trace(const Graph &g, const RemovalTrace &trace);
/// Replays the first `steps` removals only.
Graph apply_trace(const Graph &g, const RemovalTrace &trace, std::size_t steps);

// ---------------------------------------------------------------------------
// Deep communities

struct CommunityAssignment {
  std::vector<std::vector<NodeId>> communities; // surviving members, sorted
  std::vector<NodeId> singletonSurvivors;
  std::vector<NodeId> removedNodes;
  std::map<NodeId, std::vector<int>> membership; // removed node -> community ids
  std::vector<std::string> warnings;

  int count() const { return static_cast<int>(communities.size()); }
  /// Surviving members plus every removed node attached to them.
  std::vector<NodeId> deep_community(int k) const;
};

/// Non-singleton components of `after` become communities; each node in
/// `removed` joins every community it touched in `original`.
CommunityAssignment assign_communities(const Graph &original, const Graph &after,
                                       std::span<const NodeId> removed);
CommunityAssignment extract_deep_communities(const Graph &original, const RemovalTrace &trace);

// ---------------------------------------------------------------------------
// Fixed-Fiedler-vector set function oracles

struct RemovalSet {
  std::vector<NodeId> nodes;
  double value = 0.0;
};

/// Exhaustive maximizer of f over all q-subsets of the Fiedler component.
/// Ties keep the lexicographically first subset. Throws InvalidArgument
/// when C(size, q) exceeds 10^6.
RemovalSet brute_force_optimal_removal(const Graph &g, const FiedlerResult &f, int q);

/// Greedy maximization of f with y held fixed: each pick maximizes the
/// marginal gain, which equals node-LFVC in the graph with the earlier
/// picks removed.
RemovalSet greedy_fixed_fiedler(const Graph &g, const FiedlerResult &f, int q);

struct GreedyBoundReport {
  int q = 0;
  double fGreedy = 0.0;
  double fOptimal = 0.0;
  double guaranteeFactor = 0.0; // 1 - (1 - 1/q)^q
  bool guaranteeHolds = false;
  double lambda2 = 0.0;
  double lambda2AfterGreedy = 0.0; // full index space, removed nodes isolated
  double lambda2Bound = 0.0;       // lambda2 - (1 - 1/e) fOptimal
  bool lambda2BoundHolds = false;
  std::vector<NodeId> greedySet;
  std::vector<NodeId> optimalSet;
};

/// Compares greedy and exhaustive removal for the set function of the
/// initial Fiedler vector of connected graph `g`.
GreedyBoundReport greedy_bound_check(const Graph &g, int q, const SolverOptions &opts = {});

} // namespace deepcomm
