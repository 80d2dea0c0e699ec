#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "deepcomm/graph.hpp"
#include "deepcomm/lfvc.hpp"
#include "deepcomm/random.hpp"

namespace deepcomm {

// ---------------------------------------------------------------------------
// Modularity

struct ModularitySplit {
  std::vector<int> labels; // +1 / -1 per active node (g.active_nodes() order)
  double Q = 0.0;
  double leadingEigenvalue = 0.0;
};

/// Sign split of the leading eigenvector of B (zeros go to +1) and its
/// modularity Q = s^T B s / 4m. Throws InvalidArgument when m = 0.
ModularitySplit modularity_partition(const Graph &g);

/// Q = s^T B s / 4m for an arbitrary +/-1 labelling of the active nodes.
double modularity_of_split(const Graph &g, std::span<const int> labels);

/// Repeated leading-eigenvector bisection. Each round splits the community
/// with the largest positive modularity gain, until `count` communities
/// exist or no split increases modularity (a warning is recorded).
CommunityAssignment recursive_modularity(const Graph &g, int count);

/// Modularity of a partition of the active nodes into communities.
double partition_modularity(const Graph &g, const std::vector<std::vector<NodeId>> &communities);

// ---------------------------------------------------------------------------
// Spectral clustering

struct KMeansOptions {
  int restarts = 50;
  int maxIterations = 300;
  std::uint64_t seed = Rng::kDefaultSeed;
};

/// k-means++ seeded Lloyd iterations; the restart with the smallest
/// within-cluster sum of squares wins. Returns a label per row.
std::vector<int> kmeans(const Eigen::MatrixXd &points, int k, const KMeansOptions &opts = {});

/// Clusters the rows of the `count` smallest Laplacian eigenvectors.
/// Requires a connected graph.
CommunityAssignment spectral_clustering(const Graph &g, int count, const KMeansOptions &opts = {});

// ---------------------------------------------------------------------------
// Eigenvector L1-norm dense subgraph test

struct L1NullModel {
  int n = 0;
  double pOut = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd mean; // per eigenvector index, decreasing eigenvalue order
  Eigen::VectorXd stddev;
};

/// L1 norms of the modularity eigenvectors of `nullTrials` Erdos-Renyi
/// graphs G(n, pOut); trial t uses seed trial_seed(seed, t).
L1NullModel build_l1_null_model(int n, double p_out, int null_trials, std::uint64_t seed);

struct L1TestResult {
  double t = 0.0;
  int iStar = -1;
  bool declared = false;          // |t| >= 2
  std::vector<NodeId> selectedNodes; // nIn largest |entries| of eigenvector iStar
  Eigen::VectorXd l1Norms;
  int excludedIndices = 0;        // indices with zero null deviation
  std::vector<std::string> warnings;
};

L1TestResult l1_subgraph_test(const Graph &g, const L1NullModel &null_model, int n_in);
L1TestResult l1_subgraph_test(const Graph &g, double p_out, int n_in, int null_trials = 500,
                              std::uint64_t seed = Rng::kDefaultSeed);

// ---------------------------------------------------------------------------
// Classical centralities

enum class CentralityKind { Degree, Betweenness, Closeness, Eigen, Ego, Lfvc };

std::string to_string(CentralityKind k);
CentralityKind centrality_kind_from_string(const std::string &name);

/// Score per node id (inactive nodes score 0).
///  - betweenness: sum over unordered pairs {k, j} not containing i of the
///    fraction of shortest k-j paths through i (no normalization).
///  - closeness: 1 / sum of distances within i's component (0 if isolated).
///  - eigen: Perron vector entry of i's component adjacency matrix.
///  - ego: sum over neighbor pairs of 1 / [A(i)^2 o (I - A(i))]_{kj},
///    zero entries contributing nothing.
///  - lfvc: node-LFVC of the largest component.
std::vector<double> centrality(const Graph &g, CentralityKind kind);

/// Stage-wise removal of the highest-centrality node of the largest
/// component, recomputed after every removal (lowest id wins ties).
RemovalTrace centrality_removal_loop(const Graph &g, CentralityKind kind, RemovalBudget budget,
                                     const SolverOptions &opts = {});

} // namespace deepcomm
