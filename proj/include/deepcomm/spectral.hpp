#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "deepcomm/graph.hpp"
#include "deepcomm/random.hpp"

namespace deepcomm {

enum class SolverKind { Auto, Dense, Krylov };

struct SolverOptions {
  SolverKind kind = SolverKind::Auto;
  int denseLimit = 512; // Auto uses the dense solver up to this many nodes
  double tolerance = 1e-10;
  std::uint64_t seed = Rng::kDefaultSeed;
};

/// Second-smallest Laplacian eigenpair of one connected component.
/// `y[k]` belongs to node `nodes[k]`; `nodes` is sorted ascending.
struct FiedlerResult {
  double lambda2 = 0.0;
  double lambda3 = 0.0; // +inf for two-node components
  Eigen::VectorXd y;
  std::vector<NodeId> nodes;
  bool signFixed = false;
  bool degenerate = false; // lambda3 - lambda2 <= 1e-8

  int size() const { return static_cast<int>(nodes.size()); }
  /// Position of `i` in `nodes`, -1 if outside the component.
  int position(NodeId i) const;
  double value(NodeId i) const { return y[position(i)]; }
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

inline constexpr double kDegeneracyGap = 1e-8;

/// Flip `y` so its first entry with magnitude above 1e-12 is positive.
/// Returns false when every entry is (numerically) zero.
bool fix_sign(Eigen::VectorXd &y);

/// Fiedler pair of the subgraph induced by `component`, which must be
/// connected with at least two nodes; throws NumericalError otherwise.
FiedlerResult fiedler(const Graph &g, std::span<const NodeId> component,
                      const SolverOptions &opts = {});
/// Fiedler pair of the active part of `g` (must be connected).
FiedlerResult fiedler(const Graph &g, const SolverOptions &opts = {});

/// Second-smallest eigenvalue of the Laplacian over the full index space,
/// counting removed nodes as isolated vertices (so it is 0 whenever the
/// graph is disconnected or has removed nodes).
double algebraic_connectivity(const Graph &g);

/// All Laplacian eigenvalues over the full index space, ascending.
Eigen::VectorXd laplacian_spectrum(const Graph &g);

/// Largest Laplacian eigenvalue; throws InvalidArgument for m = 0.
double lambda_max_laplacian(const Graph &g, const SolverOptions &opts = {});

/// Perron pair of the adjacency matrix over the active nodes (vector indexed
/// like g.active_nodes(), entries nonnegative). Throws for graphs without
/// active nodes.
EigenPair leading_adjacency_eigenpair(const Graph &g);

/// Modularity matrix B = A - d d^T / 2m over the active nodes.
Eigen::MatrixXd modularity_matrix(const Graph &g);

/// Eigenpairs of B sorted by decreasing eigenvalue; k = -1 returns all.
std::vector<EigenPair> modularity_spectrum(const Graph &g, int k = -1);

/// Columns are Laplacian eigenvectors of the `count` smallest eigenvalues
/// over the active nodes (row r belongs to g.active_nodes()[r]).
Eigen::MatrixXd spectral_embedding(const Graph &g, int count);

namespace detail {

using LinearOperator = std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &)>;

struct KrylovResult {
  Eigen::VectorXd values;  // descending
  Eigen::MatrixXd vectors; // matching columns
  bool converged = false;
  int products = 0;
};

/// Thick-restart Lanczos with full reorthogonalization for the `nev`
/// algebraically largest eigenpairs of a symmetric operator, restricted to
/// the orthogonal complement of the columns of `deflate` (orthonormal).
KrylovResult largest_eigenpairs(const LinearOperator &op, Eigen::Index dim, int nev,
                                const Eigen::MatrixXd &deflate, double tolerance,
                                int max_products, std::uint64_t seed);

} // namespace detail

} // namespace deepcomm
