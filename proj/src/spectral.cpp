#include "deepcomm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SparseCholesky>

#include "deepcomm/errors.hpp"

namespace deepcomm {

double Rng::normal() {
  constexpr double two_pi = 6.283185307179586476925286766559;
  double u1 = uniform();
  while (u1 <= 0.0)
    u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

int FiedlerResult::position(NodeId i) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), i);
  if (it == nodes.end() || *it != i)
    return -1;
  return static_cast<int>(it - nodes.begin());
}

bool fix_sign(Eigen::VectorXd &y) {
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (std::abs(y[k]) > 1e-12) {
      if (y[k] < 0)
        y = -y;
      return true;
    }
  }
  return false;
}

namespace {

Eigen::SparseMatrix<double> component_laplacian(const Graph &g, std::span<const NodeId> nodes) {
  std::vector<int> pos(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    pos[nodes[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const NodeId i = nodes[k];
    int deg = 0;
    for (NodeId j : g.neighbors(i)) {
      if (pos[j] < 0)
        continue;
      t.emplace_back(static_cast<int>(k), pos[j], -1.0);
      ++deg;
    }
    t.emplace_back(static_cast<int>(k), static_cast<int>(k), static_cast<double>(deg));
  }
  const auto k = static_cast<Eigen::Index>(nodes.size());
  Eigen::SparseMatrix<double> L(k, k);
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

// Laplacian of the subgraph induced by `nodes`, dense.
Eigen::MatrixXd induced_laplacian_dense(const Graph &g, std::span<const NodeId> nodes) {
  return Eigen::MatrixXd(component_laplacian(g, nodes));
}

bool use_dense(const SolverOptions &opts, std::size_t size) {
  switch (opts.kind) {
  case SolverKind::Dense:
    return true;
  case SolverKind::Krylov:
    return size < 3;
  case SolverKind::Auto:
    break;
  }
  return static_cast<int>(size) <= opts.denseLimit;
}

void finish_fiedler(FiedlerResult &r, const Eigen::SparseMatrix<double> &L) {
  r.y.array() -= r.y.mean();
  r.y.normalize();
  r.signFixed = fix_sign(r.y);
  r.lambda2 = r.y.dot(L * r.y);
  r.degenerate = r.lambda3 - r.lambda2 <= kDegeneracyGap;
}

} // namespace

FiedlerResult fiedler(const Graph &g, std::span<const NodeId> component,
                      const SolverOptions &opts) {
  if (component.size() < 2)
    throw NumericalError("fiedler: component must contain at least two nodes");
  FiedlerResult r;
  r.nodes.assign(component.begin(), component.end());
  std::sort(r.nodes.begin(), r.nodes.end());
  for (NodeId i : r.nodes)
    if (!g.valid(i) || !g.is_active(i))
      throw InvalidArgument("fiedler: node " + std::to_string(i) + " is not an active node");

  const Eigen::SparseMatrix<double> L = component_laplacian(g, r.nodes);
  const auto n = static_cast<Eigen::Index>(r.nodes.size());

  if (use_dense(opts, r.nodes.size())) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(L)};
    if (es.info() != Eigen::Success)
      throw NumericalError("fiedler: dense eigensolver failed");
    const double tol = rank_tolerance(es.eigenvalues()[n - 1]);
    if (es.eigenvalues()[1] <= tol)
      throw NumericalError("fiedler: graph is disconnected (lambda2 = " +
                           std::to_string(es.eigenvalues()[1]) +
                           "); compute the Fiedler vector per connected component");
    r.y = es.eigenvectors().col(1);
    r.lambda3 = n > 2 ? es.eigenvalues()[2] : std::numeric_limits<double>::infinity();
    finish_fiedler(r, L);
    return r;
  }

  // Shift-invert around zero: the largest eigenvalues of (L + s I)^-1 on
  // the complement of the all-ones vector are 1/(lambda2 + s), 1/(lambda3 + s).
  const double shift = 1e-3;
  Eigen::SparseMatrix<double> M = L;
  for (Eigen::Index i = 0; i < n; ++i)
    M.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(M);
  if (chol.info() != Eigen::Success)
    throw NumericalError("fiedler: sparse factorization failed");
  const detail::LinearOperator op = [&chol](const Eigen::VectorXd &x, Eigen::VectorXd &y) {
    y = chol.solve(x);
  };
  const Eigen::MatrixXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const auto kr = detail::largest_eigenpairs(op, n, 2, ones, 1e-12, static_cast<int>(10 * n),
                                             opts.seed);
  if (!kr.converged)
    throw NumericalError("fiedler: Krylov solver did not converge within 10n products");
  const double l2 = 1.0 / kr.values[0] - shift;
  if (l2 <= rank_tolerance(2.0 * g.max_degree()))
    throw NumericalError("fiedler: graph is disconnected; compute the Fiedler vector per "
                         "connected component");
  r.y = kr.vectors.col(0);
  r.lambda3 = 1.0 / kr.values[1] - shift;
  finish_fiedler(r, L);
  const double residual = (L * r.y - r.lambda2 * r.y).norm();
  if (residual > 1e-8 * std::max(1.0, r.lambda2))
    throw NumericalError("fiedler: residual " + std::to_string(residual) + " above tolerance");
  return r;
}

FiedlerResult fiedler(const Graph &g, const SolverOptions &opts) {
  const auto nodes = g.active_nodes();
  if (!is_connected(g))
    throw NumericalError("fiedler: graph is disconnected; compute the Fiedler vector per "
                         "connected component");
  return fiedler(g, nodes, opts);
}

Eigen::VectorXd laplacian_spectrum(const Graph &g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian_dense(g), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double algebraic_connectivity(const Graph &g) {
  if (g.num_nodes() < 2)
    return 0.0;
  if (g.num_active() != g.num_nodes() || !is_connected(g))
    return 0.0;
  return fiedler(g).lambda2;
}

double lambda_max_laplacian(const Graph &g, const SolverOptions &opts) {
  if (g.num_edges() == 0)
    throw InvalidArgument("lambda_max_laplacian: graph has no edges");
  const auto nodes = g.active_nodes();
  if (use_dense(opts, nodes.size())) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(induced_laplacian_dense(g, nodes),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  const Eigen::SparseMatrix<double> L = component_laplacian(g, nodes);
  const detail::LinearOperator op = [&L](const Eigen::VectorXd &x, Eigen::VectorXd &y) {
    y = L * x;
  };
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const auto kr = detail::largest_eigenpairs(op, n, 1, Eigen::MatrixXd(n, 0), opts.tolerance,
                                             static_cast<int>(10 * n), opts.seed);
  if (!kr.converged)
    throw NumericalError("lambda_max_laplacian: Krylov solver did not converge");
  return kr.values[0];
}

EigenPair leading_adjacency_eigenpair(const Graph &g) {
  const auto nodes = g.active_nodes();
  if (nodes.empty())
    throw InvalidArgument("leading_adjacency_eigenpair: empty graph");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adjacency_dense(g, nodes));
  const auto n = static_cast<Eigen::Index>(nodes.size());
  EigenPair p{es.eigenvalues()[n - 1], es.eigenvectors().col(n - 1)};
  if (p.vector.sum() < 0)
    p.vector = -p.vector;
  for (Eigen::Index k = 0; k < n; ++k)
    if (p.vector[k] < 0 && p.vector[k] > -1e-12)
      p.vector[k] = 0.0;
  return p;
}

Eigen::MatrixXd modularity_matrix(const Graph &g) {
  const auto nodes = g.active_nodes();
  const Eigen::MatrixXd A = adjacency_dense(g, nodes);
  const Eigen::VectorXd d = A.rowwise().sum();
  const double two_m = 2.0 * g.num_edges();
  if (two_m == 0)
    throw InvalidArgument("modularity_matrix: graph has no edges");
  return A - d * d.transpose() / two_m;
}

std::vector<EigenPair> modularity_spectrum(const Graph &g, int k) {
  if (g.num_edges() == 0)
    throw InvalidArgument("modularity_spectrum: graph has no edges");
  const Eigen::MatrixXd B = modularity_matrix(g);
  const auto n = B.rows();
  if (k < 0 || k > n)
    k = static_cast<int>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  if (es.info() != Eigen::Success)
    throw NumericalError("modularity_spectrum: eigensolver failed");
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    EigenPair p{es.eigenvalues()[n - 1 - r], es.eigenvectors().col(n - 1 - r)};
    fix_sign(p.vector);
    out.push_back(std::move(p));
  }
  return out;
}

Eigen::MatrixXd spectral_embedding(const Graph &g, int count) {
  const auto nodes = g.active_nodes();
  const int n = static_cast<int>(nodes.size());
  if (count < 2 || count > n)
    throw InvalidArgument("spectral_embedding: count " + std::to_string(count) +
                          " outside [2, " + std::to_string(n) + "]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(induced_laplacian_dense(g, nodes));
  Eigen::MatrixXd U = es.eigenvectors().leftCols(count);
  for (int c = 0; c < count; ++c) {
    Eigen::VectorXd col = U.col(c);
    fix_sign(col);
    U.col(c) = col;
  }
  return U;
}

namespace detail {

KrylovResult largest_eigenpairs(const LinearOperator &op, Eigen::Index dim, int nev,
                                const Eigen::MatrixXd &deflate, double tolerance,
                                int max_products, std::uint64_t seed) {
  const Eigen::Index free_dim = dim - deflate.cols();
  if (nev < 1 || nev > free_dim)
    throw InvalidArgument("largest_eigenpairs: nev out of range");
  const Eigen::Index m = std::min<Eigen::Index>(free_dim, std::max(2 * nev + 30, 60));

  Rng rng(seed);
  auto project = [&deflate](Eigen::VectorXd &w) {
    if (deflate.cols() > 0)
      w -= deflate * (deflate.transpose() * w);
  };
  auto random_unit = [&](const Eigen::MatrixXd &against) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      v[i] = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      project(v);
      if (against.cols() > 0)
        v -= against * (against.transpose() * v);
    }
    return Eigen::VectorXd(v.normalized());
  };

  Eigen::MatrixXd V(dim, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
  V.col(0) = random_unit(Eigen::MatrixXd(dim, 0));

  KrylovResult res;
  Eigen::Index kept = 0;
  Eigen::VectorXd w(dim);
  for (;;) {
    double last_beta = 0.0;
    for (Eigen::Index j = kept; j < m; ++j) {
      op(V.col(j), w);
      ++res.products;
      project(w);
      Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h;
      const Eigen::VectorXd h2 = V.leftCols(j + 1).transpose() * w;
      w -= V.leftCols(j + 1) * h2;
      project(w);
      h += h2;
      H.col(j).head(j + 1) = h;
      H.row(j).head(j + 1) = h.transpose();
      last_beta = w.norm();
      if (last_beta <= 1e-14 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
        last_beta = 0.0;
        if (j + 1 < m)
          V.col(j + 1) = random_unit(V.leftCols(j + 1));
        else
          V.col(j + 1).setZero();
      } else {
        V.col(j + 1) = w / last_beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    // Descending order.
    const Eigen::VectorXd theta = es.eigenvalues().reverse();
    const Eigen::MatrixXd Y = es.eigenvectors().rowwise().reverse();

    bool ok = true;
    for (int i = 0; i < nev; ++i) {
      const double r = std::abs(last_beta * Y(m - 1, i));
      if (r > tolerance * std::max(1.0, std::abs(theta[i])))
        ok = false;
    }
    if (ok || res.products >= max_products || m == free_dim) {
      res.converged = ok || m == free_dim;
      res.values = theta.head(nev);
      res.vectors = V.leftCols(m) * Y.leftCols(nev);
      for (int i = 0; i < nev; ++i)
        res.vectors.col(i).normalize();
      return res;
    }

    // Thick restart: keep the leading Ritz vectors plus the residual
    // direction; the next Arnoldi step recomputes their couplings.
    kept = std::min<Eigen::Index>(m - 1, nev + (m - nev) / 2);
    const Eigen::MatrixXd U = V.leftCols(m) * Y.leftCols(kept);
    const Eigen::VectorXd next = V.col(m);
    V.leftCols(kept) = U;
    V.col(kept) = next;
    H.setZero();
    H.topLeftCorner(kept, kept) = theta.head(kept).asDiagonal();
  }
}

} // namespace detail

} // namespace deepcomm
