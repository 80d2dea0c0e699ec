#include <doctest.h>

#include <cmath>

#include "deepcomm/errors.hpp"
#include "deepcomm/spectral.hpp"
#include "support.hpp"

using namespace deepcomm;
using testing::make_graph;

namespace {

void check_fiedler_shape(const FiedlerResult &f) {
  CHECK(f.y.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.y.sum()) < 1e-10);
  CHECK(f.signFixed);
  for (Eigen::Index i = 0; i < f.y.size(); ++i)
    if (std::abs(f.y[i]) > 1e-12) {
      CHECK(f.y[i] > 0.0);
      break;
    }
}

} // namespace

TEST_CASE("algebraic connectivity of small graphs") {
  CHECK(fiedler(make_graph(2, {{0, 1}})).lambda2 == doctest::Approx(2.0));
  CHECK(fiedler(make_graph(4, testing::path(4))).lambda2 ==
        doctest::Approx(2.0 - std::sqrt(2.0)));
  const auto k5 = fiedler(make_graph(5, testing::complete(5)));
  CHECK(k5.lambda2 == doctest::Approx(5.0));
  CHECK(k5.degenerate);
  const auto p5 = fiedler(make_graph(5, testing::path(5)));
  CHECK_FALSE(p5.degenerate);
  check_fiedler_shape(p5);
}

TEST_CASE("Fiedler vector of a path is monotone") {
  const auto f = fiedler(make_graph(6, testing::path(6)));
  for (Eigen::Index i = 1; i < f.y.size(); ++i)
    CHECK(f.y[i] < f.y[i - 1]);
  CHECK(f.y[0] == doctest::Approx(-f.y[5]));
}

TEST_CASE("fiedler rejects disconnected or tiny inputs") {
  const Graph g = testing::load("two_k3.edges");
  CHECK_THROWS_AS(fiedler(g, std::vector<NodeId>{0, 1, 2, 3, 4, 5}), NumericalError);
  CHECK_NOTHROW(fiedler(g, std::vector<NodeId>{3, 4, 5}));
  CHECK_THROWS(fiedler(g, std::vector<NodeId>{0}));
  const Graph h = remove_node(g, 1);
  CHECK_THROWS_AS(fiedler(h, std::vector<NodeId>{0, 1, 2}), InvalidArgument);
}

TEST_CASE("Krylov path agrees with the dense path") {
  const Graph g = testing::load("karate.edges");
  const auto dense = fiedler(g, {.kind = SolverKind::Dense});
  const auto krylov = fiedler(g, {.kind = SolverKind::Krylov});
  CHECK(krylov.lambda2 == doctest::Approx(dense.lambda2).epsilon(1e-9));
  CHECK(std::abs(std::abs(krylov.y.dot(dense.y)) - 1.0) < 1e-9);
  CHECK((krylov.y - dense.y).cwiseAbs().maxCoeff() < 1e-6);
  check_fiedler_shape(krylov);
}

TEST_CASE("Krylov path on a component larger than the dense limit") {
  std::mt19937_64 rng(11);
  const int n = 700;
  auto edges = oracle::random_graph(n, 0.01, rng);
  const auto ring = testing::path(n);
  edges.insert(edges.end(), ring.begin(), ring.end());
  const Graph g = make_graph(n, edges);
  const auto f = fiedler(g); // Auto selects Krylov above 512 nodes
  const Eigen::MatrixXd L = oracle::laplacian(n, testing::edge_list(g));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  CHECK(f.lambda2 == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-8));
  Eigen::VectorXd ref = es.eigenvectors().col(1);
  CHECK(std::abs(std::abs(ref.dot(f.y)) - 1.0) < 1e-6);
  CHECK((L * f.y - f.lambda2 * f.y).norm() < 1e-6);
}

TEST_CASE("algebraic connectivity uses the full index space") {
  const Graph k4 = make_graph(4, testing::complete(4));
  CHECK(algebraic_connectivity(k4) == doctest::Approx(4.0));
  CHECK(algebraic_connectivity(remove_node(k4, 0)) == 0.0);
  CHECK(algebraic_connectivity(testing::load("two_k3.edges")) == 0.0);
}

TEST_CASE("Laplacian spectrum and largest eigenvalue") {
  const Graph g = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto ev = laplacian_spectrum(g);
  REQUIRE(ev.size() == 4);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(4.0));
  CHECK(lambda_max_laplacian(g) == doctest::Approx(4.0));
  CHECK(lambda_max_laplacian(make_graph(6, testing::complete(6))) == doctest::Approx(6.0));
}

TEST_CASE("leading adjacency eigenpair") {
  const auto k4 = leading_adjacency_eigenpair(make_graph(4, testing::complete(4)));
  CHECK(k4.value == doctest::Approx(3.0));
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(k4.vector[i] == doctest::Approx(0.5));
  const auto star = leading_adjacency_eigenpair(make_graph(4, {{0, 1}, {0, 2}, {0, 3}}));
  CHECK(star.value == doctest::Approx(std::sqrt(3.0)));
  CHECK(star.vector.minCoeff() >= 0.0);
}

TEST_CASE("modularity matrix and spectrum") {
  const Graph g = testing::load("karate.edges");
  const Eigen::MatrixXd B = modularity_matrix(g);
  CHECK(B.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  CHECK((B - B.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const auto spec = modularity_spectrum(g);
  REQUIRE(spec.size() == 34);
  for (std::size_t i = 1; i < spec.size(); ++i)
    CHECK(spec[i].value <= spec[i - 1].value);
  for (const auto &p : spec)
    CHECK((B * p.vector - p.value * p.vector).norm() < 1e-9);
  CHECK(modularity_spectrum(g, 3).size() == 3);
}

TEST_CASE("spectral embedding has orthonormal columns") {
  const Graph g = testing::load("karate.edges");
  const Eigen::MatrixXd U = spectral_embedding(g, 3);
  CHECK(U.rows() == 34);
  CHECK(U.cols() == 3);
  CHECK((U.transpose() * U - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(spectral_embedding(g, 1), InvalidArgument);
  CHECK_THROWS_AS(spectral_embedding(g, 35), InvalidArgument);
}

TEST_CASE("Krylov eigensolver on a diagonal operator") {
  const Eigen::Index n = 200;
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d[i] = static_cast<double>(i + 1);
  const detail::LinearOperator op = [&d](const Eigen::VectorXd &x, Eigen::VectorXd &y) {
    y = d.cwiseProduct(x);
  };
  const auto r = detail::largest_eigenpairs(op, n, 3, Eigen::MatrixXd(n, 0), 1e-12,
                                              static_cast<int>(10 * n), 1);
  CHECK(r.converged);
  CHECK(r.values[0] == doctest::Approx(200.0));
  CHECK(r.values[1] == doctest::Approx(199.0));
  CHECK(r.values[2] == doctest::Approx(198.0));
  CHECK(std::abs(r.vectors(n - 1, 0)) == doctest::Approx(1.0));
}
