#include <doctest.h>

#include <fstream>
#include <map>

#include "deepcomm/baselines.hpp"
#include "deepcomm/errors.hpp"
#include "support.hpp"

using namespace deepcomm;
using testing::make_graph;

namespace {

std::map<NodeId, int> karate_clubs() {
  std::ifstream in(testing::data_path("karate.club"));
  std::map<NodeId, int> club;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ss(line);
    int node = 0, faction = 0;
    ss >> node >> faction;
    club[node] = faction;
  }
  return club;
}

} // namespace

TEST_CASE("centralities on a path") {
  const Graph g = make_graph(3, testing::path(3));
  const auto bc = centrality(g, CentralityKind::Betweenness);
  CHECK(bc == std::vector<double>{0.0, 1.0, 0.0});
  const auto cl = centrality(g, CentralityKind::Closeness);
  CHECK(cl[0] == doctest::Approx(1.0 / 3.0));
  CHECK(cl[1] == doctest::Approx(0.5));
  CHECK(cl[2] == doctest::Approx(1.0 / 3.0));
  CHECK(centrality(g, CentralityKind::Degree) == std::vector<double>{1.0, 2.0, 1.0});
}

TEST_CASE("ego centrality") {
  const Graph star = make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  const auto ego = centrality(star, CentralityKind::Ego);
  CHECK(ego[0] == doctest::Approx(3.0));
  CHECK(ego[1] == 0.0);
  // C4: the opposite node lies outside the ego network, so each neighbor
  // pair is joined only through the ego.
  const Graph c4 = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  for (double v : centrality(c4, CentralityKind::Ego))
    CHECK(v == doctest::Approx(1.0));
  // K4: every neighbor pair is adjacent, so nothing contributes.
  for (double v : centrality(make_graph(4, testing::complete(4)), CentralityKind::Ego))
    CHECK(v == 0.0);
}

TEST_CASE("ego centrality with a shared neighbor in the ego network") {
  // Ego 0 with neighbors 1, 2, 3; 3 is adjacent to 1 and 2, so the pair
  // (1, 2) has two 2-paths (via 0 and via 3).
  const Graph g = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 3}, {2, 3}});
  CHECK(centrality(g, CentralityKind::Ego)[0] == doctest::Approx(0.5));
}

TEST_CASE("eigen and degree centrality on a clique") {
  const Graph k4 = make_graph(4, testing::complete(4));
  for (double v : centrality(k4, CentralityKind::Degree))
    CHECK(v == 3.0);
  for (double v : centrality(k4, CentralityKind::Eigen))
    CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("closeness and eigen centrality are computed per component") {
  const Graph g = testing::load("two_k3.edges");
  for (double v : centrality(g, CentralityKind::Closeness))
    CHECK(v == doctest::Approx(0.5));
  for (double v : centrality(g, CentralityKind::Eigen))
    CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("betweenness matches shortest path enumeration") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 10;
    const auto edges = oracle::random_graph(n, 0.35, rng);
    const auto got = centrality(make_graph(n, edges), CentralityKind::Betweenness);
    const auto want = oracle::betweenness_by_paths(n, edges);
    for (int i = 0; i < n; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("centrality names round-trip") {
  for (auto k : {CentralityKind::Degree, CentralityKind::Betweenness, CentralityKind::Closeness,
                 CentralityKind::Eigen, CentralityKind::Ego, CentralityKind::Lfvc})
    CHECK(centrality_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(centrality_kind_from_string("pagerank"), InvalidArgument);
}

TEST_CASE("centrality removal loop recomputes per stage") {
  const Graph g = testing::load("karate.edges");
  const auto trace = centrality_removal_loop(g, CentralityKind::Degree, RemovalBudget::fixed(2));
  REQUIRE(trace.steps.size() == 2);
  CHECK(trace.scorer == "degree");
  CHECK(std::get<NodeId>(trace.steps[0].item) == 33); // degree 17
  CHECK(std::get<NodeId>(trace.steps[1].item) == 0);  // degree 16
  const auto lfvc = centrality_removal_loop(g, CentralityKind::Lfvc, RemovalBudget::fixed(1));
  CHECK(std::get<NodeId>(lfvc.steps[0].item) == 0);
}

TEST_CASE("modularity split of the karate club") {
  const Graph g = testing::load("karate.edges");
  const auto split = modularity_partition(g);
  const auto club = karate_clubs();
  REQUIRE(club.size() == 34);
  int agree = 0;
  for (NodeId i = 0; i < 34; ++i)
    agree += (split.labels[i] > 0) == (club.at(i) == 0);
  CHECK(std::max(agree, 34 - agree) >= 33);
  CHECK(split.Q == doctest::Approx(modularity_of_split(g, split.labels)));
  CHECK(split.Q > 0.3);
  CHECK(split.leadingEigenvalue > 0.0);

  const auto a = recursive_modularity(g, 2);
  CHECK(a.count() == 2);
  CHECK(partition_modularity(g, a.communities) == doctest::Approx(split.Q).epsilon(1e-12));
}

TEST_CASE("modularity of trivial splits") {
  const Graph g = testing::load("two_k3.edges");
  const std::vector<int> all(6, 1);
  CHECK(modularity_of_split(g, all) == doctest::Approx(0.0).epsilon(1e-15));
  const auto split = modularity_partition(g);
  CHECK(split.Q == doctest::Approx(0.5));
  CHECK_THROWS_AS(modularity_partition(make_graph(3, {})), InvalidArgument);
}

TEST_CASE("recursive modularity stops when no split helps") {
  const Graph k3 = make_graph(3, testing::complete(3));
  const auto a = recursive_modularity(k3, 2);
  CHECK(a.count() == 1);
  CHECK(a.warnings.size() == 1);
  const auto four = recursive_modularity(make_graph(12, testing::disjoint_cliques(4, 3)), 4);
  CHECK(four.count() == 4);
  CHECK(four.warnings.empty());
}

TEST_CASE("kmeans separates well separated clusters") {
  Eigen::MatrixXd pts(6, 2);
  pts << 0, 0, 0.1, 0, 0, 0.1, 5, 5, 5.1, 5, 5, 5.1;
  const auto labels = kmeans(pts, 2);
  CHECK(labels == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK_THROWS_AS(kmeans(pts, 7), InvalidArgument);
}

TEST_CASE("spectral clustering on two cliques joined by an edge") {
  auto edges = testing::disjoint_cliques(2, 5);
  edges.emplace_back(4, 5);
  const auto a = spectral_clustering(make_graph(10, edges), 2);
  REQUIRE(a.count() == 2);
  CHECK(a.communities[0] == std::vector<NodeId>{0, 1, 2, 3, 4});
  CHECK(a.communities[1] == std::vector<NodeId>{5, 6, 7, 8, 9});
  CHECK_THROWS_AS(spectral_clustering(testing::load("two_k3.edges"), 2), InvalidArgument);
}

TEST_CASE("L1 test finds a planted clique") {
  const int n = 100, n_in = 12;
  const double p = 0.05;
  std::mt19937_64 rng(17);
  auto edges = oracle::random_graph(n, p, rng);
  const auto clique = testing::complete(n_in);
  edges.insert(edges.end(), clique.begin(), clique.end());
  const auto r = l1_subgraph_test(make_graph(n, edges), p, n_in, 100, 9);
  CHECK(r.declared);
  CHECK(r.t < -2.0);
  int hits = 0;
  for (NodeId i : r.selectedNodes)
    hits += i < n_in;
  CHECK(hits >= 10);
  CHECK(r.selectedNodes.size() == static_cast<std::size_t>(n_in));
}

TEST_CASE("L1 null model validation") {
  CHECK_THROWS_AS(build_l1_null_model(20, 0.0, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(build_l1_null_model(20, 0.1, 1, 1), InvalidArgument);
  const auto m = build_l1_null_model(20, 0.2, 30, 1);
  CHECK(m.mean.size() == 20);
  CHECK(m.stddev.minCoeff() >= 0.0);
  CHECK_THROWS_AS(l1_subgraph_test(make_graph(10, testing::path(10)), m, 3), InvalidArgument);
}
