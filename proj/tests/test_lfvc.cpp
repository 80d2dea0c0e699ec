#include <doctest.h>

#include <cmath>

#include "deepcomm/errors.hpp"
#include "deepcomm/lfvc.hpp"
#include "support.hpp"

using namespace deepcomm;
using testing::make_graph;

TEST_CASE("edge and node LFVC on a path") {
  const Graph g = make_graph(3, testing::path(3));
  const auto f = fiedler(g);
  // P3: y = (1, 0, -1) / sqrt(2).
  const auto s = node_lfvc(g, f);
  CHECK(s.edge(0, 1) == doctest::Approx(0.5));
  CHECK(s.edge(2, 1) == doctest::Approx(0.5));
  CHECK(s.node(0) == doctest::Approx(0.5));
  CHECK(s.node(1) == doctest::Approx(1.0));
  CHECK(s.edgeScores.size() == 2);
  CHECK(s.edgeScores[0].edge == Edge{0, 1});
}

TEST_CASE("node LFVC is the sum of incident edge LFVC") {
  const Graph g = testing::load("karate.edges");
  const auto f = fiedler(g);
  const auto e = edge_lfvc(g, f);
  const auto s = node_lfvc(g, f);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    double sum = 0.0;
    for (NodeId j : g.neighbors(i))
      sum += e.edge(i, j);
    CHECK(s.node(i) == sum);
  }
}

TEST_CASE("set function matches the split form and the quadratic oracle") {
  const Graph g = testing::load("karate.edges");
  const auto f = fiedler(g);
  const auto y = testing::full_vector(f, g.num_nodes());
  const auto edges = testing::edge_list(g);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<NodeId> r;
    for (NodeId i = 0; i < g.num_nodes(); ++i)
      if (rng() % 5 == 0)
        r.push_back(i);
    const double v = f_set(g, f, r);
    CHECK(v == doctest::Approx(f_set_split_form(g, f, r)).epsilon(1e-12));
    CHECK(v == doctest::Approx(oracle::f_quadratic(g.num_nodes(), edges, y, r)).epsilon(1e-10));
  }
  CHECK(f_set(g, f, std::vector<NodeId>{}) == 0.0);
}

TEST_CASE("removal lowers the Rayleigh quotient by exactly f(R)") {
  const Graph g = testing::load("karate.edges");
  const auto f = fiedler(g);
  const auto y = testing::full_vector(f, g.num_nodes());
  const std::vector<NodeId> r{0, 33, 5};
  const Eigen::MatrixXd Lt = laplacian_dense(remove_nodes(g, r));
  CHECK(y.dot(Lt * y) == doctest::Approx(f.lambda2 - f_set(g, f, r)).epsilon(1e-12));
}

TEST_CASE("karate adaptive node removal splits after one removal") {
  const Graph g = testing::load("karate.edges");
  const auto trace = greedy_node_removal(g, RemovalBudget::until_split());
  REQUIRE(trace.steps.size() == 1);
  CHECK(std::get<NodeId>(trace.steps[0].item) == 0);
  CHECK(trace.stopReason == StopReason::Disconnected);
  CHECK(trace.steps[0].componentCountAfter == 2);
  CHECK(trace.steps[0].largestSizeAfter == 27);
  CHECK(trace.steps[0].lambda2After == 0.0);
  CHECK(trace.initialComponentCount == 1);
  CHECK(trace.initialLargestSize == 34);

  const auto a = extract_deep_communities(g, trace);
  CHECK(a.count() == 2);
  CHECK(a.removedNodes == std::vector<NodeId>{0});
  CHECK(a.singletonSurvivors == std::vector<NodeId>{11});
  CHECK(a.membership.at(0) == std::vector<int>{0, 1});
  CHECK(a.deep_community(1) == std::vector<NodeId>{0, 4, 5, 6, 10, 16});
}

TEST_CASE("fixed budget and trace replay") {
  const Graph g = testing::load("karate.edges");
  const auto trace = greedy_node_removal(g, RemovalBudget::fixed(3));
  CHECK(trace.steps.size() == 3);
  CHECK(trace.stopReason == StopReason::BudgetExhausted);
  const auto removed = trace.removed_nodes();
  const Graph after = apply_trace(g, trace);
  CHECK(after.num_active() == 31);
  for (NodeId i : removed)
    CHECK_FALSE(after.is_active(i));
  CHECK(apply_trace(g, trace, 1).num_active() == 33);
  for (std::size_t k = 1; k < trace.steps.size(); ++k)
    CHECK(trace.steps[k].largestSizeAfter <= trace.steps[k - 1].largestSizeAfter);
}

TEST_CASE("budget validation") {
  const Graph g = make_graph(5, testing::path(5));
  CHECK_THROWS_AS(greedy_node_removal(g, RemovalBudget::fixed(4)), InvalidArgument);
  CHECK_THROWS_AS(greedy_node_removal(g, RemovalBudget::fixed(-1)), InvalidArgument);
  CHECK_THROWS_AS(greedy_edge_removal(g, RemovalBudget::fixed(5)), InvalidArgument);
  CHECK_NOTHROW(greedy_node_removal(g, RemovalBudget::fixed(3)));
}

TEST_CASE("edge removal cuts the bridge between two cliques") {
  auto edges = testing::disjoint_cliques(2, 4);
  edges.emplace_back(3, 4);
  const Graph g = make_graph(8, edges);
  const auto trace = greedy_edge_removal(g, RemovalBudget::until_split());
  REQUIRE(trace.steps.size() == 1);
  CHECK(std::get<Edge>(trace.steps[0].item) == Edge{3, 4});
  CHECK(trace.mode == RemovalMode::Edge);
  const auto a = extract_deep_communities(g, trace);
  CHECK(a.count() == 2);
  CHECK(a.removedNodes.empty());
  CHECK(trace.removed_edges().size() == 1);
}

TEST_CASE("node removal on a barbell keeps the bridge node as mixed member") {
  // Two K4s joined through node 8.
  auto edges = testing::disjoint_cliques(2, 4);
  edges.emplace_back(3, 8);
  edges.emplace_back(8, 4);
  const Graph g = make_graph(9, edges);
  const auto trace = greedy_node_removal(g, RemovalBudget::until_split());
  REQUIRE(trace.steps.size() == 1);
  const NodeId hub = std::get<NodeId>(trace.steps[0].item);
  CHECK((hub == 3 || hub == 8 || hub == 4));
  const auto a = extract_deep_communities(g, trace);
  CHECK(a.count() == 2);
  CHECK(a.membership.at(hub).size() == (hub == 8 ? 2u : 1u));
}

TEST_CASE("assign_communities with removed nodes touching nothing") {
  const Graph g = make_graph(5, {{0, 1}, {1, 2}, {3, 4}});
  const std::vector<NodeId> removed{4};
  const auto a = assign_communities(g, remove_nodes(g, removed), removed);
  CHECK(a.count() == 1);
  CHECK(a.singletonSurvivors == std::vector<NodeId>{3});
  CHECK(a.membership.at(4).empty());
}

TEST_CASE("greedy marginal gain equals node LFVC in the reduced graph") {
  const Graph g = testing::load("karate.edges");
  const auto f = fiedler(g);
  const auto greedy = greedy_fixed_fiedler(g, f, 3);
  REQUIRE(greedy.nodes.size() == 3);
  std::vector<NodeId> prefix;
  for (NodeId pick : greedy.nodes) {
    const Graph reduced = remove_nodes(g, prefix);
    double expected = f_set(g, f, prefix);
    prefix.push_back(pick);
    const double gain = f_set(g, f, prefix) - expected;
    double lfvc = 0.0;
    for (NodeId j : reduced.neighbors(pick))
      lfvc += std::pow(f.value(pick) - f.value(j), 2);
    CHECK(gain == doctest::Approx(lfvc).epsilon(1e-12));
  }
}

TEST_CASE("brute force optimum on a star") {
  const Graph g = make_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  const auto f = fiedler(g);
  const auto best = brute_force_optimal_removal(g, f, 1);
  CHECK(best.nodes.size() == 1);
  CHECK(best.value == doctest::Approx(f_set(g, f, best.nodes)));
  const auto karate = testing::load("karate.edges");
  CHECK_THROWS_AS(brute_force_optimal_removal(karate, fiedler(karate), 10), InvalidArgument);
}

TEST_CASE("greedy bound check on karate") {
  const Graph g = testing::load("karate.edges");
  for (int q = 1; q <= 3; ++q) {
    const auto r = greedy_bound_check(g, q);
    CHECK(r.guaranteeHolds);
    CHECK(r.lambda2BoundHolds);
    CHECK(r.fGreedy <= r.fOptimal + 1e-12);
    CHECK(r.guaranteeFactor == doctest::Approx(1.0 - std::pow(1.0 - 1.0 / q, q)));
  }
  CHECK_THROWS_AS(greedy_bound_check(g, 0), InvalidArgument);
}

TEST_CASE("enum names") {
  CHECK(to_string(RemovalMode::Node) == "node");
  CHECK(to_string(RemovalMode::Edge) == "edge");
  CHECK(to_string(StopReason::Disconnected) == "disconnected");
}
