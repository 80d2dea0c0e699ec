#include <doctest.h>

#include <cmath>

#include "deepcomm/errors.hpp"
#include "deepcomm/sbm.hpp"
#include "support.hpp"

using namespace deepcomm;

TEST_CASE("SBM probabilities") {
  SbmConfig cfg;
  CHECK(cfg.p_in() == doctest::Approx(0.2));
  CHECK(cfg.p_out() == doctest::Approx(0.0125));
  cfg.cIn = 80.0;
  CHECK_THROWS_AS(sbm_generate(cfg), InvalidArgument);
}

TEST_CASE("planted clique when cIn equals nIn") {
  SbmConfig cfg{.nIn = 10, .nOut = 30, .cIn = 10.0, .cOut = 1.0, .seed = 4};
  const auto s = sbm_generate(cfg);
  for (NodeId i = 0; i < 10; ++i)
    for (NodeId j = i + 1; j < 10; ++j)
      CHECK(s.graph.has_edge(i, j));
  CHECK(s.truth.size() == 10);
}

TEST_CASE("no noise edges leave the community as its own component") {
  SbmConfig cfg{.nIn = 20, .nOut = 50, .cIn = 10.0, .cOut = 0.0, .seed = 2};
  const auto s = sbm_generate(cfg);
  for (const auto &e : s.graph.edges()) {
    CHECK(e.u < 20);
    CHECK(e.v < 20);
  }
}

TEST_CASE("SBM edge densities are within three sigma") {
  SbmConfig cfg{.nIn = 40, .nOut = 160, .cIn = 8.0, .cOut = 2.0};
  double in_edges = 0.0, out_edges = 0.0;
  const int reps = 20;
  for (int r = 0; r < reps; ++r) {
    cfg.seed = 100 + r;
    const auto s = sbm_generate(cfg);
    for (const auto &e : s.graph.edges())
      (e.v < 40 ? in_edges : out_edges) += 1.0;
  }
  const double in_pairs = reps * 40.0 * 39.0 / 2.0;
  const double out_pairs = reps * (200.0 * 199.0 / 2.0 - 40.0 * 39.0 / 2.0);
  const auto within = [](double count, double pairs, double p) {
    return std::abs(count - pairs * p) <= 3.0 * std::sqrt(pairs * p * (1.0 - p));
  };
  CHECK(within(in_edges, in_pairs, cfg.p_in()));
  CHECK(within(out_edges, out_pairs, cfg.p_out()));
}

TEST_CASE("SBM is deterministic per seed and permutation keeps the truth size") {
  SbmConfig cfg{.seed = 99};
  const auto a = sbm_generate(cfg);
  const auto b = sbm_generate(cfg);
  CHECK(a.graph.edges() == b.graph.edges());
  cfg.permute = true;
  const auto c = sbm_generate(cfg);
  CHECK(c.truth.size() == 40);
  CHECK(c.graph.num_edges() == a.graph.num_edges());
  CHECK(c.truth != a.truth);
}

TEST_CASE("Erdos-Renyi extremes and edge count") {
  CHECK(erdos_renyi(10, 0.0, 1).num_edges() == 0);
  CHECK(erdos_renyi(10, 1.0, 1).num_edges() == 45);
  CHECK_THROWS_AS(erdos_renyi(10, 1.5, 1), InvalidArgument);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double m = erdos_renyi(1000, 0.01, seed).num_edges();
    const double mean = 499500.0 * 0.01;
    CHECK(std::abs(m - mean) <= 3.0 * std::sqrt(mean * 0.99));
  }
}

TEST_CASE("score_detection counts sets exactly") {
  std::vector<NodeId> truth(40), complement;
  for (int i = 0; i < 40; ++i)
    truth[i] = i;
  for (int i = 40; i < 200; ++i)
    complement.push_back(i);
  auto s = score_detection(truth, truth, 200);
  CHECK(s.sensitivity == 1.0);
  CHECK(s.specificity == 1.0);
  s = score_detection(truth, complement, 200);
  CHECK(s.sensitivity == 0.0);
  CHECK(s.specificity == 0.0);
  std::vector<NodeId> half;
  for (int i = 0; i < 20; ++i)
    half.push_back(i);
  for (int i = 40; i < 60; ++i)
    half.push_back(i);
  s = score_detection(truth, half, 200);
  CHECK(s.sensitivity == 0.5);
  CHECK(s.specificity == 0.875);
  CHECK_THROWS_AS(score_detection(truth, std::vector<NodeId>{200}, 200), InvalidArgument);
}

TEST_CASE("Fiedler alignment of a nearly separated sample") {
  auto edges = testing::disjoint_cliques(2, 10);
  edges.emplace_back(0, 10);
  SbmSample s{testing::make_graph(20, edges), {}};
  for (int i = 0; i < 10; ++i)
    s.truth.push_back(i);
  const auto r = fiedler_alignment(s);
  CHECK(r.alignment == 1.0);
  CHECK(r.connected);
  CHECK(r.componentSize == 20);
}

TEST_CASE("detector names") {
  for (Detector d : all_detectors())
    CHECK(detector_from_string(to_string(d)) == d);
  CHECK_THROWS_AS(detector_from_string("louvain"), InvalidArgument);
}

TEST_CASE("detectors report sets over all nodes") {
  SbmConfig cfg{.cIn = 10.0, .seed = 8};
  const auto s = sbm_generate(cfg);
  const auto null_model = build_l1_null_model(cfg.n(), cfg.p_out(), 20, 1);
  const DetectorContext ctx{&null_model, 8};
  for (Detector d : all_detectors()) {
    const auto det = run_detector(d, s, ctx);
    CHECK_FALSE(det.empty());
    for (NodeId i : det) {
      CHECK(i >= 0);
      CHECK(i < cfg.n());
    }
  }
  CHECK_THROWS_AS(run_detector(Detector::L1, s, {}), InvalidArgument);
}

TEST_CASE("sweep is reproducible and ordered") {
  SweepConfig cfg;
  cfg.ratios = {1.0, 3.0};
  cfg.trials = 2;
  cfg.nullTrials = 10;
  const auto a = sweep(cfg);
  const auto b = sweep(cfg);
  REQUIRE(a.rows.size() == 2 * 5 * 2);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mean == b.rows[i].mean);
    CHECK(a.rows[i].stderr_ == b.rows[i].stderr_);
  }
  CHECK(a.rows[0].ratio == 1.0);
  CHECK(a.rows[0].metric == "sensitivity");
  CHECK(a.rows[1].metric == "specificity");
  CHECK(a.at(3.0, Detector::L1, "specificity").trials + a.at(3.0, Detector::L1, "specificity").failures == 2);
  CHECK_THROWS_AS(a.at(2.0, Detector::L1, "specificity"), InvalidArgument);

  cfg.ratios.clear();
  CHECK_THROWS_AS(sweep(cfg), InvalidArgument);
  cfg.ratios = {1.0};
  cfg.trials = 0;
  CHECK_THROWS_AS(sweep(cfg), InvalidArgument);
}
