#include "deepcomm/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepcomm/errors.hpp"
#include "deepcomm/lfvc.hpp"
#include "deepcomm/spectral.hpp"

namespace deepcomm {

std::vector<std::uint8_t> SbmSample::truth_mask() const {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(graph.num_nodes()), 0);
  for (NodeId i : truth)
    mask[i] = 1;
  return mask;
}

namespace {

void check_probability(double p, const char *what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidArgument(std::string(what) + " = " + std::to_string(p) + " outside [0, 1]");
}

} // namespace

SbmSample sbm_generate(const SbmConfig &cfg) {
  if (cfg.nIn < 0 || cfg.nOut < 0 || cfg.n() < 1)
    throw InvalidArgument("sbm_generate: block sizes must be nonnegative with n >= 1");
  const double p_in = cfg.p_in();
  const double p_out = cfg.p_out();
  check_probability(p_in, "pIn");
  check_probability(p_out, "pOut");

  const int n = cfg.n();
  std::vector<NodeId> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  Rng rng(cfg.seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      const double p = (i < cfg.nIn && j < cfg.nIn) ? p_in : p_out;
      if (rng.bernoulli(p))
        edges.push_back({i, j});
    }
  if (cfg.permute)
    for (int i = n - 1; i > 0; --i)
      std::swap(label[i], label[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  for (auto &e : edges)
    e = Edge::make(label[e.u], label[e.v]);

  SbmSample s{build_graph(edges, n), {}};
  for (NodeId i = 0; i < cfg.nIn; ++i)
    s.truth.push_back(label[i]);
  std::sort(s.truth.begin(), s.truth.end());
  return s;
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 1)
    throw InvalidArgument("erdos_renyi: n must be positive");
  check_probability(p, "p");
  Rng rng(seed);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      if (rng.bernoulli(p))
        edges.push_back({i, j});
  return build_graph(edges, n);
}

DetectionScore score_detection(std::span<const NodeId> truth, std::span<const NodeId> detected,
                               int n) {
  std::vector<std::uint8_t> in_truth(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> in_detected(static_cast<std::size_t>(n), 0);
  for (NodeId i : truth) {
    if (i < 0 || i >= n)
      throw InvalidArgument("score_detection: truth node outside [0, n)");
    in_truth[i] = 1;
  }
  for (NodeId i : detected) {
    if (i < 0 || i >= n)
      throw InvalidArgument("score_detection: detected node outside [0, n)");
    in_detected[i] = 1;
  }
  int n_in = 0, hits = 0, negatives = 0;
  for (int i = 0; i < n; ++i) {
    n_in += in_truth[i];
    if (in_truth[i] && in_detected[i])
      ++hits;
    if (!in_truth[i] && !in_detected[i])
      ++negatives;
  }
  const int n_out = n - n_in;
  DetectionScore s;
  s.sensitivity = n_in > 0 ? static_cast<double>(hits) / n_in : 0.0;
  s.specificity = n_out > 0 ? static_cast<double>(negatives) / n_out : 0.0;
  return s;
}

AlignmentResult fiedler_alignment(const SbmSample &sample) {
  const Graph &g = sample.graph;
  AlignmentResult r;
  r.connected = is_connected(g);
  const auto comp = largest_component(g);
  r.componentSize = static_cast<int>(comp.size());
  if (comp.size() < 2)
    return r;
  const auto f = fiedler(g, comp);
  r.degenerate = f.degenerate;
  const auto mask = sample.truth_mask();
  int agree = 0;
  for (std::size_t k = 0; k < f.nodes.size(); ++k) {
    const bool positive = f.y[static_cast<Eigen::Index>(k)] > 0.0;
    if (positive == static_cast<bool>(mask[f.nodes[k]]))
      ++agree;
  }
  const int size = r.componentSize;
  r.alignment = static_cast<double>(std::max(agree, size - agree)) / size;
  return r;
}

// ---------------------------------------------------------------------------
// Sweep harness

std::string to_string(Detector d) {
  switch (d) {
  case Detector::NodeLfvc:
    return "lfvc-node";
  case Detector::EdgeLfvc:
    return "lfvc-edge";
  case Detector::Spectral:
    return "spectral";
  case Detector::Modularity:
    return "modularity";
  case Detector::L1:
    return "l1";
  }
  return "unknown";
}

Detector detector_from_string(const std::string &name) {
  for (Detector d : all_detectors())
    if (to_string(d) == name)
      return d;
  throw InvalidArgument("unknown detector '" + name + "'");
}

const std::vector<Detector> &all_detectors() {
  static const std::vector<Detector> all{Detector::NodeLfvc, Detector::EdgeLfvc,
                                         Detector::Spectral, Detector::Modularity, Detector::L1};
  return all;
}

namespace {

// Candidate with the largest overlap with the planted community; the first
// one wins ties.
std::vector<NodeId> best_match(const std::vector<std::vector<NodeId>> &candidates,
                               const std::vector<std::uint8_t> &mask) {
  std::vector<NodeId> best;
  int best_hits = -1;
  for (const auto &c : candidates) {
    int hits = 0;
    for (NodeId i : c)
      hits += mask[i];
    if (hits > best_hits) {
      best_hits = hits;
      best = c;
    }
  }
  return best;
}

std::vector<std::vector<NodeId>> deep_communities(const CommunityAssignment &a) {
  std::vector<std::vector<NodeId>> out;
  for (int k = 0; k < a.count(); ++k)
    out.push_back(a.deep_community(k));
  return out;
}

} // namespace

std::vector<NodeId> run_detector(Detector d, const SbmSample &sample, const DetectorContext &ctx) {
  const Graph &g = sample.graph;
  const auto mask = sample.truth_mask();
  switch (d) {
  case Detector::NodeLfvc: {
    const auto trace = greedy_node_removal(g, RemovalBudget::until_split(), {.seed = ctx.seed});
    return best_match(deep_communities(extract_deep_communities(g, trace)), mask);
  }
  case Detector::EdgeLfvc: {
    const auto trace = greedy_edge_removal(g, RemovalBudget::until_split(), {.seed = ctx.seed});
    return best_match(deep_communities(extract_deep_communities(g, trace)), mask);
  }
  case Detector::Spectral: {
    const auto comp = largest_component(g);
    const auto a = spectral_clustering(induced_subgraph(g, comp), 2, {.seed = ctx.seed});
    return best_match(a.communities, mask);
  }
  case Detector::Modularity: {
    const auto split = modularity_partition(g);
    const auto nodes = g.active_nodes();
    std::vector<std::vector<NodeId>> sides(2);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sides[split.labels[k] > 0 ? 0 : 1].push_back(nodes[k]);
    return best_match(sides, mask);
  }
  case Detector::L1: {
    if (ctx.l1Null == nullptr)
      throw InvalidArgument("run_detector: the L1 detector needs a null model");
    return l1_subgraph_test(g, *ctx.l1Null, static_cast<int>(sample.truth.size())).selectedNodes;
  }
  }
  return {};
}

const SweepRow &SweepTable::at(double ratio, Detector d, const std::string &metric) const {
  for (const auto &row : rows)
    if (std::abs(row.ratio - ratio) < 1e-9 && row.detector == d && row.metric == metric)
      return row;
  throw InvalidArgument("sweep table has no row for ratio " + std::to_string(ratio) + ", " +
                        to_string(d) + ", " + metric);
}

namespace {

struct Accumulator {
  std::vector<double> values;

  void summarize(SweepRow &row) const {
    row.trials = static_cast<int>(values.size());
    if (values.empty())
      return;
    const double n = static_cast<double>(values.size());
    row.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values)
        ss += (v - row.mean) * (v - row.mean);
      row.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }
};

} // namespace

SweepTable sweep(const SweepConfig &cfg) {
  if (cfg.ratios.empty())
    throw InvalidArgument("sweep: empty ratio grid");
  if (cfg.trials < 1)
    throw InvalidArgument("sweep: trials must be at least 1");
  if (cfg.detectors.empty())
    throw InvalidArgument("sweep: no detectors selected");
  if (cfg.nIn < 1 || cfg.nIn >= cfg.n)
    throw InvalidArgument("sweep: need 1 <= nIn < n");

  SbmConfig base;
  base.nIn = cfg.nIn;
  base.nOut = cfg.n - cfg.nIn;
  base.cOut = cfg.cOut;

  L1NullModel null_model;
  const bool wants_l1 =
      std::find(cfg.detectors.begin(), cfg.detectors.end(), Detector::L1) != cfg.detectors.end();
  if (wants_l1)
    null_model = build_l1_null_model(cfg.n, base.p_out(), cfg.nullTrials, cfg.seed);

  SweepTable table;
  for (double ratio : cfg.ratios) {
    SbmConfig c = base;
    c.cIn = ratio * cfg.cOut;
    check_probability(c.p_in(), "pIn");
    check_probability(c.p_out(), "pOut");
    std::vector<Accumulator> sens(cfg.detectors.size()), spec(cfg.detectors.size());
    std::vector<int> failures(cfg.detectors.size(), 0);
    for (int t = 0; t < cfg.trials; ++t) {
      c.seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
      const auto sample = sbm_generate(c);
      const DetectorContext ctx{wants_l1 ? &null_model : nullptr, c.seed};
      for (std::size_t k = 0; k < cfg.detectors.size(); ++k) {
        try {
          const auto detected = run_detector(cfg.detectors[k], sample, ctx);
          const auto s = score_detection(sample.truth, detected, c.n());
          sens[k].values.push_back(s.sensitivity);
          spec[k].values.push_back(s.specificity);
        } catch (const std::exception &) {
          ++failures[k];
        }
      }
    }
    for (std::size_t k = 0; k < cfg.detectors.size(); ++k) {
      SweepRow a{ratio, cfg.detectors[k], "sensitivity"};
      SweepRow b{ratio, cfg.detectors[k], "specificity"};
      sens[k].summarize(a);
      spec[k].summarize(b);
      a.failures = b.failures = failures[k];
      table.rows.push_back(a);
      table.rows.push_back(b);
    }
  }
  return table;
}

} // namespace deepcomm
