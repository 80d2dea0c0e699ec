#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deepcomm/baselines.hpp"
#include "deepcomm/graph.hpp"
#include "deepcomm/random.hpp"

namespace deepcomm {

/// Two-block "signal plus noise" model: a planted community of nIn nodes
/// with internal edge probability cIn / nIn, every other pair connected with
/// probability cOut / nOut.
struct SbmConfig {
  int nIn = 40;
  int nOut = 160;
  double cIn = 8.0;
  double cOut = 2.0;
  std::uint64_t seed = Rng::kDefaultSeed;
  bool permute = false; // relabel nodes with a seeded permutation

  int n() const { return nIn + nOut; }
  double p_in() const { return nIn > 0 ? cIn / nIn : 0.0; }
  double p_out() const { return nOut > 0 ? cOut / nOut : 0.0; }
};

struct SbmSample {
  Graph graph;
  std::vector<NodeId> truth; // planted community, sorted

  std::vector<std::uint8_t> truth_mask() const;
};

/// Pairs are visited as i < j in row-major order, one uniform draw each,
/// from Rng(cfg.seed). Throws InvalidArgument if pIn or pOut leaves [0, 1].
SbmSample sbm_generate(const SbmConfig &cfg);

/// G(n, p) with the same pair order and generator as sbm_generate.
Graph erdos_renyi(int n, double p, std::uint64_t seed);

struct DetectionScore {
  double sensitivity = 0.0; // |S n S^| / nIn
  double specificity = 0.0; // |S^c n S^^c| / nOut
};

DetectionScore score_detection(std::span<const NodeId> truth, std::span<const NodeId> detected,
                               int n);

/// Fraction of nodes of the largest component whose Fiedler sign matches
/// the planted split (community one sign, the rest the other), maximized
/// over the global sign flip.
struct AlignmentResult {
  double alignment = 0.0;
  int componentSize = 0;
  bool connected = false; // whole sample connected
  bool degenerate = false;
};
AlignmentResult fiedler_alignment(const SbmSample &sample);

// ---------------------------------------------------------------------------
// Sweep harness

enum class Detector { NodeLfvc, EdgeLfvc, Spectral, Modularity, L1 };

std::string to_string(Detector d);
Detector detector_from_string(const std::string &name);
const std::vector<Detector> &all_detectors();

struct DetectorContext {
  const L1NullModel *l1Null = nullptr; // required by Detector::L1
  std::uint64_t seed = Rng::kDefaultSeed;
};

/// Detected community for one sample. Detectors needing connectivity work
/// on the largest component; every detector reports a set over all n nodes.
/// Two-way splits keep the side overlapping the planted community most.
std::vector<NodeId> run_detector(Detector d, const SbmSample &sample, const DetectorContext &ctx);

struct SweepConfig {
  int nIn = 40;
  int n = 200;
  double cOut = 2.0;
  std::vector<double> ratios{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  int trials = 100;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::vector<Detector> detectors = all_detectors();
  int nullTrials = 500;
};

struct SweepRow {
  double ratio = 0.0;
  Detector detector = Detector::NodeLfvc;
  std::string metric; // "sensitivity" | "specificity"
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
  int failures = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;

  const SweepRow &at(double ratio, Detector d, const std::string &metric) const;
};

/// Runs every detector on `trials` samples per ratio. Trial t of every ratio
/// uses seed trial_seed(cfg.seed, t); rows come out ordered by ratio, then
/// detector, then metric.
SweepTable sweep(const SweepConfig &cfg);

} // namespace deepcomm
