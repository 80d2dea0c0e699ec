#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "deepcomm/graph.hpp"
#include "deepcomm/lfvc.hpp"

namespace deepcomm {

/// Nonnegative per-user weight vectors over a shared item universe.
struct PreferenceVectors {
  int items = 0;
  std::map<NodeId, Eigen::SparseVector<double>> users;

  const Eigen::SparseVector<double> *find(NodeId user) const;
};

/// Cosine similarity u.v / (|u| |v|). A zero vector yields 0.
double cosine(const Eigen::SparseVector<double> &u, const Eigen::SparseVector<double> &v);

template <typename Derived>
double cosine(const Eigen::MatrixBase<Derived> &u, const Eigen::MatrixBase<Derived> &v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    return 0.0;
  return u.dot(v) / (nu * nv);
}

struct SimilarityReport {
  double value = 0.0;
  int missingUsers = 0; // members without a preference vector
  int zeroVectors = 0;  // members whose vector is all zeros
};

/// Residual community similarity: sum of pairwise cosines over members of
/// `community` that are not in `removed`, pairs visited in ascending order.
SimilarityReport rcs(std::span<const NodeId> community, std::span<const NodeId> removed,
                     const PreferenceVectors &prefs);

struct RscsReport {
  double total = 0.0;
  std::vector<double> perCommunity;
  int missingUsers = 0;
  int zeroVectors = 0;
};

/// Sum of RCS over the non-singleton communities of an assignment. Removed
/// nodes and singleton survivors never contribute.
RscsReport rscs(const CommunityAssignment &assignment, const PreferenceVectors &prefs);

struct CurvePoint {
  double normalizedLargestSize = 0.0;
  int communityCount = 0;
};

/// Point 0 is the graph before any removal, point k the state after step k.
std::vector<CurvePoint> trace_curves(const RemovalTrace &trace, int n);

} // namespace deepcomm
