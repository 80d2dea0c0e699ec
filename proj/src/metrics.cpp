#include "deepcomm/metrics.hpp"

#include <algorithm>
#include <set>

namespace deepcomm {

const Eigen::SparseVector<double> *PreferenceVectors::find(NodeId user) const {
  const auto it = users.find(user);
  return it == users.end() ? nullptr : &it->second;
}

double cosine(const Eigen::SparseVector<double> &u, const Eigen::SparseVector<double> &v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    return 0.0;
  return u.dot(v) / (nu * nv);
}

SimilarityReport rcs(std::span<const NodeId> community, std::span<const NodeId> removed,
                     const PreferenceVectors &prefs) {
  const std::set<NodeId> gone(removed.begin(), removed.end());
  std::vector<NodeId> members;
  for (NodeId i : community)
    if (!gone.contains(i))
      members.push_back(i);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  SimilarityReport r;
  std::vector<const Eigen::SparseVector<double> *> vecs;
  for (NodeId i : members) {
    const auto *w = prefs.find(i);
    if (w == nullptr)
      ++r.missingUsers;
    else if (w->norm() == 0.0)
      ++r.zeroVectors;
    vecs.push_back(w);
  }
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = a + 1; b < vecs.size(); ++b)
      if (vecs[a] != nullptr && vecs[b] != nullptr)
        r.value += cosine(*vecs[a], *vecs[b]);
  return r;
}

RscsReport rscs(const CommunityAssignment &assignment, const PreferenceVectors &prefs) {
  RscsReport r;
  for (const auto &c : assignment.communities) {
    if (c.size() < 2) {
      r.perCommunity.push_back(0.0);
      continue;
    }
    const auto s = rcs(c, assignment.removedNodes, prefs);
    r.perCommunity.push_back(s.value);
    r.total += s.value;
    r.missingUsers += s.missingUsers;
    r.zeroVectors += s.zeroVectors;
  }
  return r;
}

std::vector<CurvePoint> trace_curves(const RemovalTrace &trace, int n) {
  std::vector<CurvePoint> out;
  const double scale = n > 0 ? 1.0 / n : 0.0;
  out.push_back({trace.initialLargestSize * scale, trace.initialComponentCount});
  for (const auto &s : trace.steps)
    out.push_back({s.largestSizeAfter * scale, s.componentCountAfter});
  return out;
}

} // namespace deepcomm
