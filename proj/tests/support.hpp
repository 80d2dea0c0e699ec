#pragma once

#include <string>
#include <vector>

#include "deepcomm/graph.hpp"
#include "deepcomm/io.hpp"
#include "oracles/oracles.hpp"

namespace testing {

inline std::string data_path(const std::string &name) {
  return std::string(DEEPCOMM_TEST_DATA) + "/" + name;
}

inline deepcomm::Graph load(const std::string &name) {
  return deepcomm::io::read_edge_list(data_path(name));
}

inline deepcomm::Graph make_graph(int n, const oracle::EdgeList &edges) {
  std::vector<deepcomm::Edge> e;
  for (auto [u, v] : edges)
    e.push_back(deepcomm::Edge::make(u, v));
  return deepcomm::build_graph(e, n);
}

inline oracle::EdgeList edge_list(const deepcomm::Graph &g) {
  oracle::EdgeList out;
  for (const auto &e : g.edges())
    out.emplace_back(e.u, e.v);
  return out;
}

inline oracle::EdgeList path(int n) {
  oracle::EdgeList e;
  for (int i = 0; i + 1 < n; ++i)
    e.emplace_back(i, i + 1);
  return e;
}

inline oracle::EdgeList complete(int n, int offset = 0) {
  oracle::EdgeList e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      e.emplace_back(offset + i, offset + j);
  return e;
}

inline oracle::EdgeList disjoint_cliques(int count, int size) {
  oracle::EdgeList e;
  for (int c = 0; c < count; ++c) {
    auto k = complete(size, c * size);
    e.insert(e.end(), k.begin(), k.end());
  }
  return e;
}

// Full Fiedler vector indexed by node id (zeros outside the component).
template <typename Result> Eigen::VectorXd full_vector(const Result &f, int n) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < f.nodes.size(); ++k)
    y[f.nodes[k]] = f.y[static_cast<Eigen::Index>(k)];
  return y;
}

} // namespace testing
