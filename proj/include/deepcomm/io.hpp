#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepcomm/baselines.hpp"
#include "deepcomm/graph.hpp"
#include "deepcomm/lfvc.hpp"
#include "deepcomm/metrics.hpp"
#include "deepcomm/sbm.hpp"

namespace deepcomm::io {

inline constexpr int kSchemaVersion = 1;

/// `i<TAB>j` per line (any whitespace accepted), 0-based ids, `#` comments
/// and blank lines skipped. n defaults to 1 + max id. Throws DataError with
/// the offending line number.
Graph read_edge_list(std::istream &in, std::optional<int> n = std::nullopt);
Graph read_edge_list(const std::filesystem::path &path, std::optional<int> n = std::nullopt);
void write_edge_list(std::ostream &out, const Graph &g);

/// `user<TAB>item<TAB>weight` triples. The item universe is 1 + max item id
/// unless `items` is given.
PreferenceVectors read_preferences(std::istream &in, std::optional<int> items = std::nullopt);
PreferenceVectors read_preferences(const std::filesystem::path &path,
                                   std::optional<int> items = std::nullopt);

/// Rounds to 12 significant digits so serialized output is stable.
double round12(double x);

nlohmann::json to_json(const RemovalTrace &trace);
nlohmann::json to_json(const CommunityAssignment &assignment);
RemovalTrace trace_from_json(const nlohmann::json &j);
CommunityAssignment assignment_from_json(const nlohmann::json &j);

/// `node,score` rows.
void write_centrality_csv(std::ostream &out, const std::vector<double> &scores);
/// `ratio,detector,metric,mean,stderr,trials` rows.
void write_sweep_csv(std::ostream &out, const SweepTable &table);

/// Graphviz export: communities colored, removed nodes boxed, singleton
/// survivors drawn as plain text marked with an x.
void write_dot(std::ostream &out, const Graph &g, const CommunityAssignment &assignment);

/// Formats a double the way the JSON writer does (12 significant digits).
std::string format_number(double x);

} // namespace deepcomm::io
