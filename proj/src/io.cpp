#include "deepcomm/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "deepcomm/errors.hpp"

namespace deepcomm::io {

namespace {

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t')
      ++i;
    if (i > start)
      out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T> T parse_field(std::string_view s, int line_no, const char *what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw DataError("line " + std::to_string(line_no) + ": invalid " + what + " '" +
                    std::string(s) + "'");
  return value;
}

} // namespace

Graph read_edge_list(std::istream &in, std::optional<int> n) {
  std::vector<Edge> edges;
  std::string line;
  int line_no = 0;
  int max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos)
      body = trim(body.substr(0, hash));
    if (body.empty())
      continue;
    const auto f = fields(body);
    if (f.size() != 2)
      throw DataError("line " + std::to_string(line_no) + ": expected two node ids, got " +
                      std::to_string(f.size()) + " fields");
    const int u = parse_field<int>(f[0], line_no, "node id");
    const int v = parse_field<int>(f[1], line_no, "node id");
    if (u < 0 || v < 0)
      throw DataError("line " + std::to_string(line_no) + ": negative node id");
    if (u == v)
      throw DataError("line " + std::to_string(line_no) + ": self-loop on node " +
                      std::to_string(u));
    max_id = std::max({max_id, u, v});
    edges.push_back(Edge::make(u, v));
  }
  const int count = n.value_or(max_id + 1);
  if (max_id >= count)
    throw DataError("node id " + std::to_string(max_id) + " exceeds declared node count " +
                    std::to_string(count));
  if (count < 1)
    throw DataError("edge list is empty and no node count was given");
  return build_graph(edges, count);
}

Graph read_edge_list(const std::filesystem::path &path, std::optional<int> n) {
  auto in = open_input(path);
  try {
    return read_edge_list(in, n);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_edge_list(std::ostream &out, const Graph &g) {
  for (const auto &e : g.edges())
    out << e.u << '\t' << e.v << '\n';
}

PreferenceVectors read_preferences(std::istream &in, std::optional<int> items) {
  struct Triple {
    NodeId user;
    int item;
    double weight;
  };
  std::vector<Triple> triples;
  std::string line;
  int line_no = 0;
  int max_item = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos)
      body = trim(body.substr(0, hash));
    if (body.empty())
      continue;
    const auto f = fields(body);
    if (f.size() != 3)
      throw DataError("line " + std::to_string(line_no) + ": expected user, item, weight");
    Triple t{parse_field<int>(f[0], line_no, "user id"), parse_field<int>(f[1], line_no, "item id"),
             parse_field<double>(f[2], line_no, "weight")};
    if (t.user < 0 || t.item < 0)
      throw DataError("line " + std::to_string(line_no) + ": negative id");
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
      throw DataError("line " + std::to_string(line_no) + ": weight must be finite and >= 0");
    max_item = std::max(max_item, t.item);
    triples.push_back(t);
  }
  PreferenceVectors p;
  p.items = items.value_or(max_item + 1);
  if (max_item >= p.items)
    throw DataError("item id " + std::to_string(max_item) + " exceeds declared item count " +
                    std::to_string(p.items));
  for (const auto &t : triples) {
    auto [it, inserted] = p.users.try_emplace(t.user, p.items);
    it->second.coeffRef(t.item) += t.weight;
  }
  return p;
}

PreferenceVectors read_preferences(const std::filesystem::path &path, std::optional<int> items) {
  auto in = open_input(path);
  try {
    return read_preferences(in, items);
  } catch (const DataError &e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0)
    return x == 0.0 ? 0.0 : x;
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", x);
  return std::strtod(buf.data(), nullptr);
}

std::string format_number(double x) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.12g", round12(x));
  return buf.data();
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

RemovalMode mode_from_string(const std::string &s) {
  for (auto m : {RemovalMode::Node, RemovalMode::Edge})
    if (to_string(m) == s)
      return m;
  throw DataError("unknown removal mode '" + s + "'");
}

StopReason stop_from_string(const std::string &s) {
  for (auto r : {StopReason::BudgetExhausted, StopReason::Disconnected, StopReason::Degenerate})
    if (to_string(r) == s)
      return r;
  throw DataError("unknown stop reason '" + s + "'");
}

void check_schema(const json &j) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != kSchemaVersion)
    throw DataError("unsupported or missing schema version");
}

} // namespace

json to_json(const RemovalTrace &trace) {
  json steps = json::array();
  for (const auto &s : trace.steps) {
    json step;
    if (const auto *i = std::get_if<NodeId>(&s.item))
      step["node"] = *i;
    else {
      const auto &e = std::get<Edge>(s.item);
      step["edge"] = {e.u, e.v};
    }
    step["score"] = round12(s.score);
    step["lambda2Before"] = round12(s.lambda2Before);
    step["lambda2After"] = round12(s.lambda2After);
    step["componentCountAfter"] = s.componentCountAfter;
    step["largestSizeAfter"] = s.largestSizeAfter;
    step["degenerate"] = s.degenerate;
    steps.push_back(std::move(step));
  }
  return {{"schema", kSchemaVersion},
          {"mode", to_string(trace.mode)},
          {"scorer", trace.scorer},
          {"n", trace.n},
          {"initialComponentCount", trace.initialComponentCount},
          {"initialLargestSize", trace.initialLargestSize},
          {"stopReason", to_string(trace.stopReason)},
          {"steps", std::move(steps)}};
}

json to_json(const CommunityAssignment &a) {
  json membership = json::array();
  for (const auto &[node, ids] : a.membership)
    membership.push_back({{"node", node}, {"communities", ids}});
  json deep = json::array();
  for (int k = 0; k < a.count(); ++k)
    deep.push_back(a.deep_community(k));
  return {{"schema", kSchemaVersion},
          {"count", a.count()},
          {"communities", a.communities},
          {"deepCommunities", std::move(deep)},
          {"singletonSurvivors", a.singletonSurvivors},
          {"removedNodes", a.removedNodes},
          {"membership", std::move(membership)},
          {"warnings", a.warnings}};
}

RemovalTrace trace_from_json(const json &j) {
  check_schema(j);
  try {
    RemovalTrace t;
    t.mode = mode_from_string(j.at("mode").get<std::string>());
    t.scorer = j.at("scorer").get<std::string>();
    t.n = j.at("n").get<int>();
    t.initialComponentCount = j.at("initialComponentCount").get<int>();
    t.initialLargestSize = j.at("initialLargestSize").get<int>();
    t.stopReason = stop_from_string(j.at("stopReason").get<std::string>());
    for (const auto &s : j.at("steps")) {
      RemovalStep step;
      if (s.contains("node"))
        step.item = s.at("node").get<NodeId>();
      else
        step.item = Edge::make(s.at("edge").at(0).get<NodeId>(), s.at("edge").at(1).get<NodeId>());
      step.score = s.at("score").get<double>();
      step.lambda2Before = s.at("lambda2Before").get<double>();
      step.lambda2After = s.at("lambda2After").get<double>();
      step.componentCountAfter = s.at("componentCountAfter").get<int>();
      step.largestSizeAfter = s.at("largestSizeAfter").get<int>();
      step.degenerate = s.at("degenerate").get<bool>();
      t.steps.push_back(step);
    }
    return t;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed trace: ") + e.what());
  }
}

CommunityAssignment assignment_from_json(const json &j) {
  check_schema(j);
  try {
    CommunityAssignment a;
    a.communities = j.at("communities").get<std::vector<std::vector<NodeId>>>();
    a.singletonSurvivors = j.at("singletonSurvivors").get<std::vector<NodeId>>();
    a.removedNodes = j.at("removedNodes").get<std::vector<NodeId>>();
    for (const auto &m : j.at("membership"))
      a.membership[m.at("node").get<NodeId>()] = m.at("communities").get<std::vector<int>>();
    a.warnings = j.at("warnings").get<std::vector<std::string>>();
    return a;
  } catch (const json::exception &e) {
    throw DataError(std::string("malformed assignment: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV and DOT

void write_centrality_csv(std::ostream &out, const std::vector<double> &scores) {
  out << "node,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << i << ',' << format_number(scores[i]) << '\n';
}

void write_sweep_csv(std::ostream &out, const SweepTable &table) {
  out << "ratio,detector,metric,mean,stderr,trials\n";
  for (const auto &r : table.rows)
    out << format_number(r.ratio) << ',' << to_string(r.detector) << ',' << r.metric << ','
        << format_number(r.mean) << ',' << format_number(r.stderr_) << ',' << r.trials << '\n';
}

void write_dot(std::ostream &out, const Graph &g, const CommunityAssignment &a) {
  static constexpr std::array<const char *, 8> palette{
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  std::vector<int> color(static_cast<std::size_t>(g.num_nodes()), -1);
  for (int k = 0; k < a.count(); ++k)
    for (NodeId i : a.communities[k])
      color[i] = k;
  std::vector<std::uint8_t> removed(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId i : a.removedNodes)
    removed[i] = 1;
  std::vector<std::uint8_t> singleton(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId i : a.singletonSurvivors)
    singleton[i] = 1;

  out << "graph deepcomm {\n  node [style=filled, fillcolor=white];\n";
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    out << "  " << i << " [";
    if (removed[i])
      out << "shape=box, fillcolor=lightgray";
    else if (singleton[i])
      out << "shape=plaintext, label=\"" << i << " x\"";
    else if (color[i] >= 0)
      out << "fillcolor=\"" << palette[color[i] % palette.size()] << '"';
    out << "];\n";
  }
  for (const auto &e : g.edges())
    out << "  " << e.u << " -- " << e.v << ";\n";
  out << "}\n";
}

} // namespace deepcomm::io
