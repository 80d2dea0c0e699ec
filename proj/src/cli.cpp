#include "deepcomm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepcomm/baselines.hpp"
#include "deepcomm/errors.hpp"
#include "deepcomm/io.hpp"
#include "deepcomm/lfvc.hpp"
#include "deepcomm/metrics.hpp"
#include "deepcomm/sbm.hpp"

namespace deepcomm::cli {

namespace {

using nlohmann::json;

// Writes to `path`, or to `fallback` when path is "-".
void emit(const std::string &path, std::ostream &fallback,
          const std::function<void(std::ostream &)> &write) {
  if (path == "-") {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw DataError("cannot write '" + path + "'");
  write(file);
}

void emit_json(const std::string &path, std::ostream &fallback, const json &j) {
  emit(path, fallback, [&j](std::ostream &os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  std::string edges;
  std::string method = "lfvc-node";
  std::optional<int> q;
  std::optional<int> h;
  bool adaptive = false;
  int g = 2;
  std::string centrality = "betweenness";
  std::optional<int> nodes;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::string output = "-";
  std::string dot;
  std::string scores;
};

RemovalBudget budget_from(const std::optional<int> &count, bool adaptive, const char *flag) {
  if (adaptive && count)
    throw InvalidArgument(std::string("--adaptive and ") + flag + " are mutually exclusive");
  if (adaptive)
    return RemovalBudget::until_split();
  if (!count)
    throw InvalidArgument(std::string("give ") + flag + " or --adaptive");
  return RemovalBudget::fixed(*count);
}

void run_detect(const DetectArgs &a, std::ostream &out) {
  const Graph g = io::read_edge_list(a.edges, a.nodes);
  const SolverOptions opts{.seed = a.seed};
  json result{{"schema", io::kSchemaVersion}, {"command", "detect"}, {"method", a.method}};
  CommunityAssignment assignment;

  if (a.method == "lfvc-node" || a.method == "lfvc-edge" || a.method == "centrality") {
    RemovalTrace trace;
    if (a.method == "lfvc-node") {
      trace = greedy_node_removal(g, budget_from(a.q, a.adaptive, "--q"), opts);
    } else if (a.method == "lfvc-edge") {
      trace = greedy_edge_removal(g, budget_from(a.h, a.adaptive, "--h"), opts);
    } else {
      const auto kind = centrality_kind_from_string(a.centrality);
      result["centrality"] = a.centrality;
      if (!a.scores.empty())
        emit(a.scores, out,
             [&](std::ostream &os) { io::write_centrality_csv(os, centrality(g, kind)); });
      trace = centrality_removal_loop(g, kind, budget_from(a.q, a.adaptive, "--q"), opts);
    }
    assignment = extract_deep_communities(g, trace);
    result["trace"] = io::to_json(trace);
  } else if (a.method == "modularity") {
    assignment = recursive_modularity(g, a.g);
    result["modularity"] = io::round12(partition_modularity(g, assignment.communities));
  } else if (a.method == "spectral") {
    assignment = spectral_clustering(g, a.g, {.seed = a.seed});
  } else {
    throw InvalidArgument("unknown method '" + a.method + "'");
  }
  result["assignment"] = io::to_json(assignment);
  emit_json(a.output, out, result);
  if (!a.dot.empty())
    emit(a.dot, out, [&](std::ostream &os) { io::write_dot(os, g, assignment); });
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  SweepConfig cfg;
  std::vector<std::string> detectors;
  std::string output = "-";
};

void run_sweep(SweepArgs a, std::ostream &out) {
  if (!a.detectors.empty()) {
    a.cfg.detectors.clear();
    for (const auto &d : a.detectors)
      a.cfg.detectors.push_back(detector_from_string(d));
  }
  const auto table = sweep(a.cfg);
  emit(a.output, out, [&](std::ostream &os) { io::write_sweep_csv(os, table); });
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string edges;
  std::string prefs;
  std::string method = "lfvc-node";
  std::optional<int> q;
  std::optional<int> items;
  std::optional<int> nodes;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::string output = "-";
  std::string curve;
};

void run_evaluate(const EvaluateArgs &a, std::ostream &out) {
  const Graph g = io::read_edge_list(a.edges, a.nodes);
  const auto prefs = io::read_preferences(a.prefs, a.items);
  const SolverOptions opts{.seed = a.seed};
  const RemovalBudget budget = a.q ? RemovalBudget::fixed(*a.q) : RemovalBudget::until_split();
  RemovalTrace trace;
  if (a.method == "lfvc-node")
    trace = greedy_node_removal(g, budget, opts);
  else if (a.method == "lfvc-edge")
    trace = greedy_edge_removal(g, budget, opts);
  else
    trace = centrality_removal_loop(g, centrality_kind_from_string(a.method), budget, opts);

  const auto final_assignment = extract_deep_communities(g, trace);
  const auto report = rscs(final_assignment, prefs);
  const auto curves = trace_curves(trace, g.num_nodes());

  json curve = json::array();
  std::vector<std::array<double, 4>> rows;
  for (std::size_t k = 0; k <= trace.steps.size(); ++k) {
    const Graph after = apply_trace(g, trace, k);
    std::vector<NodeId> removed = trace.removed_nodes();
    removed.resize(std::min(removed.size(), k));
    const auto value = rscs(assign_communities(g, after, removed), prefs).total;
    curve.push_back({{"removals", k},
                     {"communities", curves[k].communityCount},
                     {"normalizedLargestSize", io::round12(curves[k].normalizedLargestSize)},
                     {"rscs", io::round12(value)}});
    rows.push_back({static_cast<double>(k), static_cast<double>(curves[k].communityCount),
                    curves[k].normalizedLargestSize, value});
  }

  std::vector<double> per;
  for (double v : report.perCommunity)
    per.push_back(io::round12(v));
  json warnings = json::array();
  if (report.missingUsers > 0)
    warnings.push_back(std::to_string(report.missingUsers) +
                       " community members have no preference vector");
  if (report.zeroVectors > 0)
    warnings.push_back(std::to_string(report.zeroVectors) +
                       " community members have an all-zero preference vector");

  const json result{{"schema", io::kSchemaVersion},
                    {"command", "evaluate"},
                    {"method", a.method},
                    {"rscs", io::round12(report.total)},
                    {"perCommunity", per},
                    {"missingUsers", report.missingUsers},
                    {"zeroVectors", report.zeroVectors},
                    {"warnings", warnings},
                    {"assignment", io::to_json(final_assignment)},
                    {"curve", curve}};
  emit_json(a.output, out, result);
  if (!a.curve.empty())
    emit(a.curve, out, [&](std::ostream &os) {
      os << "removals,communities,normalized_largest_size,rscs\n";
      for (const auto &r : rows)
        os << io::format_number(r[0]) << ',' << io::format_number(r[1]) << ','
           << io::format_number(r[2]) << ',' << io::format_number(r[3]) << '\n';
    });
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
  std::string edges;
  std::optional<int> q;
  std::vector<int> remove;
  std::optional<int> nodes;
  std::uint64_t seed = Rng::kDefaultSeed;
  std::string output = "-";
};

void run_bounds(const BoundsArgs &a, std::ostream &out) {
  const Graph g = io::read_edge_list(a.edges, a.nodes);
  if (a.q && !a.remove.empty())
    throw InvalidArgument("--q and --remove are mutually exclusive");
  std::vector<NodeId> removed = a.remove;
  if (a.q)
    removed = greedy_node_removal(g, RemovalBudget::fixed(*a.q), {.seed = a.seed}).removed_nodes();
  std::sort(removed.begin(), removed.end());
  if (std::adjacent_find(removed.begin(), removed.end()) != removed.end())
    throw InvalidArgument("--remove lists a node twice");
  const Graph after = remove_nodes(g, removed);
  const int q = static_cast<int>(removed.size());
  const auto b = community_count_bound(after, q);
  const auto nb = largest_component_via_null_basis(after);
  const int traversal = connected_components(after).largest_non_singleton_size();

  json relaxed = nullptr;
  json relaxed_tight = nullptr;
  json exact_within = nullptr;
  if (b.relaxedBound) {
    relaxed = io::round12(*b.relaxedBound);
    relaxed_tight = std::abs(*b.relaxedBound - b.exactBound) <= 1e-9;
    exact_within = b.exactBound <= *b.relaxedBound + 1e-9;
  }
  const json result{{"schema", io::kSchemaVersion},
                    {"command", "bounds"},
                    {"n", g.num_nodes()},
                    {"m", g.num_edges()},
                    {"removed", removed},
                    {"epsilon", b.epsilon},
                    {"rank", b.rank},
                    {"exactBound", b.exactBound},
                    {"relaxedBound", relaxed},
                    {"lambdaMax", io::round12(b.lambdaMax)},
                    {"psi", nb.largest},
                    {"traversalLargest", traversal},
                    {"epsilonWithinExact", b.epsilon <= b.exactBound},
                    {"exactWithinRelaxed", exact_within},
                    {"exactTight", b.epsilon == b.exactBound},
                    {"relaxedTight", relaxed_tight},
                    {"psiMatchesTraversal", nb.largest == traversal}};
  emit_json(a.output, out, result);
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Deep community detection with local Fiedler vector centrality", "deepcomm"};
  app.set_config("--config", "", "TOML config file; keys match the long flag names");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");

  DetectArgs detect;
  auto *d = app.add_subcommand("detect", "Find deep communities in an edge list");
  d->configurable();
  d->add_option("edges", detect.edges, "Edge list file")->required();
  d->add_option("--method", detect.method, "Detector")
      ->check(CLI::IsMember({"lfvc-node", "lfvc-edge", "modularity", "spectral", "centrality"}));
  d->add_option("--q", detect.q, "Node removals");
  d->add_option("--h", detect.h, "Edge removals");
  d->add_flag("--adaptive", detect.adaptive, "Remove until the largest component splits");
  d->add_option("--g", detect.g, "Community count for modularity and spectral methods");
  d->add_option("--centrality", detect.centrality, "Centrality for --method centrality");
  d->add_option("--nodes", detect.nodes, "Node count (default: 1 + max id)");
  d->add_option("--seed", detect.seed, "Random seed");
  d->add_option("--output", detect.output, "JSON output file ('-' for stdout)");
  d->add_option("--dot", detect.dot, "Graphviz output file");
  d->add_option("--scores", detect.scores, "Centrality CSV output file");

  SweepArgs sw;
  auto *s = app.add_subcommand("sweep", "Sensitivity and specificity on planted-community graphs");
  s->configurable();
  s->add_option("--n-in", sw.cfg.nIn, "Planted community size");
  s->add_option("--n", sw.cfg.n, "Total node count");
  s->add_option("--c-out", sw.cfg.cOut, "Expected outside degree contribution");
  s->add_option("--ratios", sw.cfg.ratios, "cIn / cOut grid");
  s->add_option("--trials", sw.cfg.trials, "Trials per ratio");
  s->add_option("--null-trials", sw.cfg.nullTrials, "Null graphs for the L1 test");
  s->add_option("--detectors", sw.detectors, "Detectors to run (default: all)");
  s->add_option("--seed", sw.cfg.seed, "Random seed");
  s->add_option("--output", sw.output, "CSV output file ('-' for stdout)");

  EvaluateArgs ev;
  auto *e = app.add_subcommand("evaluate", "Residual community similarity of detected communities");
  e->configurable();
  e->add_option("edges", ev.edges, "Friendship edge list")->required();
  e->add_option("prefs", ev.prefs, "user<TAB>item<TAB>weight preference file")->required();
  e->add_option("--method", ev.method, "lfvc-node, lfvc-edge or a centrality name");
  e->add_option("--q", ev.q, "Removals (default: until the largest component splits)");
  e->add_option("--items", ev.items, "Item count (default: 1 + max item id)");
  e->add_option("--nodes", ev.nodes, "Node count (default: 1 + max id)");
  e->add_option("--seed", ev.seed, "Random seed");
  e->add_option("--output", ev.output, "JSON output file ('-' for stdout)");
  e->add_option("--curve", ev.curve, "CSV of RSCS against community count");

  BoundsArgs bd;
  auto *b = app.add_subcommand("bounds", "Community count bounds after node removal");
  b->configurable();
  b->add_option("edges", bd.edges, "Edge list file")->required();
  b->add_option("--q", bd.q, "Greedy node-LFVC removals to apply first");
  b->add_option("--remove", bd.remove, "Explicit nodes to remove");
  b->add_option("--nodes", bd.nodes, "Node count (default: 1 + max id)");
  b->add_option("--seed", bd.seed, "Random seed");
  b->add_option("--output", bd.output, "JSON output file ('-' for stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError &ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*d)
      run_detect(detect, out);
    else if (*s)
      run_sweep(sw, out);
    else if (*e)
      run_evaluate(ev, out);
    else if (*b)
      run_bounds(bd, out);
    return kSuccess;
  } catch (const std::invalid_argument &ex) {
    err << "error: " << ex.what() << '\n';
    return kUsageError;
  } catch (const DataError &ex) {
    err << "data error: " << ex.what() << '\n';
    return kDataError;
  } catch (const NumericalError &ex) {
    err << "numerical error: " << ex.what() << '\n';
    return kNumericalError;
  } catch (const std::exception &ex) {
    err << "error: " << ex.what() << '\n';
    return kNumericalError;
  }
}

} // namespace deepcomm::cli
