#ifndef FR_CLI_HPP
#define FR_CLI_HPP

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fr/config.hpp"
#include "fr/experiments.hpp"
#include "fr/tntp.hpp"

namespace fr::cli {

// ---------------------------------------------------------------------------
// Config schema. Unknown tables or keys are usage errors (exit 2) with the
// offending field path in the message.
// ---------------------------------------------------------------------------

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"", {}},
      {"instance",
       {"kind", "demand", "routes", "k", "gadgets", "expr", "edges", "nodes",
        "commodities", "net", "trips", "top_od", "paths", "max_paths", "yen_k"}},
      {"solver", {"beta", "tol", "max_iter", "method"}},
      {"salience", {"mode", "weights", "rows"}},
      {"memory", {"budget", "rho", "eps_reset"}},
      {"sim", {"agents", "horizon", "burn_in", "seeds", "trace"}},
      {"surrogate", {"damping", "tol_x", "tol_share", "damp_shares"}},
      {"icwe", {"menus"}},
      {"governance", {"budgets", "group_blind"}},
      {"target", {"flows", "rows", "perturb_eps"}},
      {"fwe", {"damping", "tol", "state_cap"}},
      {"experiment",
       {"id", "seeds", "agents", "horizon", "burn_in", "beta", "budget", "kmax",
        "n_targets", "feasibility_budget", "frontier_budgets", "tntp_net", "tntp_trips",
        "tntp_top_od", "tntp_paths_per_od"}},
      {"frontier", {"kind", "budgets", "beta"}},
  };
  return schema;
}

namespace detail {

inline std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline LatencyFn parse_latency_tokens(const std::vector<std::string>& toks, std::size_t at) {
  const auto need = [&](std::size_t n) {
    if (toks.size() < at + 1 + n)
      throw UsageError("latency row needs " + std::to_string(n) + " parameters");
  };
  const std::string& kind = toks.at(at);
  if (kind == "constant") {
    need(1);
    return LatencyFn::constant(std::stod(toks[at + 1]));
  }
  if (kind == "affine") {
    need(2);
    return LatencyFn::affine(std::stod(toks[at + 1]), std::stod(toks[at + 2]));
  }
  if (kind == "bpr") {
    need(4);
    return LatencyFn::bpr(std::stod(toks[at + 1]), std::stod(toks[at + 2]),
                          std::stod(toks[at + 3]), std::stod(toks[at + 4]));
  }
  if (kind == "monomial") {
    need(1);
    return LatencyFn::monomial(std::stod(toks[at + 1]));
  }
  throw UsageError("unknown latency kind '" + kind + "'");
}

inline std::vector<std::vector<std::string>> rows_of(const std::string& block) {
  std::istringstream in(block);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    auto toks = tokens_of(line);
    if (!toks.empty()) rows.push_back(std::move(toks));
  }
  return rows;
}

struct BuiltInstance {
  Network net;
  PathCatalog catalog;
  std::optional<SpTree> tree;
};

inline BuiltInstance build_instance(const Config& cfg) {
  const std::string kind = cfg.str("instance", "kind", "pigou");
  const double demand = cfg.number("instance", "demand", 1.0);
  std::optional<SpTree> tree;
  std::optional<Network> net;

  if (kind == "pigou") {
    auto inst = make_pigou(demand);
    return {std::move(inst.net), std::move(inst.catalog), std::nullopt};
  } else if (kind == "braess") {
    auto inst = make_braess(demand);
    return {std::move(inst.net), std::move(inst.catalog), std::nullopt};
  } else if (kind == "parallel") {
    std::vector<LatencyFn> lat;
    for (const auto& row : rows_of(cfg.str("instance", "routes", "")))
      lat.push_back(parse_latency_tokens(row, 0));
    if (lat.empty()) throw UsageError("instance.routes must list one latency per line");
    auto inst = make_parallel(lat, demand);
    return {std::move(inst.net), std::move(inst.catalog), std::nullopt};
  } else if (kind == "diamond") {
    const int k = static_cast<int>(cfg.number("instance", "gadgets", 0));
    if (k < 1) throw UsageError("instance.gadgets must be >= 1 for kind=diamond");
    std::vector<LatencyFn> lat;
    for (const auto& row : rows_of(cfg.str("instance", "edges", "")))
      lat.push_back(parse_latency_tokens(row, 0));
    if (static_cast<int>(lat.size()) != 2 * k)
      throw UsageError("kind=diamond needs exactly 2k latency rows in instance.edges");
    auto chain = make_diamond_chain(k, lat, demand);
    tree = chain.tree;
    net = std::move(chain.net);
  } else if (kind == "sp") {
    const std::string expr = cfg.str("instance", "expr", "");
    if (expr.empty()) throw UsageError("instance.expr required for kind=sp");
    std::map<int, LatencyFn> lat_by_id;
    for (const auto& row : rows_of(cfg.str("instance", "edges", ""))) {
      if (row[0].empty() || row[0][0] != 'e')
        throw UsageError("sp edge rows start with the edge id, e.g. 'e0 affine 1 0'");
      lat_by_id[std::stoi(row[0].substr(1))] = parse_latency_tokens(row, 1);
    }
    SpTree parsed = parse_sp_expression(expr, static_cast<int>(lat_by_id.size()));
    std::vector<LatencyFn> lat;
    for (int e = 0; e < static_cast<int>(lat_by_id.size()); ++e) {
      if (!lat_by_id.count(e)) throw UsageError("missing latency row for edge e" + std::to_string(e));
      lat.push_back(lat_by_id[e]);
    }
    net = sp_build_network(parsed, lat, demand);
    tree = std::move(parsed);
  } else if (kind == "edges") {
    const int nodes = static_cast<int>(cfg.number("instance", "nodes", 0));
    if (nodes < 1) throw UsageError("instance.nodes required for kind=edges");
    std::vector<Edge> edges;
    for (const auto& row : rows_of(cfg.str("instance", "edges", ""))) {
      if (row.size() < 3) throw UsageError("edge rows: tail head <latency...>");
      edges.push_back(Edge{std::stoi(row[0]), std::stoi(row[1]),
                           parse_latency_tokens(row, 2)});
    }
    std::vector<Commodity> commodities;
    for (const auto& row : rows_of(cfg.str("instance", "commodities", ""))) {
      if (row.size() != 3) throw UsageError("commodity rows: origin destination demand");
      commodities.push_back(Commodity{std::stoi(row[0]), std::stoi(row[1]), std::stod(row[2])});
    }
    if (commodities.empty()) throw UsageError("kind=edges needs instance.commodities rows");
    net = Network(nodes, std::move(edges), std::move(commodities));
  } else if (kind == "tntp") {
    auto res = parse_tntp(cfg.str("instance", "net", ""), cfg.str("instance", "trips", ""),
                          static_cast<int>(cfg.number("instance", "top_od", 50)));
    net = std::move(res.network);
  } else {
    throw UsageError("unknown instance.kind '" + kind + "'");
  }

  // path catalog: exhaustive enumeration or k-shortest on free-flow time
  const std::string mode = cfg.str("instance", "paths", "enumerate");
  std::vector<std::vector<Path>> per_k;
  for (int k = 0; k < net->n_commodities(); ++k) {
    if (mode == "enumerate") {
      const std::size_t cap =
          static_cast<std::size_t>(cfg.number("instance", "max_paths", 4096));
      per_k.push_back(enumerate_paths(*net, k, cap));
    } else if (mode == "yen") {
      per_k.push_back(
          yen_k_shortest(*net, k, static_cast<int>(cfg.number("instance", "yen_k", 8))).paths);
    } else {
      throw UsageError("instance.paths must be 'enumerate' or 'yen'");
    }
  }
  return {std::move(*net), PathCatalog(std::move(per_k)), std::move(tree)};
}

inline SaliencePolicy build_salience(const Config& cfg, const Network& net,
                                     const PathCatalog& catalog) {
  const std::string mode = cfg.str("salience", "mode", "uniform");
  std::vector<int> sizes;
  for (int k = 0; k < catalog.n_commodities(); ++k) sizes.push_back(catalog.n_paths(k));
  if (mode == "uniform" && !cfg.has("salience", "weights") && !cfg.has("salience", "rows"))
    return SaliencePolicy::uniform(sizes);
  if (cfg.has("salience", "weights")) {
    auto w = cfg.numbers("salience", "weights", {});
    if (catalog.n_commodities() != 1 ||
        static_cast<int>(w.size()) != catalog.n_paths(0))
      throw UsageError("salience.weights needs one entry per path of a single commodity");
    return SaliencePolicy({w});
  }
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(catalog.n_commodities()));
  for (int k = 0; k < catalog.n_commodities(); ++k)
    weights[static_cast<std::size_t>(k)].assign(
        static_cast<std::size_t>(catalog.n_paths(k)), 1.0);
  for (const auto& row : rows_of(cfg.str("salience", "rows", ""))) {
    if (row.size() != 3) throw UsageError("salience.rows: commodity path weight");
    weights.at(static_cast<std::size_t>(std::stoi(row[0])))
        .at(static_cast<std::size_t>(std::stoi(row[1]))) = std::stod(row[2]);
  }
  (void)net;
  return SaliencePolicy(std::move(weights));
}

inline std::vector<MemoryPolicy> build_memory(const Config& cfg, const PathCatalog& catalog) {
  const int budget = static_cast<int>(cfg.number("memory", "budget", 1));
  const double eps = cfg.number("memory", "eps_reset", 0.0);
  std::vector<MemoryPolicy> pols;
  for (int k = 0; k < catalog.n_commodities(); ++k)
    pols.push_back(MemoryPolicy::uniform(catalog.n_paths(k), budget, eps));
  if (cfg.has("memory", "rho")) {
    const auto& val = cfg.get("memory", "rho");
    if (val.is_number_array()) {
      const auto rho = std::get<std::vector<double>>(val.v);
      if (catalog.n_commodities() != 1 ||
          static_cast<int>(rho.size()) != catalog.n_paths(0))
        throw UsageError("memory.rho needs one entry per path of a single commodity");
      pols[0].rho = rho;
    } else if (!(val.is_string() && std::get<std::string>(val.v) == "uniform")) {
      throw UsageError("memory.rho must be 'uniform' or a probability array");
    }
  }
  return pols;
}

inline std::vector<std::vector<double>> build_target_flows(const Config& cfg,
                                                           const PathCatalog& catalog) {
  if (cfg.has("target", "flows")) {
    auto f = cfg.numbers("target", "flows", {});
    if (catalog.n_commodities() != 1 || static_cast<int>(f.size()) != catalog.n_paths(0))
      throw UsageError("target.flows needs one entry per path of a single commodity");
    return {f};
  }
  std::vector<std::vector<double>> flows(static_cast<std::size_t>(catalog.n_commodities()));
  for (int k = 0; k < catalog.n_commodities(); ++k)
    flows[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(catalog.n_paths(k)),
                                              0.0);
  const auto rows = rows_of(cfg.str("target", "rows", ""));
  if (rows.empty()) throw UsageError("provide target.flows or target.rows");
  for (const auto& row : rows) {
    if (row.size() != 3) throw UsageError("target.rows: commodity path flow");
    flows.at(static_cast<std::size_t>(std::stoi(row[0])))
        .at(static_cast<std::size_t>(std::stoi(row[1]))) = std::stod(row[2]);
  }
  return flows;
}

// Shared output machinery: CSV files plus a manifest with content hashes.
struct OutputSink {
  std::filesystem::path dir;
  Manifest manifest;

  explicit OutputSink(const std::string& out_dir, const std::string& config_text,
                      std::uint64_t seed)
      : dir(out_dir) {
    std::filesystem::create_directories(dir);
    manifest.config_hash = hash_hex(fnv1a64(config_text));
    manifest.seed = std::to_string(seed);
  }

  void write_table(const Table& t) {
    const std::string csv = t.to_csv();
    write_file((dir / (t.name + ".csv")).string(), csv);
    manifest.record(t.name + ".csv", csv);
  }

  void write_text(const std::string& name, const std::string& content) {
    write_file((dir / name).string(), content);
    manifest.record(name, content);
  }

  void finish() { write_file((dir / "manifest.txt").string(), manifest.to_text()); }
};

inline Config load_config(const std::string& path, std::string& raw_text) {
  if (!std::filesystem::exists(path))
    throw UsageError("config file not found: " + path);
  raw_text = read_file(path);
  Config cfg;
  try {
    cfg = parse_config(raw_text);
  } catch (const ParseError& e) {
    throw UsageError(std::string("config parse error: ") + e.what());
  }
  try {
    cfg.reject_unknown(config_schema());
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

inline Table flows_table(const std::string& name, const Network& net,
                         const PathCatalog& catalog,
                         const std::vector<std::vector<double>>& flows,
                         const std::vector<double>& loads) {
  Table t;
  t.name = name;
  t.columns = {"commodity", "path", "flow", "latency"};
  for (int k = 0; k < catalog.n_commodities(); ++k)
    for (int p = 0; p < catalog.n_paths(k); ++p)
      t.add_row({static_cast<double>(k), static_cast<double>(p),
                 flows[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                 path_latency(net, loads, catalog.paths(k)[static_cast<std::size_t>(p)])});
  return t;
}

inline Table loads_table(const Network& net, const std::vector<double>& loads) {
  Table t;
  t.name = "edge_loads";
  t.columns = {"edge", "tail", "head", "load", "latency"};
  for (int e = 0; e < net.n_edges(); ++e)
    t.add_row({static_cast<double>(e), static_cast<double>(net.edge(e).tail),
               static_cast<double>(net.edge(e).head), loads[static_cast<std::size_t>(e)],
               net.edge(e).latency(loads[static_cast<std::size_t>(e)])});
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommand handlers. Each returns the process exit code.
// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
  CLI::App app{"forgetful routing games: equilibria, memory surrogates, salience design"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::string tntp_net, tntp_trips;
  int top_od = 50;
  double beta_flag = 5.0, budget_flag = kInf;
  std::string design_kind = "pigou", experiment_id, frontier_kind = "pigou";
  std::vector<double> budgets_flag;
  int kmax_flag = 10;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "TOML-style config file")->required();
    cmd->add_option("--out", out_dir, "output directory (default ./out)");
  };

  auto* sue = app.add_subcommand("solve-sue", "salience-weighted SUE equilibrium");
  add_common(sue, true);
  auto* icwe = app.add_subcommand("solve-icwe", "menu-restricted Wardrop equilibrium");
  add_common(icwe, true);
  auto* fwe = app.add_subcommand("solve-fwe", "forgetful Wardrop equilibrium (exact chains)");
  add_common(fwe, true);
  auto* sim = app.add_subcommand("simulate", "agent-based micro simulation");
  add_common(sim, true);
  auto* sur = app.add_subcommand("surrogate", "TTL-salience mean-field surrogate");
  add_common(sur, true);

  auto* design = app.add_subcommand("design", "governed salience design");
  design->add_option("kind", design_kind, "pigou | parallel")->required();
  design->add_option("--beta", beta_flag, "logit inverse temperature");
  design->add_option("--budget", budget_flag, "influence budget R");
  design->add_option("--config", config_path, "config (required for kind=parallel)");
  design->add_option("--out", out_dir, "output directory");

  auto* impl = app.add_subcommand("implement", "inverse-equilibrium implementability report");
  add_common(impl, true);

  auto* frontier = app.add_subcommand("frontier", "welfare-governance frontier");
  frontier->add_option("--kind", frontier_kind, "pigou | parallel");
  frontier->add_option("--beta", beta_flag, "logit inverse temperature");
  frontier->add_option("--budgets", budgets_flag, "budget list")->expected(-1);
  frontier->add_option("--config", config_path, "config (required for kind=parallel)");
  frontier->add_option("--out", out_dir, "output directory");

  auto* exp = app.add_subcommand("experiment", "desk-scale experiment harness");
  exp->add_option("id", experiment_id, "exp1..exp6")->required();
  exp->add_option("--kmax", kmax_flag, "largest diamond chain (exp6)");
  exp->add_option("--config", config_path, "optional config overrides");
  exp->add_option("--out", out_dir, "output directory");

  auto* ingest = app.add_subcommand("ingest-tntp", "parse TNTP files into the edge schema");
  ingest->add_option("--net", tntp_net, "TNTP network file")->required();
  ingest->add_option("--trips", tntp_trips, "TNTP trips file")->required();
  ingest->add_option("--top-od", top_od, "keep the top-N OD pairs by demand");
  ingest->add_option("--out", out_dir, "output directory");

  std::vector<const char*> argv;
  argv.push_back("fr");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    std::string raw_config;
    const auto need_config = [&]() -> Config {
      return detail::load_config(config_path, raw_config);
    };

    if (sue->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      auto salience = detail::build_salience(cfg, inst.net, inst.catalog);
      SueOptions opts;
      opts.tol = cfg.number("solver", "tol", 1e-8);
      opts.max_iter = static_cast<int>(cfg.number("solver", "max_iter", 200000));
      const std::string method = cfg.str("solver", "method", "msa");
      if (method == "mirror") opts.method = SueOptions::Method::Mirror;
      auto res = swsue_solve(inst.net, inst.catalog, salience,
                             cfg.number("solver", "beta", 1.0), opts);
      detail::OutputSink sink(out_dir, raw_config, 0);
      if (!res.converged) {
        sink.write_text("diagnostics.txt", res.diagnostics + "\n");
        sink.finish();
        std::cerr << res.diagnostics << "\n";
        return 1;
      }
      sink.write_table(detail::flows_table("sue_flows", inst.net, inst.catalog,
                                           res.flow.path_flows, res.edge_loads));
      sink.write_table(detail::loads_table(inst.net, res.edge_loads));
      Table summary{"sue_summary",
                    {"social_cost", "potential", "residual", "iterations"},
                    {{res.social_cost, res.potential, res.residual,
                      static_cast<double>(res.iterations)}}};
      sink.write_table(summary);
      sink.finish();
      std::cout << "SC=" << format_number(res.social_cost)
                << " potential=" << format_number(res.potential)
                << " residual=" << format_number(res.residual) << "\n";
      return 0;
    }

    if (icwe->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      // menu rows: "demand path-index [path-index ...]" over commodity 0 paths
      std::vector<std::vector<Path>> menus;
      std::vector<double> demands;
      for (const auto& row : detail::rows_of(cfg.str("icwe", "menus", ""))) {
        if (row.size() < 2) throw UsageError("icwe.menus rows: demand path [path ...]");
        demands.push_back(std::stod(row[0]));
        std::vector<Path> menu;
        for (std::size_t i = 1; i < row.size(); ++i)
          menu.push_back(inst.catalog.paths(0).at(static_cast<std::size_t>(std::stoi(row[i]))));
        menus.push_back(std::move(menu));
      }
      if (menus.empty()) throw UsageError("icwe.menus required");
      auto res = icwe_solve(inst.net, menus, demands);
      detail::OutputSink sink(out_dir, raw_config, 0);
      if (!res.converged) {
        sink.write_text("diagnostics.txt", "icwe did not reach the KKT tolerance\n");
        sink.finish();
        return 1;
      }
      sink.write_table(detail::loads_table(inst.net, res.edge_loads));
      Table summary{"icwe_summary",
                    {"social_cost", "beckmann", "kkt_slack", "iterations"},
                    {{res.social_cost, res.beckmann, res.kkt_slack,
                      static_cast<double>(res.iterations)}}};
      sink.write_table(summary);
      sink.finish();
      std::cout << "SC=" << format_number(res.social_cost)
                << " kkt_slack=" << format_number(res.kkt_slack) << "\n";
      return 0;
    }

    if (fwe->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      auto pols = detail::build_memory(cfg, inst.catalog);
      auto res = fwe_fixed_point(inst.net, inst.catalog, pols,
                                 cfg.number("solver", "beta", 1.0),
                                 cfg.number("fwe", "damping", 0.5),
                                 cfg.number("fwe", "tol", 1e-10), 20000,
                                 cfg.number("fwe", "state_cap", 2e5));
      detail::OutputSink sink(out_dir, raw_config, 0);
      if (!res.converged) {
        sink.write_text("diagnostics.txt", res.diagnostics + "\n");
        sink.finish();
        std::cerr << res.diagnostics << "\n";
        return 1;
      }
      sink.write_table(detail::flows_table("fwe_flows", inst.net, inst.catalog,
                                           res.path_flows, res.edge_loads));
      sink.write_table(detail::loads_table(inst.net, res.edge_loads));
      Table summary{"fwe_summary",
                    {"social_cost", "residual", "iterations"},
                    {{res.social_cost, res.residual, static_cast<double>(res.iterations)}}};
      sink.write_table(summary);
      sink.finish();
      std::cout << "SC=" << format_number(res.social_cost) << "\n";
      return 0;
    }

    if (sim->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      auto pols = detail::build_memory(cfg, inst.catalog);
      const auto seeds = cfg.numbers("sim", "seeds", {1.0});
      const double beta = cfg.number("solver", "beta", 1.0);
      const int agents = static_cast<int>(cfg.number("sim", "agents", 1000));
      const int horizon = static_cast<int>(cfg.number("sim", "horizon", 1000));
      const int burn = static_cast<int>(cfg.number("sim", "burn_in", 200));
      detail::OutputSink sink(out_dir, raw_config,
                              static_cast<std::uint64_t>(seeds.empty() ? 0 : seeds[0]));
      Table summary{"sim_summary", {"seed", "social_cost", "social_cost_sd"}, {}};
      double wall_total = 0.0;
      Table shares{"sim_shares", {"seed", "commodity", "path", "share", "recall", "availability"}, {}};
      for (double seed_val : seeds) {
        const auto seed = static_cast<std::uint64_t>(seed_val);
        SimOptions so;
        std::ostringstream trace;
        const bool want_trace = cfg.flag("sim", "trace", false);
        if (want_trace) so.trace_csv = &trace;
        auto est = simulate_micro(inst.net, inst.catalog, pols, beta, agents, horizon, burn,
                                  seed, so);
        summary.add_row({seed_val, est.social_cost, est.social_cost_sd});
        wall_total += est.wall_seconds;
        for (int k = 0; k < inst.catalog.n_commodities(); ++k)
          for (int p = 0; p < inst.catalog.n_paths(k); ++p)
            shares.add_row({seed_val, static_cast<double>(k), static_cast<double>(p),
                            est.path_shares[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                            est.recall_freq[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                            est.availability[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]});
        if (want_trace)
          sink.write_text("trace_seed" + std::to_string(seed) + ".csv", trace.str());
      }
      sink.write_table(summary);
      sink.write_table(shares);
      sink.finish();
      std::cout << "simulated " << seeds.size() << " seed(s) in "
                << format_number(wall_total) << " s\n";
      return 0;
    }

    if (sur->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      auto pols = detail::build_memory(cfg, inst.catalog);
      TTLOptions topts;
      topts.tol_x = cfg.number("surrogate", "tol_x", 1e-10);
      topts.tol_share = cfg.number("surrogate", "tol_share", 1e-10);
      topts.damp_shares = cfg.flag("surrogate", "damp_shares", false);
      auto res = ttl_salience_equilibrium(inst.net, inst.catalog, pols,
                                          cfg.number("solver", "beta", 1.0),
                                          cfg.number("surrogate", "damping", 0.5), topts);
      detail::OutputSink sink(out_dir, raw_config, 0);
      if (!res.converged) {
        sink.write_text("diagnostics.txt", res.diagnostics + "\n");
        sink.finish();
        std::cerr << res.diagnostics << "\n";
        return 1;
      }
      Table shares{"surrogate_shares",
                   {"commodity", "path", "share", "hit", "availability"},
                   {}};
      for (int k = 0; k < inst.catalog.n_commodities(); ++k)
        for (int p = 0; p < inst.catalog.n_paths(k); ++p)
          shares.add_row({static_cast<double>(k), static_cast<double>(p),
                          res.shares[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                          res.hit[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)],
                          res.availability[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)]});
      sink.write_table(shares);
      sink.write_table(detail::loads_table(inst.net, res.edge_loads));
      // characteristic times: the full-cache sentinel serializes as "inf"
      std::string tt = "commodity,characteristic_time\n";
      for (int k = 0; k < inst.catalog.n_commodities(); ++k)
        tt += std::to_string(k) + "," +
              format_number(res.characteristic_times[static_cast<std::size_t>(k)]) + "\n";
      sink.write_text("surrogate_times.csv", tt);
      Table summary{"surrogate_summary",
                    {"social_cost", "residual_x", "residual_share", "iterations"},
                    {{res.social_cost, res.residual_x, res.residual_share,
                      static_cast<double>(res.iterations)}}};
      sink.write_table(summary);
      sink.finish();
      std::cout << "SC=" << format_number(res.social_cost) << "\n";
      return 0;
    }

    if (design->parsed()) {
      if (design_kind == "pigou") {
        auto res = pigou_optimal(beta_flag, budget_flag);
        std::cout << "f_star=" << format_number(res.f_star)
                  << " r_star=" << format_number(res.r_star)
                  << " SC_star=" << format_number(res.sc_star) << "\n";
        detail::OutputSink sink(out_dir, "design pigou", 0);
        Table t{"design_pigou",
                {"beta", "budget", "f_star", "r_star", "sc_star"},
                {{beta_flag, budget_flag, res.f_star, res.r_star, res.sc_star}}};
        sink.write_table(t);
        sink.finish();
        return 0;
      }
      if (design_kind == "parallel") {
        auto cfg = need_config();
        auto inst = detail::build_instance(cfg);
        std::vector<LatencyFn> lat;
        for (const auto& e : inst.net.edges()) lat.push_back(e.latency);
        auto res = parallel_design(lat, beta_flag, budget_flag,
                                   inst.net.commodity(0).demand);
        std::cout << "SC_star=" << format_number(res.social_cost)
                  << " required_R=" << format_number(res.required_r) << "\n";
        detail::OutputSink sink(out_dir, raw_config, 0);
        Table t{"design_parallel", {"route", "flow", "salience"}, {}};
        for (std::size_t i = 0; i < res.flows.size(); ++i)
          t.add_row({static_cast<double>(i), res.flows[i], res.salience[i]});
        sink.write_table(t);
        Table s{"design_summary",
                {"beta", "budget", "sc_star", "required_r", "t_star"},
                {{beta_flag, budget_flag, res.social_cost, res.required_r, res.t_star}}};
        sink.write_table(s);
        sink.finish();
        return 0;
      }
      throw UsageError("design kind must be 'pigou' or 'parallel'");
    }

    if (impl->parsed()) {
      auto cfg = need_config();
      auto inst = detail::build_instance(cfg);
      auto target = detail::build_target_flows(cfg, inst.catalog);
      const double eps = cfg.number("target", "perturb_eps", 0.0);
      if (eps > 0.0) target = interior_perturbation(inst.net, inst.catalog, target, eps);
      GovernanceSpec gov;
      auto budgets = cfg.numbers("governance", "budgets", {});
      if (!budgets.empty()) {
        if (budgets.size() == 1)
          budgets.assign(static_cast<std::size_t>(inst.catalog.n_commodities()), budgets[0]);
        gov.ratio_budgets = budgets;
      }
      if (cfg.flag("governance", "group_blind", false)) {
        const int np = inst.catalog.n_paths(0);
        for (int k = 1; k < inst.catalog.n_commodities(); ++k)
          if (inst.catalog.n_paths(k) != np)
            throw UsageError("group_blind tying needs identical path counts per commodity");
        Eigen::MatrixXd A(np * inst.catalog.n_commodities(), np);
        A.setZero();
        for (int k = 0; k < inst.catalog.n_commodities(); ++k)
          for (int p = 0; p < np; ++p) A(k * np + p, p) = 1.0;
        gov.tying_matrix = A;
      }
      const double beta = cfg.number("solver", "beta", 1.0);
      auto rep = implementability_report(inst.net, inst.catalog, target, beta, gov);
      detail::OutputSink sink(out_dir, raw_config, 0);
      Table t{"implementability",
              {"commodity", "path", "a_kp", "range", "R_min", "feasible_ratio",
               "feasible_tied", "feasible_governed"},
              {}};
      for (int k = 0; k < inst.catalog.n_commodities(); ++k)
        for (int p = 0; p < inst.catalog.n_paths(k); ++p)
          t.add_row({static_cast<double>(k), static_cast<double>(p),
                     rep.required_log_salience[static_cast<std::size_t>(k)]
                                              [static_cast<std::size_t>(p)],
                     rep.range[static_cast<std::size_t>(k)],
                     rep.r_min[static_cast<std::size_t>(k)],
                     rep.feasible_ratio[static_cast<std::size_t>(k)] ? 1.0 : 0.0,
                     rep.feasible_tied ? 1.0 : 0.0, rep.feasible_governed ? 1.0 : 0.0});
      sink.write_table(t);
      sink.finish();
      std::cout << "governed_feasible=" << (rep.feasible_governed ? 1 : 0) << "\n";
      return 0;
    }

    if (frontier->parsed()) {
      std::vector<double> budgets = budgets_flag;
      if (budgets.empty()) budgets = {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0};
      std::vector<FrontierPoint> points;
      std::string raw = "frontier " + frontier_kind;
      if (frontier_kind == "pigou") {
        points = governed_frontier_pigou(beta_flag, budgets);
      } else if (frontier_kind == "parallel") {
        auto cfg = need_config();
        raw = raw_config;
        auto inst = detail::build_instance(cfg);
        std::vector<LatencyFn> lat;
        for (const auto& e : inst.net.edges()) lat.push_back(e.latency);
        points = governed_frontier_parallel(lat, beta_flag, inst.net.commodity(0).demand,
                                            budgets);
      } else {
        throw UsageError("frontier kind must be 'pigou' or 'parallel'");
      }
      detail::OutputSink sink(out_dir, raw, 0);
      Table t{"frontier", {"budget", "sc_opt", "required_r"}, {}};
      for (const auto& p : points) t.add_row({p.budget, p.sc, p.required_r});
      sink.write_table(t);
      sink.finish();
      for (const auto& p : points)
        std::cout << "R=" << format_number(p.budget) << " SC=" << format_number(p.sc) << "\n";
      return 0;
    }

    if (exp->parsed()) {
      ExperimentConfig ecfg;
      ecfg.id = experiment_id;
      ecfg.kmax = kmax_flag;
      std::string raw = "experiment " + experiment_id;
      if (!config_path.empty()) {
        auto cfg = detail::load_config(config_path, raw);
        ecfg.agents = static_cast<int>(cfg.number("experiment", "agents", 0));
        ecfg.horizon = static_cast<int>(cfg.number("experiment", "horizon", 0));
        ecfg.burn_in = static_cast<int>(cfg.number("experiment", "burn_in", 0));
        ecfg.beta = cfg.number("experiment", "beta", 0.0);
        ecfg.budget = static_cast<int>(cfg.number("experiment", "budget", 0));
        ecfg.kmax = static_cast<int>(cfg.number("experiment", "kmax", kmax_flag));
        ecfg.n_targets = static_cast<int>(cfg.number("experiment", "n_targets", 30));
        ecfg.feasibility_budget = cfg.number("experiment", "feasibility_budget", 5.0);
        auto seeds = cfg.numbers("experiment", "seeds", {});
        if (!seeds.empty()) {
          ecfg.seeds.clear();
          for (double s : seeds) ecfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
        auto fb = cfg.numbers("experiment", "frontier_budgets", {});
        if (!fb.empty()) ecfg.frontier_budgets = fb;
        ecfg.tntp_net = cfg.str("experiment", "tntp_net", "");
        ecfg.tntp_trips = cfg.str("experiment", "tntp_trips", "");
        ecfg.tntp_top_od = static_cast<int>(cfg.number("experiment", "tntp_top_od", 50));
        ecfg.tntp_paths_per_od =
            static_cast<int>(cfg.number("experiment", "tntp_paths_per_od", 8));
      }
      auto res = run_experiment(ecfg);
      detail::OutputSink sink(out_dir, raw, ecfg.seeds.empty() ? 0 : ecfg.seeds[0]);
      for (const auto& t : res.tables) sink.write_table(t);
      sink.finish();
      std::cout << "wrote " << res.tables.size() << " table(s) to " << out_dir << "\n";
      return 0;
    }

    if (ingest->parsed()) {
      auto res = parse_tntp(tntp_net, tntp_trips, top_od);
      detail::OutputSink sink(out_dir, "ingest-tntp", 0);
      sink.manifest.record("net_file", read_file(tntp_net));
      sink.manifest.record("trips_file", read_file(tntp_trips));
      Table links{"network_links", {"edge", "tail", "head", "free_flow_time"}, {}};
      for (int e = 0; e < res.network.n_edges(); ++e)
        links.add_row({static_cast<double>(e), static_cast<double>(res.network.edge(e).tail),
                       static_cast<double>(res.network.edge(e).head),
                       res.network.edge(e).latency(0.0)});
      sink.write_table(links);
      Table ods{"commodities", {"commodity", "origin", "destination", "demand"}, {}};
      for (int k = 0; k < res.network.n_commodities(); ++k)
        ods.add_row({static_cast<double>(k), static_cast<double>(res.network.commodity(k).origin),
                     static_cast<double>(res.network.commodity(k).destination),
                     res.network.commodity(k).demand});
      sink.write_table(ods);
      std::string warn;
      for (const auto& w : res.warnings) warn += w + "\n";
      if (!warn.empty()) sink.write_text("warnings.txt", warn);
      sink.finish();
      std::cout << "nodes=" << res.network.n_nodes() << " links=" << res.network.n_edges()
                << " commodities=" << res.network.n_commodities() << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fr::cli

#endif  // FR_CLI_HPP
