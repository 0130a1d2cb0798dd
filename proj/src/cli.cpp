#include "statusrank/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "statusrank/analysis.hpp"
#include "statusrank/em.hpp"
#include "statusrank/json_io.hpp"
#include "statusrank/mvr.hpp"
#include "statusrank/network.hpp"
#include "statusrank/random.hpp"
#include "statusrank/rank_model.hpp"

#ifndef STATUSRANK_VERSION
#define STATUSRANK_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace statusrank::cli {

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string edges;
  std::string attrs;
  std::string out = ".";
  std::string config;
  std::uint64_t seed = 1;
  std::string component = "strong";

  int chains = 4;
  int burn_in = 200;
  int samples = 200;
  int spacing = 5;
  int max_iter = 100;
  double tol = 0.001;
  double local_fraction = 0.5;

  std::string params;
  int nodes = 0;

  int restarts = 1;

  std::string fit;
  int permutations = 10000;
  std::vector<std::string> contrasts;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct RunContext {
  std::string command;
  const Options& opts;
  Json manifest;
  Stopwatch clock;
  std::ostream& out;
};

void add_common(CLI::App* sub, Options& o, bool needs_edges) {
  if (needs_edges) {
    sub->add_option("--edges", o.edges, "Edge list: one 'src dst' claim per line");
    sub->add_option("--component", o.component, "Largest component to analyse: strong, weak or all")
        ->check(CLI::IsMember({"strong", "weak", "all"}));
  }
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Top-level random seed");
  sub->add_option("--config", o.config, "JSON file of flag values; explicit flags take precedence");
}

void add_inference(CLI::App* sub, Options& o) {
  sub->add_option("--chains", o.chains, "MCMC chains per E-step")->check(CLI::PositiveNumber);
  sub->add_option("--burn-in", o.burn_in, "Burn-in sweeps per chain")->check(CLI::NonNegativeNumber);
  sub->add_option("--samples", o.samples, "Retained samples per chain")->check(CLI::PositiveNumber);
  sub->add_option("--spacing", o.spacing, "Sweeps between retained samples")->check(CLI::PositiveNumber);
  sub->add_option("--local-fraction", o.local_fraction, "Share of nearby-rank swap proposals")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--max-iter", o.max_iter, "EM iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "Stop when mean |change| of posterior mean ranks is below tol * n")
      ->check(CLI::PositiveNumber);
}

/// Fills options not given on the command line from a flat JSON object.
void apply_config(CLI::App* sub, const std::string& path) {
  const Json cfg = parse_json_file(path);
  if (!cfg.is_object()) throw InputError(path + ": config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") throw InputError(path + ": config files cannot nest");
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InputError(path + ": unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    auto text = [&](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number() || v.is_boolean()) return v.dump();
      throw InputError(path + ": key '" + key + "' must hold a string, number or array of those");
    };
    if (value.is_array()) {
      for (const Json& v : value) opt->add_result(text(v));
    } else {
      opt->add_result(text(value));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError(path + ": key '" + key + "': " + e.what());
    }
  }
}

DirectedNetwork load_network(RunContext& ctx) {
  const Options& o = ctx.opts;
  if (o.edges.empty()) throw InputError("--edges is required");
  if (!fs::exists(o.edges)) throw InputError("edge list not found: " + o.edges);
  DirectedNetwork full;
  try {
    full = read_edge_list(o.edges);
  } catch (const ParseError& e) {
    throw InputError(o.edges + ": " + e.what());
  }
  ctx.manifest["inputs"]["edges"] = {{"path", o.edges}, {"fnv1a64", file_digest(o.edges)}};
  DirectedNetwork net = o.component == "all" ? full : largest_component(full, parse_component_mode(o.component));
  ctx.manifest["network"] = {{"component", o.component},
                             {"input_nodes", full.size()},
                             {"nodes", net.size()},
                             {"mutual_pairs", net.mutual().size()},
                             {"oneway_claims", net.oneway().size()}};
  ctx.manifest["timings_seconds"]["load"] = ctx.clock.lap();
  return net;
}

void write_series(const fs::path& dir, const std::vector<FigureSeries>& series, const std::string& network_id) {
  fs::create_directories(dir);
  for (FigureSeries s : series) {
    s.metadata["network"] = network_id;
    std::ofstream f(dir / (s.name + ".csv"));
    if (!f) throw std::runtime_error("cannot write " + (dir / (s.name + ".csv")).string());
    write_series_csv(f, s);
  }
}

Json series_json(const std::vector<FigureSeries>& series, const std::string& network_id) {
  Json arr = Json::array();
  for (FigureSeries s : series) {
    s.metadata["network"] = network_id;
    arr.push_back(to_json(s));
  }
  return arr;
}

std::string network_id(const Options& o) { return fs::path(o.edges).filename().string(); }

std::vector<std::pair<std::string, std::string>> parse_contrast(const std::string& spec, std::string& column) {
  // column:a:b
  const auto first = spec.find(':');
  const auto second = first == std::string::npos ? std::string::npos : spec.find(':', first + 1);
  if (second == std::string::npos || first == 0 || second == first + 1 || second + 1 == spec.size()) {
    throw InputError("contrast must look like column:groupA:groupB, got '" + spec + "'");
  }
  column = spec.substr(0, first);
  return {{spec.substr(first + 1, second - first - 1), spec.substr(second + 1)}};
}

/// Figure CSVs plus report.json: all series, degree correlations and, with
/// --attrs, the attribute tests.
void write_report(RunContext& ctx, const FitResult& fit, const DirectedNetwork& net) {
  const Options& o = ctx.opts;
  Json report;
  std::vector<FigureSeries> series = histogram_series(fit, net);
  const DegreeRankCurves degree = degree_rank_curves(fit, net);
  series.insert(series.end(), degree.series.begin(), degree.series.end());
  report["degree_rank"] = {{"spearman_in", degree.spearman_in},
                           {"spearman_out", degree.spearman_out},
                           {"spearman_total", degree.spearman_total}};

  if (!o.attrs.empty()) {
    if (!fs::exists(o.attrs)) throw InputError("attribute file not found: " + o.attrs);
    AttributeTable attrs;
    try {
      attrs = read_attributes(o.attrs);
    } catch (const ParseError& e) {
      throw InputError(o.attrs + ": " + e.what());
    }
    ctx.manifest["inputs"]["attrs"] = {{"path", o.attrs}, {"fnv1a64", file_digest(o.attrs)}};
    AttributeOptions options;
    options.permutations = o.permutations;
    options.seed = derive_seed(o.seed, "analyze");
    ctx.manifest["seeds"]["permutations"] = options.seed;
    for (const std::string& spec : o.contrasts) {
      std::string column;
      auto pairs = parse_contrast(spec, column);
      auto& list = options.contrasts[column];
      list.insert(list.end(), pairs.begin(), pairs.end());
    }
    Json attributes = Json::array();
    for (const AttributeSummary& s : attribute_rank_summary(fit, attrs, options)) attributes.push_back(to_json(s));
    report["attributes"] = attributes;
  }
  report["series"] = series_json(series, network_id(o));

  const fs::path dir(o.out);
  write_series(dir / "figures", series, network_id(o));
  write_json_file((dir / "report.json").string(), report);
  ctx.manifest["timings_seconds"]["report"] = ctx.clock.lap();
}

int cmd_infer(RunContext& ctx) {
  const Options& o = ctx.opts;
  const DirectedNetwork net = load_network(ctx);
  if (net.size() < 3) {
    throw InputError("inference needs at least 3 nodes in the " + o.component + " component, found " +
                     std::to_string(net.size()));
  }

  EmConfig em;
  em.max_iter = o.max_iter;
  em.tol = o.tol;
  em.seed = derive_seed(o.seed, "em");
  em.mvr.restarts = o.restarts;
  McmcConfig mcmc;
  mcmc.n_chains = o.chains;
  mcmc.burn_in_sweeps = o.burn_in;
  mcmc.n_samples = o.samples;
  mcmc.sweep_spacing = o.spacing;
  mcmc.local_fraction = o.local_fraction;
  mcmc.seed = derive_seed(o.seed, "mcmc");
  ctx.manifest["seeds"]["em"] = em.seed;
  ctx.manifest["seeds"]["mcmc"] = mcmc.seed;
  ctx.manifest["em_config"] = to_json(em);
  ctx.manifest["mcmc_config"] = to_json(mcmc);

  const FitResult fit = run_em(net, em, mcmc);
  ctx.manifest["timings_seconds"]["em"] = ctx.clock.lap();

  write_json_file((fs::path(o.out) / "fit.json").string(), to_json(fit));
  write_report(ctx, fit, net);
  ctx.manifest["converged"] = fit.converged;
  ctx.manifest["em_iterations"] = fit.em_iterations;

  ctx.out << "nodes " << net.size() << ", EM iterations " << fit.em_iterations
          << (fit.converged ? ", converged" : ", not converged") << '\n';
  return fit.converged ? kExitOk : kExitNotConverged;
}

int cmd_generate(RunContext& ctx) {
  const Options& o = ctx.opts;
  ModelParams params = synthetic_params();
  if (!o.params.empty()) {
    if (!fs::exists(o.params)) throw InputError("parameter file not found: " + o.params);
    params = model_params_from_json(parse_json_file(o.params));
    ctx.manifest["inputs"]["params"] = {{"path", o.params}, {"fnv1a64", file_digest(o.params)}};
  }
  if (o.nodes > 0) params.n = o.nodes;
  try {
    validate(params);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid model parameters: ") + e.what());
  }

  const std::uint64_t rank_seed = derive_seed(o.seed, "generate-ranks");
  const std::uint64_t edge_seed = derive_seed(o.seed, "generate-edges");
  ctx.manifest["seeds"]["ranks"] = rank_seed;
  ctx.manifest["seeds"]["edges"] = edge_seed;
  const RankAssignment truth = random_ranking(static_cast<std::size_t>(params.n), rank_seed);
  const DirectedNetwork net = generate_network(truth, params, edge_seed);
  ctx.manifest["network"] = {{"nodes", net.size()},
                             {"mutual_pairs", net.mutual().size()},
                             {"oneway_claims", net.oneway().size()}};
  ctx.manifest["timings_seconds"]["generate"] = ctx.clock.lap();

  const fs::path dir(o.out);
  {
    std::ofstream f(dir / "edges.txt");
    if (!f) throw std::runtime_error("cannot write " + (dir / "edges.txt").string());
    write_edge_list(f, net,
                    "synthetic network: n=" + std::to_string(params.n) + " seed=" + std::to_string(o.seed) +
                        " mutual_pairs=" + std::to_string(net.mutual().size()) +
                        " oneway_claims=" + std::to_string(net.oneway().size()));
  }
  {
    std::ofstream f(dir / "true_ranks.csv");
    if (!f) throw std::runtime_error("cannot write " + (dir / "true_ranks.csv").string());
    f << "label,rank\n";
    for (std::size_t v = 0; v < net.size(); ++v) f << net.labels()[v] << ',' << truth[v] << '\n';
  }
  write_json_file((dir / "params.json").string(), to_json(params));
  ctx.out << "generated " << net.size() << " nodes, " << net.mutual().size() << " reciprocated pairs, "
          << net.oneway().size() << " one-way claims\n";
  return kExitOk;
}

int cmd_mvr(RunContext& ctx) {
  const Options& o = ctx.opts;
  const DirectedNetwork net = load_network(ctx);
  if (net.empty()) throw InputError("no nodes left after component extraction");
  AnnealSchedule schedule;
  schedule.restarts = o.restarts;
  const std::uint64_t seed = derive_seed(o.seed, "mvr");
  ctx.manifest["seeds"]["mvr"] = seed;
  const MvrResult mvr = minimum_violations_ranking(net, seed, schedule);
  ctx.manifest["timings_seconds"]["mvr"] = ctx.clock.lap();

  Json j = to_json(mvr.report);
  j["ranking"] = {{"labels", net.labels()}, {"rank", std::vector<int>(mvr.ranking.values().begin(), mvr.ranking.values().end())}};
  j["sweeps"] = mvr.sweeps;
  j["restarts"] = schedule.restarts;
  j["restarts_at_best"] = mvr.restarts_at_best;
  write_json_file((fs::path(o.out) / "mvr.json").string(), j);
  ctx.out << mvr.report.violations << " violations of " << mvr.report.total_directed << " one-way claims\n";
  return kExitOk;
}

int cmd_shuffle(RunContext& ctx) {
  const Options& o = ctx.opts;
  const DirectedNetwork net = load_network(ctx);
  const std::uint64_t seed = derive_seed(o.seed, "shuffle");
  ctx.manifest["seeds"]["shuffle"] = seed;
  const DirectedNetwork shuffled = randomize_directions(net, seed);
  const fs::path path = fs::path(o.out) / "edges.txt";
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  write_edge_list(f, shuffled, "one-way claims of " + network_id(o) + " with random directions, seed=" + std::to_string(o.seed));
  ctx.manifest["timings_seconds"]["shuffle"] = ctx.clock.lap();
  ctx.out << "randomized " << shuffled.oneway().size() << " one-way claims\n";
  return kExitOk;
}


int cmd_analyze(RunContext& ctx) {
  const Options& o = ctx.opts;
  if (o.fit.empty()) throw InputError("--fit is required");
  if (!fs::exists(o.fit)) throw InputError("fit file not found: " + o.fit);
  const FitResult fit = fit_result_from_json(parse_json_file(o.fit));
  ctx.manifest["inputs"]["fit"] = {{"path", o.fit}, {"fnv1a64", file_digest(o.fit)}};
  const DirectedNetwork net = load_network(ctx);
  if (net.size() != fit.labels.size()) {
    throw InputError("fit has " + std::to_string(fit.labels.size()) + " nodes but the " + o.component +
                     " component has " + std::to_string(net.size()));
  }
  for (const std::string& label : fit.labels) {
    if (!net.index_of(label)) throw InputError("fit node '" + label + "' is not in the network");
  }
  write_report(ctx, fit, net);
  ctx.out << "wrote report for " << net.size() << " nodes\n";
  return kExitOk;
}

Json config_echo(const std::string& command, const Options& o) {
  Json c{{"command", command}, {"out", o.out}, {"seed", o.seed}};
  if (!o.config.empty()) c["config"] = o.config;
  if (command != "generate") {
    c["edges"] = o.edges;
    c["component"] = o.component;
  }
  if (command == "infer") {
    c["chains"] = o.chains;
    c["burn-in"] = o.burn_in;
    c["samples"] = o.samples;
    c["spacing"] = o.spacing;
    c["local-fraction"] = o.local_fraction;
    c["max-iter"] = o.max_iter;
    c["tol"] = o.tol;
  }
  if (command == "infer" || command == "mvr") c["restarts"] = o.restarts;
  if (command == "generate") {
    c["params"] = o.params;
    c["nodes"] = o.nodes;
  }
  if (command == "infer" || command == "analyze") {
    c["attrs"] = o.attrs;
    c["permutations"] = o.permutations;
    c["contrast"] = o.contrasts;
  }
  if (command == "analyze") {
    c["fit"] = o.fit;
  }
  return c;
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Infer latent status rankings from directed friendship networks", "statusrank"};
  app.set_version_flag("--version", STATUSRANK_VERSION);
  app.require_subcommand(1);
  Options o;

  CLI::App* infer = app.add_subcommand("infer", "Fit the ranking model by EM and write posterior ranks and figure data");
  add_common(infer, o, true);
  add_inference(infer, o);
  infer->add_option("--restarts", o.restarts, "Annealing restarts for the initial ranking")->check(CLI::PositiveNumber);
  infer->add_option("--attrs", o.attrs, "Attribute CSV for the report: header row, node label in the first column");
  infer->add_option("--permutations", o.permutations, "Label shuffles per attribute test")->check(CLI::PositiveNumber);
  infer->add_option("--contrast", o.contrasts, "Pairwise contrast column:groupA:groupB (repeatable)");

  CLI::App* generate = app.add_subcommand("generate", "Sample a synthetic network with known ranks");
  add_common(generate, o, false);
  generate->add_option("--params", o.params, "Model parameters as JSON (default: built-in synthetic benchmark)");
  generate->add_option("--nodes", o.nodes, "Override the node count")->check(CLI::PositiveNumber);

  CLI::App* mvr = app.add_subcommand("mvr", "Minimum violations ranking");
  add_common(mvr, o, true);
  mvr->add_option("--restarts", o.restarts, "Independent annealing runs")->check(CLI::PositiveNumber);

  CLI::App* shuffle = app.add_subcommand("shuffle", "Randomize the direction of every one-way claim");
  add_common(shuffle, o, true);

  CLI::App* analyze = app.add_subcommand("analyze", "Degree and attribute summaries of a fitted network");
  add_common(analyze, o, true);
  analyze->add_option("--fit", o.fit, "fit.json written by infer");
  analyze->add_option("--attrs", o.attrs, "Attribute CSV: header row, node label in the first column");
  analyze->add_option("--permutations", o.permutations, "Label shuffles per test")->check(CLI::PositiveNumber);
  analyze->add_option("--contrast", o.contrasts, "Pairwise contrast column:groupA:groupB (repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  CLI::App* active = nullptr;
  std::string command;
  for (CLI::App* sub : {infer, generate, mvr, shuffle, analyze}) {
    if (sub->parsed()) {
      active = sub;
      command = sub->get_name();
    }
  }

  RunContext ctx{command, o, Json::object(), Stopwatch{}, out};
  try {
    if (!o.config.empty()) {
      if (!fs::exists(o.config)) throw InputError("config file not found: " + o.config);
      apply_config(active, o.config);
    }
    if (o.component != "strong" && o.component != "weak" && o.component != "all") {
      throw InputError("--component must be strong, weak or all");
    }
    fs::create_directories(o.out);

    ctx.manifest["tool"] = "statusrank";
    ctx.manifest["version"] = STATUSRANK_VERSION;
    ctx.manifest["command"] = command;
    ctx.manifest["seed"] = o.seed;
    ctx.manifest["config"] = config_echo(command, o);
    ctx.manifest["seeds"] = Json::object();
    ctx.manifest["inputs"] = Json::object();
    if (!o.config.empty()) ctx.manifest["inputs"]["config"] = {{"path", o.config}, {"fnv1a64", file_digest(o.config)}};
    ctx.manifest["timings_seconds"] = Json::object();

    int code = kExitOk;
    if (command == "infer") code = cmd_infer(ctx);
    if (command == "generate") code = cmd_generate(ctx);
    if (command == "mvr") code = cmd_mvr(ctx);
    if (command == "shuffle") code = cmd_shuffle(ctx);
    if (command == "analyze") code = cmd_analyze(ctx);

    ctx.manifest["exit_code"] = code;
    write_json_file((fs::path(o.out) / "manifest.json").string(), ctx.manifest);
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

}  // namespace statusrank::cli
