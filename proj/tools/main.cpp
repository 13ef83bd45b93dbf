// pcnet: partial-correlation network estimation with bootstrap accuracy and
// stability checks, plus a simulation harness for the methods themselves.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <map>
#include <random>

#include "pcnet/bootstrap.hpp"
#include "pcnet/csv.hpp"
#include "pcnet/dataset.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/estimator.hpp"
#include "pcnet/io.hpp"
#include "pcnet/simgen.hpp"
#include "pcnet/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pcnet;

namespace {

struct CommonOptions {
  std::string input;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  std::string format = "csv";
};

struct EstimatorFlags {
  std::string method = "ebicglasso";
  std::string correlation = "auto";
  double gamma = 0.5;
  int n_lambda = 100;
  double lambda_min_ratio = 0.01;
  bool penalize_diagonal = false;
  double tol = 1e-4;
  int max_iter = 10000;
  std::string missing = "pairwise";
  std::string delimiter = "comma";
  std::string header = "auto";
};

void add_common(CLI::App* cmd, CommonOptions* opts, bool /*needs_input*/) {
  // file existence is checked at load time so a missing file maps to the
  // data-error exit code, not a parse error
  cmd->add_option("--input", opts->input, "input data CSV");
  cmd->add_option("--output-dir", opts->output_dir, "output directory");
  cmd->add_option("--seed", opts->seed, "base RNG seed (omitted: generated)")
      ->each([opts](const std::string&) { opts->seed_given = true; });
  cmd->add_option("--workers", opts->workers, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", opts->format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_estimator(CLI::App* cmd, EstimatorFlags* flags) {
  cmd->add_option("--method", flags->method, "estimator")
      ->check(CLI::IsMember({"ebicglasso", "pcor"}));
  cmd->add_option("--correlation", flags->correlation, "correlation method")
      ->check(CLI::IsMember({"auto", "pearson", "spearman", "polychoric"}));
  cmd->add_option("--gamma", flags->gamma, "EBIC hyperparameter");
  cmd->add_option("--n-lambda", flags->n_lambda, "path length");
  cmd->add_option("--lambda-min-ratio", flags->lambda_min_ratio,
                  "smallest/largest lambda ratio");
  cmd->add_flag("--penalize-diagonal", flags->penalize_diagonal,
                "penalize the precision diagonal");
  cmd->add_option("--tol", flags->tol, "glasso convergence tolerance");
  cmd->add_option("--max-iter", flags->max_iter, "glasso iteration cap");
  cmd->add_option("--missing", flags->missing, "missing-data policy")
      ->check(CLI::IsMember({"pairwise", "listwise"}));
  cmd->add_option("--delimiter", flags->delimiter, "input delimiter")
      ->check(CLI::IsMember({"comma", "tab"}));
  cmd->add_option("--header", flags->header, "input header row")
      ->check(CLI::IsMember({"auto", "yes", "no"}));
}

EstimatorConfig to_config(const EstimatorFlags& flags) {
  EstimatorConfig config;
  config.method = estimator_method_from_string(flags.method);
  config.options.correlation_method =
      correlation_method_from_string(flags.correlation);
  config.options.gamma = flags.gamma;
  config.options.n_lambda = flags.n_lambda;
  config.options.lambda_min_ratio = flags.lambda_min_ratio;
  config.options.penalize_diagonal = flags.penalize_diagonal;
  config.options.convergence_tol = flags.tol;
  config.options.max_iter = flags.max_iter;
  return config;
}

LoadOptions to_load_options(const EstimatorFlags& flags) {
  LoadOptions opts;
  opts.delimiter = flags.delimiter == "tab" ? '\t' : ',';
  if (flags.header != "auto") opts.header = flags.header == "yes";
  opts.policy = flags.missing == "listwise" ? MissingPolicy::Listwise
                                            : MissingPolicy::Pairwise;
  return opts;
}

json estimator_options_json(const CommonOptions& common,
                            const EstimatorFlags& flags) {
  json j;
  j["input"] = common.input;
  j["seed"] = common.seed;
  j["workers"] = common.workers;
  j["method"] = flags.method;
  j["correlation"] = flags.correlation;
  j["gamma"] = flags.gamma;
  j["n-lambda"] = flags.n_lambda;
  j["lambda-min-ratio"] = flags.lambda_min_ratio;
  j["penalize-diagonal"] = flags.penalize_diagonal;
  j["tol"] = flags.tol;
  j["max-iter"] = flags.max_iter;
  j["missing"] = flags.missing;
  j["delimiter"] = flags.delimiter;
  j["header"] = flags.header;
  return j;
}

std::string pretty(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::uint64_t resolve_seed(CommonOptions* common) {
  if (!common->seed_given) {
    std::random_device rd;
    common->seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "generated seed: " << common->seed << "\n";
  }
  return common->seed;
}

std::string resolve_output_dir(CommonOptions* common,
                               const std::string& command) {
  if (common->output_dir.empty()) common->output_dir = "pcnet_" + command;
  fs::create_directories(common->output_dir);
  return common->output_dir;
}

Dataset load_input(const CommonOptions& common, const EstimatorFlags& flags) {
  if (common.input.empty()) throw UsageError("--input is required");
  return load_table(common.input, to_load_options(flags));
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

int cmd_estimate(const CommonOptions& common_in, const EstimatorFlags& flags,
                 bool no_svg) {
  CommonOptions common = common_in;
  Dataset data = load_input(common, flags);
  std::uint64_t seed = resolve_seed(&common);
  std::string dir = resolve_output_dir(&common, "estimate");
  if (data.n() <= data.p())
    std::cerr << "warning: n (" << data.n() << ") <= p (" << data.p()
              << "); estimates may be unstable\n";

  EstimatorConfig config = to_config(flags);
  Network network = config.estimate(data);
  CentralityTable centrality = centrality_table(network);

  io::write_edge_list(network, path_in(dir, "edgelist.csv"));
  io::write_weight_matrix(network, path_in(dir, "matrix.csv"));
  io::write_network_json(network, path_in(dir, "network.json"));
  io::write_centrality(centrality, path_in(dir, "centrality.csv"));
  std::vector<std::string> outputs = {"edgelist.csv", "matrix.csv",
                                      "network.json", "centrality.csv"};
  if (!no_svg) {
    svg::network_plot(network, path_in(dir, "network.svg"), seed);
    outputs.push_back("network.svg");
  }
  io::write_manifest(dir, "estimate", estimator_options_json(common, flags),
                     {common.input}, seed, outputs);
  std::cout << "estimated " << network.n_nonzero_edges() << " nonzero of "
            << network.n_candidate_edges() << " candidate edges (lambda="
            << pretty(network.provenance.lambda) << ")\n"
            << "outputs in " << dir << "\n";
  return 0;
}

int cmd_centrality(const CommonOptions& common_in, const std::string& network_file,
                   const std::string& run_dir) {
  CommonOptions common = common_in;
  std::string matrix_path = network_file;
  if (matrix_path.empty() && !run_dir.empty())
    matrix_path = path_in(run_dir, "matrix.csv");
  if (matrix_path.empty())
    throw UsageError("centrality needs --network or --run");
  Network network = io::read_weight_matrix(matrix_path);
  CentralityTable table = centrality_table(network);
  std::string dir = resolve_output_dir(&common, "centrality");
  io::write_centrality(table, path_in(dir, "centrality.csv"));
  json options = {{"network", matrix_path}};
  io::write_manifest(dir, "centrality", options, {matrix_path}, 0,
                     {"centrality.csv"});

  if (common.format == "json") {
    json j = json::array();
    for (int i = 0; i < network.p(); ++i)
      j.push_back({{"node", table.node_labels[static_cast<std::size_t>(i)]},
                   {"strength", table.strength(i)},
                   {"closeness", table.closeness(i)},
                   {"betweenness", table.betweenness(i)}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "node,strength,closeness,betweenness\n";
    for (int i = 0; i < network.p(); ++i)
      std::cout << table.node_labels[static_cast<std::size_t>(i)] << ","
                << pretty(table.strength(i)) << ","
                << pretty(table.closeness(i)) << ","
                << pretty(table.betweenness(i)) << "\n";
  }
  return 0;
}

void emit_bootstrap_reports(const BootstrapResult& result, double alpha,
                            bool only_nonzero, const std::string& dir,
                            std::vector<std::string>* outputs) {
  auto cis = edge_ci(result, alpha);
  io::write_edge_ci(cis, result.reference, path_in(dir, "ci.csv"));
  svg::edge_ci_plot(cis, path_in(dir, "edge_ci.svg"));
  outputs->insert(outputs->end(), {"ci.csv", "edge_ci.svg"});
  for (Statistic s : {Statistic::Edge, Statistic::Strength,
                      Statistic::Closeness, Statistic::Betweenness}) {
    auto matrix = difference_matrix(result, s, alpha,
                                    s == Statistic::Edge && only_nonzero);
    std::string base = "diff_" + to_string(s);
    io::write_difference_matrix(matrix, path_in(dir, base + ".csv"));
    svg::difference_matrix_plot(matrix, path_in(dir, base + ".svg"));
    outputs->insert(outputs->end(), {base + ".csv", base + ".svg"});
  }
}

int cmd_bootstrap(const CommonOptions& common_in, const EstimatorFlags& flags,
                  const std::string& type, int n_boots, double alpha,
                  bool only_nonzero, const std::string& from_run) {
  CommonOptions common = common_in;
  EstimatorFlags eflags = flags;
  if (!from_run.empty()) {
    json manifest = io::read_manifest(from_run);
    const json& opts = manifest.at("options");
    if (common.input.empty()) common.input = opts.value("input", "");
    eflags.method = opts.value("method", eflags.method);
    eflags.correlation = opts.value("correlation", eflags.correlation);
    eflags.gamma = opts.value("gamma", eflags.gamma);
    eflags.n_lambda = opts.value("n-lambda", eflags.n_lambda);
    eflags.lambda_min_ratio =
        opts.value("lambda-min-ratio", eflags.lambda_min_ratio);
    eflags.missing = opts.value("missing", eflags.missing);
    eflags.delimiter = opts.value("delimiter", eflags.delimiter);
    eflags.header = opts.value("header", eflags.header);
  }
  if (alpha < 2.0 / n_boots)
    throw UsageError("alpha " + pretty(alpha) +
                     " is below the achievable floor 2/n_boots = " +
                     pretty(2.0 / n_boots));
  Dataset data = load_input(common, eflags);
  EstimatorConfig config = to_config(eflags);
  std::uint64_t seed = resolve_seed(&common);
  std::string dir = resolve_output_dir(&common, "bootstrap");

  BootstrapResult result;
  if (type == "parametric") {
    Network reference = config.estimate(data);
    result = parametric_boot(reference, data.n(), config, n_boots, seed,
                             common.workers);
  } else {
    result = nonparametric_boot(data, config, n_boots, seed, common.workers);
  }

  json options = estimator_options_json(common, eflags);
  options["type"] = type;
  options["n-boots"] = n_boots;
  options["alpha"] = alpha;
  options["only-nonzero"] = only_nonzero;

  std::vector<std::string> outputs;
  emit_bootstrap_reports(result, alpha, only_nonzero, dir, &outputs);
  io::write_bootstrap_dir(result, dir, options, {common.input}, outputs);

  std::cout << to_string(result.type) << " bootstrap: "
            << result.n_successful() << "/" << result.n_boots
            << " replicates succeeded\n";
  if (result.shrinkage_warning)
    std::cout << "warning: parametric bootstrap around a regularized network "
                 "is biased by shrinkage; prefer nonparametric\n";
  std::cout << "outputs in " << dir << "\n";
  return 0;
}

int cmd_stability(const CommonOptions& common_in, const EstimatorFlags& flags,
                  const std::string& subset_type, int n_levels, double drop_min,
                  double drop_max, int n_boots, double cor_threshold,
                  double probability) {
  CommonOptions common = common_in;
  Dataset data = load_input(common, flags);
  std::uint64_t seed = resolve_seed(&common);
  std::string dir = resolve_output_dir(&common, "stability");
  EstimatorConfig config = to_config(flags);
  auto levels = default_drop_levels(n_levels, drop_min, drop_max);

  SubsetBootstrapResult result =
      subset_type == "node"
          ? node_dropping_boot(data, config, levels, n_boots, seed,
                               common.workers)
          : case_dropping_boot(data, config, levels, n_boots, seed,
                               common.workers);
  auto coefficients = cs_coefficient(result, cor_threshold, probability);

  io::write_subset_result(result, path_in(dir, "subsets.csv"));
  io::write_cs_report(coefficients, path_in(dir, "cs.csv"));
  svg::stability_plot(result, path_in(dir, "stability.svg"));

  json options = estimator_options_json(common, flags);
  options["type"] = subset_type;
  options["n-boots"] = n_boots;
  options["drop-levels"] = n_levels;
  options["drop-min"] = drop_min;
  options["drop-max"] = drop_max;
  options["cor-threshold"] = cor_threshold;
  options["probability"] = probability;
  io::write_manifest(dir, "stability", options, {common.input}, seed,
                     {"subsets.csv", "cs.csv", "stability.svg"});

  // Guidance thresholds from the simulation studies: CS below 0.25 is not
  // interpretable, 0.25-0.5 with care, above 0.5 stable.
  auto verdict = [](double cs) {
    if (cs < 0.25) return "below 0.25: order not interpretable";
    if (cs < 0.5) return "between 0.25 and 0.5: interpret order with care";
    return "above 0.5: stable";
  };
  if (common.format == "json") {
    json j = json::array();
    for (const auto& cs : coefficients)
      j.push_back({{"index", to_string(cs.index)},
                   {"cs", cs.value},
                   {"verdict", verdict(cs.value)}});
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& cs : coefficients)
      std::cout << "CS(cor=" << pretty(cor_threshold) << ") "
                << to_string(cs.index) << " = " << pretty(cs.value)
                << "  [" << verdict(cs.value) << "]\n";
  }
  std::cout << "outputs in " << dir << "\n";
  return 0;
}

int cmd_difftest(const CommonOptions& common_in, const std::string& run_dir,
                 const std::string& stat_name, const std::string& a,
                 const std::string& b, double alpha) {
  CommonOptions common = common_in;
  BootstrapResult result = io::read_bootstrap_dir(run_dir);
  Statistic statistic = statistic_from_string(stat_name);
  Element ea = parse_element(a, result.reference, statistic);
  Element eb = parse_element(b, result.reference, statistic);
  auto test = difference_test(result, ea, eb, statistic, alpha);

  std::string dir = common.output_dir.empty() ? run_dir : common.output_dir;
  fs::create_directories(dir);
  std::string file = "difftest_" + to_string(statistic) + "_" + test.element_a +
                     "_" + test.element_b + ".json";
  io::write_difference_test_json(test, path_in(dir, file));

  if (common.format == "json") {
    std::ifstream in(path_in(dir, file));
    std::cout << in.rdbuf();
  } else {
    std::cout << to_string(statistic) << " difference " << test.element_a
              << " vs " << test.element_b << ": CI ("
              << pretty(test.ci_lower) << ", "
              << pretty(test.ci_upper) << ") at alpha "
              << pretty(alpha) << " -> "
              << (test.significant ? "significant" : "not significant")
              << (test.identical_elements ? " (identical elements)" : "")
              << "\n";
  }
  std::cout << "written " << path_in(dir, file) << "\n";
  return 0;
}

int cmd_simulate(const CommonOptions& common_in, const std::string& study_name,
                 SimulationConfig config) {
  CommonOptions common = common_in;
  StudyKind study = study_from_string(study_name);
  std::uint64_t seed = resolve_seed(&common);
  std::string dir = resolve_output_dir(&common, "simulate");
  config.base_seed = seed;
  config.workers = common.workers;

  SimulationResult result = run_study(config, study);

  io::write_simulation_records(result, path_in(dir, "results.csv"));
  io::write_simulation_summary(result, path_in(dir, "summary.json"));
  svg::simulation_plot(result, path_in(dir, "figure.svg"));

  json options;
  options["study"] = study_name;
  options["p"] = config.p;
  options["weight"] = config.edge_weight;
  options["negative-prop"] = config.negative_proportion;
  options["rewiring"] = config.rewiring;
  options["sample-sizes"] = config.sample_sizes;
  options["reps"] = config.replications;
  options["n-boots"] = config.n_boots;
  options["drop-levels"] = config.drop_levels;
  options["alphas"] = config.alphas;
  options["ordinal-levels"] = config.ordinal_levels;
  options["seed"] = seed;
  options["workers"] = common.workers;
  io::write_manifest(dir, "simulate", options, {}, seed,
                     {"results.csv", "summary.json", "figure.svg"});

  double failure_rate =
      result.total_replications == 0
          ? 0.0
          : static_cast<double>(result.failures.size()) /
                static_cast<double>(result.total_replications);
  std::cout << "study " << study_name << ": " << result.records.size()
            << " records, " << result.failures.size() << "/"
            << result.total_replications << " replications failed\n"
            << "outputs in " << dir << "\n";
  if (failure_rate > 0.10) {
    std::cerr << "error: more than 10% of replications failed\n";
    return 3;
  }
  return 0;
}

int cmd_plot(const std::string& run_dir, std::uint64_t seed) {
  json manifest = io::read_manifest(run_dir);
  std::string command = manifest.value("command", "");
  if (command == "estimate") {
    Network network =
        io::read_weight_matrix(path_in(run_dir, "matrix.csv"));
    svg::network_plot(network, path_in(run_dir, "network.svg"),
                      seed ? seed : manifest.value("base_seed", 0ull));
    std::cout << "written " << path_in(run_dir, "network.svg") << "\n";
  } else if (command == "bootstrap") {
    BootstrapResult result = io::read_bootstrap_dir(run_dir);
    double alpha = manifest.at("options").value("alpha", 0.05);
    bool only_nonzero = manifest.at("options").value("only-nonzero", true);
    std::vector<std::string> outputs;
    emit_bootstrap_reports(result, alpha, only_nonzero, run_dir, &outputs);
    std::cout << "re-drawn bootstrap figures in " << run_dir << "\n";
  } else if (command == "stability") {
    // rebuild the figure from subsets.csv; only levels and correlations
    // matter to the plot
    CsvTable table = read_csv(path_in(run_dir, "subsets.csv"));
    int level_col = table.column("level");
    int rep_col = table.column("replicate");
    int retained_col = table.column("retained");
    int index_col = table.column("index");
    int cor_col = table.column("correlation");
    if (level_col < 0 || index_col < 0 || cor_col < 0)
      throw DataError("unexpected subsets.csv layout in " + run_dir);
    SubsetBootstrapResult result;
    result.node_dropping =
        manifest.at("options").value("type", "case") == std::string("node");
    std::map<double, int> level_index;
    std::map<std::pair<double, int>, SubsetReplicate> rows;
    for (const auto& row : table.rows) {
      double level = std::stod(row[static_cast<std::size_t>(level_col)]);
      level_index.emplace(level, 0);
    }
    int li = 0;
    for (auto& [level, idx] : level_index) {
      idx = li++;
      result.drop_levels.push_back(level);
    }
    for (const auto& row : table.rows) {
      double level = std::stod(row[static_cast<std::size_t>(level_col)]);
      int rep = std::stoi(row[static_cast<std::size_t>(rep_col)]);
      auto& slot = rows[{level, rep}];
      slot.level_index = level_index[level];
      slot.replicate = rep;
      if (retained_col >= 0)
        slot.retained = std::stoi(row[static_cast<std::size_t>(retained_col)]);
      double cor = std::stod(row[static_cast<std::size_t>(cor_col)]);
      const std::string& index = row[static_cast<std::size_t>(index_col)];
      if (index == "edge") slot.edge = cor;
      else if (index == "strength") slot.strength = cor;
      else if (index == "closeness") slot.closeness = cor;
      else if (index == "betweenness") slot.betweenness = cor;
    }
    for (auto& [key, rep] : rows) result.replicates.push_back(rep);
    svg::stability_plot(result, path_in(run_dir, "stability.svg"));
    std::cout << "written " << path_in(run_dir, "stability.svg") << "\n";
  } else {
    throw UsageError("plot does not support run type: " + command);
  }
  return 0;
}

// Injects options from a JSON config file (plain object or a run manifest
// with an "options" member) for flags absent from the command line.
std::vector<std::string> apply_config_file(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot open config file: " + config_path);
  json config;
  in >> config;
  if (config.contains("options")) config = config["options"];

  auto already_given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  for (auto& [key, value] : config.items()) {
    std::string flag = "--" + key;
    if (already_given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (!value.is_null() && !value.is_object()) {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial-correlation network estimation with bootstrap "
               "accuracy and stability analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  CommonOptions common;
  EstimatorFlags eflags;

  auto* est = app.add_subcommand("estimate", "estimate a network from data");
  add_common(est, &common, true);
  add_estimator(est, &eflags);
  bool no_svg = false;
  est->add_flag("--no-svg", no_svg, "skip figure output");

  auto* cent = app.add_subcommand("centrality", "centrality table of a network");
  add_common(cent, &common, false);
  std::string network_file, run_dir;
  cent->add_option("--network", network_file, "weight matrix CSV");
  cent->add_option("--run", run_dir, "estimate run directory");

  auto* boot = app.add_subcommand("bootstrap", "bootstrap edge-weight accuracy");
  add_common(boot, &common, false);
  add_estimator(boot, &eflags);
  std::string boot_type = "nonparametric";
  int n_boots = 1000;
  double alpha = 0.05;
  bool only_nonzero = true;
  std::string from_run;
  boot->add_option("--type", boot_type, "bootstrap type")
      ->check(CLI::IsMember({"nonparametric", "parametric"}));
  boot->add_option("--n-boots", n_boots, "bootstrap samples")
      ->check(CLI::PositiveNumber);
  boot->add_option("--alpha", alpha, "CI / difference-test level");
  boot->add_option("--only-nonzero", only_nonzero,
                   "restrict edge difference plot to nonzero edges");
  boot->add_option("--from-run", from_run,
                   "reuse options and input of an estimate run");

  auto* stab = app.add_subcommand("stability", "subset bootstrap stability");
  add_common(stab, &common, false);
  add_estimator(stab, &eflags);
  std::string subset_type = "case";
  int n_levels = 10;
  double drop_min = 0.1, drop_max = 0.75;
  int stab_boots = 1000;
  double cor_threshold = 0.7, probability = 0.95;
  stab->add_option("--type", subset_type, "subset type")
      ->check(CLI::IsMember({"case", "node"}));
  stab->add_option("--drop-levels", n_levels, "number of drop levels")
      ->check(CLI::PositiveNumber);
  stab->add_option("--drop-min", drop_min, "smallest drop proportion");
  stab->add_option("--drop-max", drop_max, "largest drop proportion");
  stab->add_option("--n-boots", stab_boots,
                   "total bootstrap samples across levels")
      ->check(CLI::PositiveNumber);
  stab->add_option("--cor-threshold", cor_threshold, "CS correlation threshold");
  stab->add_option("--probability", probability, "CS probability");

  auto* diff = app.add_subcommand("difftest", "bootstrapped difference test");
  add_common(diff, &common, false);
  std::string diff_run, stat_name = "strength", element_a, element_b;
  double diff_alpha = 0.05;
  diff->add_option("--run", diff_run, "bootstrap run directory")->required();
  diff->add_option("--stat", stat_name, "statistic")
      ->check(CLI::IsMember({"edge", "strength", "closeness", "betweenness"}));
  diff->add_option("--a", element_a, "first element (node or i-j edge)")
      ->required();
  diff->add_option("--b", element_b, "second element")->required();
  diff->add_option("--alpha", diff_alpha, "test level");

  auto* sim = app.add_subcommand("simulate", "method validation studies");
  add_common(sim, &common, false);
  add_estimator(sim, &eflags);
  std::string study_name;
  SimulationConfig sim_config;
  sim->add_option("--study", study_name, "cs, edge-diff or centrality-diff")
      ->required();
  sim->add_option("--p", sim_config.p, "nodes");
  sim->add_option("--weight", sim_config.edge_weight, "edge weight magnitude");
  sim->add_option("--negative-prop", sim_config.negative_proportion,
                  "share of negative edges");
  sim->add_option("--rewiring", sim_config.rewiring, "rewiring probabilities")
      ->delimiter(',');
  sim->add_option("--sample-sizes", sim_config.sample_sizes, "sample sizes")
      ->delimiter(',');
  sim->add_option("--reps", sim_config.replications, "replications per condition");
  sim->add_option("--n-boots", sim_config.n_boots, "bootstrap samples");
  int sim_levels = 10;
  sim->add_option("--drop-levels", sim_levels, "case-dropping levels");
  sim->add_option("--alphas", sim_config.alphas, "edge-diff alpha levels")
      ->delimiter(',');
  sim->add_option("--centrality-alpha", sim_config.centrality_alpha,
                  "centrality-diff test level");
  sim->add_option("--ordinal-levels", sim_config.ordinal_levels,
                  "ordinalization levels");

  auto* plot = app.add_subcommand("plot", "re-draw figures for a run directory");
  std::string plot_run;
  std::uint64_t plot_seed = 0;
  plot->add_option("--run", plot_run, "run directory")->required();
  plot->add_option("--seed", plot_seed, "layout seed override");

  try {
    auto args = apply_config_file(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1; --help/--version exit 0
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (est->parsed()) return cmd_estimate(common, eflags, no_svg);
    if (cent->parsed()) return cmd_centrality(common, network_file, run_dir);
    if (boot->parsed())
      return cmd_bootstrap(common, eflags, boot_type, n_boots, alpha,
                           only_nonzero, from_run);
    if (stab->parsed())
      return cmd_stability(common, eflags, subset_type, n_levels, drop_min,
                           drop_max, stab_boots, cor_threshold, probability);
    if (diff->parsed())
      return cmd_difftest(common, diff_run, stat_name, element_a, element_b,
                          diff_alpha);
    if (sim->parsed()) {
      // study-specific defaults apply only where the user left flags unset
      SimulationConfig defaults = default_config(study_from_string(study_name));
      if (!sim->count("--weight")) sim_config.edge_weight = defaults.edge_weight;
      if (!sim->count("--negative-prop"))
        sim_config.negative_proportion = defaults.negative_proportion;
      if (!sim->count("--rewiring")) sim_config.rewiring = defaults.rewiring;
      if (sim->count("--drop-levels"))
        sim_config.drop_levels = default_drop_levels(sim_levels);
      sim_config.estimator = to_config(eflags);
      return cmd_simulate(common, study_name, sim_config);
    }
    if (plot->parsed()) return cmd_plot(plot_run, plot_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
