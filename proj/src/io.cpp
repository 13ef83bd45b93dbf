#include "pcnet/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "pcnet/csv.hpp"
#include "pcnet/errors.hpp"

namespace pcnet::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for hashing: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(out);
}

namespace {

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

}  // namespace

void write_manifest(const std::string& dir, const std::string& command,
                    const json& options,
                    const std::vector<std::string>& input_files,
                    std::uint64_t base_seed,
                    const std::vector<std::string>& outputs,
                    const json& extra) {
  json manifest;
  manifest["command"] = command;
  manifest["tool_version"] = kToolVersion;
  manifest["options"] = options;
  manifest["base_seed"] = base_seed;
  json hashes = json::object();
  for (const auto& f : input_files) hashes[f] = hash_file(f);
  manifest["input_hashes"] = hashes;
  manifest["outputs"] = outputs;
  manifest["written_at"] = now_iso8601();
  if (!extra.is_null() && !extra.empty())
    for (auto& [k, v] : extra.items()) manifest[k] = v;
  auto out = open_out((fs::path(dir) / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

json read_manifest(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw DataError("no manifest.json in " + dir);
  json manifest;
  in >> manifest;
  return manifest;
}

void write_edge_list(const Network& network, const std::string& path) {
  auto out = open_out(path);
  out << "node_i,node_j,weight\n";
  const int p = network.p();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (network.weights(i, j) == 0.0) continue;
      out << network.node_labels[static_cast<std::size_t>(i)] << ","
          << network.node_labels[static_cast<std::size_t>(j)] << ","
          << format_double(network.weights(i, j)) << "\n";
    }
  }
}

void write_weight_matrix(const Network& network, const std::string& path) {
  auto out = open_out(path);
  const int p = network.p();
  out << "node";
  for (int j = 0; j < p; ++j)
    out << "," << network.node_labels[static_cast<std::size_t>(j)];
  out << "\n";
  for (int i = 0; i < p; ++i) {
    out << network.node_labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < p; ++j)
      out << "," << format_double(network.weights(i, j));
    out << "\n";
  }
}

namespace {

json provenance_json(const NetworkProvenance& prov) {
  json j;
  j["estimator"] = prov.estimator;
  j["correlation_method"] = to_string(prov.correlation_method);
  j["gamma"] = prov.gamma;
  j["lambda"] = prov.lambda;
  j["sample_n"] = prov.sample_n;
  j["psd_repaired"] = prov.psd_repaired;
  j["regularized"] = prov.regularized;
  return j;
}

}  // namespace

void write_network_json(const Network& network, const std::string& path) {
  json j;
  j["node_labels"] = network.node_labels;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < network.p(); ++i) {
    std::vector<double> row;
    for (int jj = 0; jj < network.p(); ++jj)
      row.push_back(network.weights(i, jj));
    rows.push_back(std::move(row));
  }
  j["weights"] = rows;
  j["provenance"] = provenance_json(network.provenance);
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

Network read_weight_matrix(const std::string& path) {
  CsvTable table = read_csv(path);
  if (table.header.empty() || table.rows.empty())
    throw DataError("empty weight matrix file: " + path);
  int p = static_cast<int>(table.header.size()) - 1;
  if (p < 2 || static_cast<int>(table.rows.size()) != p)
    throw DataError("weight matrix file is not square: " + path);
  Network net;
  net.weights.resize(p, p);
  net.node_labels.assign(table.header.begin() + 1, table.header.end());
  for (int i = 0; i < p; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != p + 1)
      throw DataError("ragged weight matrix row in " + path);
    for (int j = 0; j < p; ++j)
      net.weights(i, j) = std::stod(row[static_cast<std::size_t>(j + 1)]);
  }
  validate_network(net);
  return net;
}

void write_centrality(const CentralityTable& table, const std::string& path) {
  auto out = open_out(path);
  out << "node,strength,closeness,betweenness,z_strength,z_closeness,"
         "z_betweenness\n";
  for (int i = 0; i < table.strength.size(); ++i) {
    out << table.node_labels[static_cast<std::size_t>(i)] << ","
        << format_double(table.strength(i)) << ","
        << format_double(table.closeness(i)) << ","
        << format_double(table.betweenness(i)) << ","
        << format_double(table.z_strength(i)) << ","
        << format_double(table.z_closeness(i)) << ","
        << format_double(table.z_betweenness(i)) << "\n";
  }
}

void write_bootstrap_dir(const BootstrapResult& result, const std::string& dir,
                         const json& options,
                         const std::vector<std::string>& input_files,
                         std::vector<std::string> extra_outputs) {
  fs::create_directories(dir);
  const int p = result.reference.p();

  std::string network_csv = (fs::path(dir) / "reference_network.csv").string();
  write_weight_matrix(result.reference, network_csv);

  std::string replicates_csv = (fs::path(dir) / "replicates.csv").string();
  {
    auto out = open_out(replicates_csv);
    out << "replicate,statistic,element,value\n";
    for (int b = 0; b < result.n_successful(); ++b) {
      int id = result.replicate_ids[static_cast<std::size_t>(b)];
      const auto& edges = result.edge_weights[static_cast<std::size_t>(b)];
      for (int e = 0; e < edges.size(); ++e) {
        auto [i, j] = edge_nodes(static_cast<int>(e), p);
        out << id << ",edge,"
            << result.reference.node_labels[static_cast<std::size_t>(i)] << "-"
            << result.reference.node_labels[static_cast<std::size_t>(j)] << ","
            << format_double(edges(e)) << "\n";
      }
      auto write_vec = [&](const char* stat, const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i)
          out << id << "," << stat << ","
              << result.reference.node_labels[static_cast<std::size_t>(i)]
              << "," << format_double(v(i)) << "\n";
      };
      write_vec("strength", result.strengths[static_cast<std::size_t>(b)]);
      write_vec("closeness", result.closenesses[static_cast<std::size_t>(b)]);
      write_vec("betweenness",
                result.betweennesses[static_cast<std::size_t>(b)]);
    }
  }

  json extra;
  extra["bootstrap"] = {
      {"type", to_string(result.type)},
      {"n_boots", result.n_boots},
      {"estimator", to_string(result.estimator.method)},
      {"correlation_method",
       to_string(result.estimator.options.correlation_method)},
      {"gamma", result.estimator.options.gamma},
      {"n_lambda", result.estimator.options.n_lambda},
      {"lambda_min_ratio", result.estimator.options.lambda_min_ratio},
      {"shrinkage_warning", result.shrinkage_warning},
  };
  json failures = json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"replicate", f.replicate}, {"reason", f.reason}});
  extra["failures"] = failures;

  std::vector<std::string> outputs = {"reference_network.csv",
                                      "replicates.csv"};
  for (auto& o : extra_outputs) outputs.push_back(std::move(o));
  write_manifest(dir, "bootstrap", options, input_files, result.base_seed,
                 outputs, extra);
}

BootstrapResult read_bootstrap_dir(const std::string& dir) {
  json manifest = read_manifest(dir);
  if (!manifest.contains("bootstrap"))
    throw DataError(dir + " is not a bootstrap run directory");
  BootstrapResult result;
  const auto& meta = manifest["bootstrap"];
  result.type = meta["type"] == "parametric" ? BootstrapType::Parametric
                                             : BootstrapType::Nonparametric;
  result.n_boots = meta["n_boots"];
  result.base_seed = manifest["base_seed"];
  result.shrinkage_warning = meta.value("shrinkage_warning", false);
  result.estimator.method =
      estimator_method_from_string(meta.value("estimator", "ebicglasso"));
  result.estimator.options.correlation_method = correlation_method_from_string(
      meta.value("correlation_method", "auto"));
  result.estimator.options.gamma = meta.value("gamma", 0.5);

  result.reference =
      read_weight_matrix((fs::path(dir) / "reference_network.csv").string());
  result.reference_centrality = centrality_table(result.reference);
  const int p = result.reference.p();
  const int n_edges = result.reference.n_candidate_edges();

  std::map<std::string, int> node_index;
  for (int i = 0; i < p; ++i)
    node_index[result.reference.node_labels[static_cast<std::size_t>(i)]] = i;

  CsvTable table =
      read_csv((fs::path(dir) / "replicates.csv").string());
  std::map<int, int> id_to_slot;
  auto slot_of = [&](int id) {
    auto it = id_to_slot.find(id);
    if (it != id_to_slot.end()) return it->second;
    int slot = static_cast<int>(result.replicate_ids.size());
    result.replicate_ids.push_back(id);
    result.edge_weights.emplace_back(Eigen::VectorXd::Zero(n_edges));
    result.strengths.emplace_back(Eigen::VectorXd::Zero(p));
    result.closenesses.emplace_back(Eigen::VectorXd::Zero(p));
    result.betweennesses.emplace_back(Eigen::VectorXd::Zero(p));
    id_to_slot[id] = slot;
    return slot;
  };
  for (const auto& row : table.rows) {
    if (row.size() != 4) throw DataError("bad replicates.csv row");
    int slot = slot_of(std::stoi(row[0]));
    const std::string& stat = row[1];
    const std::string& element = row[2];
    double value = std::stod(row[3]);
    if (stat == "edge") {
      auto dash = element.find('-');
      int i = node_index.at(element.substr(0, dash));
      int j = node_index.at(element.substr(dash + 1));
      if (i > j) std::swap(i, j);
      result.edge_weights[static_cast<std::size_t>(slot)](
          edge_index(i, j, p)) = value;
    } else {
      int i = node_index.at(element);
      if (stat == "strength")
        result.strengths[static_cast<std::size_t>(slot)](i) = value;
      else if (stat == "closeness")
        result.closenesses[static_cast<std::size_t>(slot)](i) = value;
      else if (stat == "betweenness")
        result.betweennesses[static_cast<std::size_t>(slot)](i) = value;
      else
        throw DataError("unknown statistic in replicates.csv: " + stat);
    }
  }
  for (const auto& f : manifest["failures"])
    result.failures.push_back(
        {f["replicate"], -1, f["reason"].get<std::string>()});
  return result;
}

void write_edge_ci(const std::vector<EdgeCi>& cis, const Network& reference,
                   const std::string& path) {
  auto out = open_out(path);
  out << "node_i,node_j,reference,boot_mean,lower,upper\n";
  for (const auto& ci : cis) {
    out << reference.node_labels[static_cast<std::size_t>(ci.node_a)] << ","
        << reference.node_labels[static_cast<std::size_t>(ci.node_b)] << ","
        << format_double(ci.reference) << "," << format_double(ci.boot_mean)
        << "," << format_double(ci.lower) << "," << format_double(ci.upper)
        << "\n";
  }
}

void write_difference_matrix(const DifferenceMatrix& matrix,
                             const std::string& path) {
  auto out = open_out(path);
  out << "element_a,element_b,significant\n";
  const int k = static_cast<int>(matrix.elements.size());
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      out << matrix.labels[static_cast<std::size_t>(a)] << ","
          << matrix.labels[static_cast<std::size_t>(b)] << ","
          << matrix.significance(a, b) << "\n";
}

void write_subset_result(const SubsetBootstrapResult& result,
                         const std::string& path) {
  auto out = open_out(path);
  out << "level,replicate,retained,index,correlation\n";
  for (const auto& rep : result.replicates) {
    double level = result.drop_levels[static_cast<std::size_t>(rep.level_index)];
    for (Statistic s : {Statistic::Edge, Statistic::Strength,
                        Statistic::Closeness, Statistic::Betweenness}) {
      out << format_double(level) << "," << rep.replicate << "," << rep.retained
          << "," << to_string(s) << "," << format_double(rep.value(s)) << "\n";
    }
  }
}

void write_cs_report(const std::vector<CsCoefficient>& coefficients,
                     const std::string& path) {
  auto out = open_out(path);
  out << "index,cor_threshold,probability,cs\n";
  for (const auto& cs : coefficients)
    out << to_string(cs.index) << "," << format_double(cs.cor_threshold) << ","
        << format_double(cs.probability) << "," << format_double(cs.value)
        << "\n";
}

void write_simulation_records(const SimulationResult& result,
                              const std::string& path) {
  auto out = open_out(path);
  out << "study,rewiring,sample_size,alpha,replication,metric,value\n";
  for (const auto& rec : result.records)
    out << to_string(result.study) << "," << format_double(rec.rewiring) << ","
        << rec.sample_size << "," << format_double(rec.alpha) << ","
        << rec.replication << "," << rec.metric << ","
        << format_double(rec.value) << "\n";
}

void write_simulation_summary(const SimulationResult& result,
                              const std::string& path) {
  json j;
  j["study"] = to_string(result.study);
  j["total_replications"] = result.total_replications;
  j["failed_replications"] = result.failures.size();
  json aggs = json::array();
  for (const auto& agg : result.aggregates) {
    aggs.push_back({{"rewiring", agg.rewiring},
                    {"sample_size", agg.sample_size},
                    {"alpha", agg.alpha},
                    {"metric", agg.metric},
                    {"count", agg.count},
                    {"mean", agg.mean},
                    {"mc_se", agg.mc_se},
                    {"q025", agg.q025},
                    {"q25", agg.q25},
                    {"median", agg.median},
                    {"q75", agg.q75},
                    {"q975", agg.q975}});
  }
  j["aggregates"] = aggs;
  json failures = json::array();
  for (const auto& f : result.failures)
    failures.push_back({{"rewiring", f.rewiring},
                        {"sample_size", f.sample_size},
                        {"replication", f.replication},
                        {"reason", f.reason}});
  j["failures"] = failures;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_difference_test_json(const DifferenceTestResult& result,
                                const std::string& path) {
  json j;
  j["statistic"] = to_string(result.statistic);
  j["element_a"] = result.element_a;
  j["element_b"] = result.element_b;
  j["alpha"] = result.alpha;
  j["ci_lower"] = result.ci_lower;
  j["ci_upper"] = result.ci_upper;
  j["significant"] = result.significant;
  j["identical_elements"] = result.identical_elements;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace pcnet::io
