#include "pcnet/simgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include "pcnet/centrality.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/parallel.hpp"
#include "pcnet/rng.hpp"
#include "pcnet/stats.hpp"

namespace pcnet {

Network chain_network(int p, double weight_magnitude,
                      double negative_proportion, std::uint64_t seed) {
  if (p < 3) throw UsageError("chain_network: p must be >= 3");
  if (!(weight_magnitude > 0.0 && weight_magnitude < 1.0))
    throw UsageError("chain_network: weight magnitude must be in (0, 1)");
  if (negative_proportion < 0.0 || negative_proportion > 1.0)
    throw UsageError("chain_network: negative proportion must be in [0, 1]");

  Network net;
  net.weights = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    int j = (i + 1) % p;
    net.weights(i, j) = weight_magnitude;
    net.weights(j, i) = weight_magnitude;
  }
  int n_negative =
      static_cast<int>(std::lround(negative_proportion * static_cast<double>(p)));
  if (n_negative > 0) {
    auto rng = make_rng(seed, RngStream::ChainNetwork);
    std::vector<int> positions(static_cast<std::size_t>(p));
    std::iota(positions.begin(), positions.end(), 0);
    for (int i = 0; i < n_negative; ++i) {
      std::uniform_int_distribution<int> pick(i, p - 1);
      std::swap(positions[static_cast<std::size_t>(i)],
                positions[static_cast<std::size_t>(pick(rng))]);
    }
    for (int k = 0; k < n_negative; ++k) {
      int i = positions[static_cast<std::size_t>(k)];
      int j = (i + 1) % p;
      net.weights(i, j) = -weight_magnitude;
      net.weights(j, i) = -weight_magnitude;
    }
  }
  for (int i = 0; i < p; ++i)
    net.node_labels.push_back("V" + std::to_string(i + 1));
  net.provenance.estimator = "simulated";
  return net;
}

Network rewire(const Network& network, double probability,
               std::uint64_t seed) {
  if (probability < 0.0 || probability > 1.0)
    throw UsageError("rewire: probability must be in [0, 1]");
  validate_network(network);
  Network out = network;
  const int p = out.p();
  auto rng = make_rng(seed, RngStream::Rewire);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Deterministic edge visiting order: the original (i < j) edge list.
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (network.weights(i, j) != 0.0) edges.emplace_back(i, j);

  for (auto [a, b] : edges) {
    if (out.weights(a, b) == 0.0) continue;  // already moved by an earlier step
    if (unit(rng) >= probability) continue;
    double w = out.weights(a, b);
    int keep = std::uniform_int_distribution<int>(0, 1)(rng) == 0 ? a : b;
    // Candidates: not the kept node and not currently adjacent to it (the
    // edge being moved still counts as adjacency, so the old partner is
    // excluded too).
    std::vector<int> candidates;
    for (int c = 0; c < p; ++c) {
      if (c == keep || out.weights(keep, c) != 0.0) continue;
      candidates.push_back(c);
    }
    if (candidates.empty()) continue;  // p < 5 corner; leave the edge
    int target = candidates[static_cast<std::size_t>(
        std::uniform_int_distribution<int>(
            0, static_cast<int>(candidates.size()) - 1)(rng))];
    out.weights(a, b) = 0.0;
    out.weights(b, a) = 0.0;
    out.weights(keep, target) = w;
    out.weights(target, keep) = w;
  }
  return out;
}

Eigen::MatrixXd pcor_to_covariance(const Network& network) {
  validate_network(network);
  const int p = network.p();
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(p, p) - network.weights;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    throw EstimationError(
        "pcor_to_covariance: implied precision is not positive definite "
        "(smallest eigenvalue " +
        std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
  Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::VectorXd scale = sigma.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = scale.asDiagonal() * sigma * scale.asDiagonal();
  out = ((out + out.transpose()) / 2.0).eval();
  out.diagonal().setOnes();
  return out;
}

Eigen::MatrixXd sample_mvn_with(const Eigen::MatrixXd& covariance, int n,
                                std::mt19937_64 rng) {
  const int p = static_cast<int>(covariance.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw EstimationError("sample_mvn: covariance factorization failed");
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd out(n, p);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(p);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) z(c) = gauss(rng);
    out.row(r) = (L * z).transpose();
  }
  return out;
}

Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& covariance, int n,
                           std::uint64_t seed) {
  return sample_mvn_with(covariance, n, make_rng(seed, RngStream::SampleMvn));
}

Dataset ordinalize(const Eigen::MatrixXd& data, int n_levels,
                   std::uint64_t seed) {
  if (n_levels < 2) throw UsageError("ordinalize: need at least 2 levels");
  const int n = static_cast<int>(data.rows());
  const int p = static_cast<int>(data.cols());
  Eigen::MatrixXd coded(n, p);
  for (int c = 0; c < p; ++c) {
    auto rng = make_rng(seed, RngStream::Ordinalize,
                        static_cast<std::uint64_t>(c));
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
      std::vector<double> thresholds(static_cast<std::size_t>(n_levels - 1));
      for (auto& t : thresholds) t = gauss(rng);
      std::sort(thresholds.begin(), thresholds.end());
      std::vector<int> counts(static_cast<std::size_t>(n_levels), 0);
      for (int r = 0; r < n; ++r) {
        int bin = static_cast<int>(
            std::upper_bound(thresholds.begin(), thresholds.end(), data(r, c)) -
            thresholds.begin());
        coded(r, c) = bin;
        ++counts[static_cast<std::size_t>(bin)];
      }
      ok = std::all_of(counts.begin(), counts.end(),
                       [](int k) { return k > 0; });
    }
    if (!ok)
      throw DataError("ordinalize: variable " + std::to_string(c + 1) +
                      " kept an empty level after 10 threshold redraws");
  }
  return make_dataset(coded);
}

std::string to_string(StudyKind study) {
  switch (study) {
    case StudyKind::Cs: return "cs";
    case StudyKind::EdgeDiff: return "edge-diff";
    case StudyKind::CentralityDiff: return "centrality-diff";
  }
  return "cs";
}

StudyKind study_from_string(const std::string& name) {
  if (name == "cs") return StudyKind::Cs;
  if (name == "edge-diff") return StudyKind::EdgeDiff;
  if (name == "centrality-diff") return StudyKind::CentralityDiff;
  throw UsageError("unknown study: " + name +
                   " (expected cs, edge-diff or centrality-diff)");
}

SimulationConfig default_config(StudyKind study) {
  SimulationConfig config;
  if (study == StudyKind::EdgeDiff) {
    config.edge_weight = 0.3;
    config.negative_proportion = 0.0;
    config.rewiring = {0.0};
  }
  return config;
}

namespace {

struct Condition {
  double rewiring;
  int sample_size;
};

// One replication of the full pipeline; returns the study metrics.
std::vector<SimulationRecord> run_replication(const SimulationConfig& config,
                                              StudyKind study,
                                              const Condition& cond,
                                              int condition_index,
                                              int replication,
                                              const std::vector<double>& levels) {
  auto stage_seed = [&](std::uint64_t stage) {
    return make_rng({config.base_seed,
                     static_cast<std::uint64_t>(RngStream::Simulation),
                     static_cast<std::uint64_t>(condition_index),
                     static_cast<std::uint64_t>(replication), stage})();
  };

  Network truth = chain_network(config.p, config.edge_weight,
                                config.negative_proportion, stage_seed(1));
  if (cond.rewiring > 0.0) truth = rewire(truth, cond.rewiring, stage_seed(2));
  Eigen::MatrixXd covariance = pcor_to_covariance(truth);
  Eigen::MatrixXd continuous =
      sample_mvn(covariance, cond.sample_size, stage_seed(3));
  Dataset data = ordinalize(continuous, config.ordinal_levels, stage_seed(4));

  std::vector<SimulationRecord> records;
  auto add = [&](double alpha, const std::string& metric, double value) {
    SimulationRecord rec;
    rec.rewiring = cond.rewiring;
    rec.sample_size = cond.sample_size;
    rec.alpha = alpha;
    rec.replication = replication;
    rec.metric = metric;
    rec.value = value;
    records.push_back(std::move(rec));
  };

  switch (study) {
    case StudyKind::Cs: {
      auto subset = case_dropping_boot(data, config.estimator, levels,
                                       config.n_boots, stage_seed(5), 1);
      for (const auto& cs : cs_coefficient(subset)) {
        if (cs.index == Statistic::Edge) continue;
        add(0.0, "cs_" + to_string(cs.index), cs.value);
      }
      break;
    }
    case StudyKind::EdgeDiff: {
      auto boot = nonparametric_boot(data, config.estimator, config.n_boots,
                                     stage_seed(5), 1);
      // Compare every pair of edges that are nonzero in the true network.
      std::vector<Element> true_edges;
      for (int i = 0; i < config.p; ++i)
        for (int j = i + 1; j < config.p; ++j)
          if (truth.weights(i, j) != 0.0) true_edges.push_back({i, j});
      for (double alpha : config.alphas) {
        int tests = 0, rejections = 0;
        for (std::size_t a = 0; a < true_edges.size(); ++a) {
          for (std::size_t b = a + 1; b < true_edges.size(); ++b) {
            auto test = difference_test(boot, true_edges[a], true_edges[b],
                                        Statistic::Edge, alpha);
            ++tests;
            if (test.significant) ++rejections;
          }
        }
        add(alpha, "edge_rejection_rate",
            tests == 0 ? 0.0
                       : static_cast<double>(rejections) /
                             static_cast<double>(tests));
      }
      break;
    }
    case StudyKind::CentralityDiff: {
      auto boot = nonparametric_boot(data, config.estimator, config.n_boots,
                                     stage_seed(5), 1);
      for (Statistic s : {Statistic::Strength, Statistic::Closeness,
                          Statistic::Betweenness}) {
        int tests = 0, rejections = 0;
        for (int i = 0; i < config.p; ++i) {
          for (int j = i + 1; j < config.p; ++j) {
            Element a{i, -1}, b{j, -1};
            auto test = difference_test(boot, a, b, s, config.centrality_alpha);
            ++tests;
            if (test.significant) ++rejections;
          }
        }
        add(config.centrality_alpha, to_string(s) + "_rejection_rate",
            static_cast<double>(rejections) / static_cast<double>(tests));
      }
      break;
    }
  }
  return records;
}

}  // namespace

SimulationResult run_study(const SimulationConfig& config, StudyKind study) {
  if (config.replications < 1)
    throw UsageError("run_study: replications must be >= 1");
  SimulationConfig cfg = config;
  if (study == StudyKind::EdgeDiff) {
    // The edge-difference design has no rewiring and no negative edges.
    cfg.rewiring = {0.0};
    cfg.negative_proportion = 0.0;
  }
  std::vector<double> levels =
      cfg.drop_levels.empty() ? default_drop_levels() : cfg.drop_levels;

  std::vector<Condition> conditions;
  for (double rw : cfg.rewiring)
    for (int n : cfg.sample_sizes) conditions.push_back({rw, n});

  SimulationResult result;
  result.study = study;
  result.config = cfg;
  result.total_replications =
      static_cast<int>(conditions.size()) * cfg.replications;

  const int n_jobs = result.total_replications;
  std::vector<std::optional<std::vector<SimulationRecord>>> slots(
      static_cast<std::size_t>(n_jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(n_jobs));

  parallel_for(n_jobs, cfg.workers, [&](int job) {
    int ci = job / cfg.replications;
    int rep = job % cfg.replications;
    try {
      slots[static_cast<std::size_t>(job)] = run_replication(
          cfg, study, conditions[static_cast<std::size_t>(ci)], ci, rep, levels);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = e.what();
    }
  });

  for (int job = 0; job < n_jobs; ++job) {
    int ci = job / cfg.replications;
    int rep = job % cfg.replications;
    if (slots[static_cast<std::size_t>(job)]) {
      for (auto& rec : *slots[static_cast<std::size_t>(job)])
        result.records.push_back(std::move(rec));
    } else {
      result.failures.push_back(
          {conditions[static_cast<std::size_t>(ci)].rewiring,
           conditions[static_cast<std::size_t>(ci)].sample_size, rep,
           errors[static_cast<std::size_t>(job)]});
    }
  }

  // Aggregate per (condition, alpha, metric) in deterministic order.
  struct Key {
    double rewiring;
    int sample_size;
    double alpha;
    std::string metric;
    bool operator<(const Key& o) const {
      return std::tie(rewiring, sample_size, alpha, metric) <
             std::tie(o.rewiring, o.sample_size, o.alpha, o.metric);
    }
  };
  std::map<Key, std::vector<double>> groups;
  for (const auto& rec : result.records)
    groups[{rec.rewiring, rec.sample_size, rec.alpha, rec.metric}].push_back(
        rec.value);
  for (auto& [key, values] : groups) {
    SimulationAggregate agg;
    agg.rewiring = key.rewiring;
    agg.sample_size = key.sample_size;
    agg.alpha = key.alpha;
    agg.metric = key.metric;
    agg.count = static_cast<int>(values.size());
    double mean =
        std::accumulate(values.begin(), values.end(), 0.0) /
        static_cast<double>(values.size());
    agg.mean = mean;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
    agg.mc_se = std::sqrt(var / static_cast<double>(values.size()));
    std::sort(values.begin(), values.end());
    agg.q025 = quantile_type6_sorted(values, 0.025);
    agg.q25 = quantile_type6_sorted(values, 0.25);
    agg.median = quantile_type6_sorted(values, 0.5);
    agg.q75 = quantile_type6_sorted(values, 0.75);
    agg.q975 = quantile_type6_sorted(values, 0.975);
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

}  // namespace pcnet
