#include "pcnet/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <span>

#include "pcnet/errors.hpp"
#include "pcnet/parallel.hpp"
#include "pcnet/rng.hpp"
#include "pcnet/simgen.hpp"
#include "pcnet/stats.hpp"

namespace pcnet {

std::string to_string(BootstrapType type) {
  return type == BootstrapType::Nonparametric ? "nonparametric" : "parametric";
}

std::string to_string(Statistic statistic) {
  switch (statistic) {
    case Statistic::Edge: return "edge";
    case Statistic::Strength: return "strength";
    case Statistic::Closeness: return "closeness";
    case Statistic::Betweenness: return "betweenness";
  }
  return "edge";
}

Statistic statistic_from_string(const std::string& name) {
  if (name == "edge") return Statistic::Edge;
  if (name == "strength") return Statistic::Strength;
  if (name == "closeness") return Statistic::Closeness;
  if (name == "betweenness") return Statistic::Betweenness;
  throw UsageError("unknown statistic: " + name);
}

double SubsetReplicate::value(Statistic s) const {
  switch (s) {
    case Statistic::Edge: return edge;
    case Statistic::Strength: return strength;
    case Statistic::Closeness: return closeness;
    case Statistic::Betweenness: return betweenness;
  }
  return edge;
}

namespace {

constexpr double kMaxFailureFraction = 0.25;

// Pearson correlation with the degenerate (constant-vector) case mapped to
// 0: a replicate whose centralities are all equal carries no order
// information and should count against stability, not crash it.
double stability_correlation(const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b) {
  try {
    return pearson(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                   std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
  } catch (const DataError&) {
    return 0.0;
  }
}

struct ReplicateOutcome {
  bool ok = false;
  std::string reason;
  Eigen::VectorXd edges;
  Eigen::VectorXd strength;
  Eigen::VectorXd closeness;
  Eigen::VectorXd betweenness;
};

ReplicateOutcome run_replicate(const Dataset& data,
                               const EstimatorConfig& estimator) {
  ReplicateOutcome out;
  try {
    Network net = estimator.estimate(data);
    CentralityTable cent = centrality_table(net);
    out.edges = edge_vector(net);
    out.strength = cent.strength;
    out.closeness = cent.closeness;
    out.betweenness = cent.betweenness;
    out.ok = true;
  } catch (const std::exception& e) {
    out.reason = e.what();
  }
  return out;
}

BootstrapResult assemble(BootstrapType type, int n_boots,
                         std::uint64_t base_seed,
                         const EstimatorConfig& estimator,
                         Network reference,
                         std::vector<ReplicateOutcome> outcomes) {
  BootstrapResult result;
  result.type = type;
  result.n_boots = n_boots;
  result.base_seed = base_seed;
  result.estimator = estimator;
  result.reference = std::move(reference);
  result.reference_centrality = centrality_table(result.reference);
  for (int b = 0; b < n_boots; ++b) {
    auto& o = outcomes[static_cast<std::size_t>(b)];
    if (o.ok) {
      result.replicate_ids.push_back(b);
      result.edge_weights.push_back(std::move(o.edges));
      result.strengths.push_back(std::move(o.strength));
      result.closenesses.push_back(std::move(o.closeness));
      result.betweennesses.push_back(std::move(o.betweenness));
    } else {
      result.failures.push_back({b, -1, o.reason});
    }
  }
  if (static_cast<double>(result.failures.size()) >
      kMaxFailureFraction * n_boots)
    throw EstimationError(
        "bootstrap aborted: " + std::to_string(result.failures.size()) +
        " of " + std::to_string(n_boots) + " replicates failed (> 25%)");
  return result;
}

}  // namespace

BootstrapResult nonparametric_boot(const Dataset& dataset,
                                   const EstimatorConfig& estimator,
                                   int n_boots, std::uint64_t base_seed,
                                   int workers) {
  if (n_boots < 2) throw UsageError("n_boots must be >= 2");
  Network reference = estimator.estimate(dataset);
  const int n = dataset.n();

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n_boots));
  parallel_for(n_boots, workers, [&](int b) {
    auto rng = make_rng(base_seed, RngStream::NonparametricBoot,
                        static_cast<std::uint64_t>(b));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = pick(rng);
    try {
      Dataset resampled = subset_rows(dataset, rows);
      outcomes[static_cast<std::size_t>(b)] = run_replicate(resampled, estimator);
    } catch (const std::exception& e) {
      outcomes[static_cast<std::size_t>(b)].reason = e.what();
    }
  });
  return assemble(BootstrapType::Nonparametric, n_boots, base_seed, estimator,
                  std::move(reference), std::move(outcomes));
}

BootstrapResult parametric_boot(const Network& network, int n,
                                const EstimatorConfig& estimator, int n_boots,
                                std::uint64_t base_seed, int workers) {
  if (n_boots < 2) throw UsageError("n_boots must be >= 2");
  if (n < 2) throw UsageError("parametric_boot: n must be >= 2");
  validate_network(network);
  Eigen::MatrixXd covariance = pcor_to_covariance(network);

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(n_boots));
  parallel_for(n_boots, workers, [&](int b) {
    try {
      Eigen::MatrixXd values = sample_mvn_with(
          covariance, n,
          make_rng(base_seed, RngStream::ParametricBoot,
                   static_cast<std::uint64_t>(b)));
      Dataset sample = make_dataset(values);
      sample.variable_names = network.node_labels.empty()
                                  ? sample.variable_names
                                  : network.node_labels;
      outcomes[static_cast<std::size_t>(b)] = run_replicate(sample, estimator);
    } catch (const std::exception& e) {
      outcomes[static_cast<std::size_t>(b)].reason = e.what();
    }
  });
  BootstrapResult result =
      assemble(BootstrapType::Parametric, n_boots, base_seed, estimator,
               network, std::move(outcomes));
  result.shrinkage_warning = network.provenance.regularized ||
                             estimator.method == EstimatorMethod::EbicGlasso;
  return result;
}

std::vector<double> default_drop_levels(int count, double lo, double hi) {
  std::vector<double> levels(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    levels[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return levels;
}

namespace {

SubsetBootstrapResult subset_boot(const Dataset& dataset,
                                  const EstimatorConfig& estimator,
                                  std::vector<double> drop_levels, int n_boots,
                                  std::uint64_t base_seed, int workers,
                                  bool node_dropping) {
  if (drop_levels.size() < 2)
    throw UsageError("subset bootstrap needs at least 2 drop levels");
  std::sort(drop_levels.begin(), drop_levels.end());
  for (double q : drop_levels)
    if (!(q > 0.0 && q < 1.0))
      throw UsageError("drop levels must lie in (0, 1)");

  const int n = dataset.n();
  const int p = dataset.p();
  const int n_levels = static_cast<int>(drop_levels.size());
  int reps_per_level = n_boots / n_levels;
  if (reps_per_level < 1)
    throw UsageError("n_boots must be at least the number of drop levels");

  // Retained counts per level, validated up front.
  std::vector<int> retained(static_cast<std::size_t>(n_levels));
  for (int li = 0; li < n_levels; ++li) {
    double q = drop_levels[static_cast<std::size_t>(li)];
    if (node_dropping) {
      int keep = static_cast<int>(std::ceil((1.0 - q) * p));
      if (keep < 3)
        throw DataError("node-dropping level " + std::to_string(q) +
                        " leaves fewer than 3 nodes");
      retained[static_cast<std::size_t>(li)] = keep;
    } else {
      int keep = static_cast<int>(std::ceil((1.0 - q) * n));
      if (keep < std::max(p + 1, 20))
        throw DataError("case-dropping level " + std::to_string(q) +
                        " leaves fewer than max(p+1, 20) cases");
      retained[static_cast<std::size_t>(li)] = keep;
    }
  }

  SubsetBootstrapResult result;
  result.node_dropping = node_dropping;
  result.drop_levels = drop_levels;
  result.reps_per_level = reps_per_level;
  result.base_seed = base_seed;
  result.estimator = estimator;
  result.reference = estimator.estimate(dataset);
  result.reference_centrality = centrality_table(result.reference);

  const Eigen::VectorXd ref_edges = edge_vector(result.reference);
  const int n_jobs = n_levels * reps_per_level;
  std::vector<std::optional<SubsetReplicate>> slots(
      static_cast<std::size_t>(n_jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(n_jobs));

  parallel_for(n_jobs, workers, [&](int job) {
    int li = job / reps_per_level;
    int rep = job % reps_per_level;
    int keep = retained[static_cast<std::size_t>(li)];
    auto rng = make_rng(base_seed,
                        node_dropping ? RngStream::NodeDropBoot
                                      : RngStream::CaseDropBoot,
                        static_cast<std::uint64_t>(li),
                        static_cast<std::uint64_t>(rep));
    try {
      SubsetReplicate out;
      out.level_index = li;
      out.replicate = rep;
      out.retained = keep;
      if (node_dropping) {
        std::vector<int> pool(static_cast<std::size_t>(p));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < keep; ++i) {
          std::uniform_int_distribution<int> pick(i, p - 1);
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<int> cols(pool.begin(), pool.begin() + keep);
        std::sort(cols.begin(), cols.end());
        Dataset sub = subset_columns(dataset, cols);
        Network net = estimator.estimate(sub);
        CentralityTable cent = centrality_table(net);

        Eigen::VectorXd ref_str(keep), ref_clo(keep), ref_bet(keep);
        for (int i = 0; i < keep; ++i) {
          int c = cols[static_cast<std::size_t>(i)];
          ref_str(i) = result.reference_centrality.strength(c);
          ref_clo(i) = result.reference_centrality.closeness(c);
          ref_bet(i) = result.reference_centrality.betweenness(c);
        }
        int ne = keep * (keep - 1) / 2;
        Eigen::VectorXd ref_sub_edges(ne), rep_edges(ne);
        int k = 0;
        for (int i = 0; i < keep; ++i) {
          for (int j = i + 1; j < keep; ++j) {
            ref_sub_edges(k) = result.reference.weights(
                cols[static_cast<std::size_t>(i)],
                cols[static_cast<std::size_t>(j)]);
            rep_edges(k) = net.weights(i, j);
            ++k;
          }
        }
        out.edge = stability_correlation(rep_edges, ref_sub_edges);
        out.strength = stability_correlation(cent.strength, ref_str);
        out.closeness = stability_correlation(cent.closeness, ref_clo);
        out.betweenness = stability_correlation(cent.betweenness, ref_bet);
      } else {
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < keep; ++i) {
          std::uniform_int_distribution<int> pick(i, n - 1);
          std::swap(pool[static_cast<std::size_t>(i)],
                    pool[static_cast<std::size_t>(pick(rng))]);
        }
        std::vector<int> rows(pool.begin(), pool.begin() + keep);
        Dataset sub = subset_rows(dataset, rows);
        Network net = estimator.estimate(sub);
        CentralityTable cent = centrality_table(net);
        out.edge = stability_correlation(edge_vector(net), ref_edges);
        out.strength = stability_correlation(
            cent.strength, result.reference_centrality.strength);
        out.closeness = stability_correlation(
            cent.closeness, result.reference_centrality.closeness);
        out.betweenness = stability_correlation(
            cent.betweenness, result.reference_centrality.betweenness);
      }
      slots[static_cast<std::size_t>(job)] = out;
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(job)] = e.what();
    }
  });

  for (int job = 0; job < n_jobs; ++job) {
    if (slots[static_cast<std::size_t>(job)]) {
      result.replicates.push_back(*slots[static_cast<std::size_t>(job)]);
    } else {
      result.failures.push_back({job % reps_per_level, job / reps_per_level,
                                 errors[static_cast<std::size_t>(job)]});
    }
  }
  if (static_cast<double>(result.failures.size()) >
      kMaxFailureFraction * n_jobs)
    throw EstimationError(
        "subset bootstrap aborted: " + std::to_string(result.failures.size()) +
        " of " + std::to_string(n_jobs) + " replicates failed (> 25%)");
  return result;
}

}  // namespace

SubsetBootstrapResult case_dropping_boot(const Dataset& dataset,
                                         const EstimatorConfig& estimator,
                                         std::vector<double> drop_levels,
                                         int n_boots, std::uint64_t base_seed,
                                         int workers) {
  return subset_boot(dataset, estimator, std::move(drop_levels), n_boots,
                     base_seed, workers, false);
}

SubsetBootstrapResult node_dropping_boot(const Dataset& dataset,
                                         const EstimatorConfig& estimator,
                                         std::vector<double> drop_levels,
                                         int n_boots, std::uint64_t base_seed,
                                         int workers) {
  return subset_boot(dataset, estimator, std::move(drop_levels), n_boots,
                     base_seed, workers, true);
}

namespace {

void check_alpha(double alpha, int n_boots) {
  if (alpha < 2.0 / n_boots - 1e-12)
    throw UsageError("alpha below the achievable floor 2/n_boots = " +
                     std::to_string(2.0 / n_boots));
  if (alpha >= 1.0) throw UsageError("alpha must be < 1");
}

}  // namespace

std::vector<EdgeCi> edge_ci(const BootstrapResult& result, double alpha) {
  check_alpha(alpha, result.n_boots);
  if (result.n_successful() == 0)
    throw EstimationError("edge_ci: no successful replicates");
  const int p = result.reference.p();
  const int n_edges = result.reference.n_candidate_edges();
  std::vector<EdgeCi> out(static_cast<std::size_t>(n_edges));
  std::vector<double> values(static_cast<std::size_t>(result.n_successful()));
  for (int e = 0; e < n_edges; ++e) {
    for (int b = 0; b < result.n_successful(); ++b)
      values[static_cast<std::size_t>(b)] =
          result.edge_weights[static_cast<std::size_t>(b)](e);
    std::sort(values.begin(), values.end());
    auto [i, j] = edge_nodes(e, p);
    EdgeCi& ci = out[static_cast<std::size_t>(e)];
    ci.node_a = i;
    ci.node_b = j;
    ci.reference = result.reference.weights(i, j);
    ci.boot_mean =
        std::accumulate(values.begin(), values.end(), 0.0) /
        static_cast<double>(values.size());
    ci.lower = quantile_type6_sorted(values, alpha / 2.0);
    ci.upper = quantile_type6_sorted(values, 1.0 - alpha / 2.0);
  }
  return out;
}

std::vector<CsCoefficient> cs_coefficient(const SubsetBootstrapResult& subset,
                                          double cor_threshold,
                                          double probability) {
  if (subset.drop_levels.size() < 2)
    throw UsageError("cs_coefficient requires at least 2 tested levels");
  const int n_levels = static_cast<int>(subset.drop_levels.size());
  std::vector<CsCoefficient> out;
  for (Statistic s : {Statistic::Strength, Statistic::Closeness,
                      Statistic::Betweenness, Statistic::Edge}) {
    CsCoefficient cs;
    cs.index = s;
    cs.cor_threshold = cor_threshold;
    cs.probability = probability;
    cs.value = 0.0;
    double best = 0.0;
    for (int li = 0; li < n_levels; ++li) {
      int total = 0, good = 0;
      for (const auto& rep : subset.replicates) {
        if (rep.level_index != li) continue;
        ++total;
        if (rep.value(s) >= cor_threshold) ++good;
      }
      bool qualifies = total > 0 && static_cast<double>(good) /
                                            static_cast<double>(total) >=
                                        probability;
      if (!qualifies) break;  // all levels below the CS value must qualify
      best = subset.drop_levels[static_cast<std::size_t>(li)];
    }
    cs.value = best;
    out.push_back(cs);
  }
  return out;
}

Element parse_element(const std::string& text, const Network& reference,
                      Statistic statistic) {
  auto find_node = [&](const std::string& token) -> int {
    for (std::size_t i = 0; i < reference.node_labels.size(); ++i)
      if (reference.node_labels[i] == token) return static_cast<int>(i);
    try {
      std::size_t pos = 0;
      int idx = std::stoi(token, &pos);
      if (pos == token.size() && idx >= 1 && idx <= reference.p())
        return idx - 1;  // 1-based on the command line
    } catch (...) {
    }
    throw UsageError("unknown node identifier: " + token);
  };
  if (statistic == Statistic::Edge) {
    auto dash = text.find('-');
    if (dash == std::string::npos)
      throw UsageError("edge identifier must look like \"3-17\": " + text);
    Element e;
    e.node_a = find_node(text.substr(0, dash));
    e.node_b = find_node(text.substr(dash + 1));
    if (e.node_a == e.node_b)
      throw UsageError("edge endpoints must differ: " + text);
    if (e.node_a > e.node_b) std::swap(e.node_a, e.node_b);
    return e;
  }
  Element e;
  e.node_a = find_node(text);
  return e;
}

std::string element_label(const Element& element, const Network& reference) {
  auto name = [&](int node) {
    if (node >= 0 && node < static_cast<int>(reference.node_labels.size()))
      return reference.node_labels[static_cast<std::size_t>(node)];
    return std::to_string(node + 1);
  };
  if (element.is_edge()) return name(element.node_a) + "-" + name(element.node_b);
  return name(element.node_a);
}

namespace {

double replicate_statistic(const BootstrapResult& result, int b,
                           const Element& element, Statistic statistic) {
  const int p = result.reference.p();
  switch (statistic) {
    case Statistic::Edge:
      return result.edge_weights[static_cast<std::size_t>(b)](
          edge_index(element.node_a, element.node_b, p));
    case Statistic::Strength:
      return result.strengths[static_cast<std::size_t>(b)](element.node_a);
    case Statistic::Closeness:
      return result.closenesses[static_cast<std::size_t>(b)](element.node_a);
    case Statistic::Betweenness:
      return result.betweennesses[static_cast<std::size_t>(b)](element.node_a);
  }
  return 0.0;
}

void check_element(const Element& element, Statistic statistic, int p) {
  if (statistic == Statistic::Edge) {
    if (!element.is_edge() || element.node_a < 0 || element.node_b >= p ||
        element.node_a >= element.node_b)
      throw UsageError("invalid edge element for difference test");
  } else {
    if (element.is_edge() || element.node_a < 0 || element.node_a >= p)
      throw UsageError("invalid node element for difference test");
  }
}

}  // namespace

DifferenceTestResult difference_test(const BootstrapResult& result,
                                     const Element& element_a,
                                     const Element& element_b,
                                     Statistic statistic, double alpha) {
  check_alpha(alpha, result.n_boots);
  const int p = result.reference.p();
  check_element(element_a, statistic, p);
  check_element(element_b, statistic, p);
  if (result.n_successful() == 0)
    throw EstimationError("difference_test: no successful replicates");

  DifferenceTestResult out;
  out.statistic = statistic;
  out.element_a = element_label(element_a, result.reference);
  out.element_b = element_label(element_b, result.reference);
  out.alpha = alpha;
  out.identical_elements = element_a == element_b;
  if (out.identical_elements) {
    out.ci_lower = 0.0;
    out.ci_upper = 0.0;
    out.significant = false;
    return out;
  }
  std::vector<double> diffs(static_cast<std::size_t>(result.n_successful()));
  for (int b = 0; b < result.n_successful(); ++b)
    diffs[static_cast<std::size_t>(b)] =
        replicate_statistic(result, b, element_a, statistic) -
        replicate_statistic(result, b, element_b, statistic);
  std::sort(diffs.begin(), diffs.end());
  out.ci_lower = quantile_type6_sorted(diffs, alpha / 2.0);
  out.ci_upper = quantile_type6_sorted(diffs, 1.0 - alpha / 2.0);
  out.significant = out.ci_lower > 0.0 || out.ci_upper < 0.0;
  return out;
}

DifferenceMatrix difference_matrix(const BootstrapResult& result,
                                   Statistic statistic, double alpha,
                                   bool only_nonzero) {
  check_alpha(alpha, result.n_boots);
  const int p = result.reference.p();
  DifferenceMatrix out;
  out.statistic = statistic;
  out.alpha = alpha;
  out.only_nonzero = only_nonzero;

  if (statistic == Statistic::Edge) {
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (only_nonzero && result.reference.weights(i, j) == 0.0) continue;
        Element e;
        e.node_a = i;
        e.node_b = j;
        out.elements.push_back(e);
        out.reference_values.push_back(result.reference.weights(i, j));
      }
    }
  } else {
    const Eigen::VectorXd* ref = nullptr;
    switch (statistic) {
      case Statistic::Strength: ref = &result.reference_centrality.strength; break;
      case Statistic::Closeness: ref = &result.reference_centrality.closeness; break;
      case Statistic::Betweenness:
        ref = &result.reference_centrality.betweenness;
        break;
      default: break;
    }
    for (int i = 0; i < p; ++i) {
      Element e;
      e.node_a = i;
      out.elements.push_back(e);
      out.reference_values.push_back((*ref)(i));
    }
  }
  for (const auto& e : out.elements)
    out.labels.push_back(element_label(e, result.reference));

  const int k = static_cast<int>(out.elements.size());
  out.significance = Eigen::MatrixXi::Constant(k, k, -1);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      auto test = difference_test(result, out.elements[static_cast<std::size_t>(a)],
                                  out.elements[static_cast<std::size_t>(b)],
                                  statistic, alpha);
      out.significance(a, b) = test.significant ? 1 : 0;
      out.significance(b, a) = out.significance(a, b);
    }
  }
  return out;
}

}  // namespace pcnet
