#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pcnet/centrality.hpp"
#include "pcnet/dataset.hpp"
#include "pcnet/estimator.hpp"
#include "pcnet/network.hpp"

namespace pcnet {

enum class BootstrapType { Nonparametric, Parametric };

enum class Statistic { Edge, Strength, Closeness, Betweenness };

std::string to_string(BootstrapType type);
std::string to_string(Statistic statistic);
Statistic statistic_from_string(const std::string& name);

struct ReplicateFailure {
  int replicate = -1;
  int level_index = -1;  // subset bootstraps only
  std::string reason;
};

// Replicate b is a pure function of (base_seed, b, input); failed replicates
// are recorded and excluded from quantiles.
struct BootstrapResult {
  BootstrapType type = BootstrapType::Nonparametric;
  int n_boots = 0;
  std::uint64_t base_seed = 0;
  EstimatorConfig estimator;
  bool shrinkage_warning = false;  // parametric bootstrap of a LASSO network

  Network reference;
  CentralityTable reference_centrality;

  std::vector<int> replicate_ids;  // successful replicates, ascending
  std::vector<Eigen::VectorXd> edge_weights;  // flattened upper triangle
  std::vector<Eigen::VectorXd> strengths;
  std::vector<Eigen::VectorXd> closenesses;
  std::vector<Eigen::VectorXd> betweennesses;
  std::vector<ReplicateFailure> failures;

  int n_successful() const { return static_cast<int>(replicate_ids.size()); }
};

BootstrapResult nonparametric_boot(const Dataset& dataset,
                                   const EstimatorConfig& estimator,
                                   int n_boots, std::uint64_t base_seed,
                                   int workers = 1);

// Samples continuous multivariate-normal cases from the network-implied
// covariance. Carries a shrinkage warning when the estimator regularizes.
BootstrapResult parametric_boot(const Network& network, int n,
                                const EstimatorConfig& estimator, int n_boots,
                                std::uint64_t base_seed, int workers = 1);

// One row per successful subset replicate: correlations between replicate
// statistics and the full-sample reference, per index.
struct SubsetReplicate {
  int level_index = 0;
  int replicate = 0;
  int retained = 0;  // cases kept (node-dropping: nodes kept)
  double edge = 0.0;
  double strength = 0.0;
  double closeness = 0.0;
  double betweenness = 0.0;

  double value(Statistic s) const;
};

struct SubsetBootstrapResult {
  bool node_dropping = false;
  std::vector<double> drop_levels;  // ascending, in (0, 1)
  int reps_per_level = 0;
  std::uint64_t base_seed = 0;
  EstimatorConfig estimator;

  Network reference;
  CentralityTable reference_centrality;

  std::vector<SubsetReplicate> replicates;
  std::vector<ReplicateFailure> failures;
};

// n_boots is the total replicate budget, split equally over the drop levels
// (a 5000-sample budget over 25 levels runs 200 per level). Each level must
// leave at least max(p+1, 20) cases.
SubsetBootstrapResult case_dropping_boot(const Dataset& dataset,
                                         const EstimatorConfig& estimator,
                                         std::vector<double> drop_levels,
                                         int n_boots, std::uint64_t base_seed,
                                         int workers = 1);

// Drops columns instead of rows; correlations use the retained nodes only.
// Each level must leave at least 3 nodes.
SubsetBootstrapResult node_dropping_boot(const Dataset& dataset,
                                         const EstimatorConfig& estimator,
                                         std::vector<double> drop_levels,
                                         int n_boots, std::uint64_t base_seed,
                                         int workers = 1);

// 10 levels equally spaced on [0.1, 0.75].
std::vector<double> default_drop_levels(int count = 10, double lo = 0.1,
                                        double hi = 0.75);

struct EdgeCi {
  int node_a = 0;
  int node_b = 0;
  double reference = 0.0;
  double boot_mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Type-6 CI per candidate edge at alpha/2 and 1 - alpha/2; alpha must be at
// least 2/n_boots.
std::vector<EdgeCi> edge_ci(const BootstrapResult& result, double alpha);

struct CsCoefficient {
  Statistic index = Statistic::Strength;
  double cor_threshold = 0.7;
  double probability = 0.95;
  double value = 0.0;
};

// Largest tested drop level such that all levels up to it keep the
// correlation >= cor_threshold with the stated probability; 0 if none.
std::vector<CsCoefficient> cs_coefficient(const SubsetBootstrapResult& subset,
                                          double cor_threshold = 0.7,
                                          double probability = 0.95);

// Edge (node_a, node_b with node_b >= 0) or single node (node_b == -1).
struct Element {
  int node_a = -1;
  int node_b = -1;

  bool is_edge() const { return node_b >= 0; }
  bool operator==(const Element&) const = default;
};

Element parse_element(const std::string& text, const Network& reference,
                      Statistic statistic);
std::string element_label(const Element& element, const Network& reference);

struct DifferenceTestResult {
  Statistic statistic = Statistic::Edge;
  std::string element_a;
  std::string element_b;
  double alpha = 0.05;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool significant = false;
  bool identical_elements = false;
};

// Bootstrapped difference test: type-6 CI of per-replicate differences;
// significant iff zero lies outside the CI.
DifferenceTestResult difference_test(const BootstrapResult& result,
                                     const Element& element_a,
                                     const Element& element_b,
                                     Statistic statistic, double alpha = 0.05);

struct DifferenceMatrix {
  Statistic statistic = Statistic::Edge;
  double alpha = 0.05;
  bool only_nonzero = false;
  std::vector<Element> elements;
  std::vector<std::string> labels;
  std::vector<double> reference_values;
  // significance(i, j): 1 significant, 0 not, -1 self/diagonal.
  Eigen::MatrixXi significance;
};

// All-pairs difference tests without multiple-testing correction.
// only_nonzero restricts edge comparisons to reference-nonzero edges.
DifferenceMatrix difference_matrix(const BootstrapResult& result,
                                   Statistic statistic, double alpha = 0.05,
                                   bool only_nonzero = false);

}  // namespace pcnet
