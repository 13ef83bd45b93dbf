#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pcnet/bootstrap.hpp"
#include "pcnet/dataset.hpp"
#include "pcnet/estimator.hpp"
#include "pcnet/network.hpp"

namespace pcnet {

// Ring of p nodes (i -- i+1, wrap-around) with equal weight magnitudes;
// round(negative_proportion * p) edges are negated at random positions.
Network chain_network(int p, double weight_magnitude,
                      double negative_proportion, std::uint64_t seed);

// Each edge is independently rewired with the given probability: one
// uniformly chosen endpoint is reattached to a uniformly chosen non-adjacent
// node. Self-loops and parallel edges never occur; edge count and the weight
// multiset are preserved. Edges with no legal target (possible only for
// p < 5) stay in place.
Network rewire(const Network& network, double probability, std::uint64_t seed);

// Precision K = I - W inverted and rescaled to unit-variance correlation
// form. Throws EstimationError (reporting the smallest eigenvalue) when the
// implied precision is not positive definite.
Eigen::MatrixXd pcor_to_covariance(const Network& network);

// n rows of multivariate-normal draws via Cholesky factorization.
Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& covariance, int n,
                           std::uint64_t seed);
Eigen::MatrixXd sample_mvn_with(const Eigen::MatrixXd& covariance, int n,
                                std::mt19937_64 rng);

// Bins each variable at n_levels-1 sorted standard-normal thresholds,
// yielding integer codes 0..n_levels-1; thresholds are redrawn (up to 10
// times) for variables with an empty bin.
Dataset ordinalize(const Eigen::MatrixXd& data, int n_levels,
                   std::uint64_t seed);

enum class StudyKind { Cs, EdgeDiff, CentralityDiff };

std::string to_string(StudyKind study);
StudyKind study_from_string(const std::string& name);

struct SimulationConfig {
  int p = 10;
  double edge_weight = 0.25;
  double negative_proportion = 0.5;
  std::vector<double> rewiring = {0.0, 0.1, 0.5, 1.0};
  std::vector<int> sample_sizes = {100, 500, 2500};
  int replications = 100;
  int n_boots = 1000;
  std::vector<double> drop_levels;          // empty: 10 levels on [0.1, 0.75]
  std::vector<double> alphas = {0.05, 0.01, 0.002};  // edge-diff study
  double centrality_alpha = 0.05;           // centrality-diff study
  int ordinal_levels = 4;
  std::uint64_t base_seed = 1;
  int workers = 1;
  EstimatorConfig estimator;
};

// Desk-scale defaults per study (the edge-diff design uses weight 0.3 with
// no negative edges and no rewiring).
SimulationConfig default_config(StudyKind study);

struct SimulationRecord {
  double rewiring = 0.0;
  int sample_size = 0;
  double alpha = 0.0;  // 0 when not applicable
  int replication = 0;
  std::string metric;
  double value = 0.0;
};

struct SimulationAggregate {
  double rewiring = 0.0;
  int sample_size = 0;
  double alpha = 0.0;
  std::string metric;
  int count = 0;
  double mean = 0.0;
  double mc_se = 0.0;  // std of per-replication values / sqrt(count)
  double q025 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q975 = 0.0;
};

struct SimulationFailure {
  double rewiring = 0.0;
  int sample_size = 0;
  int replication = 0;
  std::string reason;
};

struct SimulationResult {
  StudyKind study = StudyKind::Cs;
  SimulationConfig config;
  std::vector<SimulationRecord> records;
  std::vector<SimulationAggregate> aggregates;
  std::vector<SimulationFailure> failures;
  int total_replications = 0;
};

// Runs the per-condition generate -> sample -> ordinalize -> estimate ->
// bootstrap pipeline and aggregates the study-specific metrics. Failed
// replications are logged, excluded and counted.
SimulationResult run_study(const SimulationConfig& config, StudyKind study);

}  // namespace pcnet
