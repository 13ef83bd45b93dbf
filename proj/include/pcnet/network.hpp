#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcnet/stats.hpp"

namespace pcnet {

// Provenance carried along with an estimated network so downstream runs can
// reproduce it.
struct NetworkProvenance {
  std::string estimator;  // "ebicglasso", "pcor", "simulated"
  CorrelationMethod correlation_method = CorrelationMethod::Auto;
  double gamma = 0.5;
  double lambda = 0.0;  // selected penalty (0 for unregularized)
  int sample_n = 0;
  bool psd_repaired = false;
  bool regularized = false;
};

// Symmetric weighted undirected graph of partial correlations, zero diagonal.
struct Network {
  Eigen::MatrixXd weights;
  std::vector<std::string> node_labels;
  NetworkProvenance provenance;

  int p() const { return static_cast<int>(weights.rows()); }
  int n_candidate_edges() const { return p() * (p() - 1) / 2; }
  int n_nonzero_edges() const;
};

// Throws DataError if weights are not symmetric with zero diagonal and
// |w| < 1 off the diagonal.
void validate_network(const Network& network);

// Upper-triangle edge enumeration; edges are ordered (0,1), (0,2), ...,
// row-major over i < j.
int edge_index(int i, int j, int p);
std::pair<int, int> edge_nodes(int index, int p);

// Flattened upper triangle of the weight matrix in edge_index order.
Eigen::VectorXd edge_vector(const Network& network);

}  // namespace pcnet
