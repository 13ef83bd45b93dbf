#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcnet/dataset.hpp"
#include "pcnet/network.hpp"
#include "pcnet/stats.hpp"

namespace pcnet {

struct EstimationOptions {
  double gamma = 0.5;
  int n_lambda = 100;
  double lambda_min_ratio = 0.01;
  bool penalize_diagonal = false;
  double convergence_tol = 1e-4;
  int max_iter = 10000;
  CorrelationMethod correlation_method = CorrelationMethod::Auto;
};

struct GlassoPath {
  std::vector<double> lambdas;             // descending
  std::vector<Eigen::MatrixXd> precisions;  // one PD matrix per lambda
  std::vector<double> ebic_values;
  std::vector<int> edge_counts;
  int selected_index = -1;
};

// Warm-start state threaded through a regularization path.
struct GlassoWarm {
  Eigen::MatrixXd covariance;  // W, current working covariance estimate
  Eigen::MatrixXd coefficients;  // B(k, j): lasso coefficients of column j
  bool valid = false;
};

// L1-penalized precision estimation by block coordinate descent: maximizes
// log det K - tr(S K) - lambda * sum_{i != j} |K_ij| (diagonal additionally
// penalized when options.penalize_diagonal). Throws EstimationError on
// non-convergence.
Eigen::MatrixXd glasso(const Eigen::MatrixXd& S, double lambda,
                       const EstimationOptions& options = {},
                       GlassoWarm* warm = nullptr);

// n_lambda values log-spaced down from max off-diagonal |S_ij|. Throws
// DataError when all off-diagonals are zero (degenerate path).
std::vector<double> lambda_path(const Eigen::MatrixXd& S,
                                const EstimationOptions& options = {});

// (n/2) * (log det K - tr(S K)); 2*pi constant dropped.
double gaussian_loglik(const Eigen::MatrixXd& S, const Eigen::MatrixXd& K,
                       int n);

// -2 loglik + E log n + 4 gamma E log p over nonzero upper-triangle entries.
double ebic(const Eigen::MatrixXd& S, const Eigen::MatrixXd& K, int n,
            double gamma);

int count_edges(const Eigen::MatrixXd& K);

// Full path fit with EBIC values and minimum-EBIC selection (ties resolved
// toward the larger lambda). Path entries are fit sequentially because each
// warm-starts the next.
GlassoPath glasso_path(const Eigen::MatrixXd& S, int n,
                       const EstimationOptions& options = {});

// weights[i][j] = -K_ij / sqrt(K_ii K_jj), zero diagonal.
Eigen::MatrixXd precision_to_pcor(const Eigen::MatrixXd& K);

struct EstimationResult {
  Network network;
  GlassoPath path;
  CorrelationMatrix correlation;
};

// correlation -> lambda path -> glasso -> EBIC selection -> partial
// correlations. n <= p is allowed (regularization handles it); callers may
// warn based on provenance.sample_n.
EstimationResult estimate_network(const Dataset& dataset,
                                  const EstimationOptions& options = {});

// Unregularized partial correlation network: precision_to_pcor(S^{-1}).
Network pcor_network(const Dataset& dataset,
                     CorrelationMethod method = CorrelationMethod::Auto);

// Estimator choice the bootstrap engines re-run per replicate.
enum class EstimatorMethod { EbicGlasso, Pcor };

std::string to_string(EstimatorMethod method);
EstimatorMethod estimator_method_from_string(const std::string& name);

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::EbicGlasso;
  EstimationOptions options;

  Network estimate(const Dataset& dataset) const;
};

}  // namespace pcnet
