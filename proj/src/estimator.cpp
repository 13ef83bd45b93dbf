#include "pcnet/estimator.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pcnet/errors.hpp"

namespace pcnet {

namespace {

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

bool is_positive_definite(const Eigen::MatrixXd& K) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  return llt.info() == Eigen::Success;
}

}  // namespace

Eigen::MatrixXd glasso(const Eigen::MatrixXd& S, double lambda,
                       const EstimationOptions& options, GlassoWarm* warm) {
  const int p = static_cast<int>(S.rows());
  if (S.rows() != S.cols()) throw DataError("glasso: S must be square");
  if (!(lambda > 0.0)) throw UsageError("glasso: lambda must be positive");

  Eigen::MatrixXd W;
  Eigen::MatrixXd B;  // B(k, j): lasso coefficients for column j, B(j, j) = 0
  if (warm && warm->valid) {
    W = warm->covariance;
    B = warm->coefficients;
  } else {
    W = S;
    B = Eigen::MatrixXd::Zero(p, p);
  }
  // The diagonal of W is fixed by the stationarity conditions.
  for (int i = 0; i < p; ++i)
    W(i, i) = S(i, i) + (options.penalize_diagonal ? lambda : 0.0);

  const double inner_tol = options.convergence_tol * 0.1;
  const int inner_cap = 1000;
  bool converged = false;
  for (int iter = 0; iter < options.max_iter && !converged; ++iter) {
    double total_change = 0.0;
    for (int j = 0; j < p; ++j) {
      // Lasso subproblem for column j: minimize
      //   (1/2) b' W11 b - s12' b + lambda |b|_1
      for (int inner = 0; inner < inner_cap; ++inner) {
        double max_delta = 0.0;
        for (int k = 0; k < p; ++k) {
          if (k == j) continue;
          double r = S(k, j);
          for (int l = 0; l < p; ++l) {
            if (l == j || l == k) continue;
            r -= W(k, l) * B(l, j);
          }
          double b_new = soft_threshold(r, lambda) / W(k, k);
          max_delta = std::max(max_delta, std::abs(b_new - B(k, j)));
          B(k, j) = b_new;
        }
        if (max_delta < inner_tol) break;
      }
      // w12 = W11 * beta
      for (int k = 0; k < p; ++k) {
        if (k == j) continue;
        double w_kj = 0.0;
        for (int l = 0; l < p; ++l) {
          if (l == j) continue;
          w_kj += W(k, l) * B(l, j);
        }
        total_change += std::abs(w_kj - W(k, j));
        W(k, j) = w_kj;
        W(j, k) = w_kj;
      }
    }
    double mean_change = total_change / std::max(1, p * (p - 1));
    if (mean_change < options.convergence_tol) converged = true;
  }
  if (!converged)
    throw EstimationError("glasso did not converge within max_iter");

  if (warm) {
    warm->covariance = W;
    warm->coefficients = B;
    warm->valid = true;
  }

  // Recover K column-wise from the final W and coefficients; zeros in B stay
  // exact zeros in K.
  Eigen::MatrixXd K(p, p);
  for (int j = 0; j < p; ++j) {
    double quad = 0.0;
    for (int k = 0; k < p; ++k) {
      if (k == j) continue;
      quad += W(k, j) * B(k, j);
    }
    double denom = W(j, j) - quad;
    if (!(denom > 0.0))
      throw EstimationError("glasso: nonpositive conditional variance");
    double kjj = 1.0 / denom;
    K(j, j) = kjj;
    for (int k = 0; k < p; ++k) {
      if (k == j) continue;
      K(k, j) = B(k, j) == 0.0 ? 0.0 : -B(k, j) * kjj;
    }
  }
  // Symmetrize; the two column solutions agree at convergence, and exact
  // zeros are symmetric because the KKT conditions are.
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      double v = (K(i, j) == 0.0 && K(j, i) == 0.0)
                     ? 0.0
                     : 0.5 * (K(i, j) + K(j, i));
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  if (!is_positive_definite(K))
    throw EstimationError("glasso: returned precision is not positive definite");
  return K;
}

std::vector<double> lambda_path(const Eigen::MatrixXd& S,
                                const EstimationOptions& options) {
  if (options.n_lambda < 1) throw UsageError("n_lambda must be >= 1");
  if (!(options.lambda_min_ratio > 0.0) || options.lambda_min_ratio > 1.0)
    throw UsageError("lambda_min_ratio must be in (0, 1]");
  const int p = static_cast<int>(S.rows());
  double lambda_max = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      lambda_max = std::max(lambda_max, std::abs(S(i, j)));
  if (lambda_max <= 0.0)
    throw DataError("lambda_path: all off-diagonal entries are zero");
  std::vector<double> path(static_cast<std::size_t>(options.n_lambda));
  if (options.n_lambda == 1) {
    path[0] = lambda_max;
    return path;
  }
  double log_max = std::log(lambda_max);
  double log_min = std::log(lambda_max * options.lambda_min_ratio);
  for (int i = 0; i < options.n_lambda; ++i) {
    double t = static_cast<double>(i) / (options.n_lambda - 1);
    path[static_cast<std::size_t>(i)] = std::exp(log_max + t * (log_min - log_max));
  }
  return path;
}

double gaussian_loglik(const Eigen::MatrixXd& S, const Eigen::MatrixXd& K,
                       int n) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success)
    throw EstimationError("gaussian_loglik: K is not positive definite");
  double log_det = 0.0;
  for (int i = 0; i < K.rows(); ++i)
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  double trace_sk = (S * K).trace();
  return 0.5 * n * (log_det - trace_sk);
}

int count_edges(const Eigen::MatrixXd& K) {
  int count = 0;
  for (int i = 0; i < K.rows(); ++i)
    for (int j = i + 1; j < K.cols(); ++j)
      if (K(i, j) != 0.0) ++count;
  return count;
}

double ebic(const Eigen::MatrixXd& S, const Eigen::MatrixXd& K, int n,
            double gamma) {
  if (gamma < 0.0) throw UsageError("ebic: gamma must be >= 0");
  double ll = gaussian_loglik(S, K, n);
  int edges = count_edges(K);
  double p = static_cast<double>(K.rows());
  return -2.0 * ll + edges * std::log(static_cast<double>(n)) +
         4.0 * gamma * edges * std::log(p);
}

GlassoPath glasso_path(const Eigen::MatrixXd& S, int n,
                       const EstimationOptions& options) {
  GlassoPath path;
  try {
    path.lambdas = lambda_path(S, options);
  } catch (const DataError&) {
    // Degenerate path (all off-diagonals zero): a single tiny lambda gives
    // the empty network directly.
    path.lambdas = {1e-4};
  }
  path.precisions.reserve(path.lambdas.size());
  path.ebic_values.reserve(path.lambdas.size());
  path.edge_counts.reserve(path.lambdas.size());

  GlassoWarm warm;
  int n_failed = 0;
  for (double lambda : path.lambdas) {
    try {
      Eigen::MatrixXd K = glasso(S, lambda, options, &warm);
      path.precisions.push_back(K);
      path.ebic_values.push_back(ebic(S, K, n, options.gamma));
      path.edge_counts.push_back(count_edges(K));
    } catch (const EstimationError&) {
      // A failed fit drops out of the selection; selection requires at
      // least one success.
      ++n_failed;
      path.precisions.emplace_back();
      path.ebic_values.push_back(std::numeric_limits<double>::infinity());
      path.edge_counts.push_back(-1);
      warm.valid = false;
    }
  }
  if (n_failed == static_cast<int>(path.lambdas.size()))
    throw EstimationError("glasso_path: every path fit failed");

  int best = -1;
  for (std::size_t i = 0; i < path.ebic_values.size(); ++i) {
    // Strict improvement keeps ties at the larger (earlier) lambda.
    if (best < 0 || path.ebic_values[i] < path.ebic_values[static_cast<std::size_t>(best)])
      best = static_cast<int>(i);
  }
  path.selected_index = best;
  return path;
}

Eigen::MatrixXd precision_to_pcor(const Eigen::MatrixXd& K) {
  const int p = static_cast<int>(K.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    if (!(K(i, i) > 0.0))
      throw EstimationError("precision_to_pcor: nonpositive diagonal entry");
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      double v = K(i, j) == 0.0
                     ? 0.0
                     : -K(i, j) / std::sqrt(K(i, i) * K(j, j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

EstimationResult estimate_network(const Dataset& dataset,
                                  const EstimationOptions& options) {
  EstimationResult result;
  result.correlation = correlation_matrix(dataset, options.correlation_method);
  result.path = glasso_path(result.correlation.entries, dataset.n(), options);
  const Eigen::MatrixXd& K =
      result.path.precisions[static_cast<std::size_t>(result.path.selected_index)];
  result.network.weights = precision_to_pcor(K);
  result.network.node_labels = dataset.variable_names;
  result.network.provenance.estimator = "ebicglasso";
  result.network.provenance.correlation_method = options.correlation_method;
  result.network.provenance.gamma = options.gamma;
  result.network.provenance.lambda =
      result.path.lambdas[static_cast<std::size_t>(result.path.selected_index)];
  result.network.provenance.sample_n = dataset.n();
  result.network.provenance.psd_repaired = result.correlation.psd_repaired;
  result.network.provenance.regularized = true;
  return result;
}

Network pcor_network(const Dataset& dataset, CorrelationMethod method) {
  CorrelationMatrix S = correlation_matrix(dataset, method);
  Eigen::LLT<Eigen::MatrixXd> llt(S.entries);
  Eigen::MatrixXd K;
  if (llt.info() == Eigen::Success) {
    K = llt.solve(Eigen::MatrixXd::Identity(S.p(), S.p()));
  } else {
    // Pairwise matrices can be repaired-PSD but singular; regularize
    // minimally before inverting.
    Eigen::MatrixXd ridged = S.entries;
    ridged.diagonal().array() += 1e-6;
    Eigen::LLT<Eigen::MatrixXd> llt2(ridged);
    if (llt2.info() != Eigen::Success)
      throw EstimationError("pcor_network: correlation matrix is singular");
    K = llt2.solve(Eigen::MatrixXd::Identity(S.p(), S.p()));
  }
  K = ((K + K.transpose()) / 2.0).eval();

  Network network;
  network.weights = precision_to_pcor(K);
  network.node_labels = dataset.variable_names;
  network.provenance.estimator = "pcor";
  network.provenance.correlation_method = method;
  network.provenance.lambda = 0.0;
  network.provenance.sample_n = dataset.n();
  network.provenance.psd_repaired = S.psd_repaired;
  network.provenance.regularized = false;
  return network;
}

std::string to_string(EstimatorMethod method) {
  return method == EstimatorMethod::EbicGlasso ? "ebicglasso" : "pcor";
}

EstimatorMethod estimator_method_from_string(const std::string& name) {
  if (name == "ebicglasso") return EstimatorMethod::EbicGlasso;
  if (name == "pcor") return EstimatorMethod::Pcor;
  throw UsageError("unknown estimator method: " + name);
}

Network EstimatorConfig::estimate(const Dataset& dataset) const {
  if (method == EstimatorMethod::Pcor)
    return pcor_network(dataset, options.correlation_method);
  return estimate_network(dataset, options).network;
}

}  // namespace pcnet
