#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "pcnet/dataset.hpp"

namespace pcnet {

double normal_cdf(double x);
double normal_quantile(double p);

// Product-moment correlation; throws DataError on constant input or length
// mismatch / length < 2.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson correlation of mid-ranks (ties get average ranks).
double spearman(std::span<const double> x, std::span<const double> y);

// Probability that a standard bivariate normal with correlation rho falls in
// (x_lo, x_hi] x (y_lo, y_hi]; +-infinity allowed. Absolute accuracy well
// below 1e-7 (Genz's quadrature scheme). Throws UsageError if |rho| >= 1.
double bvn_rect_prob(double rho, double x_lo, double x_hi, double y_lo,
                     double y_hi);

// Latent thresholds from marginal level counts (counts may be real-valued);
// zero-count levels collapse into the adjacent lower level. Throws DataError
// if fewer than 2 occupied levels.
std::vector<double> polychoric_thresholds(std::span<const double> level_counts);

struct PolychoricFit {
  double rho = 0.0;
  bool at_bound = false;  // degenerate table, estimate pinned at +-(1 - 1e-6)
};

// Two-step polychoric estimate: thresholds fixed, rho maximizes the
// multinomial log-likelihood over [-1+1e-6, 1-1e-6] (tolerance 1e-6).
PolychoricFit polychoric_rho(const Eigen::MatrixXd& table,
                             std::span<const double> thresholds_x,
                             std::span<const double> thresholds_y);

enum class CorrelationMethod { Auto, Pearson, Spearman, Polychoric };

std::string to_string(CorrelationMethod method);
CorrelationMethod correlation_method_from_string(const std::string& name);

struct CorrelationMatrix {
  Eigen::MatrixXd entries;
  CorrelationMethod method = CorrelationMethod::Auto;
  bool psd_repaired = false;
  std::vector<std::string> variable_names;

  int p() const { return static_cast<int>(entries.rows()); }
};

// Pairwise-complete correlation matrix. Auto uses polychoric for
// ordinal-ordinal pairs and Pearson otherwise; the result is repaired to PSD
// if needed (flag set).
CorrelationMatrix correlation_matrix(const Dataset& dataset,
                                     CorrelationMethod method);

// Eigenvalue clipping at 1e-8 with rescaling to unit diagonal. PSD inputs are
// returned unchanged.
Eigen::MatrixXd nearest_psd(const Eigen::MatrixXd& matrix,
                            bool* repaired = nullptr);

// Hyndman-Fan type-6 quantile: h = prob*(n+1) clamped to [1, n], linear
// interpolation between order statistics.
double quantile_type6(std::vector<double> samples, double prob);
double quantile_type6_sorted(std::span<const double> sorted, double prob);

}  // namespace pcnet
