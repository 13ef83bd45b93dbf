#include "pcnet/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcnet/errors.hpp"

namespace pcnet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, p);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: length mismatch");
  std::size_t n = x.size();
  if (n < 2) throw DataError("pearson: fewer than 2 observations");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DataError("pearson: constant input vector");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

namespace {

std::vector<double> mid_ranks(std::span<const double> v) {
  std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: length mismatch");
  auto rx = mid_ranks(x);
  auto ry = mid_ranks(y);
  return pearson(rx, ry);
}

// ---------------------------------------------------------------------------
// Bivariate normal probabilities (Genz's adaptation of Drezner & Wesolowsky).

namespace {

// P(X > h, Y > k) for a standard bivariate normal pair with correlation r.
double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : normal_cdf(-k);
  if (k == -kInf) return normal_cdf(-h);
  if (r == 0.0) return normal_cdf(-h) * normal_cdf(-k);

  static const double w6[] = {0.1713244923791705, 0.3607615730481384,
                              0.4679139345726904};
  static const double x6[] = {0.9324695142031522, 0.6612093864662647,
                              0.2386191860831970};
  static const double w12[] = {0.04717533638651177, 0.1069393259953183,
                               0.1600783285433464,  0.2031674267230659,
                               0.2334925365383547,  0.2491470458134029};
  static const double x12[] = {0.9815606342467191, 0.9041172563704750,
                               0.7699026741943050, 0.5873179542866171,
                               0.3678314989981802, 0.1252334085114692};
  static const double w20[] = {0.01761400713915212, 0.04060142980038694,
                               0.06267204833410906, 0.08327674157670475,
                               0.1019301198172404,  0.1181945319615184,
                               0.1316886384491766,  0.1420961093183821,
                               0.1491729864726037,  0.1527533871307259};
  static const double x20[] = {0.9931285991850949,  0.9639719272779138,
                               0.9122344282513259,  0.8391169718222188,
                               0.7463319064601508,  0.6360536807265150,
                               0.5108670019508271,  0.3737060887154196,
                               0.2277858511416451,  0.07652652113349733};

  const double* w;
  const double* x;
  int ng;
  if (std::abs(r) < 0.3) {
    w = w6;
    x = x6;
    ng = 3;
  } else if (std::abs(r) < 0.75) {
    w = w12;
    x = x12;
    ng = 6;
  } else {
    w = w20;
    x = x20;
    ng = 10;
  }

  const double twopi = 2.0 * M_PI;
  double hk = h * k;
  double bvn = 0.0;

  if (std::abs(r) < 0.925) {
    double hs = (h * h + k * k) / 2.0;
    double asr = std::asin(r);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        double sn = std::sin(asr * (is * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * twopi) + normal_cdf(-h) * normal_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(r) < 1.0) {
      double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      double bs = (h - k) * (h - k);
      double c = (4.0 - hk) / 8.0;
      double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0)
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      if (-hk < 100.0) {
        double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * std::sqrt(twopi) * normal_cdf(-b / a) *
               b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double xs = a * (is * x[i] + 1.0);
          xs = xs * xs;
          double rs = std::sqrt(1.0 - xs);
          double asr1 = -(bs / xs + hk) / 2.0;
          if (asr1 > -100.0) {
            bvn += a * w[i] * std::exp(asr1) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + c * xs * (1.0 + d * xs)));
          }
        }
      }
      bvn = -bvn / twopi;
    }
    if (r > 0.0) {
      bvn += normal_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) {
        if (h < 0.0)
          bvn += normal_cdf(k) - normal_cdf(h);
        else
          bvn += normal_cdf(-h) - normal_cdf(-k);
      }
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// P(X <= x, Y <= y); equals P(X > -x, Y > -y) by point symmetry.
double bvn_cdf(double x, double y, double r) { return bvn_upper(-x, -y, r); }

}  // namespace

double bvn_rect_prob(double rho, double x_lo, double x_hi, double y_lo,
                     double y_hi) {
  if (!(std::abs(rho) < 1.0))
    throw UsageError("bvn_rect_prob: |rho| must be < 1");
  if (!(x_lo < x_hi) || !(y_lo < y_hi))
    throw UsageError("bvn_rect_prob: lower bound must be below upper bound");
  double p = bvn_cdf(x_hi, y_hi, rho) - bvn_cdf(x_lo, y_hi, rho) -
             bvn_cdf(x_hi, y_lo, rho) + bvn_cdf(x_lo, y_lo, rho);
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Polychoric correlation (two-step).

std::vector<double> polychoric_thresholds(std::span<const double> level_counts) {
  double total = 0.0;
  int occupied = 0;
  for (double c : level_counts) {
    if (c < 0.0) throw DataError("polychoric_thresholds: negative count");
    total += c;
    if (c > 0.0) ++occupied;
  }
  if (occupied < 2)
    throw DataError("polychoric_thresholds: fewer than 2 occupied levels");
  // Empty levels collapse: only boundaries between occupied levels remain.
  std::vector<double> thresholds;
  double cum = 0.0;
  int seen = 0;
  for (double c : level_counts) {
    if (c <= 0.0) continue;
    cum += c;
    ++seen;
    if (seen < occupied) thresholds.push_back(normal_quantile(cum / total));
  }
  return thresholds;
}

namespace {

constexpr int kMaxPolychoricLevels = 20;

// Cell log-likelihood of a contingency table under a thresholded bivariate
// normal with correlation rho. Grid CDF evaluation: (k-1)*(m-1) interior
// bvn calls, boundaries reduce to univariate CDFs.
double polychoric_loglik(const Eigen::MatrixXd& table,
                         std::span<const double> tx,
                         std::span<const double> ty, double rho) {
  int k = static_cast<int>(tx.size()) + 1;
  int m = static_cast<int>(ty.size()) + 1;
  // cdf[i][j] = P(X <= tx[i-1], Y <= ty[j-1]); index 0 is the -inf side,
  // index k (resp. m) the +inf side. Table sizes are validated against
  // kMaxPolychoricLevels, so a fixed stack grid suffices.
  double cdf[kMaxPolychoricLevels + 1][kMaxPolychoricLevels + 1];
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= m; ++j) {
      if (i == 0 || j == 0) {
        cdf[i][j] = 0.0;
      } else if (i == k && j == m) {
        cdf[i][j] = 1.0;
      } else if (i == k) {
        cdf[i][j] = normal_cdf(ty[static_cast<std::size_t>(j - 1)]);
      } else if (j == m) {
        cdf[i][j] = normal_cdf(tx[static_cast<std::size_t>(i - 1)]);
      } else {
        cdf[i][j] = bvn_upper(-tx[static_cast<std::size_t>(i - 1)],
                              -ty[static_cast<std::size_t>(j - 1)], rho);
      }
    }
  }
  double ll = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < m; ++j) {
      double nij = table(i, j);
      if (nij <= 0.0) continue;
      double pij = cdf[i + 1][j + 1] - cdf[i][j + 1] - cdf[i + 1][j] + cdf[i][j];
      ll += nij * std::log(std::max(pij, 1e-300));
    }
  }
  return ll;
}

}  // namespace

PolychoricFit polychoric_rho(const Eigen::MatrixXd& table,
                             std::span<const double> thresholds_x,
                             std::span<const double> thresholds_y) {
  int occupied_rows = 0, occupied_cols = 0;
  for (int i = 0; i < table.rows(); ++i)
    if (table.row(i).sum() > 0.0) ++occupied_rows;
  for (int j = 0; j < table.cols(); ++j)
    if (table.col(j).sum() > 0.0) ++occupied_cols;
  if (occupied_rows < 2 || occupied_cols < 2)
    throw DataError("polychoric_rho: degenerate table");
  if (static_cast<int>(thresholds_x.size()) + 1 != table.rows() ||
      static_cast<int>(thresholds_y.size()) + 1 != table.cols())
    throw DataError("polychoric_rho: threshold/table size mismatch");
  if (table.rows() > kMaxPolychoricLevels || table.cols() > kMaxPolychoricLevels)
    throw DataError("polychoric_rho: more than 20 levels per variable");

  constexpr double bound = 1.0 - 1e-6;
  auto neg_ll = [&](double rho) {
    return -polychoric_loglik(table, thresholds_x, thresholds_y, rho);
  };

  // Coarse scan guards against a misleading local bracket, then Brent
  // refines between the scan neighbors.
  static const double scan[] = {-bound, -0.9, -0.6, -0.3, 0.0,
                                0.3,    0.6,  0.9,  bound};
  int best = 0;
  double best_val = neg_ll(scan[0]);
  for (int i = 1; i < 9; ++i) {
    double v = neg_ll(scan[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = scan[std::max(0, best - 1)];
  double hi = scan[std::min(8, best + 1)];

  std::uintmax_t max_iter = 200;
  auto [rho, fmin] =
      boost::math::tools::brent_find_minima(neg_ll, lo, hi, 24, max_iter);
  (void)fmin;
  if (max_iter >= 200)
    throw EstimationError("polychoric_rho: optimizer did not converge");

  PolychoricFit fit;
  fit.rho = rho;
  fit.at_bound = std::abs(rho) >= bound - 1e-5;
  if (fit.at_bound) fit.rho = rho > 0.0 ? bound : -bound;
  return fit;
}

// ---------------------------------------------------------------------------

std::string to_string(CorrelationMethod method) {
  switch (method) {
    case CorrelationMethod::Auto: return "auto";
    case CorrelationMethod::Pearson: return "pearson";
    case CorrelationMethod::Spearman: return "spearman";
    case CorrelationMethod::Polychoric: return "polychoric";
  }
  return "auto";
}

CorrelationMethod correlation_method_from_string(const std::string& name) {
  if (name == "auto") return CorrelationMethod::Auto;
  if (name == "pearson") return CorrelationMethod::Pearson;
  if (name == "spearman") return CorrelationMethod::Spearman;
  if (name == "polychoric") return CorrelationMethod::Polychoric;
  throw UsageError("unknown correlation method: " + name);
}

namespace {

// Complete-pair extraction; the no-missing fast path avoids copies.
void complete_pairs(const Dataset& d, int a, int b, std::vector<double>* xs,
                    std::vector<double>* ys) {
  xs->clear();
  ys->clear();
  xs->reserve(static_cast<std::size_t>(d.n()));
  ys->reserve(static_cast<std::size_t>(d.n()));
  for (int r = 0; r < d.n(); ++r) {
    double x = d.values(r, a);
    double y = d.values(r, b);
    if (std::isnan(x) || std::isnan(y)) continue;
    xs->push_back(x);
    ys->push_back(y);
  }
}

int level_index(const std::vector<double>& levels, double v) {
  auto it = std::lower_bound(levels.begin(), levels.end(), std::round(v));
  return static_cast<int>(it - levels.begin());
}

double polychoric_pair(const Dataset& d, int a, int b,
                       std::span<const double> xs,
                       std::span<const double> ys) {
  const auto& la = d.variable_types[static_cast<std::size_t>(a)].levels;
  const auto& lb = d.variable_types[static_cast<std::size_t>(b)].levels;
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(la.size()), static_cast<Eigen::Index>(lb.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    table(level_index(la, xs[i]), level_index(lb, ys[i])) += 1.0;

  // Levels unobserved in the complete-pair subset collapse away.
  std::vector<int> rows, cols;
  for (int i = 0; i < table.rows(); ++i)
    if (table.row(i).sum() > 0.0) rows.push_back(i);
  for (int j = 0; j < table.cols(); ++j)
    if (table.col(j).sum() > 0.0) cols.push_back(j);
  if (rows.size() < 2 || cols.size() < 2)
    throw DataError("polychoric: variable pair (" +
                    d.variable_names[static_cast<std::size_t>(a)] + ", " +
                    d.variable_names[static_cast<std::size_t>(b)] +
                    ") has fewer than 2 occupied levels");
  Eigen::MatrixXd compact(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      compact(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          table(rows[i], cols[j]);

  std::vector<double> row_counts(rows.size()), col_counts(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    row_counts[i] = compact.row(static_cast<Eigen::Index>(i)).sum();
  for (std::size_t j = 0; j < cols.size(); ++j)
    col_counts[j] = compact.col(static_cast<Eigen::Index>(j)).sum();
  auto tx = polychoric_thresholds(row_counts);
  auto ty = polychoric_thresholds(col_counts);
  return polychoric_rho(compact, tx, ty).rho;
}

}  // namespace

CorrelationMatrix correlation_matrix(const Dataset& dataset,
                                     CorrelationMethod method) {
  int p = dataset.p();
  CorrelationMatrix out;
  out.method = method;
  out.variable_names = dataset.variable_names;
  out.entries = Eigen::MatrixXd::Identity(p, p);

  if (method == CorrelationMethod::Polychoric) {
    for (int c = 0; c < p; ++c)
      if (!dataset.variable_types[static_cast<std::size_t>(c)].is_ordinal())
        throw DataError("polychoric requested but variable " +
                        dataset.variable_names[static_cast<std::size_t>(c)] +
                        " is continuous");
  }

  bool missing = dataset.has_missing();
  std::vector<double> xs, ys;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      const double* xp;
      const double* yp;
      std::size_t len;
      if (missing) {
        complete_pairs(dataset, a, b, &xs, &ys);
        if (xs.size() < 2)
          throw DataError("fewer than 2 complete cases for pair (" +
                          dataset.variable_names[static_cast<std::size_t>(a)] +
                          ", " +
                          dataset.variable_names[static_cast<std::size_t>(b)] +
                          ")");
        xp = xs.data();
        yp = ys.data();
        len = xs.size();
      } else {
        xp = dataset.values.col(a).data();
        yp = dataset.values.col(b).data();
        len = static_cast<std::size_t>(dataset.n());
      }
      std::span<const double> sx(xp, len), sy(yp, len);

      double r;
      switch (method) {
        case CorrelationMethod::Pearson:
          r = pearson(sx, sy);
          break;
        case CorrelationMethod::Spearman:
          r = spearman(sx, sy);
          break;
        case CorrelationMethod::Polychoric:
          r = polychoric_pair(dataset, a, b, sx, sy);
          break;
        case CorrelationMethod::Auto: {
          bool both_ordinal =
              dataset.variable_types[static_cast<std::size_t>(a)].is_ordinal() &&
              dataset.variable_types[static_cast<std::size_t>(b)].is_ordinal();
          r = both_ordinal ? polychoric_pair(dataset, a, b, sx, sy)
                           : pearson(sx, sy);
          break;
        }
      }
      out.entries(a, b) = r;
      out.entries(b, a) = r;
    }
  }

  bool repaired = false;
  out.entries = nearest_psd(out.entries, &repaired);
  out.psd_repaired = repaired;
  return out;
}

Eigen::MatrixXd nearest_psd(const Eigen::MatrixXd& matrix, bool* repaired) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success)
    throw EstimationError("nearest_psd: eigendecomposition failed");
  if (solver.eigenvalues().minCoeff() >= 0.0) {
    if (repaired) *repaired = false;
    return matrix;
  }
  Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(1e-8);
  Eigen::MatrixXd rebuilt = solver.eigenvectors() * clipped.asDiagonal() *
                            solver.eigenvectors().transpose();
  Eigen::VectorXd scale = rebuilt.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = scale.asDiagonal() * rebuilt * scale.asDiagonal();
  out = ((out + out.transpose()) / 2.0).eval();
  out.diagonal().setOnes();
  if (repaired) *repaired = true;
  return out;
}

double quantile_type6_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DataError("quantile_type6: empty sample");
  if (prob < 0.0 || prob > 1.0)
    throw UsageError("quantile_type6: prob outside [0, 1]");
  auto n = static_cast<double>(sorted.size());
  double h = prob * (n + 1.0);
  h = std::clamp(h, 1.0, n);
  double fl = std::floor(h);
  auto idx = static_cast<std::size_t>(fl) - 1;
  double frac = h - fl;
  if (frac == 0.0 || idx + 1 >= sorted.size()) return sorted[idx];
  return sorted[idx] + frac * (sorted[idx + 1] - sorted[idx]);
}

double quantile_type6(std::vector<double> samples, double prob) {
  std::sort(samples.begin(), samples.end());
  return quantile_type6_sorted(samples, prob);
}

}  // namespace pcnet
