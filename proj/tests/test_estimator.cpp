#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/estimator.hpp"
#include "pcnet/simgen.hpp"

using namespace pcnet;

namespace {

// Random correlation matrix: S = cor(A A' + 0.3 I) for a random square A.
Eigen::MatrixXd random_correlation(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = g(rng);
  Eigen::MatrixXd s = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = d.asDiagonal() * s * d.asDiagonal();
  out = ((out + out.transpose()) / 2.0).eval();
  out.diagonal().setOnes();
  return out;
}

double max_abs_offdiag(const Eigen::MatrixXd& s) {
  double m = 0.0;
  for (int i = 0; i < s.rows(); ++i)
    for (int j = i + 1; j < s.cols(); ++j)
      m = std::max(m, std::abs(s(i, j)));
  return m;
}

}  // namespace

TEST_CASE("glasso: lambda above the KKT bound gives an exactly empty network") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd s = random_correlation(4, rng);
    double lambda = max_abs_offdiag(s) + 1e-10;
    Eigen::MatrixXd k = glasso(s, lambda);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(k(i, j) == 0.0);
    // unpenalized unit diagonal: K_ii = 1 / S_ii = 1
    for (int i = 0; i < 4; ++i) CHECK(k(i, i) == doctest::Approx(1.0));
  }
}

TEST_CASE("glasso: tiny lambda approaches the unpenalized inverse") {
  Eigen::MatrixXd s(3, 3);
  s << 1.0, 0.4, 0.2, 0.4, 1.0, 0.3, 0.2, 0.3, 1.0;
  EstimationOptions opts;
  opts.convergence_tol = 1e-8;
  Eigen::MatrixXd k = glasso(s, 1e-7, opts);
  Eigen::MatrixXd inv = s.inverse();
  CHECK((k - inv).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("glasso matches the brute-force penalized optimizer") {
  // p=3, S12=0.5, rest zero, lambda=0.1
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  s(0, 1) = s(1, 0) = 0.5;
  EstimationOptions opts;
  opts.convergence_tol = 1e-6;
  Eigen::MatrixXd k = glasso(s, 0.1, opts);
  Eigen::MatrixXd oracle = oracles::brute_force_glasso(s, 0.1);
  CHECK((k - oracle).cwiseAbs().maxCoeff() < 1e-3);
  // S13 = S23 = 0 edges must be exactly zero
  CHECK(k(0, 2) == 0.0);
  CHECK(k(1, 2) == 0.0);

  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 8; ++rep) {
    Eigen::MatrixXd sr = random_correlation(3, rng);
    for (double lambda : {0.05, 0.3}) {
      Eigen::MatrixXd fit = glasso(sr, lambda, opts);
      Eigen::MatrixXd bf = oracles::brute_force_glasso(sr, lambda);
      CHECK((fit - bf).cwiseAbs().maxCoeff() < 1e-3);
    }
  }
}

TEST_CASE("glasso objective sanity against the identity matrix") {
  std::mt19937_64 rng(11);
  Eigen::MatrixXd s = random_correlation(5, rng);
  EstimationOptions opts;
  auto path = lambda_path(s, opts);
  GlassoWarm warm;
  for (double lambda : path) {
    Eigen::MatrixXd k = glasso(s, lambda, opts, &warm);
    double fit_obj = oracles::penalized_objective(s, k, lambda);
    double id_obj = oracles::penalized_objective(
        s, Eigen::MatrixXd::Identity(5, 5), lambda);
    CHECK(fit_obj >= id_obj - 1e-9);
  }
}

TEST_CASE("lambda_path") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  s(0, 1) = s(1, 0) = 0.5;
  EstimationOptions opts;
  opts.n_lambda = 3;
  opts.lambda_min_ratio = 0.01;
  auto path = lambda_path(s, opts);
  REQUIRE(path.size() == 3);
  CHECK(path[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(path[1] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(path[2] == doctest::Approx(0.005).epsilon(1e-12));

  CHECK_THROWS_AS(lambda_path(Eigen::MatrixXd::Identity(3, 3), opts), DataError);

  std::mt19937_64 rng(3);
  Eigen::MatrixXd sr = random_correlation(4, rng);
  auto p2 = lambda_path(sr, opts);
  CHECK(p2.front() == doctest::Approx(max_abs_offdiag(sr)));
  for (std::size_t i = 1; i < p2.size(); ++i) CHECK(p2[i] < p2[i - 1]);
}

TEST_CASE("gaussian_loglik convention") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  // (n/2) (log det I - tr I) = -n p / 2
  CHECK(gaussian_loglik(eye, eye, 100) == doctest::Approx(-200.0));
  CHECK(gaussian_loglik(eye, eye, 200) == doctest::Approx(-400.0));  // linear in n

  Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
  double l1 = gaussian_loglik(eye2, eye2, 50);
  double l2 = gaussian_loglik(eye2, 2.0 * eye2, 50);
  CHECK(l2 - l1 == doctest::Approx(25.0 * (2.0 * std::log(2.0) - 2.0)));

  Eigen::MatrixXd notpd = -eye2;
  CHECK_THROWS_AS(gaussian_loglik(eye2, notpd, 50), EstimationError);
}

TEST_CASE("ebic formula") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(10, 10);
  // gamma 0: plain BIC
  CHECK(ebic(eye, eye, 500, 0.0) ==
        doctest::Approx(-2.0 * gaussian_loglik(eye, eye, 500)));
  // diagonal K: penalty zero for any gamma
  CHECK(ebic(eye, eye, 500, 0.5) == doctest::Approx(ebic(eye, eye, 500, 2.0)));

  // E = 9 edges on p = 10: penalty = 9 log 500 + 18 log 10
  Eigen::MatrixXd k = eye;
  for (int i = 0; i < 9; ++i) {
    k(i, i + 1) = 0.05;
    k(i + 1, i) = 0.05;
  }
  double penalty = ebic(eye, k, 500, 0.5) + 2.0 * gaussian_loglik(eye, k, 500);
  CHECK(penalty ==
        doctest::Approx(9.0 * std::log(500.0) + 18.0 * std::log(10.0)));
}

TEST_CASE("precision_to_pcor") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  CHECK(precision_to_pcor(eye) == Eigen::MatrixXd::Zero(3, 3));

  Eigen::MatrixXd k(2, 2);
  k << 1.0, -0.5, -0.5, 1.0;
  Eigen::MatrixXd w = precision_to_pcor(k);
  CHECK(w(0, 1) == doctest::Approx(0.5));
  CHECK(w(0, 0) == 0.0);

  // scale invariance
  Eigen::MatrixXd w2 = precision_to_pcor(3.7 * k);
  CHECK((w - w2).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd badk(2, 2);
  badk << -1.0, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(precision_to_pcor(badk), EstimationError);
}

TEST_CASE("precision_to_pcor output is a valid network weight matrix") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd s = random_correlation(5, rng);
    Eigen::MatrixXd k = glasso(s, 0.05);
    Eigen::MatrixXd w = precision_to_pcor(k);
    Network net;
    net.weights = w;
    CHECK_NOTHROW(validate_network(net));
  }
}

TEST_CASE("estimate_network recovers the ring from a large sample") {
  Network truth = chain_network(10, 0.25, 0.5, 99);
  Eigen::MatrixXd cov = pcor_to_covariance(truth);
  Eigen::MatrixXd values = sample_mvn(cov, 5000, 7);
  Dataset data = make_dataset(values);

  auto result = estimate_network(data, {});
  const auto& w = result.network.weights;
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      if (truth.weights(i, j) != 0.0) {
        CHECK(w(i, j) != 0.0);
        CHECK(w(i, j) * truth.weights(i, j) > 0.0);  // matching sign
      }
    }
  }
  CHECK(result.network.provenance.estimator == "ebicglasso");
  CHECK(result.network.provenance.sample_n == 5000);
  CHECK(result.path.selected_index >= 0);

  // deterministic given dataset and options
  auto again = estimate_network(data, {});
  CHECK(again.network.weights == result.network.weights);
}

TEST_CASE("estimate_network on independent data is mostly empty") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  Eigen::MatrixXd values(500, 10);
  for (int r = 0; r < 500; ++r)
    for (int c = 0; c < 10; ++c) values(r, c) = g(rng);
  Dataset data = make_dataset(values);
  auto result = estimate_network(data, {});
  int zero = result.network.n_candidate_edges() -
             result.network.n_nonzero_edges();
  CHECK(zero >= static_cast<int>(0.9 * result.network.n_candidate_edges()));
}

TEST_CASE("edge counts along the path: empty at the top, densest at the bottom") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd s = random_correlation(6, rng);
  auto path = glasso_path(s, 300, {});
  REQUIRE(!path.edge_counts.empty());
  CHECK(path.edge_counts.front() == 0);
  int max_edges = *std::max_element(path.edge_counts.begin(),
                                    path.edge_counts.end());
  CHECK(path.edge_counts.back() == max_edges);
  CHECK(path.selected_index >= 0);
  // selected index minimizes EBIC with ties at the sparser end
  for (std::size_t i = 0; i < path.ebic_values.size(); ++i)
    CHECK(path.ebic_values[static_cast<std::size_t>(path.selected_index)] <=
          path.ebic_values[i]);
}

TEST_CASE("pcor_network is dense and matches S inverse") {
  Network truth = chain_network(6, 0.3, 0.0, 1);
  Eigen::MatrixXd cov = pcor_to_covariance(truth);
  Eigen::MatrixXd values = sample_mvn(cov, 4000, 3);
  Dataset data = make_dataset(values);
  Network net = pcor_network(data, CorrelationMethod::Pearson);
  CHECK_FALSE(net.provenance.regularized);
  // direct check against precision_to_pcor(S^{-1})
  auto corr = correlation_matrix(data, CorrelationMethod::Pearson);
  Eigen::MatrixXd expected = precision_to_pcor(corr.entries.inverse());
  CHECK((net.weights - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("degenerate path: identity correlation still estimates (empty) network") {
  // lambda_path itself errors on identity input; the pipeline falls back to
  // a single tiny lambda and returns the empty network.
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  auto path = glasso_path(eye, 100, {});
  REQUIRE(path.lambdas.size() == 1);
  CHECK(path.edge_counts[0] == 0);
  CHECK(precision_to_pcor(path.precisions[0]) == Eigen::MatrixXd::Zero(4, 4));
}

TEST_CASE("glasso at p=2 matches brute force and the soft-threshold form") {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.6, 0.6, 1.0;
  EstimationOptions opts;
  opts.convergence_tol = 1e-8;
  for (double lambda : {0.1, 0.3, 0.59}) {
    Eigen::MatrixXd k = glasso(s, lambda, opts);
    Eigen::MatrixXd oracle = oracles::brute_force_glasso(s, lambda);
    CHECK((k - oracle).cwiseAbs().maxCoeff() < 1e-3);
    // two-variable case: W12 = sign(r) (|r| - lambda), K = W^{-1}
    double w12 = 0.6 - lambda;
    Eigen::MatrixXd w(2, 2);
    w << 1.0, w12, w12, 1.0;
    CHECK((k - w.inverse()).cwiseAbs().maxCoeff() < 1e-6);
  }
}
