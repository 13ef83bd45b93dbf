#include <doctest.h>

#include <set>

#include "pcnet/centrality.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/estimator.hpp"
#include "pcnet/simgen.hpp"

using namespace pcnet;

TEST_CASE("chain_network structure") {
  Network net = chain_network(10, 0.25, 0.5, 7);
  int n_edges = 0, n_negative = 0;
  for (int i = 0; i < 10; ++i) {
    int degree = 0;
    for (int j = 0; j < 10; ++j) {
      if (net.weights(i, j) == 0.0) continue;
      ++degree;
      if (i < j) {
        ++n_edges;
        CHECK(std::abs(net.weights(i, j)) == doctest::Approx(0.25));
        if (net.weights(i, j) < 0) ++n_negative;
      }
    }
    CHECK(degree == 2);  // ring
  }
  CHECK(n_edges == 10);
  CHECK(n_negative == 5);

  Network all_pos = chain_network(7, 0.3, 0.0, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) CHECK(all_pos.weights(i, j) >= 0.0);

  CHECK_THROWS_AS(chain_network(2, 0.25, 0.5, 7), UsageError);
}

TEST_CASE("rewire preserves edge count and weight multiset") {
  Network ring = chain_network(10, 0.25, 0.5, 3);

  SUBCASE("probability 0 is the identity") {
    Network same = rewire(ring, 0.0, 11);
    CHECK(same.weights == ring.weights);
  }

  SUBCASE("probability 1 keeps counts, kills no weights") {
    Network moved = rewire(ring, 1.0, 11);
    std::multiset<double> before, after;
    int edges_before = 0, edges_after = 0;
    for (int i = 0; i < 10; ++i) {
      CHECK(moved.weights(i, i) == 0.0);  // no self-loops
      for (int j = i + 1; j < 10; ++j) {
        if (ring.weights(i, j) != 0.0) {
          ++edges_before;
          before.insert(ring.weights(i, j));
        }
        if (moved.weights(i, j) != 0.0) {
          ++edges_after;
          after.insert(moved.weights(i, j));
        }
        CHECK(moved.weights(i, j) == moved.weights(j, i));
      }
    }
    CHECK(edges_after == edges_before);
    CHECK(before == after);
    CHECK(moved.weights != ring.weights);  // something moved at prob 1
  }

  SUBCASE("deterministic in the seed") {
    CHECK(rewire(ring, 0.5, 11).weights == rewire(ring, 0.5, 11).weights);
    CHECK(rewire(ring, 1.0, 11).weights != rewire(ring, 1.0, 12).weights);
  }
}

TEST_CASE("pcor_to_covariance") {
  SUBCASE("empty network gives the identity") {
    Network empty;
    empty.weights = Eigen::MatrixXd::Zero(4, 4);
    CHECK(pcor_to_covariance(empty) == Eigen::MatrixXd::Identity(4, 4));
  }

  SUBCASE("round trip through the precision matrix") {
    Network ring = chain_network(10, 0.25, 0.5, 5);
    Eigen::MatrixXd cov = pcor_to_covariance(ring);
    Eigen::MatrixXd precision = cov.inverse();
    Eigen::MatrixXd back = precision_to_pcor(precision);
    CHECK((back - ring.weights).cwiseAbs().maxCoeff() < 1e-10);
  }

  SUBCASE("ring precision is PD (circulant eigenvalues bounded away from 0)") {
    Network ring = chain_network(10, 0.25, 0.0, 5);
    CHECK_NOTHROW(pcor_to_covariance(ring));
  }

  SUBCASE("non-PD implied precision reports the smallest eigenvalue") {
    Network bad;
    bad.weights = Eigen::MatrixXd::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) bad.weights(i, j) = 0.6;
    CHECK_THROWS_WITH_AS(pcor_to_covariance(bad),
                         doctest::Contains("smallest eigenvalue"),
                         EstimationError);
  }
}

TEST_CASE("sample_mvn") {
  Network ring = chain_network(10, 0.25, 0.5, 5);
  Eigen::MatrixXd cov = pcor_to_covariance(ring);

  SUBCASE("deterministic in the seed") {
    CHECK(sample_mvn(cov, 50, 9) == sample_mvn(cov, 50, 9));
    CHECK(sample_mvn(cov, 50, 9) != sample_mvn(cov, 50, 10));
  }

  SUBCASE("identity covariance: sample correlations stay in the MC band") {
    Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
    Eigen::MatrixXd x = sample_mvn(eye, 10000, 4);
    Dataset d = make_dataset(x);
    auto m = correlation_matrix(d, CorrelationMethod::Pearson);
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        CHECK(std::abs(m.entries(i, j)) < 4.0 / std::sqrt(10000.0));
  }

  SUBCASE("sample covariance converges to the input") {
    Eigen::MatrixXd x = sample_mvn(cov, 10000, 4);
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd sample_cov =
        centered.transpose() * centered / (x.rows() - 1.0);
    CHECK((sample_cov - cov).cwiseAbs().maxCoeff() < 0.05);
  }
}

TEST_CASE("ordinalize") {
  Network ring = chain_network(6, 0.25, 0.5, 5);
  Eigen::MatrixXd x = sample_mvn(pcor_to_covariance(ring), 500, 21);

  Dataset d = ordinalize(x, 4, 13);
  CHECK(d.n() == 500);
  CHECK(d.p() == 6);
  for (int c = 0; c < 6; ++c) {
    CHECK(d.variable_types[static_cast<std::size_t>(c)].is_ordinal());
    std::set<double> seen;
    for (int r = 0; r < 500; ++r) {
      double v = d.values(r, c);
      CHECK(v == std::floor(v));
      CHECK(v >= 0.0);
      CHECK(v <= 3.0);
      seen.insert(v);
    }
    CHECK(seen.size() == 4);  // every level occupied after redraws
  }

  // rank order within a variable is preserved
  for (int r1 = 0; r1 < 100; ++r1)
    for (int r2 = 0; r2 < 100; ++r2)
      if (x(r1, 0) < x(r2, 0)) CHECK(d.values(r1, 0) <= d.values(r2, 0));

  Dataset binary = ordinalize(x, 2, 13);
  for (int r = 0; r < 500; ++r) {
    CHECK(binary.values(r, 0) >= 0.0);
    CHECK(binary.values(r, 0) <= 1.0);
  }

  CHECK(ordinalize(x, 4, 13).values == d.values);  // deterministic
}

TEST_CASE("run_study smoke: cs study shape and determinism") {
  SimulationConfig config = default_config(StudyKind::Cs);
  config.replications = 2;
  config.n_boots = 40;
  config.sample_sizes = {120};
  config.rewiring = {0.0, 1.0};
  config.base_seed = 77;
  config.drop_levels = {0.1, 0.3, 0.5};
  // pearson input keeps the smoke test fast
  config.estimator.options.correlation_method = CorrelationMethod::Pearson;

  auto result = run_study(config, StudyKind::Cs);
  CHECK(result.total_replications == 4);
  CHECK(result.failures.empty());
  // 3 cs metrics per (condition, replication)
  CHECK(result.records.size() == 4 * 3);
  for (const auto& rec : result.records) {
    CHECK(rec.value >= 0.0);
    CHECK(rec.value <= 0.5);
    CHECK(rec.metric.substr(0, 3) == "cs_");
  }
  auto again = run_study(config, StudyKind::Cs);
  REQUIRE(again.records.size() == result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    CHECK(again.records[i].value == result.records[i].value);
    CHECK(again.records[i].metric == result.records[i].metric);
  }
}

TEST_CASE("run_study smoke: edge-diff forces the no-rewiring design") {
  SimulationConfig config = default_config(StudyKind::EdgeDiff);
  CHECK(config.edge_weight == 0.3);
  config.replications = 2;
  config.n_boots = 60;
  config.sample_sizes = {150};
  config.rewiring = {0.0, 0.5};  // ignored for this study
  config.base_seed = 3;
  config.alphas = {0.05};
  config.estimator.options.correlation_method = CorrelationMethod::Pearson;

  auto result = run_study(config, StudyKind::EdgeDiff);
  CHECK(result.total_replications == 2);
  for (const auto& rec : result.records) {
    CHECK(rec.metric == "edge_rejection_rate");
    CHECK(rec.rewiring == 0.0);
    CHECK(rec.value >= 0.0);
    CHECK(rec.value <= 1.0);
  }
  REQUIRE(!result.aggregates.empty());
  CHECK(result.aggregates.front().count == 2);
}

TEST_CASE("run_study smoke: centrality-diff records all three indices") {
  SimulationConfig config = default_config(StudyKind::CentralityDiff);
  config.replications = 1;
  config.n_boots = 40;
  config.sample_sizes = {120};
  config.rewiring = {0.0};
  config.base_seed = 5;
  config.estimator.options.correlation_method = CorrelationMethod::Pearson;

  auto result = run_study(config, StudyKind::CentralityDiff);
  REQUIRE(result.records.size() == 3);
  std::set<std::string> metrics;
  for (const auto& rec : result.records) metrics.insert(rec.metric);
  CHECK(metrics == std::set<std::string>{"strength_rejection_rate",
                                         "closeness_rejection_rate",
                                         "betweenness_rejection_rate"});
}

TEST_CASE("run_study logs, excludes and counts failed replications") {
  SimulationConfig config = default_config(StudyKind::Cs);
  config.replications = 2;
  config.n_boots = 20;
  config.sample_sizes = {24};  // case-dropping leaves < 20 cases: fails
  config.rewiring = {0.0};
  config.drop_levels = {0.1, 0.5};
  config.base_seed = 8;
  config.estimator.options.correlation_method = CorrelationMethod::Pearson;

  auto result = run_study(config, StudyKind::Cs);
  CHECK(result.total_replications == 2);
  CHECK(result.failures.size() == 2);
  CHECK(result.records.empty());
  for (const auto& f : result.failures) CHECK_FALSE(f.reason.empty());
}
