#include <doctest.h>

#include "pcnet/bootstrap.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/simgen.hpp"

using namespace pcnet;

namespace {

// Small continuous dataset from a known ring; Pearson keeps replicates fast.
Dataset ring_data(int n, std::uint64_t seed, int p = 6) {
  Network truth = chain_network(p, 0.3, 0.5, seed);
  return make_dataset(sample_mvn(pcor_to_covariance(truth), n, seed + 1));
}

EstimatorConfig fast_estimator() {
  EstimatorConfig config;
  config.options.correlation_method = CorrelationMethod::Pearson;
  config.options.n_lambda = 30;
  return config;
}

}  // namespace

TEST_CASE("nonparametric bootstrap: determinism and shape") {
  Dataset data = ring_data(150, 11);
  auto config = fast_estimator();
  auto a = nonparametric_boot(data, config, 50, 99, 1);
  auto b = nonparametric_boot(data, config, 50, 99, 4);  // worker count differs
  CHECK(a.n_successful() == b.n_successful());
  REQUIRE(a.replicate_ids == b.replicate_ids);
  for (int i = 0; i < a.n_successful(); ++i) {
    CHECK(a.edge_weights[static_cast<std::size_t>(i)] ==
          b.edge_weights[static_cast<std::size_t>(i)]);
    CHECK(a.strengths[static_cast<std::size_t>(i)] ==
          b.strengths[static_cast<std::size_t>(i)]);
  }
  auto c = nonparametric_boot(data, config, 50, 100, 1);
  bool any_different = false;
  for (int i = 0; i < std::min(a.n_successful(), c.n_successful()); ++i)
    if (a.edge_weights[static_cast<std::size_t>(i)] !=
        c.edge_weights[static_cast<std::size_t>(i)])
      any_different = true;
  CHECK(any_different);  // different seed, different replicates

  CHECK(a.n_boots == 50);
  CHECK(a.n_successful() + static_cast<int>(a.failures.size()) == 50);
  CHECK(a.type == BootstrapType::Nonparametric);
  CHECK_FALSE(a.shrinkage_warning);
  CHECK(a.reference.p() == 6);
  CHECK_THROWS_AS(nonparametric_boot(data, config, 1, 5), UsageError);
}

TEST_CASE("parametric bootstrap around an empty network stays mostly empty") {
  Network empty;
  empty.weights = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i)
    empty.node_labels.push_back("V" + std::to_string(i + 1));
  auto config = fast_estimator();
  auto result = parametric_boot(empty, 500, config, 30, 7, 1);
  CHECK(result.type == BootstrapType::Parametric);
  CHECK(result.shrinkage_warning);  // EBICglasso estimator implies shrinkage
  int total_edges = 0, zero_edges = 0;
  for (const auto& edges : result.edge_weights) {
    for (int e = 0; e < edges.size(); ++e) {
      ++total_edges;
      if (edges(e) == 0.0) ++zero_edges;
    }
  }
  CHECK(zero_edges >= static_cast<int>(0.9 * total_edges));

  // equal seeds, equal output
  auto again = parametric_boot(empty, 500, config, 30, 7, 2);
  CHECK(again.replicate_ids == result.replicate_ids);
  for (int i = 0; i < result.n_successful(); ++i)
    CHECK(again.edge_weights[static_cast<std::size_t>(i)] ==
          result.edge_weights[static_cast<std::size_t>(i)]);
}

TEST_CASE("parametric bootstrap requires a PD implied precision") {
  Network bad;
  bad.weights = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) bad.weights(i, j) = 0.6;
  CHECK_THROWS_AS(parametric_boot(bad, 100, fast_estimator(), 10, 1),
                  EstimationError);
}

TEST_CASE("edge_ci") {
  Dataset data = ring_data(200, 3);
  auto result = nonparametric_boot(data, fast_estimator(), 100, 17, 1);

  SUBCASE("alpha floor") {
    CHECK_THROWS_AS(edge_ci(result, 0.01), UsageError);  // 2/100 = 0.02
    CHECK_NOTHROW(edge_ci(result, 0.02));
  }

  SUBCASE("interval properties and monotonicity in alpha") {
    auto wide = edge_ci(result, 0.02);
    auto narrow = edge_ci(result, 0.5);
    REQUIRE(wide.size() == narrow.size());
    for (std::size_t e = 0; e < wide.size(); ++e) {
      CHECK(wide[e].lower <= narrow[e].lower + 1e-12);
      CHECK(wide[e].upper >= narrow[e].upper - 1e-12);
      CHECK(wide[e].lower <= wide[e].upper);
    }
  }

  SUBCASE("alpha = 2/n_boots pins the CI to the two most extreme replicates") {
    auto cis = edge_ci(result, 2.0 / result.n_boots);
    int e = 0;
    double lo = 1e300, hi = -1e300;
    for (int b = 0; b < result.n_successful(); ++b) {
      lo = std::min(lo, result.edge_weights[static_cast<std::size_t>(b)](e));
      hi = std::max(hi, result.edge_weights[static_cast<std::size_t>(b)](e));
    }
    // type-6 at 1/N interpolates just inside the extreme samples
    CHECK(cis[0].lower >= lo - 1e-12);
    CHECK(cis[0].upper <= hi + 1e-12);
    double span = hi - lo;
    CHECK(cis[0].lower <= lo + 0.02 * span + 1e-12);
    CHECK(cis[0].upper >= hi - 0.02 * span - 1e-12);
  }

  SUBCASE("degenerate distribution: CI collapses to the point") {
    BootstrapResult fake = result;
    for (auto& edges : fake.edge_weights)
      for (int e = 0; e < edges.size(); ++e) edges(e) = 0.25;
    auto cis = edge_ci(fake, 0.05);
    for (const auto& ci : cis) {
      CHECK(ci.lower == doctest::Approx(0.25));
      CHECK(ci.upper == doctest::Approx(0.25));
    }
  }
}

TEST_CASE("case-dropping bootstrap and CS coefficient") {
  Dataset data = ring_data(400, 23);
  auto config = fast_estimator();
  std::vector<double> levels = {0.1, 0.3, 0.5};
  auto subset = case_dropping_boot(data, config, levels, 60, 5, 1);
  CHECK(subset.reps_per_level == 20);
  CHECK_FALSE(subset.node_dropping);
  CHECK(subset.drop_levels == levels);
  for (const auto& rep : subset.replicates) {
    CHECK(rep.retained ==
          static_cast<int>(std::ceil(
              (1.0 - levels[static_cast<std::size_t>(rep.level_index)]) * 400)));
    CHECK(rep.strength >= -1.0);
    CHECK(rep.strength <= 1.0);
  }

  // determinism across worker counts
  auto again = case_dropping_boot(data, config, levels, 60, 5, 3);
  REQUIRE(again.replicates.size() == subset.replicates.size());
  for (std::size_t i = 0; i < subset.replicates.size(); ++i)
    CHECK(again.replicates[i].strength == subset.replicates[i].strength);

  // too-aggressive level errors up front
  CHECK_THROWS_AS(case_dropping_boot(data, config, {0.1, 0.999}, 60, 5, 1),
                  DataError);
  CHECK_THROWS_AS(case_dropping_boot(data, config, {0.5}, 60, 5, 1),
                  UsageError);

  SUBCASE("cs_coefficient boundary rules") {
    SubsetBootstrapResult fake = subset;
    fake.replicates.clear();
    // all correlations 1 at every level: CS = max level
    for (int li = 0; li < 3; ++li)
      for (int rep = 0; rep < 20; ++rep)
        fake.replicates.push_back({li, rep, 100, 1.0, 1.0, 1.0, 1.0});
    auto cs = cs_coefficient(fake);
    for (const auto& c : cs) CHECK(c.value == doctest::Approx(0.5));

    // no level reaches the probability: CS = 0
    for (auto& rep : fake.replicates)
      rep.strength = rep.closeness = rep.betweenness = rep.edge = 0.1;
    for (const auto& c : cs_coefficient(fake)) CHECK(c.value == 0.0);

    // only levels below the first failing level count
    for (auto& rep : fake.replicates) {
      double good = rep.level_index == 1 ? 0.2 : 0.9;
      rep.strength = rep.closeness = rep.betweenness = rep.edge = good;
    }
    for (const auto& c : cs_coefficient(fake))
      CHECK(c.value == doctest::Approx(0.1));

    // monotone in threshold
    auto strict_threshold = cs_coefficient(subset, 0.9, 0.95);
    auto loose_threshold = cs_coefficient(subset, 0.3, 0.95);
    for (std::size_t i = 0; i < strict_threshold.size(); ++i)
      CHECK(strict_threshold[i].value <= loose_threshold[i].value + 1e-12);
  }
}

TEST_CASE("node-dropping bootstrap") {
  Dataset data = ring_data(300, 31, 10);
  auto config = fast_estimator();
  std::vector<double> levels = {0.2, 0.5};
  auto subset = node_dropping_boot(data, config, levels, 20, 9, 1);
  CHECK(subset.node_dropping);
  for (const auto& rep : subset.replicates) {
    int expected = rep.level_index == 0 ? 8 : 5;
    CHECK(rep.retained == expected);
  }
  // dropping below 3 nodes is rejected
  CHECK_THROWS_AS(node_dropping_boot(data, config, {0.2, 0.9}, 20, 9, 1),
                  DataError);
}

TEST_CASE("difference_test") {
  Dataset data = ring_data(250, 41);
  auto result = nonparametric_boot(data, fast_estimator(), 80, 13, 1);

  SUBCASE("element vs itself: CI (0,0), flagged, not significant") {
    Element node{2, -1};
    auto test = difference_test(result, node, node, Statistic::Strength, 0.05);
    CHECK(test.ci_lower == 0.0);
    CHECK(test.ci_upper == 0.0);
    CHECK_FALSE(test.significant);
    CHECK(test.identical_elements);
  }

  SUBCASE("negation-reversal symmetry") {
    Element a{0, -1}, b{3, -1};
    for (Statistic s : {Statistic::Strength, Statistic::Closeness,
                        Statistic::Betweenness}) {
      auto ab = difference_test(result, a, b, s, 0.05);
      auto ba = difference_test(result, b, a, s, 0.05);
      CHECK(ab.ci_lower == doctest::Approx(-ba.ci_upper).epsilon(1e-12));
      CHECK(ab.ci_upper == doctest::Approx(-ba.ci_lower).epsilon(1e-12));
      CHECK(ab.significant == ba.significant);
    }
  }

  SUBCASE("edge elements and validation") {
    Element e1{0, 1}, e2{1, 2};
    auto test = difference_test(result, e1, e2, Statistic::Edge, 0.05);
    CHECK(test.ci_lower <= test.ci_upper);
    CHECK(test.significant == (test.ci_lower > 0.0 || test.ci_upper < 0.0));

    Element node{0, -1};
    CHECK_THROWS_AS(difference_test(result, node, e2, Statistic::Edge, 0.05),
                    UsageError);
    CHECK_THROWS_AS(difference_test(result, e1, e2, Statistic::Strength, 0.05),
                    UsageError);
    CHECK_THROWS_AS(difference_test(result, e1, e2, Statistic::Edge, 0.001),
                    UsageError);  // alpha floor 2/80
  }
}

TEST_CASE("difference_matrix") {
  Dataset data = ring_data(250, 51);
  auto result = nonparametric_boot(data, fast_estimator(), 60, 29, 1);

  auto strength = difference_matrix(result, Statistic::Strength, 0.05, false);
  const int p = result.reference.p();
  REQUIRE(static_cast<int>(strength.elements.size()) == p);
  CHECK(strength.significance == strength.significance.transpose());
  for (int i = 0; i < p; ++i) CHECK(strength.significance(i, i) == -1);

  auto edges_all = difference_matrix(result, Statistic::Edge, 0.05, false);
  CHECK(static_cast<int>(edges_all.elements.size()) ==
        result.reference.n_candidate_edges());
  auto edges_nz = difference_matrix(result, Statistic::Edge, 0.05, true);
  CHECK(static_cast<int>(edges_nz.elements.size()) ==
        result.reference.n_nonzero_edges());
}

TEST_CASE("parse_element") {
  Dataset data = ring_data(150, 61, 4);
  auto result = nonparametric_boot(data, fast_estimator(), 20, 3, 1);
  const Network& net = result.reference;

  Element node = parse_element("3", net, Statistic::Strength);
  CHECK(node.node_a == 2);
  CHECK_FALSE(node.is_edge());

  Element named = parse_element("V2", net, Statistic::Closeness);
  CHECK(named.node_a == 1);

  Element edge = parse_element("1-2", net, Statistic::Edge);
  CHECK(edge.node_a == 0);
  CHECK(edge.node_b == 1);
  Element swapped = parse_element("2-1", net, Statistic::Edge);
  CHECK(swapped == edge);

  CHECK_THROWS_AS(parse_element("99", net, Statistic::Strength), UsageError);
  CHECK_THROWS_AS(parse_element("1-1", net, Statistic::Edge), UsageError);
  CHECK_THROWS_AS(parse_element("nope", net, Statistic::Edge), UsageError);
}

TEST_CASE("drop level defaults") {
  auto levels = default_drop_levels();
  REQUIRE(levels.size() == 10);
  CHECK(levels.front() == doctest::Approx(0.1));
  CHECK(levels.back() == doctest::Approx(0.75));
  for (std::size_t i = 1; i < levels.size(); ++i) {
    CHECK(levels[i] - levels[i - 1] ==
          doctest::Approx(0.65 / 9.0).epsilon(1e-12));
  }
}

TEST_CASE("all-pairs edge difference matrix on 20 nodes runs 17955 tests") {
  // p = 20 gives 190 candidate edges and C(190, 2) = 17,955 unique tests.
  const int p = 20;
  BootstrapResult fake;
  fake.type = BootstrapType::Nonparametric;
  fake.n_boots = 10;
  fake.reference.weights = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    fake.reference.node_labels.push_back("V" + std::to_string(i + 1));
  fake.reference_centrality = centrality_table(fake.reference);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 0.01);
  int n_edges = p * (p - 1) / 2;
  for (int b = 0; b < 10; ++b) {
    fake.replicate_ids.push_back(b);
    Eigen::VectorXd e(n_edges);
    for (int k = 0; k < n_edges; ++k) e(k) = g(rng);
    fake.edge_weights.push_back(e);
    fake.strengths.push_back(Eigen::VectorXd::Zero(p));
    fake.closenesses.push_back(Eigen::VectorXd::Zero(p));
    fake.betweennesses.push_back(Eigen::VectorXd::Zero(p));
  }
  auto matrix = difference_matrix(fake, Statistic::Edge, 0.2, false);
  REQUIRE(static_cast<int>(matrix.elements.size()) == 190);
  int unique_tests = 0;
  for (int a = 0; a < 190; ++a)
    for (int b = a + 1; b < 190; ++b)
      if (matrix.significance(a, b) >= 0) ++unique_tests;
  CHECK(unique_tests == 17955);
}

TEST_CASE("parametric bootstrap means track the reference ring weights") {
  Network truth = chain_network(6, 0.3, 0.0, 2);
  EstimatorConfig config;
  config.method = EstimatorMethod::Pcor;  // unbiased, no shrinkage
  config.options.correlation_method = CorrelationMethod::Pearson;
  auto result = parametric_boot(truth, 5000, config, 30, 21, 1);
  REQUIRE(result.n_successful() == 30);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(truth.n_candidate_edges());
  for (const auto& e : result.edge_weights) mean += e;
  mean /= static_cast<double>(result.n_successful());
  Eigen::VectorXd ref = edge_vector(truth);
  CHECK((mean - ref).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("cs_coefficient monotone in probability") {
  Dataset data = ring_data(400, 71);
  auto subset = case_dropping_boot(data, fast_estimator(), {0.1, 0.3, 0.5},
                                   60, 15, 1);
  auto strict = cs_coefficient(subset, 0.7, 0.99);
  auto loose = cs_coefficient(subset, 0.7, 0.5);
  for (std::size_t i = 0; i < strict.size(); ++i)
    CHECK(strict[i].value <= loose[i].value + 1e-12);
}
