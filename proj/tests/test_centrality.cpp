#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pcnet/centrality.hpp"
#include "pcnet/errors.hpp"
#include "pcnet/simgen.hpp"

using namespace pcnet;

namespace {

Network make_net(const Eigen::MatrixXd& w) {
  Network net;
  net.weights = w;
  for (int i = 0; i < w.rows(); ++i)
    net.node_labels.push_back("N" + std::to_string(i + 1));
  return net;
}

// path A - B - C with the given weights
Network path3(double wab, double wbc) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = wab;
  w(1, 2) = w(2, 1) = wbc;
  return make_net(w);
}

}  // namespace

TEST_CASE("strength") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 0.3;
  w(0, 2) = w(2, 0) = -0.2;
  Network net = make_net(w);
  CHECK(strength(net, 0) == doctest::Approx(0.5));
  CHECK(strength(net, 1) == doctest::Approx(0.3));
  CHECK_THROWS_AS(strength(net, 3), UsageError);
  CHECK_THROWS_AS(strength(net, -1), UsageError);

  // isolated node
  Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 0.4;
  CHECK(strength(make_net(iso), 2) == 0.0);
}

TEST_CASE("shortest_distances") {
  SUBCASE("empty network: all off-diagonal infinite") {
    Network net = make_net(Eigen::MatrixXd::Zero(3, 3));
    auto d = shortest_distances(net);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j)
          CHECK(d(i, j) == 0.0);
        else
          CHECK(std::isinf(d(i, j)));
      }
  }
  SUBCASE("two-hop path") {
    auto d = shortest_distances(path3(0.5, 0.5));
    CHECK(d(0, 2) == doctest::Approx(4.0));  // 2 + 2
    CHECK(d(0, 1) == doctest::Approx(2.0));
  }
  SUBCASE("strong shortcut beats weak two-hop") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = w(1, 0) = 0.1;
    w(1, 2) = w(2, 1) = 0.1;
    w(0, 2) = w(2, 0) = 0.5;
    auto d = shortest_distances(make_net(w));
    CHECK(d(0, 2) == doctest::Approx(2.0));  // direct, not 20
  }
}

TEST_CASE("closeness") {
  Network net = path3(1.0 - 1e-12, 1.0 - 1e-12);
  // unit-ish lengths: closeness(B) = 2/2, closeness(A) = 2/3
  CHECK(closeness(net, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(closeness(net, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 0.4;
  CHECK(closeness(make_net(iso), 2) == 0.0);
}

TEST_CASE("betweenness") {
  CHECK(betweenness(path3(0.5, 0.25), 1) == doctest::Approx(1.0));
  CHECK(betweenness(path3(0.5, 0.25), 0) == doctest::Approx(0.0));

  // complete network with equal weights: every shortest path is direct
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 4, 0.3);
  w.diagonal().setZero();
  Network complete = make_net(w);
  for (int v = 0; v < 4; ++v) CHECK(betweenness(complete, v) == 0.0);

  // diamond with exact tie: two geodesics A-B-D and A-C-D split credit
  Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(4, 4);
  dw(0, 1) = dw(1, 0) = 0.5;
  dw(1, 3) = dw(3, 1) = 0.5;
  dw(0, 2) = dw(2, 0) = 0.5;
  dw(2, 3) = dw(3, 2) = 0.5;
  Network diamond = make_net(dw);
  CHECK(betweenness(diamond, 1) == doctest::Approx(0.5));
  CHECK(betweenness(diamond, 2) == doctest::Approx(0.5));
}

TEST_CASE("ring: all centralities equal, z-scores zero") {
  Network ring = chain_network(8, 0.3, 0.5, 123);
  auto table = centrality_table(ring);
  for (int v = 1; v < 8; ++v) {
    CHECK(table.strength(v) == doctest::Approx(table.strength(0)).epsilon(1e-12));
    CHECK(table.closeness(v) ==
          doctest::Approx(table.closeness(0)).epsilon(1e-12));
    CHECK(table.betweenness(v) ==
          doctest::Approx(table.betweenness(0)).epsilon(1e-9));
  }
  CHECK(table.strength(0) == doctest::Approx(0.6));  // 2 * |w|
  CHECK(table.z_strength.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(table.z_closeness.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(table.z_betweenness.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("z-scores have mean 0 and population sd 1 when nonconstant") {
  Eigen::VectorXd raw(5);
  raw << 1.0, 3.0, 0.5, 2.0, 7.0;
  Eigen::VectorXd z = z_scores(raw);
  CHECK(z.mean() == doctest::Approx(0.0).epsilon(1e-12));
  double var = z.array().square().sum() / 5.0;
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Brandes and Dijkstra match exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> psize(3, 6);
  for (int rep = 0; rep < 60; ++rep) {
    int p = psize(rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (unit(rng) < 0.55) {
          double v = 0.05 + 0.9 * unit(rng);
          if (unit(rng) < 0.4) v = -v;
          w(i, j) = v;
          w(j, i) = v;
        }
      }
    }
    Network net = make_net(w);
    auto oracle = oracles::enumerate_centrality(w);
    auto dist = shortest_distances(net);
    auto bet = betweenness_all(net);
    auto clo = closeness_all(net);
    for (int i = 0; i < p; ++i) {
      CHECK(std::abs(bet(i) - oracle.betweenness(i)) < 1e-9);
      CHECK(std::abs(clo(i) - oracle.closeness(i)) < 1e-9);
      for (int j = 0; j < p; ++j) {
        if (std::isinf(oracle.dist(i, j)))
          CHECK(std::isinf(dist(i, j)));
        else
          CHECK(std::abs(dist(i, j) - oracle.dist(i, j)) < 1e-9);
      }
    }
  }
}

TEST_CASE("centrality invariances") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      if (unit(rng) < 0.7) {
        double v = 0.1 + 0.5 * unit(rng);
        w(i, j) = v;
        w(j, i) = v;
      }
  Network net = make_net(w);

  // sign flips never matter
  Eigen::MatrixXd flipped = w;
  flipped(0, 1) = -flipped(0, 1);
  flipped(1, 0) = -flipped(1, 0);
  Network net_flip = make_net(flipped);
  CHECK((strength_all(net) - strength_all(net_flip)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((betweenness_all(net) - betweenness_all(net_flip))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK((closeness_all(net) - closeness_all(net_flip)).cwiseAbs().maxCoeff() <
        1e-14);

  // uniform rescaling: betweenness unchanged, strength scales, argmax stable
  Network scaled = make_net((0.5 * w).eval());
  CHECK((betweenness_all(net) - betweenness_all(scaled)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((strength_all(scaled) - 0.5 * strength_all(net)).cwiseAbs().maxCoeff() <
        1e-12);
  int argmax_orig, argmax_scaled;
  closeness_all(net).maxCoeff(&argmax_orig);
  closeness_all(scaled).maxCoeff(&argmax_scaled);
  CHECK(argmax_orig == argmax_scaled);
}
