#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pcnet/network.hpp"

namespace pcnet {

// Distance ties are resolved with a relative tolerance so path counts are
// stable under floating-point summation order. Infinite distances only tie
// with themselves.
inline bool distance_close(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <=
         1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Per-node indices plus z-scores; z uses the population (divide-by-p)
// standard deviation and is all-zero for constant indices.
struct CentralityTable {
  std::vector<std::string> node_labels;
  Eigen::VectorXd strength;
  Eigen::VectorXd closeness;
  Eigen::VectorXd betweenness;
  Eigen::VectorXd z_strength;
  Eigen::VectorXd z_closeness;
  Eigen::VectorXd z_betweenness;
};

double strength(const Network& network, int node);
double closeness(const Network& network, int node);
double betweenness(const Network& network, int node);

Eigen::VectorXd strength_all(const Network& network);
Eigen::VectorXd closeness_all(const Network& network);
Eigen::VectorXd betweenness_all(const Network& network);

// Dijkstra distances with edge length 1/|weight|; zero weights are
// non-edges, unreachable pairs are +infinity, diagonal zero.
Eigen::MatrixXd shortest_distances(const Network& network);

CentralityTable centrality_table(const Network& network);

Eigen::VectorXd z_scores(const Eigen::VectorXd& raw);

}  // namespace pcnet
