#include "pcnet/centrality.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "pcnet/errors.hpp"

namespace pcnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_node(const Network& network, int node) {
  if (node < 0 || node >= network.p())
    throw UsageError("node index out of range");
}

struct DijkstraState {
  std::vector<double> dist;
  std::vector<double> sigma;               // geodesic counts
  std::vector<std::vector<int>> preds;     // predecessors on geodesics
  std::vector<int> settled_order;
};

DijkstraState dijkstra(const Network& network, int source) {
  const int p = network.p();
  DijkstraState st;
  st.dist.assign(static_cast<std::size_t>(p), kInf);
  st.sigma.assign(static_cast<std::size_t>(p), 0.0);
  st.preds.assign(static_cast<std::size_t>(p), {});
  st.dist[static_cast<std::size_t>(source)] = 0.0;
  st.sigma[static_cast<std::size_t>(source)] = 1.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  std::vector<bool> settled(static_cast<std::size_t>(p), false);
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [dv, v] = queue.top();
    queue.pop();
    if (settled[static_cast<std::size_t>(v)]) continue;
    settled[static_cast<std::size_t>(v)] = true;
    st.settled_order.push_back(v);
    for (int w = 0; w < p; ++w) {
      double weight = network.weights(v, w);
      if (w == v || weight == 0.0) continue;
      double nd = dv + 1.0 / std::abs(weight);
      double dw = st.dist[static_cast<std::size_t>(w)];
      if (distance_close(nd, dw)) {
        st.sigma[static_cast<std::size_t>(w)] +=
            st.sigma[static_cast<std::size_t>(v)];
        st.preds[static_cast<std::size_t>(w)].push_back(v);
      } else if (nd < dw) {
        st.dist[static_cast<std::size_t>(w)] = nd;
        st.sigma[static_cast<std::size_t>(w)] =
            st.sigma[static_cast<std::size_t>(v)];
        st.preds[static_cast<std::size_t>(w)] = {v};
        queue.emplace(nd, w);
      }
    }
  }
  return st;
}

}  // namespace

Eigen::MatrixXd shortest_distances(const Network& network) {
  const int p = network.p();
  Eigen::MatrixXd out(p, p);
  for (int s = 0; s < p; ++s) {
    auto st = dijkstra(network, s);
    for (int t = 0; t < p; ++t) out(s, t) = st.dist[static_cast<std::size_t>(t)];
  }
  return out;
}

Eigen::VectorXd strength_all(const Network& network) {
  return network.weights.cwiseAbs().rowwise().sum();
}

double strength(const Network& network, int node) {
  check_node(network, node);
  return network.weights.row(node).cwiseAbs().sum();
}

Eigen::VectorXd closeness_all(const Network& network) {
  const int p = network.p();
  Eigen::MatrixXd dist = shortest_distances(network);
  Eigen::VectorXd out(p);
  for (int v = 0; v < p; ++v) {
    int reachable = 0;
    double total = 0.0;
    for (int t = 0; t < p; ++t) {
      if (std::isinf(dist(v, t))) continue;
      ++reachable;  // includes v itself (distance 0)
      total += dist(v, t);
    }
    out(v) = (reachable <= 1 || total <= 0.0)
                 ? 0.0
                 : static_cast<double>(reachable - 1) / total;
  }
  return out;
}

double closeness(const Network& network, int node) {
  check_node(network, node);
  return closeness_all(network)(node);
}

Eigen::VectorXd betweenness_all(const Network& network) {
  const int p = network.p();
  Eigen::VectorXd bc = Eigen::VectorXd::Zero(p);
  for (int s = 0; s < p; ++s) {
    auto st = dijkstra(network, s);
    std::vector<double> delta(static_cast<std::size_t>(p), 0.0);
    for (auto it = st.settled_order.rbegin(); it != st.settled_order.rend();
         ++it) {
      int w = *it;
      for (int v : st.preds[static_cast<std::size_t>(w)]) {
        delta[static_cast<std::size_t>(v)] +=
            st.sigma[static_cast<std::size_t>(v)] /
            st.sigma[static_cast<std::size_t>(w)] *
            (1.0 + delta[static_cast<std::size_t>(w)]);
      }
      if (w != s) bc(w) += delta[static_cast<std::size_t>(w)];
    }
  }
  // Accumulation above counts ordered pairs; report unordered pairs.
  return bc / 2.0;
}

double betweenness(const Network& network, int node) {
  check_node(network, node);
  return betweenness_all(network)(node);
}

Eigen::VectorXd z_scores(const Eigen::VectorXd& raw) {
  const auto p = raw.size();
  double mean = raw.mean();
  double var = (raw.array() - mean).square().sum() / static_cast<double>(p);
  double sd = std::sqrt(var);
  if (sd < 1e-14 * std::max(1.0, std::abs(mean)))
    return Eigen::VectorXd::Zero(p);
  return (raw.array() - mean) / sd;
}

CentralityTable centrality_table(const Network& network) {
  CentralityTable table;
  table.node_labels = network.node_labels;
  table.strength = strength_all(network);
  table.closeness = closeness_all(network);
  table.betweenness = betweenness_all(network);
  table.z_strength = z_scores(table.strength);
  table.z_closeness = z_scores(table.closeness);
  table.z_betweenness = z_scores(table.betweenness);
  return table;
}

}  // namespace pcnet
