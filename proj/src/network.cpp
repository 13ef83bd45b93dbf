#include "pcnet/network.hpp"

#include <cmath>

#include "pcnet/errors.hpp"

namespace pcnet {

int Network::n_nonzero_edges() const {
  int count = 0;
  for (int i = 0; i < p(); ++i)
    for (int j = i + 1; j < p(); ++j)
      if (weights(i, j) != 0.0) ++count;
  return count;
}

void validate_network(const Network& network) {
  const auto& w = network.weights;
  if (w.rows() != w.cols()) throw DataError("network weights not square");
  if (!network.node_labels.empty() &&
      static_cast<int>(network.node_labels.size()) != w.rows())
    throw DataError("node label count does not match weight matrix");
  for (int i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) throw DataError("network diagonal must be zero");
    for (int j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != w(j, i)) throw DataError("network weights not symmetric");
      if (!(std::abs(w(i, j)) < 1.0))
        throw DataError("network weight magnitude must be < 1");
    }
  }
}

int edge_index(int i, int j, int p) {
  // Offset of row i's block in the row-major upper triangle.
  return i * p - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> edge_nodes(int index, int p) {
  for (int i = 0; i < p - 1; ++i) {
    int row_len = p - i - 1;
    if (index < row_len) return {i, i + 1 + index};
    index -= row_len;
  }
  return {-1, -1};
}

Eigen::VectorXd edge_vector(const Network& network) {
  int p = network.p();
  Eigen::VectorXd out(network.n_candidate_edges());
  int k = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) out(k++) = network.weights(i, j);
  return out;
}

}  // namespace pcnet
