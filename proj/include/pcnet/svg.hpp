#pragma once

#include <cstdint>
#include <string>

#include "pcnet/bootstrap.hpp"
#include "pcnet/network.hpp"
#include "pcnet/simgen.hpp"

namespace pcnet::svg {

// Force-directed network drawing; the layout is seeded and cosmetic.
void network_plot(const Network& network, const std::string& path,
                  std::uint64_t seed);

// Per-edge bootstrapped CIs: edges ordered by reference weight (ties broken
// by bootstrap mean), gray CI band, red reference line, black mean line.
void edge_ci_plot(const std::vector<EdgeCi>& cis, const std::string& path);

// Mean subset correlation per index vs sampled-case proportion with the
// 2.5-97.5% quantile band.
void stability_plot(const SubsetBootstrapResult& result,
                    const std::string& path);

// Significance grid: black significant, gray not, diagonal hatched.
void difference_matrix_plot(const DifferenceMatrix& matrix,
                            const std::string& path);

// Study figures: CS boxplots per condition (cs), rejection-rate lines with
// 1.96 SE bands per alpha (edge-diff) or per index (centrality-diff).
void simulation_plot(const SimulationResult& result, const std::string& path);

}  // namespace pcnet::svg
