#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "pcnet/bootstrap.hpp"
#include "pcnet/centrality.hpp"
#include "pcnet/network.hpp"
#include "pcnet/simgen.hpp"

namespace pcnet::io {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit over the raw bytes, as a hex string.
std::string hash_file(const std::string& path);

// Every run directory carries exactly one manifest (command, options, input
// hashes, seed, tool version, timestamps, output list). Re-running with the
// recorded options reproduces byte-identical data outputs; the manifest's
// own timestamps are the only varying bytes.
void write_manifest(const std::string& dir, const std::string& command,
                    const nlohmann::json& options,
                    const std::vector<std::string>& input_files,
                    std::uint64_t base_seed,
                    const std::vector<std::string>& outputs,
                    const nlohmann::json& extra = {});
nlohmann::json read_manifest(const std::string& dir);

// Network exports: nonzero edge list, full matrix with header, provenance
// JSON.
void write_edge_list(const Network& network, const std::string& path);
void write_weight_matrix(const Network& network, const std::string& path);
void write_network_json(const Network& network, const std::string& path);
Network read_weight_matrix(const std::string& path);

void write_centrality(const CentralityTable& table, const std::string& path);

// Bootstrap run directory: replicates.csv (packed long format),
// reference_network.csv, failures inside the manifest extras.
void write_bootstrap_dir(const BootstrapResult& result, const std::string& dir,
                         const nlohmann::json& options,
                         const std::vector<std::string>& input_files,
                         std::vector<std::string> extra_outputs = {});
BootstrapResult read_bootstrap_dir(const std::string& dir);

void write_edge_ci(const std::vector<EdgeCi>& cis, const Network& reference,
                   const std::string& path);

void write_difference_matrix(const DifferenceMatrix& matrix,
                             const std::string& path);

// Long-format subset CSV: level, replicate, index, correlation (+ retained).
void write_subset_result(const SubsetBootstrapResult& result,
                         const std::string& path);
void write_cs_report(const std::vector<CsCoefficient>& coefficients,
                     const std::string& path);

void write_simulation_records(const SimulationResult& result,
                              const std::string& path);
void write_simulation_summary(const SimulationResult& result,
                              const std::string& path);

void write_difference_test_json(const DifferenceTestResult& result,
                                const std::string& path);

}  // namespace pcnet::io
