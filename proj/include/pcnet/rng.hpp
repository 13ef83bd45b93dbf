#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pcnet {

// Stream tags keep the RNG streams of independent pipeline stages disjoint.
// A replicate's stream depends only on (base_seed, tag, indices...), never on
// scheduling, so results are identical for any worker count.
enum class RngStream : std::uint64_t {
  NonparametricBoot = 1,
  ParametricBoot = 2,
  CaseDropBoot = 3,
  NodeDropBoot = 4,
  ChainNetwork = 5,
  Rewire = 6,
  SampleMvn = 7,
  Ordinalize = 8,
  Simulation = 9,
  Layout = 10,
};

inline std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(parts.size() * 2);
  for (std::uint64_t v : parts) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffull));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

inline std::mt19937_64 make_rng(std::uint64_t base_seed, RngStream stream,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
  return make_rng({base_seed, static_cast<std::uint64_t>(stream), a, b});
}

}  // namespace pcnet
