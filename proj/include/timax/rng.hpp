#pragma once

#include <cstdint>

namespace timax {

// SplitMix64 finalizer. Used both as a seed expander and as a stateless
// counter-based hash for per-(run, edge) coin flips.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Key for the coin stream of one Monte Carlo run. Every run's stream is a
/// pure function of (master seed, run index), so runs can be evaluated in any
/// order or on any worker and still produce the same draws.
constexpr std::uint64_t run_key(std::uint64_t master_seed, std::uint64_t run) noexcept {
  return splitmix64(splitmix64(master_seed) ^ (run * 0xd1b54a32d192ed03ULL));
}

/// Uniform [0,1) value attached to `edge` in the run identified by `key`.
/// An edge with probability p is live in that run iff the coin is < p, so two
/// probability functions p <= p' evaluated on the same run share their coins
/// and the live set under p is a subset of the live set under p'.
constexpr double edge_coin(std::uint64_t key, std::uint64_t edge) noexcept {
  return to_unit_interval(splitmix64(key ^ (edge * 0x9fb21c651e98df25ULL)));
}

/// Derive an independent 64-bit seed for a named sub-task from a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) noexcept {
  return splitmix64(master_seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace timax
