#pragma once

#include <cstdint>

namespace lrdemp {

/// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replication `rep` at sample size `n`. Depends only on its arguments,
/// so replications can run in any order or on any thread.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n,
                                    std::uint64_t rep) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ n);
  return splitmix64(s ^ (rep + 0x632be59bd9b4e019ULL));
}

}  // namespace lrdemp
