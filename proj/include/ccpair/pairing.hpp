#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ccpair/error.hpp"

namespace ccpair {

struct CavPair {
  std::size_t head = 0;
  std::size_t tail = 0;
  std::size_t n_between = 0;

  bool operator==(const CavPair&) const = default;
};

struct PairingAssignment {
  std::vector<CavPair> pairs;
  std::vector<std::size_t> singles;  // CAVs running plain ACC

  bool operator==(const PairingAssignment&) const = default;
};

/// Greedy head-to-tail pairing. `is_cav` is indexed by vehicle index with 0
/// at the tail of the fleet, so the scan runs from the highest index down.
/// Two successive CAVs with 1..max_gap HVs between them form a pair and the
/// scan continues with the next unpaired CAV; otherwise the front CAV runs
/// alone.
inline PairingAssignment pair_cavs(const std::vector<bool>& is_cav, std::size_t max_gap) {
  if (max_gap < 1) throw Error(ErrorCode::kInvalidArgument, "pairing max gap must be >= 1");
  std::vector<std::size_t> cavs;
  for (std::size_t i = is_cav.size(); i-- > 0;) {
    if (is_cav[i]) cavs.push_back(i);
  }
  PairingAssignment out;
  std::size_t j = 0;
  while (j + 1 < cavs.size()) {
    const std::size_t front = cavs[j];
    const std::size_t back = cavs[j + 1];
    const std::size_t gap = front - back - 1;
    if (gap >= 1 && gap <= max_gap) {
      out.pairs.push_back({front, back, gap});
      j += 2;
    } else {
      out.singles.push_back(front);
      j += 1;
    }
  }
  if (j < cavs.size()) out.singles.push_back(cavs[j]);
  return out;
}

namespace detail {

// Unbiased draw from [0, bound) on top of mt19937_64, whose output sequence
// is fixed by the standard (std::uniform_int_distribution is not).
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

}  // namespace detail

/// round(penetration * n_vehicles) distinct indices, uniformly without
/// replacement; identical seeds give identical sets on every platform.
inline std::vector<std::size_t> allocate_cavs(std::size_t n_vehicles, double penetration,
                                              std::uint64_t rng_seed) {
  if (!(penetration >= 0.0 && penetration <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "penetration must lie in [0, 1]");
  }
  const auto count = static_cast<std::size_t>(std::llround(penetration * static_cast<double>(n_vehicles)));
  std::vector<std::size_t> pool(n_vehicles);
  for (std::size_t i = 0; i < n_vehicles; ++i) pool[i] = i;
  std::mt19937_64 gen(rng_seed);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(detail::bounded_draw(gen, n_vehicles - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace ccpair
