#pragma once

#include <array>
#include <cstdint>

namespace dynabc {

/// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
/// Stateless: every draw is a pure function of (key, counter), so
/// trajectories, steps and modes can be sampled in any order, on any
/// thread, with identical results.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Addresses one scalar draw inside a run. Streams partition the draw
/// space: trajectory streams use ids below 2^30, internal consumers
/// (initial data, verification sampling) use ids above.
struct DrawKey {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;   // trajectory id or reserved stream
  std::uint32_t step = 0;     // time-step index
  std::uint32_t slot = 0;     // mode index / node index
  std::uint32_t lane = 0;     // several draws per slot
};

// uniform on [0, 1)
double uniform_at(const DrawKey& k);
// standard normal via the Box-Muller transform, one value per key
double normal_at(const DrawKey& k);

// reserved stream ids (outside the trajectory range)
inline constexpr std::uint32_t kStreamInitial = 0x40000000u;
inline constexpr std::uint32_t kStreamVerify = 0x40000001u;
inline constexpr std::uint32_t kBoundarySlotBit = 0x80000000u;

}  // namespace dynabc
