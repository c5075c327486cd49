#include "dynabc/rng.hpp"

#include <cmath>

namespace dynabc {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& ctr,
                       const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return counter;
}

namespace {

inline std::array<std::uint32_t, 4> block_for(const DrawKey& k) {
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(k.seed),
      static_cast<std::uint32_t>(k.seed >> 32),
  };
  // lane mixed into the high word of the stream half so that
  // (stream, step, slot) triples stay fully separated
  const std::array<std::uint32_t, 4> ctr = {k.step, k.slot, k.stream, k.lane};
  return philox4x32(ctr, key);
}

inline double u01_from(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

double uniform_at(const DrawKey& k) {
  const auto w = block_for(k);
  return u01_from(w[0], w[1]);
}

double normal_at(const DrawKey& k) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const auto w = block_for(k);
  // u1 in (0, 1] so the log never sees zero
  const double u1 = 1.0 - u01_from(w[0], w[1]);
  const double u2 = u01_from(w[2], w[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace dynabc
