// Integer time base shared by the simulator and all metric computations.
#pragma once

#include <cstdint>
#include <stdexcept>

namespace atmbench {

// All event arithmetic runs on a single integer clock. One tick is one
// picosecond, so the 424-bit transmit time of a 53-octet cell is an exact
// integer for any realistic line rate and timestamps never drift.
// Configuration files and reports express times in nanoseconds; convert at
// that boundary only.
using Tick = std::int64_t;

inline constexpr Tick kTicksPerNs = 1000;
inline constexpr std::int64_t kPicosPerSecond = 1'000'000'000'000LL;

constexpr Tick ns_to_ticks(std::int64_t ns) { return ns * kTicksPerNs; }
constexpr double ticks_to_ns(Tick t) { return static_cast<double>(t) / kTicksPerNs; }

// Round-half-up division for non-negative operands. Used for every
// rate-to-time conversion so independent code paths agree bit-exactly.
inline Tick div_round_half_up(__int128 num, __int128 den) {
  if (den <= 0) throw std::invalid_argument("div_round_half_up: non-positive divisor");
  if (num < 0) throw std::invalid_argument("div_round_half_up: negative dividend");
  return static_cast<Tick>((num + den / 2) / den);
}

inline constexpr int kCellOctets = 53;
inline constexpr int kCellBits = kCellOctets * 8;  // 424

// Raw line rate of one link. cell_time is the time to clock one 53-octet
// cell onto the wire, rounded half-up to integer ticks.
struct LinkRate {
  std::int64_t bits_per_second = 0;
  Tick cell_time = 0;

  LinkRate() = default;
  explicit LinkRate(std::int64_t bps) : bits_per_second(bps) {
    if (bps <= 0) throw std::invalid_argument("LinkRate: bits_per_second must be positive");
    cell_time = div_round_half_up(static_cast<__int128>(kCellBits) * kPicosPerSecond, bps);
    if (cell_time <= 0) throw std::invalid_argument("LinkRate: rate too high for tick resolution");
  }

  bool operator==(const LinkRate&) const = default;
};

}  // namespace atmbench
