#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "contactnet/error.hpp"

namespace contactnet {

using Seconds = double;

// Index of a time bin on a TimeGrid; bin k covers [origin + k*w, origin + (k+1)*w).
using BinIndex = std::int64_t;

// Beacon and station identifiers live in disjoint namespaces, so they are
// distinct types that do not convert into each other.
template <class Tag>
struct StrongId {
  std::uint32_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

struct BeaconTag {};
struct StationTag {};

using BeaconId = StrongId<BeaconTag>;
using StationId = StrongId<StationTag>;

inline std::string to_string(BeaconId id) { return std::to_string(id.value); }
inline std::string to_string(StationId id) { return std::to_string(id.value); }

struct TimeGrid {
  Seconds origin = 0.0;
  Seconds bin_width = 20.0;

  TimeGrid() = default;
  TimeGrid(Seconds origin_, Seconds width) : origin(origin_), bin_width(width) {
    if (!(width > 0.0) || !std::isfinite(width))
      throw ConfigError("bin width must be positive, got " + std::to_string(width));
  }

  // Grid whose origin is t rounded down to a whole multiple of the bin width.
  static TimeGrid aligned(Seconds t, Seconds width = 20.0) {
    if (!(width > 0.0))
      throw ConfigError("bin width must be positive, got " + std::to_string(width));
    return TimeGrid(std::floor(t / width) * width, width);
  }

  Seconds bin_start(BinIndex k) const { return origin + static_cast<double>(k) * bin_width; }
  Seconds bin_end(BinIndex k) const { return bin_start(k + 1); }

  friend bool operator==(const TimeGrid &, const TimeGrid &) = default;
};

inline BinIndex bin_of(Seconds t, const TimeGrid &grid) {
  if (!(t >= grid.origin))
    throw OutOfRangeError("timestamp " + std::to_string(t) + " precedes grid origin " +
                          std::to_string(grid.origin));
  return static_cast<BinIndex>(std::floor((t - grid.origin) / grid.bin_width));
}

// Canonical unordered beacon pair, lo < hi.
struct PairKey {
  BeaconId lo;
  BeaconId hi;

  friend constexpr auto operator<=>(const PairKey &, const PairKey &) = default;

  constexpr bool contains(BeaconId b) const { return b == lo || b == hi; }
  constexpr BeaconId other(BeaconId b) const { return b == lo ? hi : lo; }
};

inline PairKey pair_key(BeaconId a, BeaconId b) {
  if (a == b)
    throw SelfContactError("self-contact for beacon " + to_string(a));
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

} // namespace contactnet

template <class Tag>
struct std::hash<contactnet::StrongId<Tag>> {
  std::size_t operator()(contactnet::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<contactnet::PairKey> {
  std::size_t operator()(const contactnet::PairKey &p) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{p.lo.value} << 32) | p.hi.value);
  }
};
