#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "contactnet/core.hpp"

namespace contactnet {

// The hardware records at most this many simultaneous contacts per report.
inline constexpr std::size_t kMaxSeen = 4;

// Fixed-capacity list of the beacons listed in one report.
class SeenList {
public:
  SeenList() = default;
  SeenList(std::initializer_list<BeaconId> ids) {
    for (BeaconId id : ids)
      push_back(id);
  }

  void push_back(BeaconId id) {
    if (size_ == kMaxSeen)
      throw DataError("seen list holds at most 4 beacons");
    ids_[size_++] = id;
  }

  bool contains(BeaconId id) const { return std::find(begin(), end(), id) != end(); }

  template <class Pred>
  void erase_if(Pred pred) {
    auto last = std::remove_if(ids_.begin(), ids_.begin() + size_, pred);
    size_ = static_cast<std::size_t>(last - ids_.begin());
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const BeaconId *begin() const { return ids_.data(); }
  const BeaconId *end() const { return ids_.data() + size_; }
  BeaconId operator[](std::size_t i) const { return ids_[i]; }
  std::span<const BeaconId> view() const { return {ids_.data(), size_}; }

  friend bool operator==(const SeenList &a, const SeenList &b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  }
  friend std::strong_ordering operator<=>(const SeenList &a, const SeenList &b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
  }

private:
  std::array<BeaconId, kMaxSeen> ids_{};
  std::size_t size_ = 0;
};

// One relayed report: when, which station relayed it, who sent it, and the
// beacons the sender was in contact with. An empty seen list is a plain
// sighting of the sender.
struct PacketRecord {
  Seconds t = 0.0;
  StationId station;
  BeaconId src;
  SeenList seen;

  friend bool operator==(const PacketRecord &, const PacketRecord &) = default;
};

// Canonical stream order: time, then station, then source, then seen list.
inline bool stream_order(const PacketRecord &a, const PacketRecord &b) {
  if (a.t != b.t)
    return a.t < b.t;
  if (a.station != b.station)
    return a.station < b.station;
  if (a.src != b.src)
    return a.src < b.src;
  return a.seen < b.seen;
}

} // namespace contactnet
