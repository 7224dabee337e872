#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "contactnet/packet.hpp"
#include "contactnet/powerlaw.hpp"
#include "contactnet/text.hpp"

namespace contactnet {

struct BinCount {
  PairKey pair;
  BinIndex bin = 0;
  std::uint32_t count = 0;

  friend bool operator==(const BinCount &, const BinCount &) = default;
};

// Packet counts per (pair, bin). Entries are kept sorted by pair then bin,
// with no zero counts; every contact analysis starts from this map.
class BinContactMap {
public:
  BinContactMap() = default;
  explicit BinContactMap(TimeGrid grid) : grid_(grid) {}

  // Entries may arrive in any order; counts for repeated keys are summed.
  BinContactMap(TimeGrid grid, std::vector<BinCount> entries) : grid_(grid) {
    std::sort(entries.begin(), entries.end(), [](const BinCount &a, const BinCount &b) {
      return std::tie(a.pair, a.bin) < std::tie(b.pair, b.bin);
    });
    for (const auto &e : entries) {
      if (e.count == 0)
        continue;
      if (!entries_.empty() && entries_.back().pair == e.pair && entries_.back().bin == e.bin)
        entries_.back().count += e.count;
      else
        entries_.push_back(e);
    }
  }

  const TimeGrid &grid() const { return grid_; }
  std::span<const BinCount> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  std::uint32_t count(PairKey pair, BinIndex bin) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{pair, bin},
                                     [](const BinCount &e, const std::pair<PairKey, BinIndex> &k) {
                                       return std::tie(e.pair, e.bin) < std::tie(k.first, k.second);
                                     });
    return it != entries_.end() && it->pair == pair && it->bin == bin ? it->count : 0;
  }

  // Smallest and largest bin holding any count.
  std::optional<std::pair<BinIndex, BinIndex>> bin_range() const {
    if (entries_.empty())
      return std::nullopt;
    auto [lo, hi] = std::minmax_element(entries_.begin(), entries_.end(),
                                        [](const auto &a, const auto &b) { return a.bin < b.bin; });
    return std::pair{lo->bin, hi->bin};
  }

  std::set<BeaconId> beacons() const {
    std::set<BeaconId> out;
    for (const auto &e : entries_) {
      out.insert(e.pair.lo);
      out.insert(e.pair.hi);
    }
    return out;
  }

  // Same counts regrouped by bin; within a bin, pairs are ascending.
  std::map<BinIndex, std::vector<std::pair<PairKey, std::uint32_t>>> by_bin() const {
    std::map<BinIndex, std::vector<std::pair<PairKey, std::uint32_t>>> out;
    for (const auto &e : entries_)
      out[e.bin].emplace_back(e.pair, e.count);
    return out;
  }

  friend BinContactMap merge(const BinContactMap &a, const BinContactMap &b) {
    if (!(a.grid_ == b.grid_))
      throw DataError("cannot merge contact maps on different time grids");
    std::vector<BinCount> all(a.entries_.begin(), a.entries_.end());
    all.insert(all.end(), b.entries_.begin(), b.entries_.end());
    return BinContactMap(a.grid_, std::move(all));
  }

private:
  TimeGrid grid_;
  std::vector<BinCount> entries_;
};

// Each record contributes one packet to (src, s) for every s it lists.
inline BinContactMap bin_pair_counts(std::span<const PacketRecord> records, const TimeGrid &grid) {
  struct KeyHash {
    std::size_t operator()(const std::pair<PairKey, BinIndex> &k) const noexcept {
      return std::hash<PairKey>{}(k.first) * 1000003u ^ std::hash<BinIndex>{}(k.second);
    }
  };
  std::unordered_map<std::pair<PairKey, BinIndex>, std::uint32_t, KeyHash> acc;
  for (const auto &rec : records) {
    if (rec.seen.empty())
      continue;
    const BinIndex k = bin_of(rec.t, grid);
    for (BeaconId other : rec.seen)
      ++acc[{pair_key(rec.src, other), k}];
  }
  std::vector<BinCount> entries;
  entries.reserve(acc.size());
  for (const auto &[key, n] : acc)
    entries.push_back({key.first, key.second, n});
  return BinContactMap(grid, std::move(entries));
}

struct ContactEvent {
  PairKey pair;
  BinIndex first_bin = 0;
  BinIndex last_bin = 0;
  Seconds duration = 0.0;
  std::uint64_t total_packets = 0;

  BinIndex n_bins() const { return last_bin - first_bin + 1; }
  friend bool operator==(const ContactEvent &, const ContactEvent &) = default;
};

// Ordering used for event lists: start bin, then pair.
inline bool event_order(const ContactEvent &a, const ContactEvent &b) {
  return std::tie(a.first_bin, a.pair, a.last_bin) < std::tie(b.first_bin, b.pair, b.last_bin);
}

// Maximal runs of consecutive bins whose count reaches the threshold. One
// empty or sub-threshold bin ends a run.
inline std::vector<ContactEvent> detect_contacts(const BinContactMap &map,
                                                 std::uint32_t threshold = 1) {
  if (threshold < 1)
    throw ConfigError("contact threshold must be at least 1 packet per bin");
  const Seconds w = map.grid().bin_width;
  std::vector<ContactEvent> events;
  std::optional<ContactEvent> open;
  const auto close = [&] {
    if (open) {
      open->duration = static_cast<double>(open->n_bins()) * w;
      events.push_back(*open);
      open.reset();
    }
  };
  for (const auto &e : map.entries()) {
    if (open && (open->pair != e.pair || e.bin != open->last_bin + 1 || e.count < threshold))
      close();
    if (e.count < threshold)
      continue;
    if (open) {
      open->last_bin = e.bin;
      open->total_packets += e.count;
    } else {
      open = ContactEvent{e.pair, e.bin, e.bin, 0.0, e.count};
    }
  }
  close();
  std::sort(events.begin(), events.end(), event_order);
  return events;
}

inline std::vector<Seconds> contact_durations(std::span<const ContactEvent> events) {
  std::vector<Seconds> out;
  out.reserve(events.size());
  for (const auto &e : events)
    out.push_back(e.duration);
  return out;
}

// Start-to-start differences between consecutive events, regardless of the
// beacons involved. Simultaneous starts give zeros.
inline std::vector<Seconds> intercontact_global(std::span<const ContactEvent> events,
                                                Seconds bin_width) {
  std::vector<BinIndex> starts;
  starts.reserve(events.size());
  for (const auto &e : events)
    starts.push_back(e.first_bin);
  std::sort(starts.begin(), starts.end());
  std::vector<Seconds> out;
  for (std::size_t i = 1; i < starts.size(); ++i)
    out.push_back(static_cast<double>(starts[i] - starts[i - 1]) * bin_width);
  return out;
}

namespace detail {

// Gaps between the end of the contacts seen so far and the start of the next
// one, within one group of events. Overlapping or abutting contacts give no
// sample.
inline void append_gaps(std::vector<const ContactEvent *> &group, Seconds bin_width,
                        std::vector<Seconds> &out) {
  std::sort(group.begin(), group.end(),
            [](const ContactEvent *a, const ContactEvent *b) { return event_order(*a, *b); });
  BinIndex covered_until = 0;
  bool first = true;
  for (const ContactEvent *e : group) {
    if (!first) {
      const BinIndex gap = e->first_bin - covered_until - 1;
      if (gap > 0)
        out.push_back(static_cast<double>(gap) * bin_width);
      covered_until = std::max(covered_until, e->last_bin);
    } else {
      covered_until = e->last_bin;
      first = false;
    }
  }
}

} // namespace detail

inline std::vector<Seconds> intercontact_per_beacon(std::span<const ContactEvent> events,
                                                    Seconds bin_width) {
  std::map<BeaconId, std::vector<const ContactEvent *>> groups;
  for (const auto &e : events) {
    groups[e.pair.lo].push_back(&e);
    groups[e.pair.hi].push_back(&e);
  }
  std::vector<Seconds> out;
  for (auto &[beacon, group] : groups)
    detail::append_gaps(group, bin_width, out);
  return out;
}

inline std::vector<Seconds> intercontact_per_pair(std::span<const ContactEvent> events,
                                                  Seconds bin_width) {
  std::map<PairKey, std::vector<const ContactEvent *>> groups;
  for (const auto &e : events)
    groups[e.pair].push_back(&e);
  std::vector<Seconds> out;
  for (auto &[pair, group] : groups)
    detail::append_gaps(group, bin_width, out);
  return out;
}

inline constexpr std::string_view kEventCsvHeader =
    "pair_lo,pair_hi,first_bin,last_bin,duration_s,total_packets";

inline void write_events_csv(std::ostream &out, std::span<const ContactEvent> events) {
  out << kEventCsvHeader << '\n';
  for (const auto &e : events)
    out << e.pair.lo.value << ',' << e.pair.hi.value << ',' << e.first_bin << ',' << e.last_bin
        << ',' << text::format_double(e.duration) << ',' << e.total_packets << '\n';
}

inline void write_samples(std::ostream &out, std::span<const double> samples) {
  for (double x : samples)
    out << text::format_double(x) << '\n';
}

inline void write_histogram_csv(std::ostream &out, std::span<const HistogramBin> bins) {
  out << "lo,hi,count,density\n";
  for (const auto &b : bins)
    out << text::format_double(b.lo) << ',' << text::format_double(b.hi) << ',' << b.count << ','
        << text::format_double(b.density) << '\n';
}

} // namespace contactnet
