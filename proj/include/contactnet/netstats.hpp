#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "contactnet/contacts.hpp"

namespace contactnet {

// Contact network of a single bin. Nodes are beacons that sent at least one
// report in the bin, plus any beacon with an edge.
struct InstantGraph {
  BinIndex bin = 0;
  std::set<BeaconId> nodes;
  std::map<PairKey, std::uint32_t> edges;

  double average_degree() const {
    return nodes.empty() ? 0.0
                         : 2.0 * static_cast<double>(edges.size()) /
                               static_cast<double>(nodes.size());
  }
};

namespace detail {

inline InstantGraph make_instant_graph(BinIndex bin, std::span<const PacketRecord> bin_records,
                                       std::span<const std::pair<PairKey, std::uint32_t>> edges) {
  InstantGraph g;
  g.bin = bin;
  for (const auto &rec : bin_records)
    g.nodes.insert(rec.src);
  for (const auto &[pair, w] : edges) {
    g.edges.emplace(pair, w);
    g.nodes.insert(pair.lo);
    g.nodes.insert(pair.hi);
  }
  return g;
}

// Records are grouped per bin; they need not be sorted.
inline std::map<BinIndex, std::vector<PacketRecord>> records_by_bin(
    std::span<const PacketRecord> records, const TimeGrid &grid) {
  std::map<BinIndex, std::vector<PacketRecord>> out;
  for (const auto &rec : records)
    out[bin_of(rec.t, grid)].push_back(rec);
  return out;
}

} // namespace detail

inline InstantGraph instant_graph(std::span<const PacketRecord> records, const BinContactMap &map,
                                  BinIndex bin) {
  std::vector<PacketRecord> in_bin;
  for (const auto &rec : records)
    if (rec.t >= map.grid().origin && bin_of(rec.t, map.grid()) == bin)
      in_bin.push_back(rec);
  std::vector<std::pair<PairKey, std::uint32_t>> edges;
  for (const auto &e : map.entries())
    if (e.bin == bin)
      edges.emplace_back(e.pair, e.count);
  return detail::make_instant_graph(bin, in_bin, edges);
}

// One graph per bin that has any record, in bin order.
inline std::vector<InstantGraph> instant_graphs(std::span<const PacketRecord> records,
                                                const BinContactMap &map) {
  const auto by_bin = detail::records_by_bin(records, map.grid());
  const auto edges_by_bin = map.by_bin();
  std::set<BinIndex> bins;
  for (const auto &[k, _] : by_bin)
    bins.insert(k);
  for (const auto &[k, _] : edges_by_bin)
    bins.insert(k);
  std::vector<InstantGraph> out;
  out.reserve(bins.size());
  static const std::vector<PacketRecord> kNoRecords;
  static const std::vector<std::pair<PairKey, std::uint32_t>> kNoEdges;
  for (BinIndex k : bins) {
    const auto r = by_bin.find(k);
    const auto e = edges_by_bin.find(k);
    out.push_back(detail::make_instant_graph(k, r == by_bin.end() ? kNoRecords : r->second,
                                             e == edges_by_bin.end() ? kNoEdges : e->second));
  }
  return out;
}

struct SeriesPoint {
  BinIndex bin = 0;
  Seconds t_start = 0.0;
  double value = 0.0;
};

// Average degree 2|E|/|N| of each bin's instantaneous network; bins without
// nodes produce no point.
inline std::vector<SeriesPoint> degree_series(std::span<const PacketRecord> records,
                                              const TimeGrid &grid) {
  const auto map = bin_pair_counts(records, grid);
  std::vector<SeriesPoint> out;
  for (const auto &g : instant_graphs(records, map))
    if (!g.nodes.empty())
      out.push_back({g.bin, grid.bin_start(g.bin), g.average_degree()});
  return out;
}

// room name -> bin -> number of beacons assigned to the room.
struct AttendanceSeries {
  std::map<std::string, std::map<BinIndex, std::size_t>> counts;

  std::size_t at(const std::string &room, BinIndex bin) const {
    const auto r = counts.find(room);
    if (r == counts.end())
      return 0;
    const auto b = r->second.find(bin);
    return b == r->second.end() ? 0 : b->second;
  }
};

// Each beacon is placed, per bin, in the room of the station that relayed
// most of its records in that bin; ties go to the lowest station id.
inline AttendanceSeries attendance_series(std::span<const PacketRecord> records,
                                          const TimeGrid &grid,
                                          const std::map<StationId, std::string> &rooms) {
  for (const auto &rec : records)
    if (!rooms.contains(rec.station))
      throw DataError("record relayed by unknown station " + to_string(rec.station));

  AttendanceSeries out;
  for (const auto &[station, name] : rooms)
    out.counts[name];
  for (const auto &[bin, recs] : detail::records_by_bin(records, grid)) {
    std::map<BeaconId, std::map<StationId, std::size_t>> tally;
    for (const auto &rec : recs)
      ++tally[rec.src][rec.station];
    for (const auto &[beacon, per_station] : tally) {
      // std::map iterates stations ascending, so strict > keeps the lowest on ties.
      auto best = per_station.begin();
      for (auto it = per_station.begin(); it != per_station.end(); ++it)
        if (it->second > best->second)
          best = it;
      ++out.counts[rooms.at(best->first)][bin];
    }
  }
  return out;
}

// Dense adjacency for clique enumeration on small graphs.
class Adjacency {
public:
  explicit Adjacency(std::size_t n) : n_(n), bits_(n * n, false) {}

  std::size_t size() const { return n_; }
  void connect(std::size_t a, std::size_t b) {
    if (a == b)
      return;
    bits_[a * n_ + b] = true;
    bits_[b * n_ + a] = true;
  }
  bool adjacent(std::size_t a, std::size_t b) const { return bits_[a * n_ + b]; }

private:
  std::size_t n_;
  std::vector<bool> bits_;
};

namespace detail {

template <class Visitor>
void bron_kerbosch(const Adjacency &adj, std::vector<std::size_t> &clique,
                   std::vector<std::size_t> candidates, std::vector<std::size_t> excluded,
                   Visitor &visit) {
  if (candidates.empty() && excluded.empty()) {
    visit(std::span<const std::size_t>(clique));
    return;
  }
  // Pivot on the vertex covering the most candidates.
  std::size_t pivot = 0;
  std::size_t best = 0;
  bool have_pivot = false;
  for (const auto *set : {&candidates, &excluded}) {
    for (std::size_t u : *set) {
      std::size_t covered = 0;
      for (std::size_t v : candidates)
        covered += adj.adjacent(u, v);
      if (!have_pivot || covered > best) {
        pivot = u;
        best = covered;
        have_pivot = true;
      }
    }
  }
  std::vector<std::size_t> branch;
  for (std::size_t v : candidates)
    if (!adj.adjacent(pivot, v))
      branch.push_back(v);

  for (std::size_t v : branch) {
    std::vector<std::size_t> next_candidates;
    std::vector<std::size_t> next_excluded;
    for (std::size_t u : candidates)
      if (adj.adjacent(v, u))
        next_candidates.push_back(u);
    for (std::size_t u : excluded)
      if (adj.adjacent(v, u))
        next_excluded.push_back(u);
    clique.push_back(v);
    bron_kerbosch(adj, clique, std::move(next_candidates), std::move(next_excluded), visit);
    clique.pop_back();
    candidates.erase(std::find(candidates.begin(), candidates.end(), v));
    excluded.push_back(v);
  }
}

} // namespace detail

// Calls visit(span of vertex indices) once per maximal clique, isolated
// vertices included.
template <class Visitor>
void for_each_maximal_clique(const Adjacency &adj, Visitor &&visit) {
  std::vector<std::size_t> clique;
  std::vector<std::size_t> all(adj.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    all[i] = i;
  if (all.empty())
    return;
  detail::bron_kerbosch(adj, clique, std::move(all), {}, visit);
}

// Number of maximal cliques by size; index 0 is size 2, 1 is size 3, 2 is
// size 4, and 3 collects every size >= 5.
struct CliqueCensus {
  BinIndex bin = 0;
  std::array<std::size_t, 4> counts{};

  std::size_t of_size(std::size_t k) const { return k < 2 ? 0 : counts[std::min<std::size_t>(k, 5) - 2]; }
  friend bool operator==(const CliqueCensus &, const CliqueCensus &) = default;
};

inline CliqueCensus maximal_cliques(const InstantGraph &g) {
  std::vector<BeaconId> ids(g.nodes.begin(), g.nodes.end());
  const auto index = [&](BeaconId b) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), b) - ids.begin());
  };
  Adjacency adj(ids.size());
  for (const auto &[pair, w] : g.edges)
    adj.connect(index(pair.lo), index(pair.hi));

  CliqueCensus census;
  census.bin = g.bin;
  for_each_maximal_clique(adj, [&](std::span<const std::size_t> clique) {
    if (clique.size() >= 2)
      ++census.counts[std::min<std::size_t>(clique.size(), 5) - 2];
  });
  return census;
}

inline void write_series_csv(std::ostream &out, std::span<const SeriesPoint> series) {
  out << "bin,t_start,value\n";
  for (const auto &p : series)
    out << p.bin << ',' << text::format_double(p.t_start) << ',' << text::format_double(p.value)
        << '\n';
}

inline void write_clique_csv(std::ostream &out, std::span<const CliqueCensus> census,
                             const TimeGrid &grid) {
  out << "bin,t_start,size2,size3,size4,size5plus\n";
  for (const auto &c : census)
    out << c.bin << ',' << text::format_double(grid.bin_start(c.bin)) << ',' << c.counts[0] << ','
        << c.counts[1] << ',' << c.counts[2] << ',' << c.counts[3] << '\n';
}

inline void write_attendance_csv(std::ostream &out, const AttendanceSeries &series,
                                 const TimeGrid &grid) {
  out << "room,bin,t_start,value\n";
  for (const auto &[room, bins] : series.counts)
    for (const auto &[bin, n] : bins)
      out << room << ',' << bin << ',' << text::format_double(grid.bin_start(bin)) << ',' << n
          << '\n';
}

} // namespace contactnet
