#pragma once

// Spring embedder for the instantaneous network. Contact edges and
// beacon-station links are springs whose rest length shrinks as the contact
// (or proximity) weight grows; beacons repel each other; stations are fixed
// anchors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "contactnet/netstats.hpp"

namespace contactnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 &operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm() const { return std::hypot(x, y); }
};

struct LayoutParams {
  double spring = 0.2;
  double repulsion = 0.05;
  double damping = 0.5; // in (0, 1)
  double rest_length = 1.0;
  double max_step = 0.5; // cap on one step's displacement

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0))
      throw ConfigError("damping must lie in (0, 1)");
    if (!(spring >= 0.0) || !(repulsion >= 0.0) || !(rest_length > 0.0) || !(max_step > 0.0))
      throw ConfigError("layout constants must be non-negative (rest length and step positive)");
  }

  double rest_for(double weight) const { return rest_length / (1.0 + weight); }
};

struct LayoutState {
  std::map<BeaconId, Vec2> positions;
  std::map<StationId, Vec2> anchors;
  LayoutParams params;
};

// Packets relayed per (beacon, station) in the current bin.
using ProximityWeights = std::map<std::pair<BeaconId, StationId>, double>;

namespace detail {

inline std::pair<Vec2, Vec2> anchor_box(const std::map<StationId, Vec2> &anchors, double pad) {
  Vec2 lo{anchors.begin()->second};
  Vec2 hi{lo};
  for (const auto &[s, p] : anchors) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  // A degenerate box (one anchor, or collinear anchors) is widened.
  if (hi.x - lo.x < pad) {
    lo.x -= pad / 2;
    hi.x += pad / 2;
  }
  if (hi.y - lo.y < pad) {
    lo.y -= pad / 2;
    hi.y += pad / 2;
  }
  return {lo, hi};
}

template <class Rng>
Vec2 random_point(const std::map<StationId, Vec2> &anchors, double pad, Rng &rng) {
  const auto [lo, hi] = anchor_box(anchors, pad);
  std::uniform_real_distribution<double> ux(lo.x, hi.x);
  std::uniform_real_distribution<double> uy(lo.y, hi.y);
  const double x = ux(rng);
  return {x, uy(rng)};
}

} // namespace detail

template <class Rng>
LayoutState init_layout(const std::set<BeaconId> &beacons, const std::map<StationId, Vec2> &anchors,
                        Rng &rng, LayoutParams params = {}) {
  params.validate();
  if (anchors.empty())
    throw ConfigError("layout needs at least one station anchor");
  LayoutState state;
  state.anchors = anchors;
  state.params = params;
  for (BeaconId b : beacons)
    state.positions[b] = detail::random_point(anchors, params.rest_length, rng);
  return state;
}

// One damped step: displacement = damping * net force, capped at max_step.
inline LayoutState layout_step(const LayoutState &state, const InstantGraph &graph,
                               const ProximityWeights &proximity) {
  const auto &p = state.params;
  std::map<BeaconId, Vec2> force;
  for (const auto &[b, _] : state.positions)
    force[b] = {};

  const auto spring = [&](Vec2 from, Vec2 to, double rest) -> Vec2 {
    const Vec2 d = to - from;
    const double len = d.norm();
    if (len == 0.0)
      return {};
    return (p.spring * (len - rest) / len) * d;
  };

  for (const auto &[pair, w] : graph.edges) {
    const auto a = state.positions.find(pair.lo);
    const auto b = state.positions.find(pair.hi);
    if (a == state.positions.end() || b == state.positions.end())
      continue;
    const Vec2 f = spring(a->second, b->second, p.rest_for(w));
    force[pair.lo] += f;
    force[pair.hi] += -1.0 * f;
  }
  for (const auto &[key, weight] : proximity) {
    const auto b = state.positions.find(key.first);
    const auto s = state.anchors.find(key.second);
    if (b == state.positions.end() || s == state.anchors.end() || weight <= 0.0)
      continue;
    force[key.first] += spring(b->second, s->second, p.rest_for(weight));
  }
  if (p.repulsion > 0.0) {
    for (auto a = state.positions.begin(); a != state.positions.end(); ++a) {
      for (auto b = std::next(a); b != state.positions.end(); ++b) {
        Vec2 d = a->second - b->second;
        double len = d.norm();
        if (len < 1e-9) {
          // Coincident beacons are pushed apart along x, ordered by id.
          d = {1.0, 0.0};
          len = 1e-3;
        } else {
          d = (1.0 / len) * d;
        }
        const Vec2 f = (p.repulsion / (len * len)) * d;
        force[a->first] += f;
        force[b->first] += -1.0 * f;
      }
    }
  }

  LayoutState next = state;
  for (auto &[b, pos] : next.positions) {
    Vec2 step = p.damping * force[b];
    const double len = step.norm();
    if (len > p.max_step)
      step = (p.max_step / len) * step;
    pos += step;
  }
  return next;
}

// Spring and repulsion potential of the current positions.
inline double layout_energy(const LayoutState &state, const InstantGraph &graph,
                            const ProximityWeights &proximity, bool include_repulsion = true) {
  const auto &p = state.params;
  double e = 0.0;
  const auto spring = [&](Vec2 a, Vec2 b, double rest) {
    const double stretch = (b - a).norm() - rest;
    return 0.5 * p.spring * stretch * stretch;
  };
  for (const auto &[pair, w] : graph.edges) {
    const auto a = state.positions.find(pair.lo);
    const auto b = state.positions.find(pair.hi);
    if (a != state.positions.end() && b != state.positions.end())
      e += spring(a->second, b->second, p.rest_for(w));
  }
  for (const auto &[key, weight] : proximity) {
    const auto b = state.positions.find(key.first);
    const auto s = state.anchors.find(key.second);
    if (b != state.positions.end() && s != state.anchors.end() && weight > 0.0)
      e += spring(b->second, s->second, p.rest_for(weight));
  }
  if (include_repulsion && p.repulsion > 0.0)
    for (auto a = state.positions.begin(); a != state.positions.end(); ++a)
      for (auto b = std::next(a); b != state.positions.end(); ++b)
        e += p.repulsion / std::max((a->second - b->second).norm(), 1e-3);
  return e;
}

inline ProximityWeights proximity_weights(std::span<const PacketRecord> bin_records) {
  ProximityWeights w;
  for (const auto &rec : bin_records)
    w[{rec.src, rec.station}] += 1.0;
  return w;
}

struct LayoutFrame {
  InstantGraph graph;
  ProximityWeights proximity;
};

// Builds one frame input per bin that has any record.
inline std::vector<LayoutFrame> layout_frames(std::span<const PacketRecord> records,
                                              const BinContactMap &map) {
  const auto by_bin = detail::records_by_bin(records, map.grid());
  std::vector<LayoutFrame> frames;
  for (auto &g : instant_graphs(records, map)) {
    LayoutFrame f;
    if (const auto it = by_bin.find(g.bin); it != by_bin.end())
      f.proximity = proximity_weights(it->second);
    f.graph = std::move(g);
    frames.push_back(std::move(f));
  }
  return frames;
}

// Writes `# frame <bin>` blocks of `id,x,y` rows: the beacons of that frame,
// then the anchors as S<station>. Beacons keep their position between frames
// and enter at a random point the first time they appear.
inline void emit_frames(std::ostream &out, std::span<const LayoutFrame> frames,
                        const std::map<StationId, Vec2> &anchors, int steps_per_frame,
                        std::uint64_t seed, LayoutParams params = {}) {
  if (frames.empty())
    throw DataError("layout needs at least one frame");
  if (steps_per_frame < 0)
    throw ConfigError("steps per frame must be non-negative");
  std::mt19937_64 rng(seed);
  LayoutState state = init_layout({}, anchors, rng, params);
  for (const auto &frame : frames) {
    LayoutState active;
    active.anchors = state.anchors;
    active.params = state.params;
    for (BeaconId b : frame.graph.nodes) {
      auto it = state.positions.find(b);
      if (it == state.positions.end())
        it = state.positions
                 .emplace(b, detail::random_point(anchors, state.params.rest_length, rng))
                 .first;
      active.positions[b] = it->second;
    }
    for (int i = 0; i < steps_per_frame; ++i)
      active = layout_step(active, frame.graph, frame.proximity);
    for (const auto &[b, pos] : active.positions)
      state.positions[b] = pos;

    out << "# frame " << frame.graph.bin << '\n';
    for (const auto &[b, pos] : active.positions)
      out << b.value << ',' << text::format_double(pos.x) << ',' << text::format_double(pos.y)
          << '\n';
    for (const auto &[s, pos] : anchors)
      out << 'S' << s.value << ',' << text::format_double(pos.x) << ','
          << text::format_double(pos.y) << '\n';
  }
}

// Station anchors from `station,x,y` rows.
inline std::map<StationId, Vec2> read_anchors(std::istream &in) {
  std::map<StationId, Vec2> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_comment_or_blank(line) || text::trim(line).starts_with("station"))
      continue;
    const auto f = text::split(text::trim(line), ',');
    const auto id = f.size() == 3 ? text::to_u32(f[0]) : std::nullopt;
    const auto x = f.size() == 3 ? text::to_double(f[1]) : std::nullopt;
    const auto y = f.size() == 3 ? text::to_double(f[2]) : std::nullopt;
    if (!id || !x || !y)
      throw ParseError(line_no, "expected station,x,y");
    out[StationId{*id}] = {*x, *y};
  }
  return out;
}

} // namespace contactnet
