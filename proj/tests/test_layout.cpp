#include <gtest/gtest.h>

#include <sstream>

#include "contactnet/beacon_sim.hpp"
#include "contactnet/layout.hpp"

using namespace contactnet;

namespace {

PairKey pk(std::uint32_t a, std::uint32_t b) { return pair_key(BeaconId{a}, BeaconId{b}); }

const std::map<StationId, Vec2> kAnchors{
    {StationId{1}, {0.0, 0.0}}, {StationId{2}, {4.0, 0.0}}, {StationId{3}, {0.0, 4.0}}};

InstantGraph edges(std::initializer_list<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> es) {
  InstantGraph g;
  for (auto [a, b, w] : es) {
    g.edges[pk(a, b)] = w;
    g.nodes.insert(BeaconId{a});
    g.nodes.insert(BeaconId{b});
  }
  return g;
}

LayoutState random_state(const InstantGraph &g, std::uint64_t seed, LayoutParams params = {}) {
  std::mt19937_64 rng(seed);
  return init_layout(g.nodes, kAnchors, rng, params);
}

} // namespace

TEST(Layout, NoEdgesNoRepulsionNoMotion) {
  LayoutParams p;
  p.repulsion = 0.0;
  InstantGraph g;
  g.nodes = {BeaconId{1}, BeaconId{2}};
  const auto s = random_state(g, 1, p);
  EXPECT_EQ(layout_step(s, g, {}).positions, s.positions);
}

TEST(Layout, SpringSettlesAtRestLength) {
  LayoutParams p;
  p.repulsion = 0.0;
  const auto g = edges({{1, 2, 3}});
  auto s = random_state(g, 2, p);
  for (int i = 0; i < 2000; ++i)
    s = layout_step(s, g, {});
  const double d = (s.positions[BeaconId{1}] - s.positions[BeaconId{2}]).norm();
  EXPECT_NEAR(d, p.rest_for(3), 1e-6);
}

TEST(Layout, RestLengthShrinksWithWeight) {
  const LayoutParams p;
  for (double w = 0.0; w < 50.0; w += 1.0)
    EXPECT_GT(p.rest_for(w), p.rest_for(w + 1.0));
  EXPECT_DOUBLE_EQ(p.rest_for(0.0), p.rest_length);
}

TEST(Layout, EnergyDecreases) {
  const auto g = edges({{1, 2, 5}, {2, 3, 1}, {3, 4, 2}, {4, 1, 8}, {1, 3, 1}, {5, 6, 4}});
  const ProximityWeights prox{{{BeaconId{1}, StationId{1}}, 3.0}, {{BeaconId{5}, StationId{2}}, 6.0}};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto s = random_state(g, seed);
    for (int i = 0; i < 50; ++i)
      s = layout_step(s, g, prox);
    const double e50 = layout_energy(s, g, prox);
    for (int i = 50; i < 500; ++i)
      s = layout_step(s, g, prox);
    EXPECT_LE(layout_energy(s, g, prox), e50 + 1e-9);
  }
}

TEST(Layout, AnchorsNeverMove) {
  const auto g = edges({{1, 2, 5}, {2, 3, 1}});
  const ProximityWeights prox{{{BeaconId{1}, StationId{1}}, 3.0}, {{BeaconId{3}, StationId{3}}, 1.0}};
  auto s = random_state(g, 3);
  for (int i = 0; i < 100; ++i)
    s = layout_step(s, g, prox);
  EXPECT_EQ(s.anchors, kAnchors);
}

TEST(Layout, TranslationEquivariant) {
  const auto g = edges({{1, 2, 5}, {2, 3, 1}, {3, 4, 2}});
  const ProximityWeights prox{{{BeaconId{2}, StationId{2}}, 2.0}};
  auto a = random_state(g, 4);
  auto b = a;
  const Vec2 shift{13.5, -7.25};
  for (auto &[id, pos] : b.positions)
    pos += shift;
  for (auto &[id, pos] : b.anchors)
    pos += shift;
  for (int i = 0; i < 100; ++i) {
    a = layout_step(a, g, prox);
    b = layout_step(b, g, prox);
  }
  for (const auto &[id, pos] : a.positions) {
    EXPECT_NEAR(b.positions[id].x, pos.x + shift.x, 1e-6);
    EXPECT_NEAR(b.positions[id].y, pos.y + shift.y, 1e-6);
  }
}

TEST(Layout, StepIsCapped) {
  LayoutParams p;
  p.spring = 100.0;
  const auto g = edges({{1, 2, 0}});
  const auto s = random_state(g, 5, p);
  const auto n = layout_step(s, g, {});
  for (const auto &[id, pos] : s.positions)
    EXPECT_LE((n.positions.at(id) - pos).norm(), p.max_step + 1e-12);
}

TEST(Layout, RejectsBadSetup) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(init_layout({BeaconId{1}}, {}, rng), ConfigError);
  LayoutParams p;
  p.damping = 1.5;
  EXPECT_THROW(init_layout({}, kAnchors, rng, p), ConfigError);
}

TEST(LayoutFrames, OnePerOccupiedBinAndDeterministic) {
  auto c = default_conference();
  c.n_agents = 12;
  c.days = 1;
  auto records = generate_scenario(c);
  records.resize(std::min<std::size_t>(records.size(), 3000));
  const auto map = bin_pair_counts(records, TimeGrid(0.0, c.bin_width));
  const auto frames = layout_frames(records, map);
  std::set<BinIndex> bins;
  for (const auto &r : records)
    bins.insert(bin_of(r.t, map.grid()));
  EXPECT_EQ(frames.size(), bins.size());

  std::map<StationId, Vec2> anchors{{StationId{1}, {0, 0}}, {StationId{2}, {5, 0}},
                                    {StationId{3}, {5, 5}}, {StationId{4}, {0, 5}}};
  std::ostringstream a, b;
  emit_frames(a, frames, anchors, 20, 7);
  emit_frames(b, frames, anchors, 20, 7);
  EXPECT_EQ(a.str(), b.str());
  std::size_t headers = 0;
  std::istringstream lines(a.str());
  for (std::string line; std::getline(lines, line);)
    headers += line.starts_with("# frame ");
  EXPECT_EQ(headers, frames.size());
}

TEST(LayoutFrames, EmptyGraphWritesAnchorsOnly) {
  LayoutFrame f;
  f.graph.bin = 3;
  std::ostringstream out;
  emit_frames(out, std::vector{f}, kAnchors, 10, 1);
  EXPECT_EQ(out.str(), "# frame 3\nS1,0,0\nS2,4,0\nS3,0,4\n");
}

TEST(Anchors, ReadRows) {
  std::istringstream in("station,x,y\n1,0.5,2\n4,-1,3\n");
  const auto a = read_anchors(in);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.at(StationId{4}), (Vec2{-1.0, 3.0}));
  std::istringstream bad("1,2\n");
  EXPECT_THROW(read_anchors(bad), ParseError);
}
