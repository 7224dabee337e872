#pragma once

// Susceptible-Infected spreading on the binned contact stream. In every bin
// each contact between a susceptible and an infectious beacon transmits with
// probability min(1, beta * w), w being the packets the pair exchanged in
// that bin. Updates are synchronous: a beacon infected in bin k becomes
// infectious from bin k + 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "contactnet/contacts.hpp"

namespace contactnet {

struct EpidemicParams {
  double beta = 0.01;
  double immune_frac = 0.0;
  std::uint64_t rng_seed = 1;
  // Overrides the random choice of the initially infectious beacon.
  std::optional<BeaconId> seed_beacon;

  void validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta))
      throw ConfigError("beta must be a non-negative number");
    if (!(immune_frac >= 0.0 && immune_frac < 1.0))
      throw ConfigError("immune fraction must lie in [0, 1)");
  }

  double transmission_probability(std::uint64_t packets) const {
    return std::min(1.0, beta * static_cast<double>(packets));
  }
};

enum class Compartment : std::uint8_t { susceptible, infected, immune };

struct EpidemicState {
  std::map<BeaconId, Compartment> compartment;
  // First bin in which the beacon is infectious.
  std::map<BeaconId, BinIndex> infection_time;

  std::size_t n_infected() const { return infection_time.size(); }
  bool is(BeaconId b, Compartment c) const {
    const auto it = compartment.find(b);
    return it != compartment.end() && it->second == c;
  }
};

struct InfectionEvent {
  BinIndex bin = 0; // bin of the transmitting contact
  BeaconId infector;
  BeaconId infectee;

  friend bool operator==(const InfectionEvent &, const InfectionEvent &) = default;
};

// round(immune_frac * N) beacons become immune, then one of the remaining
// beacons is infectious from start_bin.
template <class Rng>
EpidemicState init_epidemic(const std::set<BeaconId> &beacons, const EpidemicParams &params,
                            Rng &rng, BinIndex start_bin = 0) {
  params.validate();
  std::vector<BeaconId> pool(beacons.begin(), beacons.end());
  const auto n_immune =
      static_cast<std::size_t>(std::llround(params.immune_frac * static_cast<double>(pool.size())));
  if (n_immune >= pool.size())
    throw ConfigError("no susceptible beacon left after drawing the immune set");

  EpidemicState state;
  for (BeaconId b : pool)
    state.compartment[b] = Compartment::susceptible;

  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<BeaconId> candidates;
  if (params.seed_beacon) {
    if (!beacons.contains(*params.seed_beacon))
      throw ConfigError("seed beacon " + to_string(*params.seed_beacon) + " is not in the population");
    // The seed is never drawn as immune.
    std::erase(pool, *params.seed_beacon);
    pool.push_back(*params.seed_beacon);
  }
  for (std::size_t i = 0; i < n_immune; ++i)
    state.compartment[pool[i]] = Compartment::immune;
  candidates.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_immune), pool.end());

  BeaconId seed;
  if (params.seed_beacon) {
    seed = *params.seed_beacon;
  } else {
    std::sort(candidates.begin(), candidates.end());
    seed = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  }
  state.compartment[seed] = Compartment::infected;
  state.infection_time[seed] = start_bin;
  return state;
}

// One synchronous update for the contacts of `bin`. Edges whose endpoints
// are unknown to the state are ignored.
template <class Rng>
std::vector<InfectionEvent> step_si(EpidemicState &state,
                                    std::span<const std::pair<PairKey, std::uint32_t>> bin_edges,
                                    const EpidemicParams &params, Rng &rng, BinIndex bin) {
  const auto infectious = [&](BeaconId b) {
    const auto it = state.infection_time.find(b);
    return it != state.infection_time.end() && it->second <= bin;
  };
  std::map<BeaconId, std::vector<BeaconId>> exposures;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto &[pair, w] : bin_edges) {
    BeaconId s;
    BeaconId i;
    if (state.is(pair.lo, Compartment::susceptible) && infectious(pair.hi)) {
      s = pair.lo;
      i = pair.hi;
    } else if (state.is(pair.hi, Compartment::susceptible) && infectious(pair.lo)) {
      s = pair.hi;
      i = pair.lo;
    } else {
      continue;
    }
    const double p = params.transmission_probability(w);
    if (p <= 0.0)
      continue;
    if (p >= 1.0 || unit(rng) < p)
      exposures[s].push_back(i);
  }
  std::vector<InfectionEvent> events;
  for (const auto &[s, infectors] : exposures) {
    const BeaconId by =
        infectors.size() == 1
            ? infectors.front()
            : infectors[std::uniform_int_distribution<std::size_t>(0, infectors.size() - 1)(rng)];
    state.compartment[s] = Compartment::infected;
    state.infection_time[s] = bin + 1;
    events.push_back({bin, by, s});
  }
  return events;
}

struct EpidemicTrace {
  BinIndex seed_bin = 0;
  BeaconId seed;
  std::vector<std::pair<BinIndex, std::size_t>> infected; // (bin, infected at end of bin)
  std::vector<InfectionEvent> events;
  std::set<BeaconId> immune;

  std::size_t final_infected() const { return infected.empty() ? 1 : infected.back().second; }
};

// Runs over every bin in [first_bin, last_bin] (default: the map's range).
// The population defaults to the beacons that appear in the map.
inline EpidemicTrace run_si(const BinContactMap &map, const EpidemicParams &params,
                            std::optional<std::pair<BinIndex, BinIndex>> bins = std::nullopt,
                            std::set<BeaconId> population = {}) {
  params.validate();
  if (!bins)
    bins = map.bin_range();
  if (!bins || bins->second < bins->first)
    throw DataError("epidemic run needs a non-empty bin range");
  if (population.empty())
    population = map.beacons();
  if (population.empty())
    throw DataError("epidemic run needs at least one beacon");

  std::mt19937_64 rng(params.rng_seed);
  EpidemicState state = init_epidemic(population, params, rng, bins->first);

  EpidemicTrace trace;
  trace.seed_bin = bins->first;
  trace.seed = state.infection_time.begin()->first;
  for (const auto &[b, c] : state.compartment)
    if (c == Compartment::immune)
      trace.immune.insert(b);

  const auto by_bin = map.by_bin();
  static const std::vector<std::pair<PairKey, std::uint32_t>> kNone;
  auto it = by_bin.lower_bound(bins->first);
  for (BinIndex k = bins->first; k <= bins->second; ++k) {
    const auto *edges = &kNone;
    if (it != by_bin.end() && it->first == k) {
      edges = &it->second;
      ++it;
    }
    auto ev = step_si(state, *edges, params, rng, k);
    trace.events.insert(trace.events.end(), ev.begin(), ev.end());
    trace.infected.emplace_back(k, state.n_infected());
  }
  return trace;
}

struct TreeNode {
  BeaconId beacon;
  BinIndex infection_time = 0;
  std::vector<std::size_t> children; // indices into TransmissionTree::nodes
};

// Who-infected-whom, rooted at the seed. Node 0 is the root.
struct TransmissionTree {
  std::vector<TreeNode> nodes;

  std::size_t size() const { return nodes.size(); }
};

inline TransmissionTree transmission_tree(const EpidemicTrace &trace) {
  TransmissionTree tree;
  std::map<BeaconId, std::size_t> index;
  tree.nodes.push_back({trace.seed, trace.seed_bin, {}});
  index[trace.seed] = 0;
  // Events are in bin order, so an infector is always inserted before its infectees.
  for (const auto &e : trace.events) {
    const auto parent = index.find(e.infector);
    if (parent == index.end())
      throw DataError("infector " + to_string(e.infector) + " was never infected");
    if (index.contains(e.infectee))
      throw DataError("beacon " + to_string(e.infectee) + " infected twice");
    if (!(e.bin + 1 > tree.nodes[parent->second].infection_time))
      throw DataError("infection of " + to_string(e.infectee) + " precedes its infector");
    index[e.infectee] = tree.nodes.size();
    tree.nodes[parent->second].children.push_back(tree.nodes.size());
    tree.nodes.push_back({e.infectee, e.bin + 1, {}});
  }
  return tree;
}

inline void write_trace_csv(std::ostream &out, const EpidemicTrace &trace, const TimeGrid &grid) {
  out << "bin,t_start,n_infected\n";
  for (const auto &[bin, n] : trace.infected)
    out << bin << ',' << text::format_double(grid.bin_start(bin)) << ',' << n << '\n';
}

inline void write_infection_events_csv(std::ostream &out, const EpidemicTrace &trace) {
  out << "bin,infector,infectee\n";
  for (const auto &e : trace.events)
    out << e.bin << ',' << e.infector.value << ',' << e.infectee.value << '\n';
}

// Indented text: one line per infected beacon with the bin it became infectious.
inline void write_tree_text(std::ostream &out, const TransmissionTree &tree) {
  if (tree.nodes.empty())
    return;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [idx, depth] = stack.back();
    stack.pop_back();
    const auto &n = tree.nodes[idx];
    out << std::string(depth * 2, ' ') << n.beacon.value << " @" << n.infection_time << '\n';
    for (auto c = n.children.rbegin(); c != n.children.rend(); ++c)
      stack.emplace_back(*c, depth + 1);
  }
}

} // namespace contactnet
