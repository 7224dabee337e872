#pragma once

// Synthetic conference scenario: agents move between rooms according to a
// daily schedule, form groups of 2-4 whose lifetime is power-law distributed,
// and every in-contact pair emits relayed contact reports.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contactnet/packet.hpp"
#include "contactnet/powerlaw.hpp"
#include "contactnet/text.hpp"

namespace contactnet {

enum class PhaseKind { session, coffee_break, lunch, overnight };

inline const char *to_string(PhaseKind k) {
  switch (k) {
  case PhaseKind::session:
    return "session";
  case PhaseKind::coffee_break:
    return "break";
  case PhaseKind::lunch:
    return "lunch";
  case PhaseKind::overnight:
    return "overnight";
  }
  return "?";
}

inline PhaseKind parse_phase_kind(std::string_view s) {
  if (s == "session")
    return PhaseKind::session;
  if (s == "break")
    return PhaseKind::coffee_break;
  if (s == "lunch")
    return PhaseKind::lunch;
  throw ConfigError("unknown phase kind '" + std::string(s) + "'");
}

// Schedule entry, in seconds from the start of each day.
struct PhaseSpec {
  PhaseKind kind = PhaseKind::session;
  Seconds start = 0.0;
  Seconds end = 0.0;
};

// A room and its relaying station, with the relative weight of the room when
// agents pick where to go in each kind of phase.
struct RoomSpec {
  StationId station;
  std::string name;
  double session_weight = 0.0;
  double break_weight = 0.0;
  double lunch_weight = 0.0;

  double weight(PhaseKind k) const {
    switch (k) {
    case PhaseKind::session:
      return session_weight;
    case PhaseKind::coffee_break:
      return break_weight;
    case PhaseKind::lunch:
      return lunch_weight;
    case PhaseKind::overnight:
      return 0.0;
    }
    return 0.0;
  }
};

inline constexpr Seconds kSecondsPerDay = 86400.0;

struct ScenarioConfig {
  std::uint32_t n_agents = 50;
  std::uint32_t days = 4;
  std::uint32_t first_beacon_id = 1000;
  Seconds bin_width = 20.0;
  std::vector<RoomSpec> rooms;
  std::vector<PhaseSpec> schedule; // repeated every day
  double duration_exponent = 2.0;
  std::int64_t min_duration = 1;   // bins
  std::int64_t max_duration = 540; // bins
  std::array<double, 3> group_size_weights{0.6, 0.25, 0.15}; // sizes 2, 3, 4
  double contact_start_prob_session = 0.0015;
  double contact_start_prob_break = 0.06;
  double packets_per_bin_mean = 6.0;
  double packet_loss_prob = 0.05;
  // Plain sightings (reports with an empty seen list) per present agent per bin.
  double sightings_per_bin_mean = 2.0;
  // Bins an agent sits out after its group dissolves before joining another.
  std::int64_t refractory_bins = 1;
  std::uint64_t rng_seed = 1;

  Seconds horizon() const { return static_cast<double>(days) * kSecondsPerDay; }

  void validate() const {
    const auto fail = [](const std::string &msg) { throw ConfigError(msg); };
    if (!(bin_width > 0.0))
      fail("bin_width must be positive");
    if (!(duration_exponent > 1.0))
      fail("duration_exponent must exceed 1");
    if (min_duration < 1 || max_duration < min_duration)
      fail("need 1 <= min_duration <= max_duration");
    double wsum = 0.0;
    for (double w : group_size_weights) {
      if (w < 0.0)
        fail("group_size_weights must be non-negative");
      wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
      fail("group_size_weights must sum to 1");
    for (double p : {contact_start_prob_session, contact_start_prob_break, packet_loss_prob})
      if (!(p >= 0.0 && p <= 1.0))
        fail("probabilities must lie in [0, 1]");
    if (!(packets_per_bin_mean > 0.0))
      fail("packets_per_bin must be positive");
    if (!(sightings_per_bin_mean >= 0.0))
      fail("sightings_per_bin must be non-negative");
    if (refractory_bins < 0)
      fail("refractory_bins must be non-negative");
    if (n_agents > 0 && rooms.empty())
      fail("scenario needs at least one room");
    for (std::size_t i = 0; i < rooms.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (rooms[i].station == rooms[j].station)
          fail("duplicate station id " + to_string(rooms[i].station));
    for (const auto &p : schedule) {
      if (!(p.start >= 0.0 && p.end > p.start && p.end <= kSecondsPerDay))
        fail("phase interval must satisfy 0 <= start < end <= 24h");
      bool reachable = false;
      for (const auto &r : rooms) {
        if (r.weight(p.kind) < 0.0)
          fail("room weights must be non-negative");
        reachable = reachable || r.weight(p.kind) > 0.0;
      }
      if (!reachable && n_agents > 0)
        fail(std::string("no room has positive weight for phase kind ") + to_string(p.kind));
    }
    std::vector<PhaseSpec> sorted = schedule;
    std::sort(sorted.begin(), sorted.end(),
              [](const PhaseSpec &a, const PhaseSpec &b) { return a.start < b.start; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].start < sorted[i - 1].end)
        fail("schedule phases overlap");
  }
};

// Four rooms (conference room, bar, cafeteria, lobby) and a day of four
// sessions separated by two coffee breaks and a lunch break.
inline ScenarioConfig default_conference() {
  ScenarioConfig c;
  c.rooms = {
      {StationId{1}, "conference", 0.95, 0.08, 0.04},
      {StationId{2}, "bar", 0.02, 0.72, 0.16},
      {StationId{3}, "cafeteria", 0.0, 0.05, 0.70},
      {StationId{4}, "lobby", 0.03, 0.15, 0.10},
  };
  const auto hm = [](int h, int m) { return static_cast<double>(h * 3600 + m * 60); };
  c.schedule = {
      {PhaseKind::session, hm(9, 0), hm(10, 30)},      {PhaseKind::coffee_break, hm(10, 30), hm(11, 0)},
      {PhaseKind::session, hm(11, 0), hm(12, 30)},     {PhaseKind::lunch, hm(12, 30), hm(14, 0)},
      {PhaseKind::session, hm(14, 0), hm(15, 30)},     {PhaseKind::coffee_break, hm(15, 30), hm(16, 0)},
      {PhaseKind::session, hm(16, 0), hm(17, 30)},
  };
  return c;
}

namespace detail {

// "09:30", "09:30:15", or plain seconds.
inline Seconds parse_clock(std::string_view s) {
  const auto parts = text::split(text::trim(s), ':');
  if (parts.size() == 1) {
    if (const auto v = text::to_double(parts[0]))
      return *v;
  } else if (parts.size() <= 3) {
    double total = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
      double v = 0.0;
      if (i < parts.size()) {
        const auto x = text::to_double(parts[i]);
        ok = ok && x.has_value();
        v = x.value_or(0.0);
      }
      total = total * 60.0 + v;
    }
    if (ok)
      return total;
  }
  throw ConfigError("bad time of day '" + std::string(s) + "'");
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    if (i > start)
      out.push_back(s.substr(start, i - start));
  }
  return out;
}

} // namespace detail

// Reads `key = value` lines; '#' starts a comment. `room` and `phase` lines
// repeat, and the first of either replaces the corresponding default list.
//
//   room  = <station> <name> <session_w> <break_w> <lunch_w>
//   phase = <session|break|lunch> <start hh:mm> <end hh:mm>
inline ScenarioConfig parse_scenario_config(std::istream &in,
                                            ScenarioConfig base = default_conference()) {
  ScenarioConfig c = std::move(base);
  bool rooms_reset = false;
  bool schedule_reset = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    const auto err = [&](const std::string &what) {
      return ConfigError("config line " + std::to_string(line_no) + " (" + key + "): " + what);
    };
    const auto num = [&]() {
      const auto v = text::to_double(value);
      if (!v)
        throw err("expected a number");
      return *v;
    };
    const auto uint = [&]() {
      const auto v = text::to_uint(value);
      if (!v)
        throw err("expected a non-negative integer");
      return *v;
    };

    if (key == "n_agents")
      c.n_agents = static_cast<std::uint32_t>(uint());
    else if (key == "days")
      c.days = static_cast<std::uint32_t>(uint());
    else if (key == "first_beacon_id")
      c.first_beacon_id = static_cast<std::uint32_t>(uint());
    else if (key == "bin_width")
      c.bin_width = num();
    else if (key == "duration_exponent")
      c.duration_exponent = num();
    else if (key == "min_duration")
      c.min_duration = static_cast<std::int64_t>(uint());
    else if (key == "max_duration")
      c.max_duration = static_cast<std::int64_t>(uint());
    else if (key == "group_size_weights") {
      const auto parts = text::split(value, ',');
      if (parts.size() != 3)
        throw err("expected three comma-separated weights for sizes 2, 3, 4");
      for (std::size_t i = 0; i < 3; ++i) {
        const auto v = text::to_double(parts[i]);
        if (!v)
          throw err("bad weight");
        c.group_size_weights[i] = *v;
      }
    } else if (key == "contact_start_prob_session")
      c.contact_start_prob_session = num();
    else if (key == "contact_start_prob_break")
      c.contact_start_prob_break = num();
    else if (key == "packets_per_bin")
      c.packets_per_bin_mean = num();
    else if (key == "packet_loss_prob")
      c.packet_loss_prob = num();
    else if (key == "sightings_per_bin")
      c.sightings_per_bin_mean = num();
    else if (key == "refractory_bins")
      c.refractory_bins = static_cast<std::int64_t>(uint());
    else if (key == "rng_seed" || key == "seed")
      c.rng_seed = uint();
    else if (key == "room") {
      const auto w = detail::words(value);
      if (w.size() != 5)
        throw err("expected: <station> <name> <session_w> <break_w> <lunch_w>");
      const auto station = text::to_u32(w[0]);
      const auto ws = text::to_double(w[2]);
      const auto wb = text::to_double(w[3]);
      const auto wl = text::to_double(w[4]);
      if (!station || !ws || !wb || !wl)
        throw err("bad room definition");
      if (!rooms_reset) {
        c.rooms.clear();
        rooms_reset = true;
      }
      c.rooms.push_back({StationId{*station}, std::string(w[1]), *ws, *wb, *wl});
    } else if (key == "phase") {
      const auto w = detail::words(value);
      if (w.size() != 3)
        throw err("expected: <session|break|lunch> <start> <end>");
      if (!schedule_reset) {
        c.schedule.clear();
        schedule_reset = true;
      }
      c.schedule.push_back(
          {parse_phase_kind(w[0]), detail::parse_clock(w[1]), detail::parse_clock(w[2])});
    } else {
      throw err("unknown key");
    }
  }
  c.validate();
  return c;
}

inline ScenarioConfig read_scenario_config(const std::string &path) {
  auto in = text::open_input(path);
  return parse_scenario_config(in);
}

// Key/value rendering that parse_scenario_config reads back.
inline std::string format_scenario_config(const ScenarioConfig &c) {
  std::ostringstream out;
  const auto f = text::format_double;
  out << "n_agents = " << c.n_agents << '\n'
      << "days = " << c.days << '\n'
      << "first_beacon_id = " << c.first_beacon_id << '\n'
      << "bin_width = " << f(c.bin_width) << '\n'
      << "duration_exponent = " << f(c.duration_exponent) << '\n'
      << "min_duration = " << c.min_duration << '\n'
      << "max_duration = " << c.max_duration << '\n'
      << "group_size_weights = " << f(c.group_size_weights[0]) << ','
      << f(c.group_size_weights[1]) << ',' << f(c.group_size_weights[2]) << '\n'
      << "contact_start_prob_session = " << f(c.contact_start_prob_session) << '\n'
      << "contact_start_prob_break = " << f(c.contact_start_prob_break) << '\n'
      << "packets_per_bin = " << f(c.packets_per_bin_mean) << '\n'
      << "packet_loss_prob = " << f(c.packet_loss_prob) << '\n'
      << "sightings_per_bin = " << f(c.sightings_per_bin_mean) << '\n'
      << "refractory_bins = " << c.refractory_bins << '\n'
      << "rng_seed = " << c.rng_seed << '\n';
  for (const auto &r : c.rooms)
    out << "room = " << r.station.value << ' ' << r.name << ' ' << f(r.session_weight) << ' '
        << f(r.break_weight) << ' ' << f(r.lunch_weight) << '\n';
  for (const auto &p : c.schedule)
    out << "phase = " << to_string(p.kind) << ' ' << f(p.start) << ' ' << f(p.end) << '\n';
  return out.str();
}

// The phase active at time t; `index` identifies the schedule entry and `day`
// the day, so a change in either marks a phase boundary.
struct Phase {
  PhaseKind kind = PhaseKind::overnight;
  std::uint32_t day = 0;
  std::size_t index = 0;

  bool emits() const { return kind != PhaseKind::overnight; }
  friend bool operator==(const Phase &, const Phase &) = default;
};

inline Phase schedule_phase(Seconds t, const ScenarioConfig &config) {
  if (t < 0.0 || t >= config.horizon())
    return {};
  const auto day = static_cast<std::uint32_t>(std::floor(t / kSecondsPerDay));
  const Seconds tod = t - day * kSecondsPerDay;
  for (std::size_t i = 0; i < config.schedule.size(); ++i) {
    const auto &p = config.schedule[i];
    if (tod >= p.start && tod < p.end)
      return {p.kind, day, i};
  }
  return {PhaseKind::overnight, day, 0};
}

template <class Rng>
std::int64_t sample_contact_duration(Rng &rng, double alpha, std::int64_t dmin, std::int64_t dmax) {
  return BoundedPowerLaw(alpha, dmin, dmax)(rng);
}

// Streams records in canonical stream order to `sink`, one bin at a time.
template <class Sink>
void generate_scenario(const ScenarioConfig &config, Sink &&sink) {
  config.validate();
  if (config.n_agents == 0 || config.schedule.empty())
    return;

  using Rng = std::mt19937_64;
  Rng rng(config.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const BoundedPowerLaw lifetime(config.duration_exponent, config.min_duration,
                                 config.max_duration);
  std::discrete_distribution<int> group_size(config.group_size_weights.begin(),
                                             config.group_size_weights.end());

  const std::size_t n = config.n_agents;
  constexpr int kIdle = -1;
  struct Group {
    std::vector<std::size_t> members;
    std::size_t room = 0;
    std::int64_t remaining = 0;
  };
  std::vector<Group> groups;
  std::vector<int> group_of(n, kIdle);
  std::vector<std::size_t> room_of(n, 0);
  std::vector<std::int64_t> available_from(n, 0);

  const auto pick_room = [&](PhaseKind kind) {
    std::vector<double> w;
    for (const auto &r : config.rooms)
      w.push_back(r.weight(kind));
    return static_cast<std::size_t>(std::discrete_distribution<int>(w.begin(), w.end())(rng));
  };

  const auto w = config.bin_width;
  const auto ms_per_bin = static_cast<std::int64_t>(std::llround(w * 1000.0));
  const auto n_bins = static_cast<std::int64_t>(std::ceil(config.horizon() / w));
  const auto beacon = [&](std::size_t agent) {
    return BeaconId{config.first_beacon_id + static_cast<std::uint32_t>(agent)};
  };

  Phase current{};
  std::vector<PacketRecord> bin_records;
  std::vector<std::size_t> order(n);

  for (std::int64_t k = 0; k < n_bins; ++k) {
    const Seconds t0 = static_cast<double>(k) * w;
    const Phase phase = schedule_phase(t0, config);
    if (!phase.emits()) {
      // Everyone goes home: groups end with the day.
      if (!groups.empty()) {
        groups.clear();
        std::fill(group_of.begin(), group_of.end(), kIdle);
        std::fill(available_from.begin(), available_from.end(), 0);
      }
      current = phase;
      continue;
    }
    if (!(phase == current)) {
      // Phase boundary: idle agents choose a room, groups move together.
      for (std::size_t a = 0; a < n; ++a)
        if (group_of[a] == kIdle)
          room_of[a] = pick_room(phase.kind);
      for (auto &g : groups) {
        g.room = pick_room(phase.kind);
        for (std::size_t m : g.members)
          room_of[m] = g.room;
      }
      current = phase;
    }

    // Group formation among idle agents of the same room.
    const double p_start = phase.kind == PhaseKind::session ? config.contact_start_prob_session
                                                            : config.contact_start_prob_break;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t a : order) {
      if (group_of[a] != kIdle || available_from[a] > k)
        continue;
      if (unit(rng) >= p_start)
        continue;
      std::vector<std::size_t> candidates;
      for (std::size_t b : order)
        if (b != a && group_of[b] == kIdle && available_from[b] <= k && room_of[b] == room_of[a])
          candidates.push_back(b);
      if (candidates.empty())
        continue;
      const auto want = static_cast<std::size_t>(group_size(rng)) + 1; // partners
      const auto take = std::min(want, candidates.size());
      std::shuffle(candidates.begin(), candidates.end(), rng);
      Group g;
      g.room = room_of[a];
      g.remaining = lifetime(rng);
      g.members.push_back(a);
      g.members.insert(g.members.end(), candidates.begin(),
                       candidates.begin() + static_cast<std::ptrdiff_t>(take));
      std::sort(g.members.begin(), g.members.end());
      for (std::size_t m : g.members)
        group_of[m] = static_cast<int>(groups.size());
      groups.push_back(std::move(g));
    }

    // Emission.
    bin_records.clear();
    const auto stamp = [&] {
      const auto ms = std::uniform_int_distribution<std::int64_t>(0, ms_per_bin - 1)(rng);
      return static_cast<double>(k * ms_per_bin + ms) / 1000.0;
    };
    std::poisson_distribution<int> sightings(config.sightings_per_bin_mean > 0.0
                                                 ? config.sightings_per_bin_mean
                                                 : 1.0);
    if (config.sightings_per_bin_mean > 0.0) {
      for (std::size_t a = 0; a < n; ++a) {
        const int count = sightings(rng);
        for (int i = 0; i < count; ++i)
          bin_records.push_back({stamp(), config.rooms[room_of[a]].station, beacon(a), {}});
      }
    }
    std::poisson_distribution<int> reports(config.packets_per_bin_mean);
    for (const auto &g : groups) {
      const StationId station = config.rooms[g.room].station;
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        for (std::size_t j = i + 1; j < g.members.size(); ++j) {
          const int count = reports(rng);
          for (int p = 0; p < count; ++p) {
            const bool flip = unit(rng) < 0.5;
            const bool lost = unit(rng) < config.packet_loss_prob;
            const Seconds t = stamp();
            if (lost)
              continue;
            const auto src = beacon(flip ? g.members[j] : g.members[i]);
            const auto dst = beacon(flip ? g.members[i] : g.members[j]);
            bin_records.push_back({t, station, src, {dst}});
          }
        }
      }
    }
    std::sort(bin_records.begin(), bin_records.end(), stream_order);
    // Identical reports in the same millisecond would be indistinguishable.
    bin_records.erase(std::unique(bin_records.begin(), bin_records.end()), bin_records.end());
    for (const auto &rec : bin_records)
      sink(rec);

    // Age groups; dissolved members rest for the refractory period.
    std::vector<Group> alive;
    for (auto &g : groups) {
      if (--g.remaining > 0) {
        alive.push_back(std::move(g));
        continue;
      }
      for (std::size_t m : g.members) {
        group_of[m] = kIdle;
        available_from[m] = k + 1 + config.refractory_bins;
      }
    }
    groups = std::move(alive);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
      for (std::size_t m : groups[gi].members)
        group_of[m] = static_cast<int>(gi);
  }
}

inline std::vector<PacketRecord> generate_scenario(const ScenarioConfig &config) {
  std::vector<PacketRecord> out;
  generate_scenario(config, [&](const PacketRecord &r) { out.push_back(r); });
  return out;
}

} // namespace contactnet
