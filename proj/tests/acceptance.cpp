// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "contactnet/cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace contactnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ScenarioConfig one_day(std::uint64_t seed) {
  auto c = default_conference();
  c.n_agents = 50;
  c.days = 1;
  c.duration_exponent = 2.0;
  c.rng_seed = seed;
  return c;
}

double fitted_duration_exponent(std::span<const PacketRecord> records, double width) {
  const auto grid = TimeGrid::aligned(records.front().t, width);
  const auto events = detect_contacts(bin_pair_counts(records, grid));
  return fit_power_law(contact_durations(events), width, width).exponent;
}

PairKey pk(std::uint32_t a, std::uint32_t b) { return pair_key(BeaconId{a}, BeaconId{b}); }

const fs::path kWork = fs::current_path() / "acceptance_work";

// 1
Outcome closed_loop_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const auto stream = (kWork / "c1.csv").string();
  const auto sim = cli_run({"simulate", "--out", stream, "--agents", "50", "--days", "1",
                            "--duration-exponent", "2.0", "--seed", "1"});
  if (sim.code != 0)
    return {false, "simulate failed: " + sim.err};
  const auto r = cli_run({"contacts", "--in", stream, "--fit"});
  if (r.code != 0)
    return {false, "contacts failed: " + r.err};
  const double alpha = nlohmann::json::parse(r.out).at("fit").at("exponent").get<double>();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {alpha >= 1.8 && alpha <= 2.2 && secs < 60.0,
          fmt("fitted exponent %.4f, runtime %.2f s", alpha, secs)};
}

// 2
Outcome fitter_calibration() {
  bool ok = true;
  std::string detail;
  for (const auto &[alpha, tol] : {std::pair{2.0, 0.05}, std::pair{2.5, 0.07}}) {
    oracle::PowerLawSampler sampler(alpha, 1);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      std::mt19937_64 rng(seed * 7919);
      std::vector<double> xs(10'000);
      for (auto &x : xs)
        x = static_cast<double>(sampler(rng));
      worst = std::max(worst, std::abs(fit_power_law(xs, 1.0).exponent - alpha));
    }
    ok = ok && worst <= tol;
    detail += fmt("%salpha %.1f worst error %.4f (tol %.2f) over 5 seeds", detail.empty() ? "" : "; ",
                  alpha, worst, tol);
  }
  return {ok, detail};
}

// 3
Outcome contact_oracle() {
  std::mt19937_64 rng(2024);
  const TimeGrid grid(0.0, 20.0);
  std::size_t mismatches = 0, events = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n_beacons = std::uniform_int_distribution<std::uint32_t>(2, 5)(rng);
    const auto n_bins = std::uniform_int_distribution<std::int64_t>(1, 50)(rng);
    const int n = std::uniform_int_distribution<int>(0, 400)(rng);
    std::vector<PacketRecord> stream;
    for (int i = 0; i < n; ++i) {
      PacketRecord r;
      r.t = static_cast<double>(std::uniform_int_distribution<std::int64_t>(0, n_bins * 20'000 - 1)(rng)) /
            1000.0;
      r.station = StationId{1};
      r.src = BeaconId{std::uniform_int_distribution<std::uint32_t>(0, n_beacons - 1)(rng)};
      const int want = std::uniform_int_distribution<int>(
          0, static_cast<int>(std::min<std::uint32_t>(4, n_beacons - 1)))(rng);
      while (static_cast<int>(r.seen.size()) < want) {
        const BeaconId b{std::uniform_int_distribution<std::uint32_t>(0, n_beacons - 1)(rng)};
        if (b != r.src && !r.seen.contains(b))
          r.seen.push_back(b);
      }
      stream.push_back(r);
    }
    const auto map = bin_pair_counts(stream, grid);
    for (std::uint32_t threshold : {1u, 5u}) {
      std::vector<oracle::Run> got;
      for (const auto &e : detect_contacts(map, threshold))
        got.push_back({e.pair.lo.value, e.pair.hi.value, e.first_bin, e.last_bin, e.total_packets});
      std::sort(got.begin(), got.end());
      events += got.size();
      mismatches += got != oracle::bitmap_runs(stream, n_beacons, n_bins, 20.0, threshold);
    }
  }
  return {mismatches == 0, fmt("%zu mismatching streams of 2000 checks, %zu events compared",
                               mismatches, events)};
}

// 4
Outcome clique_oracle() {
  std::mt19937_64 rng(77);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    const double p = oracle::canonical(rng);
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    InstantGraph g;
    for (int v = 0; v < n; ++v)
      g.nodes.insert(BeaconId{static_cast<std::uint32_t>(v)});
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (oracle::canonical(rng) < p) {
          adj[a] |= 1u << b;
          adj[b] |= 1u << a;
          g.edges[pk(a, b)] = 1;
        }
    mismatches += maximal_cliques(g).counts != oracle::clique_census_exhaustive(n, adj);
  }
  const auto graph_of = [](std::initializer_list<std::pair<std::uint32_t, std::uint32_t>> es) {
    InstantGraph g;
    for (auto [a, b] : es) {
      g.edges[pk(a, b)] = 1;
      g.nodes.insert(BeaconId{a});
      g.nodes.insert(BeaconId{b});
    }
    return g;
  };
  const auto tri = maximal_cliques(graph_of({{1, 2}, {2, 3}, {1, 3}}));
  const auto k4 = maximal_cliques(graph_of({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}));
  const bool tri_ok = tri.counts == std::array<std::size_t, 4>{0, 1, 0, 0};
  const bool k4_ok = k4.counts == std::array<std::size_t, 4>{0, 0, 1, 0};
  return {mismatches == 0 && tri_ok && k4_ok,
          fmt("%zu/500 random graphs mismatch; triangle %s; K4 %s", mismatches,
              tri_ok ? "{3:1}" : "wrong", k4_ok ? "{4:1}" : "wrong")};
}

// 5
Outcome robustness() {
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = one_day(seed);
    const auto records = generate_scenario(c);
    const auto all = validate_stream(records).meta.beacons;
    const auto kept = drop_beacons(records, choose_beacons(all, 20, seed));
    const double full = fitted_duration_exponent(records, c.bin_width);
    const double reduced = fitted_duration_exponent(kept, c.bin_width);
    const double shift = std::abs(full - reduced);
    worst = std::max(worst, shift);
    within += shift < 0.3;
  }
  return {within >= 18, fmt("%d/20 trials shift < 0.3 (largest shift %.4f)", within, worst)};
}

// 6
Outcome phase_contrast() {
  const auto c = default_conference();
  const auto records = generate_scenario(c);
  const TimeGrid grid(0.0, c.bin_width);
  const auto map = bin_pair_counts(records, grid);
  struct Acc {
    double degree = 0.0, cliques34 = 0.0, bins = 0.0;
  };
  std::map<PhaseKind, Acc> acc;
  for (const auto &g : instant_graphs(records, map)) {
    auto &a = acc[schedule_phase(grid.bin_start(g.bin), c).kind];
    const auto census = maximal_cliques(g);
    a.degree += g.average_degree();
    a.cliques34 += static_cast<double>(census.of_size(3) + census.of_size(4));
    a.bins += 1.0;
  }
  const auto &s = acc[PhaseKind::session];
  const auto &b = acc[PhaseKind::coffee_break];
  if (s.bins == 0.0 || b.bins == 0.0)
    return {false, "missing session or break bins"};
  const double ks = s.degree / s.bins, kb = b.degree / b.bins;
  const double cs = s.cliques34 / s.bins, cb = b.cliques34 / b.bins;
  const double ratio = cs > 0.0 ? cb / cs : std::numeric_limits<double>::infinity();
  return {kb > ks && cb >= 5.0 * cs,
          fmt("<k> break %.3f vs session %.3f; 3/4-cliques per bin break %.4f vs session %.4f "
              "(ratio %.1f)",
              kb, ks, cb, cs, ratio)};
}

// 7
Outcome si_sanity() {
  std::vector<std::string> failures;
  const auto c = one_day(5);
  const TimeGrid grid(0.0, c.bin_width);
  const auto map = bin_pair_counts(generate_scenario(c), grid);

  EpidemicParams zero;
  zero.beta = 0.0;
  const auto flat = run_si(map, zero);
  if (!std::all_of(flat.infected.begin(), flat.infected.end(),
                   [](const auto &p) { return p.second == 1; }))
    failures.push_back("beta=0 trace not flat");

  // w >= 100 at beta 0.01: outcomes must not depend on the RNG seed.
  std::vector<BinCount> chain;
  for (std::uint32_t i = 1; i < 20; ++i)
    chain.push_back({pk(i, i + 1), static_cast<BinIndex>(i), 100 + i});
  const BinContactMap chain_map(grid, chain);
  std::optional<std::vector<InfectionEvent>> reference;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    EpidemicParams p;
    p.beta = 0.01;
    p.rng_seed = s;
    p.seed_beacon = BeaconId{1};
    const auto t = run_si(chain_map, p);
    if (t.final_infected() != 20 || (reference && *reference != t.events)) {
      failures.push_back("clamped transmission not certain");
      break;
    }
    reference = t.events;
  }

  for (std::uint64_t s = 1; s <= 30; ++s) {
    EpidemicParams p;
    p.beta = 0.02;
    p.rng_seed = s;
    const auto t = run_si(map, p);
    for (std::size_t i = 1; i < t.infected.size(); ++i)
      if (t.infected[i].second < t.infected[i - 1].second) {
        failures.push_back("infected count decreased");
        break;
      }
    try {
      const auto tree = transmission_tree(t);
      std::size_t links = 0;
      bool ordered = true;
      for (const auto &n : tree.nodes)
        for (std::size_t ch : n.children) {
          ++links;
          ordered = ordered && tree.nodes[ch].infection_time > n.infection_time;
        }
      if (tree.size() != t.final_infected() || links + 1 != tree.size() || !ordered)
        failures.push_back("tree inconsistent");
    } catch (const DataError &e) {
      failures.push_back(std::string("tree rejected: ") + e.what());
    }
  }

  std::string freq;
  for (std::uint32_t w : {10u, 30u, 70u}) {
    const std::vector<std::pair<PairKey, std::uint32_t>> edge{{pk(1, 2), w}};
    const int trials = 10'000;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
      EpidemicParams p;
      p.beta = 0.01;
      p.rng_seed = static_cast<std::uint64_t>(i) + 1;
      p.seed_beacon = BeaconId{1};
      std::mt19937_64 rng(p.rng_seed);
      auto state = init_epidemic({BeaconId{1}, BeaconId{2}}, p, rng);
      hits += !step_si(state, edge, p, rng, 0).empty();
    }
    const double prob = std::min(1.0, 0.01 * w);
    const double sigma = std::sqrt(trials * prob * (1.0 - prob));
    const double dev = std::abs(hits - trials * prob) / sigma;
    freq += fmt("%sw=%u %d/%d (%.2f sigma)", freq.empty() ? "" : ", ", w, hits, trials, dev);
    if (dev > 3.0)
      failures.push_back(fmt("frequency off at w=%u", w));
  }
  std::string detail = failures.empty() ? "all checks hold; " : "";
  for (const auto &f : failures)
    detail += f + "; ";
  return {failures.empty(), detail + freq};
}

// 8
Outcome temporal_causality() {
  const BinContactMap map(TimeGrid(0.0, 20.0), {{pk(1, 2), 0, 100}, {pk(2, 3), 5, 100}});
  int a_to_c = 0, c_to_a = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    EpidemicParams p;
    p.beta = 0.01;
    p.rng_seed = s;
    p.seed_beacon = BeaconId{1};
    const auto from_a = run_si(map, p);
    a_to_c += std::any_of(from_a.events.begin(), from_a.events.end(),
                          [](const auto &e) { return e.infectee == BeaconId{3}; });
    p.seed_beacon = BeaconId{3};
    const auto from_c = run_si(map, p);
    c_to_a += std::any_of(from_c.events.begin(), from_c.events.end(),
                          [](const auto &e) { return e.infectee == BeaconId{1}; });
  }
  return {a_to_c == 100 && c_to_a == 0,
          fmt("seed A infected C in %d/100 runs; seed C infected A in %d/100 runs", a_to_c, c_to_a)};
}

// 9
Outcome aggregation_growth() {
  int violations = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = default_conference();
    c.rng_seed = seed;
    const auto records = generate_scenario(c);
    const auto grid = TimeGrid::aligned(records.front().t, c.bin_width);
    const auto map = bin_pair_counts(records, grid);
    const auto events = detect_contacts(map);
    const auto population = validate_stream(records).meta.beacons;
    const double t0 = grid.origin;
    const double t_end = records.back().t + c.bin_width;
    double prev = 0.0;
    for (const auto mode : {WeightMode::packets, WeightMode::events}) {
      prev = 0.0;
      for (double t1 = t0 + 600.0; t1 < t_end + 600.0; t1 += 600.0) {
        const double k = aggregate(map, events, t0, t1, mode, population).average_degree();
        violations += k < prev;
        prev = k;
      }
    }
    const double day = aggregate(map, events, t0, t0 + kSecondsPerDay, WeightMode::packets, population)
                           .average_degree();
    if (seed == 1)
      detail = fmt("seed 1: <k> first day %.2f, all days %.2f; ", day, prev);
  }
  return {violations == 0, detail + fmt("%d decreases over 5 runs x 2 weight modes", violations)};
}

// 10
Outcome determinism() {
  const auto p = [](const std::string &n) { return (kWork / n).string(); };
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> commands = {
      {{"simulate", "--out", p("d.csv"), "--days", "1", "--seed", "9"}, {p("d.csv")}},
      {{"simulate", "--out", p("d.jsonl"), "--days", "1", "--seed", "9"}, {p("d.jsonl")}},
      {{"validate", "--in", p("d.csv"), "--out", p("v.csv")}, {p("v.csv")}},
      {{"contacts", "--in", p("d.csv"), "--threshold", "5", "--fit", "--out", p("e.csv")}, {p("e.csv")}},
      {{"stats", "--in", p("d.jsonl"), "--measure", "beacon", "--fit", "--out", p("s.txt"), "--hist",
        p("h.csv"), "--drop-beacons", "20:4"},
       {p("s.txt"), p("h.csv")}},
      {{"netstats", "--in", p("d.csv"), "--degree", p("k.csv"), "--attendance", p("a.csv"),
        "--cliques", p("q.csv")},
       {p("k.csv"), p("a.csv"), p("q.csv")}},
      {{"aggregate", "--in", p("d.csv"), "--weight-mode", "events", "--out", p("g.json")}, {p("g.json")}},
      {{"aggregate", "--in", p("d.csv"), "--out", p("g.csv"), "--min-weight", "2"}, {p("g.csv")}},
      {{"spread", "--in", p("d.csv"), "--beta", "0.02", "--runs", "5", "--seed", "3", "--immune-frac",
        "0.2", "--trace", p("t.csv"), "--events", p("ev.csv"), "--tree", p("tree.txt")},
       {p("t.csv"), p("ev.csv"), p("tree.txt")}},
      {{"layout", "--in", p("d.csv"), "--to", "34200", "--seed", "5", "--out", p("l.txt")}, {p("l.txt")}},
  };
  std::vector<std::string> differing;
  std::set<std::string> covered;
  for (const auto &[args, files] : commands) {
    std::vector<std::string> first_bytes;
    const auto a = cli_run(args);
    for (const auto &f : files)
      first_bytes.push_back(slurp(f));
    const auto b = cli_run(args);
    bool same = a.code == 0 && b.code == 0 && a.out == b.out;
    for (std::size_t i = 0; i < files.size(); ++i)
      same = same && !first_bytes[i].empty() && slurp(files[i]) == first_bytes[i];
    if (!same)
      differing.push_back(args[0] + (a.code != 0 ? " (exit " + std::to_string(a.code) + ": " + a.err + ")" : ""));
    covered.insert(args[0]);
  }
  std::string detail = fmt("%zu subcommands, %zu invocations run twice", covered.size(), commands.size());
  for (const auto &d : differing)
    detail += "; differs: " + d;
  return {differing.empty() && covered.size() == 8, detail};
}

} // namespace

int main() {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const std::vector<std::pair<const char *, Outcome (*)()>> criteria = {
      {"closed-loop exponent recovery", closed_loop_recovery},
      {"fitter calibration", fitter_calibration},
      {"contact-detection oracle", contact_oracle},
      {"clique oracle", clique_oracle},
      {"robustness to dropped beacons", robustness},
      {"phase contrast", phase_contrast},
      {"SI sanity suite", si_sanity},
      {"temporal causality", temporal_causality},
      {"aggregation growth", aggregation_growth},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  fs::remove_all(kWork);
  std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
