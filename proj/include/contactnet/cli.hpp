#pragma once

// Command-line pipelines. run() is the whole program; tools/contactnet.cpp
// only forwards argv to it.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 data error, 3 I/O error.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "contactnet/aggnet.hpp"
#include "contactnet/beacon_sim.hpp"
#include "contactnet/contacts.hpp"
#include "contactnet/epi.hpp"
#include "contactnet/ingest.hpp"
#include "contactnet/layout.hpp"
#include "contactnet/netstats.hpp"

namespace contactnet::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int data = 2;
inline constexpr int io = 3;
} // namespace exit_code

namespace detail {

// Resolved settings of one invocation, echoed as the first line of every
// output file.
class Header {
public:
  explicit Header(std::string subcommand) : line_("# contactnet " + std::move(subcommand)) {}

  template <class T>
  void add(const std::string &key, const T &value) {
    std::ostringstream s;
    if constexpr (std::is_floating_point_v<T>)
      s << text::format_double(value);
    else
      s << value;
    line_ += ' ' + key + '=' + s.str();
  }

  const std::string &line() const { return line_; }

private:
  std::string line_;
};

struct Loaded {
  ValidatedStream stream;
  TimeGrid grid;
};

inline StreamFormat resolve_format(const std::string &flag, const std::string &path) {
  return flag.empty() ? format_for_path(path) : parse_stream_format(flag);
}

inline Loaded load(const std::string &path, const std::string &format_flag, double bin_width,
                   const std::string &drop_spec) {
  auto records = read_packet_file(path, resolve_format(format_flag, path));
  Loaded l;
  l.stream = validate_stream(std::move(records));
  if (!drop_spec.empty()) {
    const auto drop = resolve_drop_spec(drop_spec, l.stream.meta.beacons);
    auto kept = drop_beacons(l.stream.records, drop);
    auto warnings = std::move(l.stream.warnings);
    l.stream = validate_stream(std::move(kept));
    l.stream.warnings.insert(l.stream.warnings.begin(), warnings.begin(), warnings.end());
  }
  l.grid = l.stream.records.empty() ? TimeGrid(0.0, bin_width)
                                    : TimeGrid::aligned(l.stream.meta.t_min, bin_width);
  return l;
}

inline nlohmann::json fit_json(const FitResult &f) {
  return {{"exponent", f.exponent}, {"xmin", f.xmin}, {"n_tail", f.n_tail}, {"std_err", f.std_err}};
}

template <class Writer>
void write_output(const std::string &path, const Header &header, Writer &&write) {
  auto out = text::open_output(path);
  out << header.line() << '\n';
  write(out);
  text::check_written(out, path);
}

// Records with timestamps in [from, to).
inline std::vector<PacketRecord> in_window(std::span<const PacketRecord> records,
                                           std::optional<double> from, std::optional<double> to) {
  std::vector<PacketRecord> out;
  for (const auto &r : records)
    if ((!from || r.t >= *from) && (!to || r.t < *to))
      out.push_back(r);
  return out;
}

} // namespace detail

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Temporal contact-network engine for proximity beacon streams", "contactnet"};
  app.require_subcommand(1);

  // Options shared by the analysis subcommands.
  struct Common {
    std::string in;
    std::string format;
    double bin_width = 20.0;
    std::string drop;
  };
  const auto add_common = [](CLI::App *sub, Common &c, bool with_drop) {
    sub->add_option("--in", c.in, "Packet stream (csv or jsonl)")->required();
    sub->add_option("--format", c.format, "csv or jsonl (default: from extension)");
    sub->add_option("--bin-width", c.bin_width, "Analysis bin width in seconds")
        ->check(CLI::PositiveNumber);
    if (with_drop)
      sub->add_option("--drop-beacons", c.drop, "File of beacon ids, or <count>:<seed>");
  };

  std::function<int()> action;
  nlohmann::json summary;

  // simulate
  auto *simulate = app.add_subcommand("simulate", "Generate a synthetic conference packet stream");
  std::string sim_config;
  std::string sim_out;
  std::string sim_format;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::uint32_t> sim_days;
  std::optional<std::uint32_t> sim_agents;
  std::optional<double> sim_alpha;
  simulate->add_option("--config", sim_config, "Scenario key/value file");
  simulate->add_option("--out", sim_out, "Output stream path")->required();
  simulate->add_option("--format", sim_format, "csv or jsonl (default: from extension)");
  simulate->add_option("--seed", sim_seed, "RNG seed (overrides config)");
  simulate->add_option("--days", sim_days, "Number of days (overrides config)");
  simulate->add_option("--agents", sim_agents, "Number of agents (overrides config)");
  simulate->add_option("--duration-exponent", sim_alpha, "Contact-duration exponent (overrides config)");
  simulate->callback([&] {
    action = [&] {
      ScenarioConfig cfg = sim_config.empty() ? default_conference() : read_scenario_config(sim_config);
      if (sim_seed)
        cfg.rng_seed = *sim_seed;
      if (sim_days)
        cfg.days = *sim_days;
      if (sim_agents)
        cfg.n_agents = *sim_agents;
      if (sim_alpha)
        cfg.duration_exponent = *sim_alpha;
      cfg.validate();
      const auto format = detail::resolve_format(sim_format, sim_out);

      detail::Header header("simulate");
      header.add("format", to_string(format));
      auto stream = text::open_output(sim_out);
      stream << header.line() << '\n';
      std::istringstream lines(format_scenario_config(cfg));
      for (std::string l; std::getline(lines, l);)
        stream << "# " << l << '\n';
      if (format == StreamFormat::csv)
        stream << kCsvHeader << '\n';
      std::size_t n = 0;
      std::size_t n_contact = 0;
      generate_scenario(cfg, [&](const PacketRecord &r) {
        stream << format_packet_line(r, format) << '\n';
        ++n;
        n_contact += !r.seen.empty();
      });
      text::check_written(stream, sim_out);
      summary = {{"subcommand", "simulate"}, {"records", n}, {"contact_records", n_contact},
                 {"agents", cfg.n_agents}, {"days", cfg.days}, {"seed", cfg.rng_seed}};
      return exit_code::ok;
    };
  });

  // validate
  auto *validate = app.add_subcommand("validate", "Parse, sort, and deduplicate a packet stream");
  Common val;
  std::string val_out;
  std::vector<std::uint32_t> val_stations;
  add_common(validate, val, true);
  validate->add_option("--out", val_out, "Write the canonical stream here");
  validate->add_option("--stations", val_stations, "Known station ids")->delimiter(',');
  validate->callback([&] {
    action = [&] {
      auto records = read_packet_file(val.in, detail::resolve_format(val.format, val.in));
      std::set<StationId> known;
      for (auto s : val_stations)
        known.insert(StationId{s});
      auto v = validate_stream(std::move(records), known);
      if (!val.drop.empty())
        v = validate_stream(drop_beacons(v.records, resolve_drop_spec(val.drop, v.meta.beacons)), known);
      if (!val_out.empty()) {
        const auto format = detail::resolve_format(val.format, val_out);
        detail::Header header("validate");
        header.add("in", val.in);
        header.add("format", to_string(format));
        if (!val.drop.empty())
          header.add("drop_beacons", val.drop);
        detail::write_output(val_out, header, [&](std::ostream &o) { write_packets(o, v.records, format); });
      }
      const auto &m = v.meta;
      summary = {{"subcommand", "validate"}, {"records", m.n_records},
                 {"contact_records", m.n_contact_records}, {"beacons", m.beacons.size()},
                 {"stations", m.stations.size()}, {"t_min", m.t_min}, {"t_max", m.t_max},
                 {"warnings", v.warnings}};
      return exit_code::ok;
    };
  });

  // contacts
  auto *contacts = app.add_subcommand("contacts", "Detect contact events");
  Common con;
  std::uint32_t con_threshold = 1;
  std::string con_out;
  bool con_fit = false;
  std::optional<double> con_xmin;
  add_common(contacts, con, true);
  contacts->add_option("--threshold", con_threshold, "Packets per bin for a bin to count as contact")
      ->check(CLI::PositiveNumber);
  contacts->add_option("--out", con_out, "Event CSV output");
  contacts->add_flag("--fit", con_fit, "Fit a power law to the contact durations");
  contacts->add_option("--xmin", con_xmin, "Lower cutoff for the fit in seconds (default: bin width)");
  contacts->callback([&] {
    action = [&] {
      const auto l = detail::load(con.in, con.format, con.bin_width, con.drop);
      const auto map = bin_pair_counts(l.stream.records, l.grid);
      const auto events = detect_contacts(map, con_threshold);
      if (!con_out.empty()) {
        detail::Header header("contacts");
        header.add("in", con.in);
        header.add("bin_width", con.bin_width);
        header.add("threshold", con_threshold);
        header.add("grid_origin", l.grid.origin);
        if (!con.drop.empty())
          header.add("drop_beacons", con.drop);
        detail::write_output(con_out, header, [&](std::ostream &o) { write_events_csv(o, events); });
      }
      std::set<PairKey> pairs;
      for (const auto &e : events)
        pairs.insert(e.pair);
      summary = {{"subcommand", "contacts"}, {"events", events.size()}, {"pairs", pairs.size()},
                 {"warnings", l.stream.warnings}};
      if (con_fit) {
        const auto durations = contact_durations(events);
        summary["fit"] = detail::fit_json(
            fit_power_law(durations, con_xmin.value_or(con.bin_width), con.bin_width));
      }
      return exit_code::ok;
    };
  });

  // stats
  auto *stats = app.add_subcommand("stats", "Duration and inter-contact distributions");
  Common st;
  std::string st_measure = "durations";
  std::uint32_t st_threshold = 1;
  std::string st_out;
  std::string st_hist;
  int st_bpd = 5;
  bool st_fit = false;
  std::optional<double> st_xmin;
  add_common(stats, st, true);
  stats->add_option("--measure", st_measure, "durations, global, beacon, or pair")
      ->check(CLI::IsMember({"durations", "global", "beacon", "pair"}));
  stats->add_option("--threshold", st_threshold, "Packets per bin for contact")->check(CLI::PositiveNumber);
  stats->add_option("--out", st_out, "Samples, one per line");
  stats->add_option("--hist", st_hist, "Log-binned histogram CSV");
  stats->add_option("--bins-per-decade", st_bpd, "Histogram resolution")->check(CLI::PositiveNumber);
  stats->add_flag("--fit", st_fit, "Fit a discrete power law");
  stats->add_option("--xmin", st_xmin, "Lower cutoff for the fit in seconds (default: bin width)");
  stats->callback([&] {
    action = [&] {
      const auto l = detail::load(st.in, st.format, st.bin_width, st.drop);
      const auto events = detect_contacts(bin_pair_counts(l.stream.records, l.grid), st_threshold);
      std::vector<double> samples;
      if (st_measure == "durations")
        samples = contact_durations(events);
      else if (st_measure == "global")
        samples = intercontact_global(events, st.bin_width);
      else if (st_measure == "beacon")
        samples = intercontact_per_beacon(events, st.bin_width);
      else
        samples = intercontact_per_pair(events, st.bin_width);

      detail::Header header("stats");
      header.add("in", st.in);
      header.add("measure", st_measure);
      header.add("bin_width", st.bin_width);
      header.add("threshold", st_threshold);
      if (!st.drop.empty())
        header.add("drop_beacons", st.drop);
      if (!st_out.empty())
        detail::write_output(st_out, header, [&](std::ostream &o) { write_samples(o, samples); });
      if (!st_hist.empty()) {
        header.add("bins_per_decade", st_bpd);
        const auto hist = log_histogram(samples, st_bpd);
        detail::write_output(st_hist, header, [&](std::ostream &o) { write_histogram_csv(o, hist); });
      }
      summary = {{"subcommand", "stats"}, {"measure", st_measure}, {"samples", samples.size()}};
      if (!samples.empty()) {
        double sum = 0.0;
        for (double x : samples)
          sum += x;
        summary["mean"] = sum / static_cast<double>(samples.size());
        summary["max"] = *std::max_element(samples.begin(), samples.end());
      }
      if (st_fit)
        summary["fit"] = detail::fit_json(fit_power_law(samples, st_xmin.value_or(st.bin_width), st.bin_width));
      return exit_code::ok;
    };
  });

  // netstats
  auto *netstats = app.add_subcommand("netstats", "Per-bin degree, attendance, and clique series");
  Common ns;
  std::string ns_config;
  std::string ns_degree;
  std::string ns_attendance;
  std::string ns_cliques;
  std::optional<double> ns_from;
  std::optional<double> ns_to;
  add_common(netstats, ns, true);
  netstats->add_option("--config", ns_config, "Scenario file providing the station->room map");
  netstats->add_option("--degree", ns_degree, "Average-degree series CSV");
  netstats->add_option("--attendance", ns_attendance, "Attendance series CSV");
  netstats->add_option("--cliques", ns_cliques, "Maximal-clique census CSV");
  netstats->add_option("--from", ns_from, "Start time (s)");
  netstats->add_option("--to", ns_to, "End time (s, exclusive)");
  netstats->callback([&] {
    action = [&] {
      auto l = detail::load(ns.in, ns.format, ns.bin_width, ns.drop);
      const auto records = detail::in_window(l.stream.records, ns_from, ns_to);
      const auto map = bin_pair_counts(records, l.grid);
      const auto graphs = instant_graphs(records, map);

      detail::Header header("netstats");
      header.add("in", ns.in);
      header.add("bin_width", ns.bin_width);
      header.add("grid_origin", l.grid.origin);
      if (ns_from)
        header.add("from", *ns_from);
      if (ns_to)
        header.add("to", *ns_to);
      if (!ns.drop.empty())
        header.add("drop_beacons", ns.drop);

      std::vector<SeriesPoint> degree;
      std::vector<CliqueCensus> census;
      std::array<std::size_t, 4> clique_totals{};
      for (const auto &g : graphs) {
        if (g.nodes.empty())
          continue;
        degree.push_back({g.bin, l.grid.bin_start(g.bin), g.average_degree()});
        census.push_back(maximal_cliques(g));
        for (std::size_t i = 0; i < 4; ++i)
          clique_totals[i] += census.back().counts[i];
      }
      if (!ns_degree.empty())
        detail::write_output(ns_degree, header, [&](std::ostream &o) { write_series_csv(o, degree); });
      if (!ns_cliques.empty())
        detail::write_output(ns_cliques, header,
                             [&](std::ostream &o) { write_clique_csv(o, census, l.grid); });
      if (!ns_attendance.empty()) {
        const ScenarioConfig cfg =
            ns_config.empty() ? default_conference() : read_scenario_config(ns_config);
        std::map<StationId, std::string> rooms;
        for (const auto &r : cfg.rooms)
          rooms[r.station] = r.name;
        const auto att = attendance_series(records, l.grid, rooms);
        detail::write_output(ns_attendance, header,
                             [&](std::ostream &o) { write_attendance_csv(o, att, l.grid); });
      }
      double mean_k = 0.0;
      for (const auto &p : degree)
        mean_k += p.value;
      summary = {{"subcommand", "netstats"}, {"bins", degree.size()},
                 {"mean_degree", degree.empty() ? 0.0 : mean_k / static_cast<double>(degree.size())},
                 {"maximal_cliques", {{"2", clique_totals[0]}, {"3", clique_totals[1]},
                                      {"4", clique_totals[2]}, {"5+", clique_totals[3]}}}};
      return exit_code::ok;
    };
  });

  // aggregate
  auto *aggregate_cmd = app.add_subcommand("aggregate", "Aggregated weighted contact network");
  Common ag;
  std::optional<double> ag_from;
  std::optional<double> ag_to;
  std::string ag_mode = "packets";
  std::uint64_t ag_min_weight = 0;
  std::uint32_t ag_threshold = 1;
  std::string ag_out;
  std::string ag_export;
  std::string ag_labels;
  bool ag_drop_isolated = false;
  add_common(aggregate_cmd, ag, true);
  aggregate_cmd->add_option("--from", ag_from, "Span start (s); default: stream start");
  aggregate_cmd->add_option("--to", ag_to, "Span end (s, exclusive); default: stream end");
  aggregate_cmd->add_option("--weight-mode", ag_mode, "packets or events")
      ->check(CLI::IsMember({"packets", "events"}));
  aggregate_cmd->add_option("--min-weight", ag_min_weight, "Keep edges with weight above this");
  aggregate_cmd->add_option("--threshold", ag_threshold, "Packets per bin for contact events")
      ->check(CLI::PositiveNumber);
  aggregate_cmd->add_option("--out", ag_out, "Graph output");
  aggregate_cmd->add_option("--export-format", ag_export, "edge-csv or graph-json (default: from extension)");
  aggregate_cmd->add_option("--labels", ag_labels, "Node metadata as id,key,value rows");
  aggregate_cmd->add_flag("--drop-isolated", ag_drop_isolated, "Drop nodes left without edges");
  aggregate_cmd->callback([&] {
    action = [&] {
      const auto l = detail::load(ag.in, ag.format, ag.bin_width, ag.drop);
      const auto map = bin_pair_counts(l.stream.records, l.grid);
      const auto events = detect_contacts(map, ag_threshold);
      const double t0 = ag_from.value_or(l.grid.origin);
      const double t1 = ag_to.value_or(
          l.stream.records.empty() ? t0 + ag.bin_width
                                   : l.grid.bin_end(bin_of(l.stream.meta.t_max, l.grid)));
      auto g = aggregate(map, events, t0, t1, parse_weight_mode(ag_mode), l.stream.meta.beacons);
      if (!ag_labels.empty()) {
        auto in = text::open_input(ag_labels);
        for (auto &[id, labels] : read_labels(in))
          if (auto it = g.nodes.find(id); it != g.nodes.end())
            it->second = std::move(labels);
      }
      g = filter_edges(g, ag_min_weight, ag_drop_isolated);
      if (!ag_out.empty()) {
        const bool json_ext = ag_out.ends_with(".json");
        const auto format = parse_graph_format(!ag_export.empty() ? ag_export
                                               : json_ext         ? "graph-json"
                                                                  : "edge-csv");
        detail::Header header("aggregate");
        header.add("in", ag.in);
        header.add("from", t0);
        header.add("to", t1);
        header.add("weight_mode", ag_mode);
        header.add("min_weight", ag_min_weight);
        header.add("threshold", ag_threshold);
        header.add("bin_width", ag.bin_width);
        if (!ag.drop.empty())
          header.add("drop_beacons", ag.drop);
        detail::write_output(ag_out, header, [&](std::ostream &o) { export_graph(o, g, format); });
      }
      std::uint64_t max_strength = 0;
      for (const auto &[id, _] : g.nodes)
        max_strength = std::max(max_strength, node_strength(g, id));
      summary = {{"subcommand", "aggregate"}, {"nodes", g.nodes.size()}, {"edges", g.edges.size()},
                 {"average_degree", g.average_degree()}, {"total_weight", g.total_weight()},
                 {"max_strength", max_strength}};
      return exit_code::ok;
    };
  });

  // spread
  auto *spread = app.add_subcommand("spread", "SI contagion on the contact stream");
  Common sp;
  double sp_beta = 0.01;
  double sp_immune = 0.0;
  int sp_runs = 1;
  std::uint64_t sp_seed = 1;
  std::optional<std::uint32_t> sp_day;
  std::optional<std::uint32_t> sp_seed_beacon;
  std::string sp_trace;
  std::string sp_events;
  std::string sp_tree;
  add_common(spread, sp, true);
  spread->add_option("--beta", sp_beta, "Transmission probability per packet per bin")
      ->check(CLI::NonNegativeNumber);
  spread->add_option("--immune-frac", sp_immune, "Fraction of beacons initially immune");
  spread->add_option("--runs", sp_runs, "Independent stochastic runs")->check(CLI::PositiveNumber);
  spread->add_option("--seed", sp_seed, "RNG seed of the first run; run r uses seed + r");
  spread->add_option("--day", sp_day, "Restrict to day d (0-based, 24 h from t = 0)");
  spread->add_option("--seed-beacon", sp_seed_beacon, "Initially infectious beacon");
  spread->add_option("--trace", sp_trace, "Infected-count series CSV (first run)");
  spread->add_option("--events", sp_events, "Infection events CSV (first run)");
  spread->add_option("--tree", sp_tree, "Transmission tree as indented text (first run)");
  spread->callback([&] {
    action = [&] {
      const auto l = detail::load(sp.in, sp.format, sp.bin_width, sp.drop);
      std::vector<PacketRecord> records = l.stream.records;
      if (sp_day)
        records = detail::in_window(records, *sp_day * kSecondsPerDay, (*sp_day + 1) * kSecondsPerDay);
      if (records.empty())
        throw DataError("no records in the selected time range");
      const auto map = bin_pair_counts(records, l.grid);
      const std::pair<BinIndex, BinIndex> bins{bin_of(records.front().t, l.grid),
                                               bin_of(records.back().t, l.grid)};
      EpidemicParams params;
      params.beta = sp_beta;
      params.immune_frac = sp_immune;
      if (sp_seed_beacon)
        params.seed_beacon = BeaconId{*sp_seed_beacon};

      std::vector<std::size_t> finals;
      EpidemicTrace first;
      for (int r = 0; r < sp_runs; ++r) {
        params.rng_seed = sp_seed + static_cast<std::uint64_t>(r);
        auto trace = run_si(map, params, bins, l.stream.meta.beacons);
        finals.push_back(trace.final_infected());
        if (r == 0)
          first = std::move(trace);
      }
      detail::Header header("spread");
      header.add("in", sp.in);
      header.add("beta", sp_beta);
      header.add("immune_frac", sp_immune);
      header.add("runs", sp_runs);
      header.add("seed", sp_seed);
      header.add("bin_width", sp.bin_width);
      if (sp_day)
        header.add("day", *sp_day);
      if (sp_seed_beacon)
        header.add("seed_beacon", *sp_seed_beacon);
      if (!sp.drop.empty())
        header.add("drop_beacons", sp.drop);
      if (!sp_trace.empty())
        detail::write_output(sp_trace, header,
                             [&](std::ostream &o) { write_trace_csv(o, first, l.grid); });
      if (!sp_events.empty())
        detail::write_output(sp_events, header,
                             [&](std::ostream &o) { write_infection_events_csv(o, first); });
      if (!sp_tree.empty())
        detail::write_output(sp_tree, header,
                             [&](std::ostream &o) { write_tree_text(o, transmission_tree(first)); });
      double mean = 0.0;
      for (auto f : finals)
        mean += static_cast<double>(f);
      mean /= static_cast<double>(finals.size());
      summary = {{"subcommand", "spread"}, {"population", l.stream.meta.beacons.size()},
                 {"seed_beacon", first.seed.value}, {"immune", first.immune.size()},
                 {"final_infected", first.final_infected()}, {"runs", sp_runs},
                 {"mean_final_infected", mean}};
      return exit_code::ok;
    };
  });

  // layout
  auto *layout = app.add_subcommand("layout", "Force-directed coordinates per bin");
  Common lo;
  std::string lo_anchors;
  std::string lo_out;
  int lo_steps = 10;
  std::uint64_t lo_seed = 1;
  std::optional<double> lo_from;
  std::optional<double> lo_to;
  add_common(layout, lo, true);
  layout->add_option("--anchors", lo_anchors, "Station positions as station,x,y rows (default: circle)");
  layout->add_option("--out", lo_out, "Frame file")->required();
  layout->add_option("--steps-per-frame", lo_steps, "Layout iterations per bin")->check(CLI::NonNegativeNumber);
  layout->add_option("--seed", lo_seed, "RNG seed for initial positions");
  layout->add_option("--from", lo_from, "Start time (s)");
  layout->add_option("--to", lo_to, "End time (s, exclusive)");
  layout->callback([&] {
    action = [&] {
      const auto l = detail::load(lo.in, lo.format, lo.bin_width, lo.drop);
      const auto records = detail::in_window(l.stream.records, lo_from, lo_to);
      std::map<StationId, Vec2> anchors;
      if (!lo_anchors.empty()) {
        auto in = text::open_input(lo_anchors);
        anchors = read_anchors(in);
      } else {
        // Stations evenly spaced on a circle of radius 5.
        const auto &stations = l.stream.meta.stations;
        std::size_t i = 0;
        for (StationId s : stations) {
          const double a = 2.0 * std::numbers::pi * static_cast<double>(i++) /
                           static_cast<double>(std::max<std::size_t>(stations.size(), 1));
          anchors[s] = {5.0 * std::cos(a), 5.0 * std::sin(a)};
        }
      }
      const auto frames = layout_frames(records, bin_pair_counts(records, l.grid));
      detail::Header header("layout");
      header.add("in", lo.in);
      header.add("steps_per_frame", lo_steps);
      header.add("seed", lo_seed);
      header.add("bin_width", lo.bin_width);
      if (lo_from)
        header.add("from", *lo_from);
      if (lo_to)
        header.add("to", *lo_to);
      if (!lo_anchors.empty())
        header.add("anchors", lo_anchors);
      detail::write_output(lo_out, header,
                           [&](std::ostream &o) { emit_frames(o, frames, anchors, lo_steps, lo_seed); });
      summary = {{"subcommand", "layout"}, {"frames", frames.size()}, {"stations", anchors.size()}};
      return exit_code::ok;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    app.exit(e, out, err);
    return exit_code::ok;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << '\n' << app.help();
    return exit_code::config;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  }

  try {
    const int code = action();
    out << summary.dump() << '\n';
    return code;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const IoError &e) {
    err << "io error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const DataError &e) {
    err << "data error: " << e.what() << '\n';
    return exit_code::data;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_code::data;
  }
}

} // namespace contactnet::cli
