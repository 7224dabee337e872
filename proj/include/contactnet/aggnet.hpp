#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>

#include "json.hpp"

#include "contactnet/contacts.hpp"

namespace contactnet {

enum class WeightMode { events, packets };

inline WeightMode parse_weight_mode(std::string_view s) {
  if (s == "events")
    return WeightMode::events;
  if (s == "packets")
    return WeightMode::packets;
  throw ConfigError("unknown weight mode '" + std::string(s) + "' (expected events or packets)");
}

inline const char *to_string(WeightMode m) { return m == WeightMode::events ? "events" : "packets"; }

using NodeLabels = std::map<std::string, std::string>;

struct WeightedGraph {
  std::map<BeaconId, NodeLabels> nodes;
  std::map<PairKey, std::uint64_t> edges;
  Seconds t0 = 0.0;
  Seconds t1 = 0.0;

  double average_degree() const {
    return nodes.empty() ? 0.0
                         : 2.0 * static_cast<double>(edges.size()) /
                               static_cast<double>(nodes.size());
  }
  std::uint64_t total_weight() const {
    std::uint64_t s = 0;
    for (const auto &[p, w] : edges)
      s += w;
    return s;
  }
  friend bool operator==(const WeightedGraph &, const WeightedGraph &) = default;
};

// Weighted network over [t0, t1). A bin belongs to the span when its start
// does. Packet weights sum bin counts; event weights count the events with at
// least one bin in the span. Nodes are the endpoints of the resulting edges
// plus any beacons passed as `population`.
inline WeightedGraph aggregate(const BinContactMap &map, std::span<const ContactEvent> events,
                               Seconds t0, Seconds t1, WeightMode mode = WeightMode::packets,
                               const std::set<BeaconId> &population = {}) {
  if (!(t0 < t1))
    throw ConfigError("aggregation span needs t0 < t1");
  const auto &grid = map.grid();
  // First and one-past-last bins whose start lies in [t0, t1).
  const auto first_bin = static_cast<BinIndex>(std::ceil((t0 - grid.origin) / grid.bin_width));
  const auto end_bin = static_cast<BinIndex>(std::ceil((t1 - grid.origin) / grid.bin_width));

  WeightedGraph g;
  g.t0 = t0;
  g.t1 = t1;
  for (BeaconId b : population)
    g.nodes[b];
  if (mode == WeightMode::packets) {
    for (const auto &e : map.entries())
      if (e.bin >= first_bin && e.bin < end_bin)
        g.edges[e.pair] += e.count;
  } else {
    for (const auto &e : events)
      if (e.last_bin >= first_bin && e.first_bin < end_bin)
        ++g.edges[e.pair];
  }
  for (const auto &[pair, w] : g.edges) {
    g.nodes[pair.lo];
    g.nodes[pair.hi];
  }
  return g;
}

inline std::uint64_t node_strength(const WeightedGraph &g, BeaconId n) {
  if (!g.nodes.contains(n))
    throw LookupError("beacon " + to_string(n) + " is not in the graph");
  std::uint64_t s = 0;
  for (const auto &[pair, w] : g.edges)
    if (pair.contains(n))
      s += w;
  return s;
}

// Keeps edges with weight strictly above wmin. Nodes stay unless
// drop_isolated is set, in which case only edge endpoints remain.
inline WeightedGraph filter_edges(const WeightedGraph &g, std::uint64_t wmin,
                                  bool drop_isolated = false) {
  WeightedGraph out;
  out.t0 = g.t0;
  out.t1 = g.t1;
  for (const auto &[pair, w] : g.edges)
    if (w > wmin)
      out.edges.emplace(pair, w);
  if (!drop_isolated) {
    out.nodes = g.nodes;
  } else {
    for (const auto &[pair, w] : out.edges) {
      out.nodes[pair.lo] = g.nodes.at(pair.lo);
      out.nodes[pair.hi] = g.nodes.at(pair.hi);
    }
  }
  return out;
}

enum class GraphFormat { edge_csv, graph_json };

inline GraphFormat parse_graph_format(std::string_view s) {
  if (s == "edge-csv")
    return GraphFormat::edge_csv;
  if (s == "graph-json")
    return GraphFormat::graph_json;
  throw ConfigError("unknown graph format '" + std::string(s) + "' (expected edge-csv or graph-json)");
}

namespace detail {

// Labels travel in edge-csv comments as key=value pairs joined by ';'. Keys
// and values must therefore avoid ';', '=', and line breaks.
inline void check_label_text(const std::string &s) {
  if (s.find_first_of(";=\n\r") != std::string::npos)
    throw DataError("label text '" + s + "' contains a reserved character");
}

} // namespace detail

// edge-csv: `# span,<t0>,<t1>` and `# node,<id>,<k=v;...>` comment lines
// followed by the `lo,hi,weight` table.
inline void write_edge_csv(std::ostream &out, const WeightedGraph &g) {
  out << "# span," << text::format_double(g.t0) << ',' << text::format_double(g.t1) << '\n';
  for (const auto &[id, labels] : g.nodes) {
    out << "# node," << id.value << ',';
    bool first = true;
    for (const auto &[k, v] : labels) {
      detail::check_label_text(k);
      detail::check_label_text(v);
      out << (first ? "" : ";") << k << '=' << v;
      first = false;
    }
    out << '\n';
  }
  out << "lo,hi,weight\n";
  for (const auto &[pair, w] : g.edges)
    out << pair.lo.value << ',' << pair.hi.value << ',' << w << '\n';
}

inline WeightedGraph read_edge_csv(std::istream &in) {
  WeightedGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = text::trim(line);
    if (t.empty())
      continue;
    if (t.starts_with("# span,")) {
      const auto f = text::split(t.substr(7), ',');
      const auto a = f.size() == 2 ? text::to_double(f[0]) : std::nullopt;
      const auto b = f.size() == 2 ? text::to_double(f[1]) : std::nullopt;
      if (!a || !b)
        throw ParseError(line_no, "bad span line");
      g.t0 = *a;
      g.t1 = *b;
      continue;
    }
    if (t.starts_with("# node,")) {
      const auto rest = t.substr(7);
      const auto comma = rest.find(',');
      const auto id = text::to_u32(rest.substr(0, comma));
      if (!id)
        throw ParseError(line_no, "bad node line");
      auto &labels = g.nodes[BeaconId{*id}];
      if (comma != std::string_view::npos && comma + 1 < rest.size()) {
        for (auto kv : text::split(rest.substr(comma + 1), ';')) {
          const auto eq = kv.find('=');
          if (eq == std::string_view::npos)
            throw ParseError(line_no, "bad label '" + std::string(kv) + "'");
          labels[std::string(kv.substr(0, eq))] = std::string(kv.substr(eq + 1));
        }
      }
      continue;
    }
    if (t.front() == '#' || t == "lo,hi,weight")
      continue;
    const auto f = text::split(t, ',');
    if (f.size() != 3)
      throw ParseError(line_no, "expected lo,hi,weight");
    const auto lo = text::to_u32(f[0]);
    const auto hi = text::to_u32(f[1]);
    const auto w = text::to_uint(f[2]);
    if (!lo || !hi || !w)
      throw ParseError(line_no, "bad edge row");
    const auto key = pair_key(BeaconId{*lo}, BeaconId{*hi});
    g.edges[key] = *w;
    g.nodes[key.lo];
    g.nodes[key.hi];
  }
  return g;
}

inline nlohmann::json to_json(const WeightedGraph &g) {
  nlohmann::json j;
  j["span"] = {g.t0, g.t1};
  auto nodes = nlohmann::json::array();
  for (const auto &[id, labels] : g.nodes) {
    nlohmann::json n;
    n["id"] = id.value;
    n["labels"] = labels;
    nodes.push_back(std::move(n));
  }
  j["nodes"] = std::move(nodes);
  auto edges = nlohmann::json::array();
  for (const auto &[pair, w] : g.edges)
    edges.push_back({{"lo", pair.lo.value}, {"hi", pair.hi.value}, {"weight", w}});
  j["edges"] = std::move(edges);
  return j;
}

inline WeightedGraph graph_from_json(const nlohmann::json &j) {
  try {
    WeightedGraph g;
    g.t0 = j.at("span").at(0).get<double>();
    g.t1 = j.at("span").at(1).get<double>();
    for (const auto &n : j.at("nodes"))
      g.nodes[BeaconId{n.at("id").get<std::uint32_t>()}] =
          n.contains("labels") ? n.at("labels").get<NodeLabels>() : NodeLabels{};
    for (const auto &e : j.at("edges")) {
      const auto key =
          pair_key(BeaconId{e.at("lo").get<std::uint32_t>()}, BeaconId{e.at("hi").get<std::uint32_t>()});
      g.edges[key] = e.at("weight").get<std::uint64_t>();
      g.nodes[key.lo];
      g.nodes[key.hi];
    }
    return g;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("malformed graph JSON: ") + e.what());
  }
}

inline void export_graph(std::ostream &out, const WeightedGraph &g, GraphFormat format) {
  if (format == GraphFormat::edge_csv)
    write_edge_csv(out, g);
  else
    out << to_json(g).dump(2) << '\n';
}

inline void export_graph(const std::string &path, const WeightedGraph &g, GraphFormat format) {
  auto out = text::open_output(path);
  export_graph(out, g, format);
  text::check_written(out, path);
}

inline WeightedGraph import_graph(std::istream &in, GraphFormat format) {
  if (format == GraphFormat::edge_csv)
    return read_edge_csv(in);
  // Leading '#' header lines are not JSON.
  std::string body;
  std::string line;
  while (std::getline(in, line))
    if (!text::trim(line).starts_with("#"))
      body += line + '\n';
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error &e) {
    throw DataError(std::string("invalid graph JSON: ") + e.what());
  }
  return graph_from_json(j);
}

inline WeightedGraph import_graph(const std::string &path, GraphFormat format) {
  auto in = text::open_input(path);
  return import_graph(in, format);
}

// Node metadata from `id,key,value` rows.
inline std::map<BeaconId, NodeLabels> read_labels(std::istream &in) {
  std::map<BeaconId, NodeLabels> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_comment_or_blank(line) || text::trim(line).starts_with("id,"))
      continue;
    const auto f = text::split(text::trim(line), ',');
    const auto id = f.size() == 3 ? text::to_u32(f[0]) : std::nullopt;
    if (!id)
      throw ParseError(line_no, "expected id,key,value");
    out[BeaconId{*id}][std::string(text::trim(f[1]))] = std::string(text::trim(f[2]));
  }
  return out;
}

} // namespace contactnet
