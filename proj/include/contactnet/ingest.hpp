#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "contactnet/packet.hpp"
#include "contactnet/text.hpp"

namespace contactnet {

enum class StreamFormat { csv, jsonl };

inline StreamFormat parse_stream_format(std::string_view name) {
  if (name == "csv")
    return StreamFormat::csv;
  if (name == "jsonl")
    return StreamFormat::jsonl;
  throw ConfigError("unknown stream format '" + std::string(name) + "' (expected csv or jsonl)");
}

inline const char *to_string(StreamFormat f) { return f == StreamFormat::csv ? "csv" : "jsonl"; }

// jsonl for *.jsonl / *.json paths, csv otherwise.
inline StreamFormat format_for_path(std::string_view path) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.substr(path.size() - suffix.size()) == suffix;
  };
  return ends_with(".jsonl") || ends_with(".json") ? StreamFormat::jsonl : StreamFormat::csv;
}

inline constexpr std::string_view kCsvHeader = "t,station,src,seen1,seen2,seen3,seen4";

namespace detail {

inline void check_record(PacketRecord &rec, std::size_t line_no) {
  if (!std::isfinite(rec.t))
    throw ParseError(line_no, "timestamp is not finite");
  for (std::size_t i = 0; i < rec.seen.size(); ++i) {
    if (rec.seen[i] == rec.src)
      throw ProtocolViolation(line_no, "beacon " + to_string(rec.src) + " lists itself as seen");
    for (std::size_t j = 0; j < i; ++j)
      if (rec.seen[i] == rec.seen[j])
        throw ProtocolViolation(line_no, "duplicate seen beacon " + to_string(rec.seen[i]));
  }
}

inline PacketRecord parse_csv(std::string_view line, std::size_t line_no) {
  const auto fields = text::split(text::trim(line), ',');
  if (fields.size() < 3)
    throw ParseError(line_no, "expected at least 3 fields (t,station,src)");

  PacketRecord rec;
  const auto t = text::to_double(fields[0]);
  if (!t)
    throw ParseError(line_no, "bad timestamp '" + std::string(fields[0]) + "'");
  rec.t = *t;
  const auto station = text::to_u32(fields[1]);
  if (!station)
    throw ParseError(line_no, "bad station id '" + std::string(fields[1]) + "'");
  rec.station = StationId{*station};
  const auto src = text::to_u32(fields[2]);
  if (!src)
    throw ParseError(line_no, "bad source beacon id '" + std::string(fields[2]) + "'");
  rec.src = BeaconId{*src};

  std::size_t n_seen = 0;
  for (std::size_t i = 3; i < fields.size(); ++i) {
    if (text::trim(fields[i]).empty())
      continue;
    const auto id = text::to_u32(fields[i]);
    if (!id)
      throw ParseError(line_no, "bad seen beacon id '" + std::string(fields[i]) + "'");
    if (++n_seen > kMaxSeen)
      throw ProtocolViolation(line_no, "more than 4 seen beacons in one report");
    rec.seen.push_back(BeaconId{*id});
  }
  check_record(rec, line_no);
  return rec;
}

inline std::uint32_t json_id(const nlohmann::json &v, const char *what, std::size_t line_no) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
    throw ParseError(line_no, std::string("field '") + what + "' must be a non-negative integer");
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

inline PacketRecord parse_jsonl(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError(line_no, "expected a JSON object");
  for (const char *key : {"t", "station", "src"})
    if (!j.contains(key))
      throw ParseError(line_no, std::string("missing field '") + key + "'");

  PacketRecord rec;
  if (!j["t"].is_number())
    throw ParseError(line_no, "field 't' must be a number");
  rec.t = j["t"].get<double>();
  rec.station = StationId{json_id(j["station"], "station", line_no)};
  rec.src = BeaconId{json_id(j["src"], "src", line_no)};
  if (j.contains("seen")) {
    const auto &seen = j["seen"];
    if (!seen.is_array())
      throw ParseError(line_no, "field 'seen' must be an array");
    if (seen.size() > kMaxSeen)
      throw ProtocolViolation(line_no, "more than 4 seen beacons in one report");
    for (const auto &id : seen)
      rec.seen.push_back(BeaconId{json_id(id, "seen", line_no)});
  }
  check_record(rec, line_no);
  return rec;
}

} // namespace detail

inline PacketRecord parse_packet_line(std::string_view line, StreamFormat format,
                                      std::size_t line_no = 1) {
  return format == StreamFormat::csv ? detail::parse_csv(line, line_no)
                                     : detail::parse_jsonl(line, line_no);
}

inline std::string format_packet_line(const PacketRecord &rec, StreamFormat format) {
  if (format == StreamFormat::csv) {
    std::string out = text::format_double(rec.t);
    out += ',';
    out += to_string(rec.station);
    out += ',';
    out += to_string(rec.src);
    for (std::size_t i = 0; i < kMaxSeen; ++i) {
      out += ',';
      if (i < rec.seen.size())
        out += to_string(rec.seen[i]);
    }
    return out;
  }
  nlohmann::json j;
  j["t"] = rec.t;
  j["station"] = rec.station.value;
  j["src"] = rec.src.value;
  auto seen = nlohmann::json::array();
  for (BeaconId b : rec.seen)
    seen.push_back(b.value);
  j["seen"] = std::move(seen);
  return j.dump();
}

// Reads a whole stream. Blank lines, '#' comments, and the CSV header are skipped.
inline std::vector<PacketRecord> read_packets(std::istream &in, StreamFormat format) {
  std::vector<PacketRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_comment_or_blank(line))
      continue;
    if (format == StreamFormat::csv && text::trim(line).starts_with("t,"))
      continue;
    records.push_back(parse_packet_line(line, format, line_no));
  }
  return records;
}

inline std::vector<PacketRecord> read_packet_file(const std::string &path, StreamFormat format) {
  auto in = text::open_input(path);
  return read_packets(in, format);
}

inline void write_packets(std::ostream &out, std::span<const PacketRecord> records,
                          StreamFormat format) {
  if (format == StreamFormat::csv)
    out << kCsvHeader << '\n';
  for (const auto &rec : records)
    out << format_packet_line(rec, format) << '\n';
}

struct StreamMeta {
  std::size_t n_records = 0;
  Seconds t_min = 0.0;
  Seconds t_max = 0.0;
  std::set<BeaconId> beacons;
  std::set<StationId> stations;
  std::size_t n_contact_records = 0;
};

struct ValidatedStream {
  std::vector<PacketRecord> records;
  StreamMeta meta;
  std::vector<std::string> warnings;
};

// Sorts into canonical stream order, drops exact duplicates, and summarizes.
// When known_stations is non-empty, records from other stations are kept but
// reported.
inline ValidatedStream validate_stream(std::vector<PacketRecord> records,
                                       const std::set<StationId> &known_stations = {}) {
  ValidatedStream out;
  if (!std::is_sorted(records.begin(), records.end(), stream_order)) {
    out.warnings.push_back("records out of time order; re-sorted");
    std::stable_sort(records.begin(), records.end(), stream_order);
  }
  const auto before = records.size();
  records.erase(std::unique(records.begin(), records.end()), records.end());
  if (const auto dups = before - records.size(); dups > 0)
    out.warnings.push_back(std::to_string(dups) + " duplicate record(s) removed");

  auto &meta = out.meta;
  meta.n_records = records.size();
  if (!records.empty()) {
    meta.t_min = records.front().t;
    meta.t_max = records.back().t;
  }
  std::set<StationId> unknown;
  for (const auto &rec : records) {
    meta.beacons.insert(rec.src);
    meta.beacons.insert(rec.seen.begin(), rec.seen.end());
    meta.stations.insert(rec.station);
    if (!rec.seen.empty())
      ++meta.n_contact_records;
    if (!known_stations.empty() && !known_stations.contains(rec.station))
      unknown.insert(rec.station);
  }
  for (StationId s : unknown)
    out.warnings.push_back("unknown station " + to_string(s));
  out.records = std::move(records);
  return out;
}

// Removes every record sent by a dropped beacon and strips dropped beacons
// from the remaining seen lists.
inline std::vector<PacketRecord> drop_beacons(std::span<const PacketRecord> records,
                                              const std::set<BeaconId> &ids) {
  std::vector<PacketRecord> out;
  out.reserve(records.size());
  for (const auto &rec : records) {
    if (ids.contains(rec.src))
      continue;
    PacketRecord copy = rec;
    copy.seen.erase_if([&](BeaconId b) { return ids.contains(b); });
    out.push_back(copy);
  }
  return out;
}

// Uniformly chooses `count` distinct beacons from the population.
inline std::set<BeaconId> choose_beacons(const std::set<BeaconId> &population, std::size_t count,
                                         std::uint64_t seed) {
  if (count > population.size())
    throw ConfigError("cannot drop " + std::to_string(count) + " of " +
                      std::to_string(population.size()) + " beacons");
  std::vector<BeaconId> pool(population.begin(), population.end());
  std::mt19937_64 rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count)};
}

// Reads beacon ids, one per line.
inline std::set<BeaconId> read_beacon_list(const std::string &path) {
  auto in = text::open_input(path);
  std::set<BeaconId> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_comment_or_blank(line))
      continue;
    const auto id = text::to_u32(line);
    if (!id)
      throw ParseError(line_no, "bad beacon id '" + line + "'");
    ids.insert(BeaconId{*id});
  }
  return ids;
}

// Resolves a --drop-beacons argument: "<count>:<seed>" draws that many
// beacons at random, anything else names a file of ids.
inline std::set<BeaconId> resolve_drop_spec(std::string_view spec,
                                            const std::set<BeaconId> &population) {
  const auto parts = text::split(spec, ':');
  if (parts.size() == 2) {
    const auto count = text::to_uint(parts[0]);
    const auto seed = text::to_uint(parts[1]);
    if (count && seed)
      return choose_beacons(population, *count, *seed);
  }
  return read_beacon_list(std::string(spec));
}

} // namespace contactnet
