#include "bse/config.hpp"

#include <charconv>
#include <fstream>
#include <span>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace bse {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    auto next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("bad {} '{}'", what, s));
  }
  return value;
}

OffsetFunction offset_from_tokens(std::span<const std::string_view> tok) {
  if (tok.empty()) return NoOffset{};
  const auto name = trim(tok[0]);
  auto need = [&](std::size_t n) {
    if (tok.size() != n + 1) throw ConfigError(fmt::format("offset '{}' takes {} parameter(s)", name, n));
  };
  if (name == "none") {
    need(0);
    return NoOffset{};
  }
  if (name == "linear") {
    need(1);
    return LinearRamp{parse_number<double>(tok[1], "slope")};
  }
  if (name == "sine") {
    need(2);
    return Sinusoid{parse_number<double>(tok[1], "amplitude"), parse_number<double>(tok[2], "period")};
  }
  if (name == "randomwalk") {
    need(1);
    return RandomWalk{parse_number<std::uint64_t>(tok[1], "seed")};
  }
  throw ConfigError(fmt::format("unknown offset function '{}'", name));
}

OffsetFunction offset_from_json(const nlohmann::json& j) {
  if (j.is_null()) return NoOffset{};
  if (j.is_string()) {
    auto name = j.get<std::string>();
    if (name == "none") return NoOffset{};
    throw ConfigError(fmt::format("offset '{}' needs parameters; use an object", name));
  }
  const auto name = j.at("name").get<std::string>();
  if (name == "none") return NoOffset{};
  if (name == "linear") return LinearRamp{j.at("slope").get<double>()};
  if (name == "sine") return Sinusoid{j.at("amplitude").get<double>(), j.at("period").get<double>()};
  if (name == "randomwalk") return RandomWalk{j.at("seed").get<std::uint64_t>()};
  if (name == "table") {
    TabulatedOffset tab;
    for (const auto& knot : j.at("knots")) tab.knots.emplace_back(knot.at(0).get<double>(), knot.at(1).get<double>());
    return tab;
  }
  throw ConfigError(fmt::format("unknown offset function '{}'", name));
}

std::vector<ScheduleSegment> segments_from_json(const nlohmann::json& j) {
  std::vector<ScheduleSegment> out;
  for (const auto& s : j) {
    ScheduleSegment seg;
    seg.t_start = s.at("from").get<double>();
    seg.t_end = s.at("to").get<double>();
    seg.price_lo = s.at("lo").get<Price>();
    seg.price_hi = s.at("hi").get<Price>();
    seg.offset = offset_from_json(s.contains("offset") ? s.at("offset") : nlohmann::json());
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace

std::vector<std::pair<TraderType, std::size_t>> parse_trader_counts(std::string_view text) {
  std::vector<std::pair<TraderType, std::size_t>> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) {
    auto parts = split(trim(item), ':');
    if (parts.size() != 2) throw ConfigError(fmt::format("expected TYPE:COUNT, got '{}'", item));
    auto type = parse_trader_type(trim(parts[0]));
    if (!type) throw ConfigError(fmt::format("unknown trader type '{}'", trim(parts[0])));
    out.emplace_back(*type, parse_number<std::size_t>(parts[1], "trader count"));
  }
  return out;
}

std::vector<TraderType> parse_trader_types(std::string_view text) {
  std::vector<TraderType> out;
  for (auto item : split(text, ',')) {
    auto type = parse_trader_type(trim(item));
    if (!type) throw ConfigError(fmt::format("unknown trader type '{}'", trim(item)));
    out.push_back(*type);
  }
  return out;
}

std::vector<ScheduleSegment> parse_segments(std::string_view text) {
  std::vector<ScheduleSegment> out;
  for (auto item : split(text, ',')) {
    auto tok = split(trim(item), ':');
    if (tok.size() < 4) throw ConfigError(fmt::format("expected FROM:TO:LO:HI[:OFFSET...], got '{}'", item));
    ScheduleSegment seg;
    seg.t_start = parse_number<double>(tok[0], "segment start");
    seg.t_end = parse_number<double>(tok[1], "segment end");
    seg.price_lo = parse_number<Price>(tok[2], "segment lo");
    seg.price_hi = parse_number<Price>(tok[3], "segment hi");
    seg.offset = offset_from_tokens(std::span<const std::string_view>(tok).subspan(4));
    out.push_back(std::move(seg));
  }
  return out;
}

OrderSchedule schedule_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("schedule is not valid JSON: {}", e.what()));
  }
  try {
    OrderSchedule s;
    s.interval = j.value("interval", s.interval);
    auto tm = j.value("timemode", std::string(to_string(s.timemode)));
    auto sm = j.value("stepmode", std::string(to_string(s.stepmode)));
    auto timemode = parse_time_mode(tm);
    auto stepmode = parse_step_mode(sm);
    if (!timemode) throw ConfigError(fmt::format("unknown timemode '{}'", tm));
    if (!stepmode) throw ConfigError(fmt::format("unknown stepmode '{}'", sm));
    s.timemode = *timemode;
    s.stepmode = *stepmode;
    s.demand = segments_from_json(j.at("demand"));
    s.supply = segments_from_json(j.at("supply"));
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed schedule: {}", e.what()));
  }
}

OrderSchedule load_schedule_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read schedule file {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_json(buf.str());
}

}  // namespace bse
