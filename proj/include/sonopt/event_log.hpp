#pragma once

// Run event log: the ordered fronts and parameter changes of one run,
// serialized as JSON lines (header first). Replaying a log through the
// renderer reproduces the run's audio bit for bit.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonopt/error.hpp"
#include "sonopt/front_model.hpp"
#include "sonopt/params.hpp"

namespace sonopt {

struct FrontEvent {
  RawFront front;
};

struct ParamEvent {
  std::uint64_t generation_index = 0;
  std::string name;
  double value = 0.0;

  friend bool operator==(const ParamEvent&, const ParamEvent&) = default;
};

using RunEvent = std::variant<FrontEvent, ParamEvent>;

inline std::uint64_t generation_of(const RunEvent& e) {
  return std::visit(
      [](const auto& ev) -> std::uint64_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(ev)>, FrontEvent>) return ev.front.generation_index;
        else return ev.generation_index;
      },
      e);
}

struct RunHeader {
  std::string problem;
  std::string algorithm;
  std::uint64_t seed = 0;
  EngineConfig config;
};

struct RunEventLog {
  RunHeader header;
  std::vector<RunEvent> events;

  void add_front(RawFront front) { events.emplace_back(FrontEvent{std::move(front)}); }
  void add_param(std::uint64_t gen, std::string name, double value) {
    events.emplace_back(ParamEvent{gen, std::move(name), value});
  }
  std::size_t front_count() const {
    std::size_t n = 0;
    for (const auto& e : events) n += std::holds_alternative<FrontEvent>(e) ? 1 : 0;
    return n;
  }
};

/// Generations never decrease; within a generation parameter changes come
/// before its front, and there is at most one front.
inline void check_well_ordered(const RunEventLog& log) {
  std::optional<std::uint64_t> last_gen;
  bool front_seen = false;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    const std::uint64_t gen = generation_of(e);
    if (last_gen && gen < *last_gen) {
      throw Error(Errc::BadLog, "event " + std::to_string(i) + " goes back to generation " + std::to_string(gen), i);
    }
    if (!last_gen || gen != *last_gen) front_seen = false;
    if (std::holds_alternative<FrontEvent>(e)) {
      if (front_seen) throw Error(Errc::BadLog, "second front for generation " + std::to_string(gen), i);
      front_seen = true;
    } else if (front_seen) {
      throw Error(Errc::BadLog, "parameter change after the front of generation " + std::to_string(gen), i);
    }
    last_gen = gen;
  }
}

inline nlohmann::json header_json(const RunHeader& h) {
  return {{"type", "header"}, {"problem", h.problem}, {"algorithm", h.algorithm}, {"seed", h.seed}, {"config", h.config}};
}

inline nlohmann::json event_json(const RunEvent& e) {
  if (const auto* f = std::get_if<FrontEvent>(&e)) {
    auto points = nlohmann::json::array();
    for (const auto& p : f->front.points) points.push_back({p.f1, p.f2});
    return {{"type", "front"}, {"gen", f->front.generation_index}, {"source", f->front.source_id}, {"points", points}};
  }
  const auto& p = std::get<ParamEvent>(e);
  return {{"type", "param"}, {"gen", p.generation_index}, {"name", p.name}, {"value", p.value}};
}

inline void write_jsonl(std::ostream& os, const RunEventLog& log) {
  os << header_json(log.header).dump() << '\n';
  for (const auto& e : log.events) os << event_json(e).dump() << '\n';
}

inline RunEventLog read_jsonl(std::istream& is) {
  RunEventLog log;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  try {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw Error(Errc::BadLog, "first line must be the header");
        log.header.problem = j.value("problem", "");
        log.header.algorithm = j.value("algorithm", "");
        log.header.seed = j.value("seed", std::uint64_t{0});
        log.header.config = j.value("config", EngineConfig{});
        have_header = true;
      } else if (type == "front") {
        RawFront f;
        f.generation_index = j.at("gen").get<std::uint64_t>();
        f.source_id = j.value("source", "");
        for (const auto& pt : j.at("points")) f.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        log.add_front(std::move(f));
      } else if (type == "param") {
        log.add_param(j.at("gen").get<std::uint64_t>(), j.at("name").get<std::string>(), j.at("value").get<double>());
      } else {
        throw Error(Errc::BadLog, "unknown event type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(Errc::BadLog, "line " + std::to_string(lineno) + ": " + ex.what());
  }
  if (!have_header) throw Error(Errc::BadLog, "missing header line");
  check_well_ordered(log);
  return log;
}

}  // namespace sonopt
