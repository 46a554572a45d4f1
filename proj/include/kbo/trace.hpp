#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbo/config.hpp"

namespace kbo {

inline constexpr std::string_view kTraceFormat = "kbo-trace/1";

enum class EventKind { Invoke, Return, ObjectAccess, DeliverSet, DeliverMsg, Decide, Crash };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Invoke: return "invoke";
    case EventKind::Return: return "return";
    case EventKind::ObjectAccess: return "object-access";
    case EventKind::DeliverSet: return "deliver-set";
    case EventKind::DeliverMsg: return "deliver-msg";
    case EventKind::Decide: return "decide";
    case EventKind::Crash: return "crash";
  }
  return "?";
}

inline EventKind parse_event_kind(const std::string& s) {
  if (s == "invoke") return EventKind::Invoke;
  if (s == "return") return EventKind::Return;
  if (s == "object-access") return EventKind::ObjectAccess;
  if (s == "deliver-set") return EventKind::DeliverSet;
  if (s == "deliver-msg") return EventKind::DeliverMsg;
  if (s == "decide") return EventKind::Decide;
  if (s == "crash") return EventKind::Crash;
  throw std::invalid_argument("unknown event kind '" + s + "'");
}

struct Event {
  std::uint64_t step = 0;
  ProcessId pid;
  EventKind kind = EventKind::Invoke;
  json payload = json::object();
};

enum class Outcome { Quiescent, BudgetExhausted };

inline std::string to_string(Outcome o) { return o == Outcome::Quiescent ? "quiescent" : "budget-exhausted"; }

struct Trace {
  ScenarioConfig config;
  std::vector<Event> events;
  Outcome outcome = Outcome::Quiescent;
  std::uint64_t ticks = 0;  // scheduler steps taken

  bool quiescent() const { return outcome == Outcome::Quiescent; }
};

/// Callback through which protocol automata record events for their process.
using Emit = std::function<void(EventKind, json)>;

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Line-delimited format:
//   line 1        {"format":"kbo-trace/1","config":{...scenario...}}
//   lines 2..N-1  {"step":S,"pid":P,"kind":"...","payload":{...}}   one event each
//   line N        {"outcome":"quiescent"|"budget-exhausted","ticks":T}

inline std::string event_line(const Event& e) {
  json j;
  j["step"] = e.step;
  j["pid"] = e.pid.index;
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  return j.dump();
}

inline void write_trace(std::ostream& out, const Trace& t) {
  json header;
  header["format"] = kTraceFormat;
  header["config"] = to_json(t.config);
  out << header.dump() << '\n';
  for (const auto& e : t.events) out << event_line(e) << '\n';
  json trailer;
  trailer["outcome"] = to_string(t.outcome);
  trailer["ticks"] = t.ticks;
  out << trailer.dump() << '\n';
}

inline std::string trace_text(const Trace& t) {
  std::ostringstream ss;
  write_trace(ss, t);
  return ss.str();
}

/// Parses a trace and checks well-formedness: strictly increasing steps,
/// pids in range, nothing from a process after its crash event.
inline Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) throw TraceFormatError(lines.size(), "truncated trace (need header and trailer)");

  auto parse = [&](std::size_t idx) {
    try {
      return json::parse(lines[idx]);
    } catch (const json::parse_error& e) {
      throw TraceFormatError(idx + 1, std::string("invalid JSON: ") + e.what());
    }
  };

  json header = parse(0);
  if (!header.is_object() || header.value("format", "") != kTraceFormat || !header.contains("config"))
    throw TraceFormatError(1, "missing or wrong trace header");
  try {
    t.config = config_from_json(header["config"]);
  } catch (const ConfigError& e) {
    throw TraceFormatError(1, std::string("embedded config: ") + e.what());
  }

  std::vector<bool> crashed(t.config.n, false);
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    lineno = i + 1;
    json j = parse(i);
    Event e;
    try {
      e.step = j.at("step").get<std::uint64_t>();
      e.pid = ProcessId(j.at("pid").get<std::uint32_t>());
      e.kind = parse_event_kind(j.at("kind").get<std::string>());
      e.payload = j.at("payload");
    } catch (const std::exception& ex) {
      throw TraceFormatError(lineno, std::string("malformed event: ") + ex.what());
    }
    if (e.pid.index < 1 || e.pid.index > t.config.n) throw TraceFormatError(lineno, "pid out of range");
    if (!t.events.empty() && e.step <= t.events.back().step) throw TraceFormatError(lineno, "step not increasing");
    if (crashed[e.pid.slot()]) throw TraceFormatError(lineno, "event after crash of p" + std::to_string(e.pid.index));
    if (e.kind == EventKind::Crash) crashed[e.pid.slot()] = true;
    t.events.push_back(std::move(e));
  }

  json trailer = parse(lines.size() - 1);
  lineno = lines.size();
  if (!trailer.is_object() || !trailer.contains("outcome")) throw TraceFormatError(lineno, "missing trailer");
  const auto outcome = trailer["outcome"].get<std::string>();
  if (outcome == "quiescent")
    t.outcome = Outcome::Quiescent;
  else if (outcome == "budget-exhausted")
    t.outcome = Outcome::BudgetExhausted;
  else
    throw TraceFormatError(lineno, "unknown outcome '" + outcome + "'");
  t.ticks = trailer.value("ticks", std::uint64_t{0});
  return t;
}

inline Trace parse_trace(const std::string& text) {
  std::istringstream ss(text);
  return read_trace(ss);
}

inline Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return read_trace(in);
}

}  // namespace kbo
