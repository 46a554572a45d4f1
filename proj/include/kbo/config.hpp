#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbo/types.hpp"

namespace kbo {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kScenarioFormat = "kbo-scenario/1";

enum class Protocol { Stack, K2S, ToChannels };
enum class SchedulePolicy { SeededRandom, RoundRobin, Scripted };
enum class OraclePolicy { First1, FirstKAdversarial, Echo, Permissive };

/// A process has two threads of control: the application thread (workload
/// operations and their blocking waits) and the background task.
enum class Thread { App, Task };

struct WorkloadItem {
  enum class Kind { Propose, Broadcast, K2S };
  Kind kind = Kind::Broadcast;
  std::uint64_t instance = 0;  // propose: k-SA instance; k2s: round
  Value value;                 // propose/k2s value, broadcast payload
  std::optional<std::uint32_t> channel;  // to-channels only: daemon choice fixed by the scenario

  static WorkloadItem propose(std::uint64_t nb, Value v) { return {Kind::Propose, nb, std::move(v), {}}; }
  static WorkloadItem broadcast(Value payload, std::optional<std::uint32_t> ch = {}) {
    return {Kind::Broadcast, 0, std::move(payload), ch};
  }
  static WorkloadItem k2s(std::uint64_t round, Value v) { return {Kind::K2S, round, std::move(v), {}}; }
};

struct CrashPoint {
  ProcessId pid;
  std::uint64_t step = 0;  // scheduler tick before which the crash happens
};

/// One entry of a scripted schedule: "<pid>a" (app thread), "<pid>t" (task),
/// "<pid>t<c>" (task reading channel c, to-channels protocol only).
struct ScriptStep {
  ProcessId pid;
  Thread thread = Thread::App;
  std::optional<std::uint32_t> channel;

  std::string str() const {
    std::string s = std::to_string(pid.index) + (thread == Thread::App ? "a" : "t");
    if (channel) s += std::to_string(*channel);
    return s;
  }
};

struct ScenarioConfig {
  Protocol protocol = Protocol::Stack;
  std::uint32_t n = 1;
  std::uint32_t k = 1;
  std::uint64_t seed = 0;
  SchedulePolicy schedule_policy = SchedulePolicy::SeededRandom;
  std::vector<ScriptStep> schedule_script;
  std::vector<CrashPoint> crash_plan;
  std::vector<std::vector<WorkloadItem>> workload;  // indexed by pid slot
  std::uint64_t step_budget = 100000;
  OraclePolicy oracle_policy = OraclePolicy::FirstKAdversarial;

  const std::vector<WorkloadItem>& items(ProcessId p) const { return workload[p.slot()]; }
};

// ---------------------------------------------------------------------------
// Names

inline std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Stack: return "stack";
    case Protocol::K2S: return "k2s";
    case Protocol::ToChannels: return "to-channels";
  }
  return "?";
}

inline std::string to_string(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::SeededRandom: return "seeded-random";
    case SchedulePolicy::RoundRobin: return "round-robin";
    case SchedulePolicy::Scripted: return "scripted";
  }
  return "?";
}

inline std::string to_string(OraclePolicy p) {
  switch (p) {
    case OraclePolicy::First1: return "first-1";
    case OraclePolicy::FirstKAdversarial: return "first-k-adversarial";
    case OraclePolicy::Echo: return "echo";
    case OraclePolicy::Permissive: return "permissive";
  }
  return "?";
}

inline Protocol parse_protocol(const std::string& s) {
  if (s == "stack") return Protocol::Stack;
  if (s == "k2s") return Protocol::K2S;
  if (s == "to-channels") return Protocol::ToChannels;
  throw ConfigError("protocol: unknown value '" + s + "'");
}

inline SchedulePolicy parse_schedule_policy(const std::string& s) {
  if (s == "seeded-random") return SchedulePolicy::SeededRandom;
  if (s == "round-robin") return SchedulePolicy::RoundRobin;
  if (s == "scripted") return SchedulePolicy::Scripted;
  throw ConfigError("schedule_policy: unknown value '" + s + "'");
}

inline OraclePolicy parse_oracle_policy(const std::string& s) {
  if (s == "first-1") return OraclePolicy::First1;
  if (s == "first-k-adversarial") return OraclePolicy::FirstKAdversarial;
  if (s == "echo") return OraclePolicy::Echo;
  if (s == "permissive") return OraclePolicy::Permissive;
  throw ConfigError("oracle_policy: unknown value '" + s + "'");
}

inline ScriptStep parse_script_step(const std::string& tok) {
  std::size_t i = 0;
  std::uint32_t pid = 0;
  while (i < tok.size() && tok[i] >= '0' && tok[i] <= '9') pid = pid * 10 + static_cast<std::uint32_t>(tok[i++] - '0');
  if (i == 0 || i == tok.size() || (tok[i] != 'a' && tok[i] != 't'))
    throw ConfigError("schedule_script: bad token '" + tok + "' (expected <pid>a, <pid>t or <pid>t<channel>)");
  ScriptStep st{ProcessId(pid), tok[i] == 'a' ? Thread::App : Thread::Task, {}};
  ++i;
  if (i < tok.size()) {
    if (st.thread != Thread::Task) throw ConfigError("schedule_script: bad token '" + tok + "'");
    std::uint32_t ch = 0;
    for (; i < tok.size(); ++i) {
      if (tok[i] < '0' || tok[i] > '9') throw ConfigError("schedule_script: bad token '" + tok + "'");
      ch = ch * 10 + static_cast<std::uint32_t>(tok[i] - '0');
    }
    st.channel = ch;
  }
  return st;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const ScenarioConfig& c) {
  if (c.n < 1) throw ConfigError("n: must be >= 1");
  if (c.k < 1 || c.k > c.n) throw ConfigError("k: must satisfy 1 <= k <= n");
  if (c.step_budget == 0) throw ConfigError("step_budget: must be > 0");
  if (c.workload.size() != c.n) throw ConfigError("workload: must list exactly n per-process item lists");
  if (c.oracle_policy == OraclePolicy::Echo && c.k != c.n)
    throw ConfigError("oracle_policy: echo is only valid when k = n");

  std::set<ProcessId> crashed;
  for (const auto& cp : c.crash_plan) {
    if (cp.pid.index < 1 || cp.pid.index > c.n) throw ConfigError("crash_plan: pid out of range");
    if (!crashed.insert(cp.pid).second) throw ConfigError("crash_plan: process named more than once");
  }

  for (std::uint32_t slot = 0; slot < c.n; ++slot) {
    std::optional<std::uint64_t> last_instance, last_round;
    for (const auto& it : c.workload[slot]) {
      const std::string where = "workload[p" + std::to_string(slot + 1) + "]: ";
      if (it.value.empty()) throw ConfigError(where + "empty value");
      switch (it.kind) {
        case WorkloadItem::Kind::Propose:
          if (c.protocol == Protocol::K2S) throw ConfigError(where + "propose not allowed with protocol k2s");
          if (last_instance && it.instance <= *last_instance)
            throw ConfigError(where + "propose instance numbers must strictly increase");
          last_instance = it.instance;
          break;
        case WorkloadItem::Kind::Broadcast:
          if (c.protocol == Protocol::K2S) throw ConfigError(where + "broadcast not allowed with protocol k2s");
          break;
        case WorkloadItem::Kind::K2S:
          if (c.protocol != Protocol::K2S) throw ConfigError(where + "k2s items require protocol k2s");
          if (last_round && it.instance <= *last_round)
            throw ConfigError(where + "k2s round numbers must strictly increase");
          last_round = it.instance;
          break;
      }
      if (it.channel) {
        if (c.protocol != Protocol::ToChannels) throw ConfigError(where + "channel requires protocol to-channels");
        if (*it.channel < 1 || *it.channel > c.k) throw ConfigError(where + "channel must be in [1..k]");
      }
    }
  }

  if (c.schedule_policy == SchedulePolicy::Scripted && c.schedule_script.empty())
    throw ConfigError("schedule_script: required by the scripted policy");
  for (const auto& st : c.schedule_script) {
    if (st.pid.index < 1 || st.pid.index > c.n) throw ConfigError("schedule_script: pid out of range in '" + st.str() + "'");
    if (st.channel && (c.protocol != Protocol::ToChannels || *st.channel < 1 || *st.channel > c.k))
      throw ConfigError("schedule_script: channel not valid in '" + st.str() + "'");
  }
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const WorkloadItem& it) {
  json j;
  switch (it.kind) {
    case WorkloadItem::Kind::Propose:
      j["op"] = "propose";
      j["instance"] = it.instance;
      j["value"] = it.value;
      break;
    case WorkloadItem::Kind::Broadcast:
      j["op"] = "broadcast";
      j["payload"] = it.value;
      if (it.channel) j["channel"] = *it.channel;
      break;
    case WorkloadItem::Kind::K2S:
      j["op"] = "k2s";
      j["round"] = it.instance;
      j["value"] = it.value;
      break;
  }
  return j;
}

inline json to_json(const ScenarioConfig& c) {
  json j;
  j["format"] = kScenarioFormat;
  j["protocol"] = to_string(c.protocol);
  j["n"] = c.n;
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["schedule_policy"] = to_string(c.schedule_policy);
  json script = json::array();
  for (const auto& s : c.schedule_script) script.push_back(s.str());
  j["schedule_script"] = script;
  json crashes = json::array();
  for (const auto& cp : c.crash_plan) crashes.push_back(json{{"pid", cp.pid.index}, {"step", cp.step}});
  j["crash_plan"] = crashes;
  json wl = json::array();
  for (const auto& items : c.workload) {
    json arr = json::array();
    for (const auto& it : items) arr.push_back(to_json(it));
    wl.push_back(arr);
  }
  j["workload"] = wl;
  j["step_budget"] = c.step_budget;
  j["oracle_policy"] = to_string(c.oracle_policy);
  return j;
}

namespace detail {

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string(name) + ": missing");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(name) + ": wrong type");
  }
}

template <class T>
T field_or(const json& j, const char* name, T fallback) {
  return j.contains(name) ? field<T>(j, name) : fallback;
}

inline WorkloadItem item_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("workload: items must be objects");
  const auto op = field<std::string>(j, "op");
  if (op == "propose") return WorkloadItem::propose(field<std::uint64_t>(j, "instance"), field<std::string>(j, "value"));
  if (op == "k2s") return WorkloadItem::k2s(field<std::uint64_t>(j, "round"), field<std::string>(j, "value"));
  if (op == "broadcast") {
    std::optional<std::uint32_t> ch;
    if (j.contains("channel")) ch = field<std::uint32_t>(j, "channel");
    return WorkloadItem::broadcast(field<std::string>(j, "payload"), ch);
  }
  throw ConfigError("workload: unknown op '" + op + "'");
}

}  // namespace detail

/// Parses and validates a scenario. Throws ConfigError naming the offending field.
inline ScenarioConfig config_from_json(const json& j) {
  using detail::field;
  using detail::field_or;
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  if (field<std::string>(j, "format") != kScenarioFormat)
    throw ConfigError("format: expected '" + std::string(kScenarioFormat) + "'");
  static const std::set<std::string> known{"format", "protocol", "n", "k", "seed", "schedule_policy",
                                           "schedule_script", "crash_plan", "workload", "step_budget",
                                           "oracle_policy"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(key + ": unknown field");

  ScenarioConfig c;
  c.protocol = parse_protocol(field_or<std::string>(j, "protocol", "stack"));
  c.n = field<std::uint32_t>(j, "n");
  c.k = field<std::uint32_t>(j, "k");
  c.seed = field_or<std::uint64_t>(j, "seed", 0);
  c.schedule_policy = parse_schedule_policy(field_or<std::string>(j, "schedule_policy", "seeded-random"));
  for (const auto& tok : field_or<std::vector<std::string>>(j, "schedule_script", {}))
    c.schedule_script.push_back(parse_script_step(tok));
  if (j.contains("crash_plan")) {
    if (!j["crash_plan"].is_array()) throw ConfigError("crash_plan: expected an array");
    for (const auto& cp : j["crash_plan"])
      c.crash_plan.push_back({ProcessId(field<std::uint32_t>(cp, "pid")), field<std::uint64_t>(cp, "step")});
  }
  if (!j.contains("workload") || !j["workload"].is_array()) throw ConfigError("workload: expected an array of arrays");
  for (const auto& per : j["workload"]) {
    if (!per.is_array()) throw ConfigError("workload: expected an array of arrays");
    auto& items = c.workload.emplace_back();
    for (const auto& it : per) items.push_back(detail::item_from_json(it));
  }
  c.step_budget = field_or<std::uint64_t>(j, "step_budget", c.step_budget);
  c.oracle_policy = parse_oracle_policy(field_or<std::string>(j, "oracle_policy", "first-k-adversarial"));
  validate(c);
  return c;
}

inline ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return config_from_json(j);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace kbo
