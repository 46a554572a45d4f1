#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kbo/checker.hpp"
#include "kbo/config.hpp"
#include "kbo/sim.hpp"

namespace kbo {

inline constexpr std::string_view kFuzzFormat = "kbo-fuzz/1";

/// Recipe for seeded scenarios. Seed i gets (i mod n) crashes when
/// `crashes` is "cycle", which walks every crash count from 0 to n-1.
struct FuzzTemplate {
  Protocol protocol = Protocol::Stack;
  std::uint32_t n = 3;
  std::uint32_t k = 2;
  OraclePolicy oracle_policy = OraclePolicy::FirstKAdversarial;
  std::uint32_t min_items = 1;
  std::uint32_t max_items = 4;
  /// Probability (in percent) that a stack item is a propose rather than a plain broadcast.
  std::uint32_t propose_percent = 75;
  std::uint32_t values = 0;  // size of the value alphabet; 0 means 2n
  std::string crashes = "cycle";  // "cycle", "none", or a fixed count
  std::uint64_t crash_step_max = 200;
  std::uint64_t step_budget = 200000;
  std::uint64_t seed_base = 0;
};

inline json to_json(const FuzzTemplate& t) {
  json j;
  j["format"] = kFuzzFormat;
  j["protocol"] = to_string(t.protocol);
  j["n"] = t.n;
  j["k"] = t.k;
  j["oracle_policy"] = to_string(t.oracle_policy);
  j["min_items"] = t.min_items;
  j["max_items"] = t.max_items;
  j["propose_percent"] = t.propose_percent;
  j["values"] = t.values;
  j["crashes"] = t.crashes;
  j["crash_step_max"] = t.crash_step_max;
  j["step_budget"] = t.step_budget;
  j["seed_base"] = t.seed_base;
  return j;
}

inline void validate(const FuzzTemplate& t) {
  if (t.n < 1) throw ConfigError("n: must be >= 1");
  if (t.k < 1 || t.k > t.n) throw ConfigError("k: must satisfy 1 <= k <= n");
  if (t.min_items > t.max_items) throw ConfigError("min_items: must not exceed max_items");
  if (t.protocol == Protocol::ToChannels) throw ConfigError("protocol: fuzzing supports stack and k2s");
  if (t.propose_percent > 100) throw ConfigError("propose_percent: must be in [0..100]");
  if (t.step_budget == 0) throw ConfigError("step_budget: must be > 0");
  if (t.oracle_policy == OraclePolicy::Echo && t.k != t.n) throw ConfigError("oracle_policy: echo needs k = n");
  if (t.crashes != "cycle" && t.crashes != "none") {
    std::uint64_t c = 0;
    try {
      c = std::stoull(t.crashes);
    } catch (const std::exception&) {
      throw ConfigError("crashes: expected \"cycle\", \"none\" or a count");
    }
    if (c >= t.n) throw ConfigError("crashes: at most n-1 processes may crash");
  }
}

inline FuzzTemplate fuzz_template_from_json(const json& j) {
  using detail::field_or;
  if (!j.is_object()) throw ConfigError("template: expected a JSON object");
  if (detail::field<std::string>(j, "format") != kFuzzFormat)
    throw ConfigError("format: expected '" + std::string(kFuzzFormat) + "'");
  static const std::set<std::string> known{"format",    "protocol",       "n",           "k",         "oracle_policy",
                                           "min_items", "max_items",      "propose_percent", "values", "crashes",
                                           "crash_step_max", "step_budget", "seed_base"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(key + ": unknown field");
  FuzzTemplate t;
  t.protocol = parse_protocol(field_or<std::string>(j, "protocol", "stack"));
  t.n = detail::field<std::uint32_t>(j, "n");
  t.k = detail::field<std::uint32_t>(j, "k");
  t.oracle_policy = parse_oracle_policy(field_or<std::string>(j, "oracle_policy", "first-k-adversarial"));
  t.min_items = field_or<std::uint32_t>(j, "min_items", t.min_items);
  t.max_items = field_or<std::uint32_t>(j, "max_items", t.max_items);
  t.propose_percent = field_or<std::uint32_t>(j, "propose_percent", t.propose_percent);
  t.values = field_or<std::uint32_t>(j, "values", t.values);
  if (j.contains("crashes")) {
    if (j["crashes"].is_number_unsigned())
      t.crashes = std::to_string(j["crashes"].get<std::uint64_t>());
    else
      t.crashes = detail::field<std::string>(j, "crashes");
  }
  t.crash_step_max = field_or<std::uint64_t>(j, "crash_step_max", t.crash_step_max);
  t.step_budget = field_or<std::uint64_t>(j, "step_budget", t.step_budget);
  t.seed_base = field_or<std::uint64_t>(j, "seed_base", t.seed_base);
  validate(t);
  return t;
}

inline FuzzTemplate load_fuzz_template(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open template file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("template: ") + e.what());
  }
  return fuzz_template_from_json(j);
}

inline std::uint32_t crash_count(const FuzzTemplate& t, std::uint64_t index) {
  if (t.crashes == "cycle") return static_cast<std::uint32_t>(index % t.n);
  if (t.crashes == "none") return 0;
  return static_cast<std::uint32_t>(std::stoull(t.crashes));
}

/// Deterministic scenario for the index-th seed of a template.
inline ScenarioConfig generate(const FuzzTemplate& t, std::uint64_t index) {
  validate(t);
  const std::uint64_t seed = t.seed_base + index;
  Prng g = Prng::stream(seed, 4);
  ScenarioConfig c;
  c.protocol = t.protocol;
  c.n = t.n;
  c.k = t.k;
  c.seed = seed;
  c.schedule_policy = SchedulePolicy::SeededRandom;
  c.oracle_policy = t.oracle_policy;
  c.step_budget = t.step_budget;
  const std::uint32_t alphabet = t.values ? t.values : 2 * t.n;
  auto value = [&] { return "v" + std::to_string(g.below(alphabet)); };

  c.workload.resize(t.n);
  for (auto& items : c.workload) {
    if (t.protocol == Protocol::K2S) {
      items.push_back(WorkloadItem::k2s(0, value()));
      continue;
    }
    const auto count = static_cast<std::uint32_t>(g.between(t.min_items, t.max_items));
    std::uint64_t instance = 0;
    std::uint32_t payload = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
      if (g.below(100) < t.propose_percent) {
        // Small random gaps so processes share some instances and skip others.
        instance += g.below(2);
        items.push_back(WorkloadItem::propose(instance, value()));
        ++instance;
      } else {
        items.push_back(WorkloadItem::broadcast("b" + std::to_string(payload++)));
      }
    }
  }

  std::vector<ProcessId> pids;
  for (std::uint32_t i = 1; i <= t.n; ++i) pids.push_back(ProcessId(i));
  g.shuffle(pids);
  const auto crashes = crash_count(t, index);
  for (std::uint32_t i = 0; i < crashes; ++i)
    c.crash_plan.push_back({pids[i], static_cast<std::uint64_t>(g.between(0, static_cast<std::int64_t>(t.crash_step_max)))});
  std::sort(c.crash_plan.begin(), c.crash_plan.end(),
            [](const CrashPoint& a, const CrashPoint& b) { return a.pid < b.pid; });
  validate(c);
  return c;
}

struct FuzzResult {
  std::uint64_t index = 0;
  ScenarioConfig config;
  Trace trace;
  std::vector<Verdict> verdicts;
  std::string error;  // simulation or checking error, if any

  bool failed() const { return !error.empty() || any_failed(verdicts); }
};

inline FuzzResult fuzz_one(const FuzzTemplate& t, std::uint64_t index, const std::vector<Suite>& suites = all_suites()) {
  FuzzResult r;
  r.index = index;
  try {
    r.config = generate(t, index);
    r.trace = run(r.config);
    r.verdicts = check_all(r.trace, suites);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

/// Runs `count` seeds, using up to `threads` workers. Results are in seed
/// order regardless of the worker count.
inline std::vector<FuzzResult> fuzz_batch(const FuzzTemplate& t, std::uint64_t count, unsigned threads = 1,
                                          const std::vector<Suite>& suites = all_suites()) {
  std::vector<FuzzResult> results(count);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next++; i < count; i = next++) results[i] = fuzz_one(t, i, suites);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

/// Per-property counts, outcomes and crash statistics.
inline json fuzz_summary(const FuzzTemplate& t, const std::vector<FuzzResult>& results) {
  std::map<std::string, std::map<std::string, std::uint64_t>> props;
  std::vector<std::string> order;
  std::map<std::string, std::uint64_t> outcomes;
  std::map<std::uint32_t, std::uint64_t> crash_hist;
  std::uint64_t crashed_processes = 0, failed = 0, errors = 0;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++errors;
      ++failed;
      continue;
    }
    if (r.failed()) ++failed;
    outcomes[to_string(r.trace.outcome)]++;
    crash_hist[static_cast<std::uint32_t>(r.config.crash_plan.size())]++;
    for (const auto& e : r.trace.events)
      if (e.kind == EventKind::Crash) ++crashed_processes;
    for (const auto& v : r.verdicts) {
      if (!props.contains(v.property)) order.push_back(v.property);
      auto& c = props[v.property];
      c[v.status == Verdict::Status::Pass ? "pass" : v.failed() ? "fail" : "not-evaluated"]++;
    }
  }
  json s;
  s["template"] = to_json(t);
  s["seeds"] = results.size();
  s["failed_seeds"] = failed;
  s["errors"] = errors;
  json oc = json::object();
  for (const auto& [k, v] : outcomes) oc[k] = v;
  s["outcomes"] = oc;
  json ch = json::object();
  for (const auto& [k, v] : crash_hist) ch[std::to_string(k)] = v;
  s["crash_plans"] = json{{"by_planned_crashes", ch}, {"crash_events", crashed_processes}};
  json pj = json::object();
  for (const auto& name : order) {
    json c;
    for (const char* key : {"pass", "fail", "not-evaluated"}) c[key] = props[name][key];
    pj[name] = c;
  }
  s["properties"] = pj;
  return s;
}

}  // namespace kbo
