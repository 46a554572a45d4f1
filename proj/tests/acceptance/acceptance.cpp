// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails. Tolerances and time limits are fixed below.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "../unit/forged.hpp"
#include "kbo/checker.hpp"
#include "kbo/fuzz.hpp"
#include "kbo/k2s.hpp"
#include "kbo/poset.hpp"
#include "kbo/sim.hpp"

using namespace kbo;

namespace {

constexpr double kGoldenSeconds = 1.0;
constexpr double kPosetSeconds = 30.0;
constexpr double kBoundSeconds = 300.0;
constexpr std::uint64_t kPosets = 1000;
constexpr std::size_t kPosetMaxElements = 12;
constexpr std::uint64_t kSeedsPerConfig = 200;
constexpr std::uint64_t kK2sRuns = 1000;
constexpr std::uint64_t kDeterminismScenarios = 20;
constexpr std::uint64_t kCrashWindowPerProcess = 80;  // crash steps drawn from [0, 80n]

const unsigned kJobs = std::max(1u, std::thread::hardware_concurrency());

struct Result {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string golden(const std::string& name) { return std::string(KBO_GOLDEN_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

FuzzTemplate stack_template(std::uint32_t n, std::uint32_t k) {
  FuzzTemplate t;
  t.n = n;
  t.k = k;
  t.crash_step_max = kCrashWindowPerProcess * n;
  return t;
}

// Runs every (n, k) grid point and hands each result to `visit`; any error
// or non-quiescent trace fails the criterion.
Result over_grid(const std::vector<Suite>& suites, const std::vector<std::uint32_t>& ks,
                 const std::function<void(const FuzzResult&, Result&)>& visit) {
  Result r;
  std::uint64_t traces = 0;
  for (std::uint32_t n : {3u, 5u})
    for (std::uint32_t k : ks) {
      for (const auto& fr : fuzz_batch(stack_template(n, k), kSeedsPerConfig, kJobs, suites)) {
        ++traces;
        if (!fr.error.empty()) {
          r.ok = false;
          r.detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " seed " + std::to_string(fr.index) + ": " + fr.error;
          return r;
        }
        if (!fr.trace.quiescent()) {
          r.ok = false;
          r.detail = "seed " + std::to_string(fr.index) + " exhausted its budget";
          return r;
        }
        visit(fr, r);
        if (!r.ok) return r;
      }
    }
  r.detail = std::to_string(traces) + " traces";
  return r;
}

Result all_pass(const FuzzResult& fr, const std::vector<std::string>& props) {
  Result r;
  for (const auto& p : props) {
    const auto* v = find_verdict(fr.verdicts, p);
    if (!v || v->status != Verdict::Status::Pass) {
      r.ok = false;
      r.detail = p + " on n=" + std::to_string(fr.config.n) + " k=" + std::to_string(fr.config.k) + " seed " +
                 std::to_string(fr.index) + (v ? ": " + v->to_json().dump() : ": missing");
      return r;
    }
  }
  return r;
}

// --- 1 -----------------------------------------------------------------

Result golden_worked_example() {
  Result r;
  auto t0 = Clock::now();
  auto cfg = load_config(golden("worked_example.scenario.json"));
  auto trace = run(cfg);
  if (trace_text(trace) != slurp(golden("worked_example.trace.jsonl"))) return {false, "replay differs from the stored trace"};

  // Delivery sequences by payload name, as given in the worked example.
  const std::map<std::uint32_t, std::vector<std::string>> expected{
      {1, {"m1", "m2", "m3", "m4", "m5", "m6"}},
      {2, {"m2", "m1", "m5", "m3", "m4", "m6"}},
      {3, {"m2", "m3", "m1", "m5", "m4", "m6"}}};
  std::map<std::uint32_t, std::vector<std::string>> got;
  for (const auto& e : trace.events)
    if (e.kind == EventKind::DeliverMsg) got[e.pid.index].push_back(e.payload["payload"].get<std::string>());
  if (got != expected) return {false, "delivery sequences differ"};

  Poset p = build_order(delivery_order(trace));
  if (width(p) != 2) return {false, "width " + std::to_string(width(p)) + " != 2"};
  auto cover = decompose_channels(p, 2);
  if (cover.channels.size() != 2 || !is_chain_cover(p, cover.channels)) return {false, "k=2 decomposition invalid"};
  try {
    decompose_channels(p, 1);
    return {false, "k=1 decomposition unexpectedly succeeded"};
  } catch (const BoundViolation& e) {
    const auto& a = e.antichain();
    if (a.size() != 2 || p.comparable(p.index_of(a[0]), p.index_of(a[1]))) return {false, "k=1 witness is not a 2-antichain"};
  }
  if (any_failed(check_all(trace))) return {false, "checker reports a failure"};
  const double s = seconds_since(t0);
  r.ok = s < kGoldenSeconds;
  r.detail = "sequences match, width 2, " + std::to_string(s) + "s (limit " + std::to_string(kGoldenSeconds) + "s)";
  return r;
}

// --- 2 -----------------------------------------------------------------

std::size_t brute_width(std::size_t n, const std::vector<std::vector<char>>& edges) {
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v)
        if (edges[u][v] && !reach[s][v]) {
          reach[s][v] = 1;
          stack.push_back(v);
        }
    }
  }
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = 0; j < n && ok; ++j)
        if (i != j && (mask >> i & 1) && (mask >> j & 1) && reach[i][j]) ok = false;
    if (ok) best = size;
  }
  return best;
}

Result width_vs_brute_force() {
  auto t0 = Clock::now();
  Prng g(7);
  for (std::uint64_t trial = 0; trial < kPosets; ++trial) {
    const auto n = static_cast<std::size_t>(g.between(0, kPosetMaxElements));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    g.shuffle(perm);
    const auto density = g.below(100);
    std::vector<std::vector<char>> edges(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (g.below(100) < density) edges[perm[a]][perm[b]] = 1;
    std::vector<MessageId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back({1, static_cast<std::uint32_t>(i)});
    Poset p(ids, edges);
    const auto w = width(p);
    const auto cover = minimum_chain_cover(p);
    if (w != brute_width(n, edges) || cover.size() != w || !is_chain_cover(p, cover) || maximum_antichain(p).size() != w)
      return {false, "mismatch on poset " + std::to_string(trial)};
  }
  const double s = seconds_since(t0);
  return {s < kPosetSeconds, std::to_string(kPosets) + " posets, " + std::to_string(s) + "s (limit " + std::to_string(kPosetSeconds) + "s)"};
}

// --- 3 -----------------------------------------------------------------

Result width_bounded() {
  auto t0 = Clock::now();
  std::map<std::uint32_t, std::size_t> max_width;
  auto r = over_grid({Suite::KBO}, {1, 2, 3}, [&](const FuzzResult& fr, Result& r) {
    const auto w = width(build_order(delivery_order(fr.trace)));
    auto& m = max_width[fr.config.k];
    m = std::max(m, w);
    if (w > fr.config.k) {
      r.ok = false;
      r.detail = "width " + std::to_string(w) + " > k on seed " + std::to_string(fr.index);
    }
    if (const auto* v = find_verdict(fr.verdicts, "KBO-Bounded"); !v || v->failed()) {
      r.ok = false;
      r.detail = "KBO-Bounded disagrees on seed " + std::to_string(fr.index);
    }
  });
  const double s = seconds_since(t0);
  if (!r.ok) return r;
  r.ok = s < kBoundSeconds;
  r.detail += ", max width by k:";
  for (const auto& [k, w] : max_width) r.detail += " " + std::to_string(k) + "->" + std::to_string(w);
  r.detail += ", " + std::to_string(s) + "s (limit " + std::to_string(kBoundSeconds) + "s)";
  return r;
}

// --- 4 -----------------------------------------------------------------

Result total_order_k1() {
  return over_grid({Suite::KBO}, {1}, [](const FuzzResult& fr, Result& r) {
    auto order = delivery_order(fr.trace);
    std::optional<std::vector<MessageId>> ref;
    for (const auto& [pid, seq] : order.per_process) {
      if (order.faulty.contains(pid)) continue;
      if (!ref) {
        ref = seq;
      } else if (seq != *ref) {
        r.ok = false;
        r.detail = "sequences differ on n=" + std::to_string(fr.config.n) + " seed " + std::to_string(fr.index);
      }
    }
  });
}

// --- 5 -----------------------------------------------------------------

Result ksa_properties() {
  std::uint64_t decisions = 0;
  auto r = over_grid({Suite::KSA}, {1, 2, 3}, [&](const FuzzResult& fr, Result& r) {
    auto a = all_pass(fr, {"KSA-Validity", "KSA-Agreement", "KSA-Termination"});
    if (!a.ok) r = a;
    decisions += extract_facts(fr.trace).decisions.size();
  });
  if (r.ok) r.detail += ", " + std::to_string(decisions) + " decisions";
  if (decisions == 0) r = {false, "no decisions observed"};
  return r;
}

// --- 6 -----------------------------------------------------------------

// All 15!/(5!)^3 interleavings of three K2S invocations, checked directly.
std::pair<std::uint64_t, std::string> k2s_exhaustive_three() {
  const std::uint32_t n = 3, k = 2;
  const std::vector<std::string> inputs{"a", "b", "c"};
  std::uint64_t runs = 0;
  std::string failure;
  std::vector<std::uint32_t> order;
  std::vector<int> left(n, 5);
  std::function<void()> rec = [&] {
    if (!failure.empty()) return;
    if (order.size() == 5 * n) {
      RepeatedK2S<std::string> kss(n, k, OraclePolicy::FirstKAdversarial, Prng(runs));
      std::vector<K2SInvocation<std::string>> inv;
      for (std::uint32_t p = 0; p < n; ++p) inv.emplace_back(0, ProcessId(p + 1), inputs[p]);
      for (auto p : order) inv[p].step(kss);
      std::vector<K2SOutput<std::string>> out;
      for (auto& i : inv) out.push_back(i.result());
      for (std::uint32_t p = 0; p < n; ++p) {
        if (out[p].empty() || out[p].size() > k) failure = "set size";
        for (const auto& v : out[p]) {
          if (v.empty() || v.size() > k) failure = "view size";
          for (const auto& x : v)
            if (std::find(inputs.begin(), inputs.end(), x) == inputs.end()) failure = "validity";
          for (const auto& w : out[p])
            if (!comparable(v, w)) failure = "intra inclusion";
        }
        for (std::uint32_t q = 0; q < n; ++q)
          if (!comparable(out[p], out[q])) failure = "inter inclusion";
      }
      ++runs;
      return;
    }
    for (std::uint32_t p = 0; p < n; ++p) {
      if (!left[p]) continue;
      --left[p];
      order.push_back(p);
      rec();
      order.pop_back();
      ++left[p];
    }
  };
  rec();
  return {runs, failure};
}

// Every interleaving of write-then-snapshot on a one-shot snapshot object.
std::pair<std::uint64_t, bool> snapshot_exhaustive_three() {
  const std::uint32_t n = 3;
  std::uint64_t runs = 0;
  bool ok = true;
  std::vector<std::uint32_t> order;
  std::vector<int> left(n, 2);
  std::function<void()> rec = [&] {
    if (order.size() == 2 * n) {
      SnapshotArray<std::uint32_t> s(n, SnapshotArray<std::uint32_t>::Mode::OneShot);
      std::vector<std::set<std::uint32_t>> views(n);
      for (auto p : order) {
        if (left[p]++ == 0)
          s.write(ProcessId(p + 1), p);
        else
          views[p] = values_of(s.snapshot(ProcessId(p + 1)));
      }
      for (std::uint32_t a = 0; a < n; ++a) {
        ok = ok && views[a].contains(a);
        for (std::uint32_t b = 0; b < n; ++b) ok = ok && comparable(views[a], views[b]);
      }
      for (auto& l : left) l = 0;
      ++runs;
      return;
    }
    for (std::uint32_t p = 0; p < n; ++p) {
      if (!left[p]) continue;
      --left[p];
      order.push_back(p);
      rec();
      order.pop_back();
      ++left[p];
    }
  };
  rec();
  return {runs, ok};
}

Result k2s_properties() {
  std::uint64_t multi = 0;
  for (std::uint64_t i = 0; i < kK2sRuns; ++i) {
    Prng g = Prng::stream(i, 9);
    FuzzTemplate t;
    t.protocol = Protocol::K2S;
    t.n = static_cast<std::uint32_t>(g.between(1, 5));
    t.k = static_cast<std::uint32_t>(g.between(1, std::min<std::uint32_t>(3, t.n)));
    t.crash_step_max = 5 * t.n;
    t.seed_base = i;
    auto fr = fuzz_one(t, 0, {Suite::K2S, Suite::Snapshot});
    if (!fr.error.empty()) return {false, "run " + std::to_string(i) + ": " + fr.error};
    auto a = all_pass(fr, {"K2S-Validity", "K2S-SetSize", "K2S-ViewSize", "K2S-IntraInclusion", "K2S-InterInclusion",
                           "K2S-Termination", "Snapshot-Containment", "Snapshot-Replay"});
    if (!a.ok) return a;
    for (const auto& [_, sets] : extract_facts(fr.trace).k2s_outputs)
      if (sets.size() > 1) {
        ++multi;
        break;
      }
  }
  auto [snap_runs, snap_ok] = snapshot_exhaustive_three();
  if (!snap_ok || snap_runs != 90) return {false, "snapshot containment failed over exhaustive interleavings"};
  auto [k2s_runs, failure] = k2s_exhaustive_three();
  if (!failure.empty()) return {false, "exhaustive K2S: " + failure};
  return {true, std::to_string(kK2sRuns) + " runs (" + std::to_string(multi) + " with multi-view outputs), " +
                    std::to_string(snap_runs) + " snapshot and " + std::to_string(k2s_runs) + " K2S interleavings"};
}

// --- 7 -----------------------------------------------------------------

Result kscd_and_roundsync() {
  return over_grid({Suite::KSCD, Suite::RoundSync}, {1, 2, 3}, [](const FuzzResult& fr, Result& r) {
    auto a = all_pass(fr, {"KSCD-Validity", "KSCD-Integrity", "KSCD-Ordering", "KSCD-Bounded", "KSCD-Termination-1",
                           "KSCD-Termination-2", "RoundSync"});
    if (!a.ok) r = a;
  });
}

// --- 8 -----------------------------------------------------------------

Result checker_detects_violations() {
  auto ord = check_all(forged::ordering_breach(), {Suite::KSCD});
  const auto* o = find_verdict(ord, "KSCD-Ordering");
  if (!o || !o->failed() || !o->witness.contains("m") || !o->witness.contains("m_prime") || !o->witness.contains("p_i") ||
      !o->witness.contains("p_j"))
    return {false, "forged ordering breach not reported with a 4-tuple"};

  auto wid = check_all(forged::width3_under_k2(), {Suite::KBO});
  const auto* b = find_verdict(wid, "KBO-Bounded");
  if (!b || !b->failed() || b->witness["antichain"].size() != 3) return {false, "forged width-3 trace not reported with a 3-antichain"};

  // A k-SA oracle that may return more than k values must be caught.
  FuzzTemplate t = stack_template(5, 2);
  t.oracle_policy = OraclePolicy::Permissive;
  std::uint64_t caught = 0;
  for (const auto& fr : fuzz_batch(t, kSeedsPerConfig, kJobs))
    if (fr.failed()) ++caught;
  if (caught == 0) return {false, "permissive oracle went undetected"};
  return {true, "both forged traces flagged; permissive oracle caught in " + std::to_string(caught) + "/" +
                    std::to_string(kSeedsPerConfig) + " runs"};
}

// --- 9 -----------------------------------------------------------------

Result determinism() {
  for (std::uint64_t i = 0; i < kDeterminismScenarios; ++i) {
    auto t = stack_template(3 + static_cast<std::uint32_t>(i % 3), 1 + static_cast<std::uint32_t>(i % 3));
    if (i % 4 == 3) t.protocol = Protocol::K2S;
    auto c = generate(t, i);
    auto a = run(c), b = run(c);
    if (trace_text(a) != trace_text(b)) return {false, "trace differs for scenario " + std::to_string(i)};
    if (report_text(check_all(a)) != report_text(check_all(b))) return {false, "report differs for scenario " + std::to_string(i)};
    // The serialized trace replays to the same report.
    if (report_text(check_all(parse_trace(trace_text(a)))) != report_text(check_all(a)))
      return {false, "reparsed trace differs for scenario " + std::to_string(i)};
  }
  return {true, std::to_string(kDeterminismScenarios) + " scenarios byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"golden worked example", golden_worked_example},
      {"width matches brute force", width_vs_brute_force},
      {"width <= k on random runs", width_bounded},
      {"k=1 gives total order", total_order_k1},
      {"k-set agreement", ksa_properties},
      {"k2-simultaneous consensus", k2s_properties},
      {"k-simultaneous consensus delivery", kscd_and_roundsync},
      {"checker flags violations", checker_detects_violations},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    auto t0 = Clock::now();
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s -- %s (%.2fs)\n", r.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, r.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    if (!r.ok) ++failed;
  }
  return failed ? 1 : 0;
}
