#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kbo/poset.hpp"
#include "kbo/trace.hpp"

namespace kbo {

enum class Suite { KBO, KSCD, K2S, Snapshot, KSA, RoundSync };

inline const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> v{Suite::KBO, Suite::KSCD, Suite::K2S, Suite::Snapshot, Suite::KSA, Suite::RoundSync};
  return v;
}

inline std::string to_string(Suite s) {
  switch (s) {
    case Suite::KBO: return "kbo";
    case Suite::KSCD: return "kscd";
    case Suite::K2S: return "k2s";
    case Suite::Snapshot: return "snapshot";
    case Suite::KSA: return "ksa";
    case Suite::RoundSync: return "roundsync";
  }
  return "?";
}

class UnknownSuite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Comma-separated suite names, or "all".
inline std::vector<Suite> parse_suites(const std::string& text) {
  std::vector<Suite> out;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "all") return all_suites();
    bool found = false;
    for (auto s : all_suites())
      if (to_string(s) == name) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
        found = true;
      }
    if (!found) throw UnknownSuite("unknown suite '" + name + "'");
  }
  if (out.empty()) throw UnknownSuite("no suite selected");
  return out;
}

struct Verdict {
  enum class Status { Pass, Fail, NotEvaluated };

  std::string suite;
  std::string property;
  Status status = Status::Pass;
  json witness;  // null unless failed
  std::string detail;

  bool failed() const { return status == Status::Fail; }

  json to_json() const {
    json j;
    j["suite"] = suite;
    j["property"] = property;
    j["result"] = status == Status::Pass ? "pass" : status == Status::Fail ? "fail" : "not-evaluated";
    j["witness"] = witness;
    j["detail"] = detail;
    return j;
  }
};

inline std::string report_text(const std::vector<Verdict>& verdicts) {
  std::string out;
  for (const auto& v : verdicts) out += v.to_json().dump() + "\n";
  return out;
}

inline bool any_failed(const std::vector<Verdict>& verdicts) {
  return std::any_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.failed(); });
}

inline const Verdict* find_verdict(const std::vector<Verdict>& verdicts, const std::string& property) {
  for (const auto& v : verdicts)
    if (v.property == property) return &v;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Facts extracted from a trace

struct TraceFacts {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  Protocol protocol = Protocol::Stack;
  bool quiescent = false;
  std::set<ProcessId> faulty;

  struct Broadcast {
    ProcessId pid;
    std::uint64_t step = 0;
    bool returned = false;
  };
  std::map<MessageId, Broadcast> broadcasts;

  struct Delivery {
    MessageId msg;
    std::uint64_t step = 0;
  };
  std::map<ProcessId, std::vector<Delivery>> kbo_deliveries;

  struct SetDeliveryEvent {
    std::uint64_t round = 0;
    MessageSet set;
    std::uint64_t step = 0;
  };
  std::map<ProcessId, std::vector<SetDeliveryEvent>> set_deliveries;

  struct Proposal {
    ProcessId pid;
    std::uint64_t instance = 0;
    Value value;
    std::uint64_t step = 0;
  };
  std::vector<Proposal> proposals;
  std::map<std::pair<ProcessId, std::uint64_t>, std::pair<Value, std::uint64_t>> decisions;

  std::map<std::uint64_t, std::map<ProcessId, Value>> k2s_inputs;
  std::map<std::uint64_t, std::map<ProcessId, std::set<std::set<std::string>>>> k2s_outputs;

  struct Access {
    ProcessId pid;
    std::uint64_t step = 0;
    std::string object;
    std::optional<std::uint64_t> instance;
    std::string op;
    json arg;
    json result;
  };
  std::vector<Access> accesses;

  std::vector<ProcessId> non_faulty() const {
    std::vector<ProcessId> out;
    for (std::uint32_t i = 1; i <= n; ++i)
      if (!faulty.contains(ProcessId(i))) out.push_back(ProcessId(i));
    return out;
  }

  DeliveryOrder delivery_order() const {
    DeliveryOrder d;
    d.n = n;
    d.faulty = faulty;
    for (std::uint32_t i = 1; i <= n; ++i) {
      auto& seq = d.per_process[ProcessId(i)];
      auto it = kbo_deliveries.find(ProcessId(i));
      if (it != kbo_deliveries.end())
        for (const auto& dl : it->second) seq.push_back(dl.msg);
      auto& starts = d.set_starts[ProcessId(i)];
      auto st = set_deliveries.find(ProcessId(i));
      std::size_t pos = 0;
      if (st != set_deliveries.end())
        for (const auto& sd : st->second) {
          starts.push_back(pos);
          pos += sd.set.size();
        }
    }
    return d;
  }
};

namespace detail {

inline std::set<std::string> string_set(const json& arr) {
  std::set<std::string> out;
  for (const auto& x : arr) out.insert(x.get<std::string>());
  return out;
}

inline MessageSet message_set(const json& arr) {
  MessageSet out;
  for (const auto& x : arr) out.insert(MessageId::parse(x.get<std::string>()));
  return out;
}

}  // namespace detail

inline TraceFacts extract_facts(const Trace& t) {
  TraceFacts f;
  f.n = t.config.n;
  f.k = t.config.k;
  f.protocol = t.config.protocol;
  f.quiescent = t.quiescent();
  for (const auto& e : t.events) {
    const json& p = e.payload;
    switch (e.kind) {
      case EventKind::Crash:
        f.faulty.insert(e.pid);
        break;
      case EventKind::Invoke: {
        const auto op = p.value("op", "");
        if (op == "kbo_broadcast") {
          f.broadcasts[MessageId::parse(p.at("msg").get<std::string>())] = {e.pid, e.step, false};
        } else if (op == "propose") {
          f.proposals.push_back({e.pid, p.at("instance").get<std::uint64_t>(), p.at("value").get<std::string>(), e.step});
        } else if (op == "k2s_propose") {
          f.k2s_inputs[p.at("round").get<std::uint64_t>()][e.pid] = p.at("value").get<std::string>();
        }
        break;
      }
      case EventKind::Return: {
        const auto op = p.value("op", "");
        if (op == "kbo_broadcast") {
          auto it = f.broadcasts.find(MessageId::parse(p.at("msg").get<std::string>()));
          if (it != f.broadcasts.end()) it->second.returned = true;
        } else if (op == "k2s_propose") {
          std::set<std::set<std::string>> sets;
          for (const auto& view : p.at("sets")) sets.insert(detail::string_set(view));
          f.k2s_outputs[p.at("round").get<std::uint64_t>()][e.pid] = std::move(sets);
        }
        break;
      }
      case EventKind::Decide:
        f.decisions[{e.pid, p.at("instance").get<std::uint64_t>()}] = {p.at("value").get<std::string>(), e.step};
        break;
      case EventKind::DeliverMsg:
        f.kbo_deliveries[e.pid].push_back({MessageId::parse(p.at("msg").get<std::string>()), e.step});
        break;
      case EventKind::DeliverSet:
        f.set_deliveries[e.pid].push_back({p.at("round").get<std::uint64_t>(), detail::message_set(p.at("set")), e.step});
        break;
      case EventKind::ObjectAccess: {
        TraceFacts::Access a;
        a.pid = e.pid;
        a.step = e.step;
        a.object = p.at("object").get<std::string>();
        if (p.contains("instance")) a.instance = p["instance"].get<std::uint64_t>();
        a.op = p.at("op").get<std::string>();
        a.arg = p.value("arg", json(nullptr));
        a.result = p.value("result", json(nullptr));
        f.accesses.push_back(std::move(a));
        break;
      }
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Property suites

namespace detail {

struct SuiteWriter {
  std::string suite;
  std::vector<Verdict>& out;

  void pass(const std::string& prop, std::string detail = {}) {
    out.push_back({suite, prop, Verdict::Status::Pass, nullptr, std::move(detail)});
  }
  void fail(const std::string& prop, json witness, std::string detail = {}) {
    out.push_back({suite, prop, Verdict::Status::Fail, std::move(witness), std::move(detail)});
  }
  void skip(const std::string& prop, std::string why) {
    out.push_back({suite, prop, Verdict::Status::NotEvaluated, nullptr, std::move(why)});
  }
  void result(const std::string& prop, const std::optional<json>& witness, std::string detail = {}) {
    if (witness)
      fail(prop, *witness, std::move(detail));
    else
      pass(prop);
  }
};

inline const char* kNotQuiescent = "liveness is only evaluated on quiescent traces";

/// Validity / Integrity / Termination-1 / Termination-2 over per-process
/// message sequences, shared by the KBO and KSCD suites.
inline void reliable_broadcast_props(const TraceFacts& f, const std::map<ProcessId, std::vector<TraceFacts::Delivery>>& del,
                                     SuiteWriter& w, const std::string& prefix) {
  std::optional<json> validity, integrity;
  std::set<MessageId> delivered_anywhere;
  std::map<ProcessId, std::set<MessageId>> delivered_by;
  for (const auto& [pid, seq] : del) {
    std::map<MessageId, std::uint64_t> first_step;
    for (const auto& d : seq) {
      delivered_anywhere.insert(d.msg);
      delivered_by[pid].insert(d.msg);
      if (!validity && !f.broadcasts.contains(d.msg))
        validity = json{{"pid", pid.index}, {"msg", d.msg.str()}, {"step", d.step}};
      auto [it, fresh] = first_step.emplace(d.msg, d.step);
      if (!fresh && !integrity)
        integrity = json{{"pid", pid.index}, {"msg", d.msg.str()}, {"steps", json::array({it->second, d.step})}};
    }
  }
  w.result(prefix + "-Validity", validity);
  w.result(prefix + "-Integrity", integrity);

  if (!f.quiescent) {
    w.skip(prefix + "-Termination-1", kNotQuiescent);
    w.skip(prefix + "-Termination-2", kNotQuiescent);
    return;
  }
  std::optional<json> t1, t2;
  for (const auto& [m, b] : f.broadcasts) {
    if (f.faulty.contains(b.pid)) continue;
    if (!b.returned || !delivered_by[b.pid].contains(m)) {
      t1 = json{{"pid", b.pid.index}, {"msg", m.str()}, {"returned", b.returned}};
      break;
    }
  }
  for (const auto& m : delivered_anywhere) {
    for (auto q : f.non_faulty()) {
      if (!delivered_by[q].contains(m)) {
        ProcessId by;
        for (const auto& [pid, s] : delivered_by)
          if (s.contains(m)) {
            by = pid;
            break;
          }
        t2 = json{{"msg", m.str()}, {"delivered_by", by.index}, {"missing_at", q.index}};
        break;
      }
    }
    if (t2) break;
  }
  w.result(prefix + "-Termination-1", t1);
  w.result(prefix + "-Termination-2", t2);
}

inline json ids_json(const std::vector<MessageId>& v) {
  json arr = json::array();
  for (const auto& m : v) arr.push_back(m.str());
  return arr;
}

}  // namespace detail

inline void check_kbo(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"kbo", out};
  if (f.protocol == Protocol::K2S) {
    for (const char* p : {"KBO-Validity", "KBO-Integrity", "KBO-Bounded", "KBO-Termination-1", "KBO-Termination-2"})
      w.skip(p, "protocol k2s does not broadcast");
    return;
  }
  detail::reliable_broadcast_props(f, f.kbo_deliveries, w, "KBO");
  try {
    Poset p = build_order(f.delivery_order());
    std::size_t wd = width(p);
    if (wd <= f.k) {
      w.pass("KBO-Bounded", "width " + std::to_string(wd));
    } else {
      w.fail("KBO-Bounded", json{{"antichain", detail::ids_json(maximum_antichain(p))}, {"width", wd}, {"k", f.k}});
    }
  } catch (const PosetError& e) {
    w.fail("KBO-Bounded", json{{"error", e.what()}});
  }
}

inline void check_kscd(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"kscd", out};
  const char* props[] = {"KSCD-Validity", "KSCD-Integrity", "KSCD-Ordering", "KSCD-Bounded",
                         "KSCD-Termination-1", "KSCD-Termination-2"};
  if (f.protocol != Protocol::Stack) {
    for (const char* p : props) w.skip(p, "protocol " + to_string(f.protocol) + " has no set deliveries");
    return;
  }

  // Flatten sets into sequences for the reliable-broadcast properties.
  std::map<ProcessId, std::vector<TraceFacts::Delivery>> flat;
  for (const auto& [pid, sets] : f.set_deliveries)
    for (const auto& sd : sets)
      for (const auto& m : sd.set) flat[pid].push_back({m, sd.step});

  std::vector<Verdict> tmp;
  detail::SuiteWriter tw{"kscd", tmp};
  detail::reliable_broadcast_props(f, flat, tw, "KSCD");
  auto take = [&](const std::string& prop) {
    for (auto& v : tmp)
      if (v.property == prop) out.push_back(v);
  };
  take("KSCD-Validity");
  take("KSCD-Integrity");

  // Ordering: no m in an earlier set than m' at p_i while m' is in an earlier set than m at p_j.
  std::map<ProcessId, std::map<MessageId, std::size_t>> set_index;
  for (const auto& [pid, sets] : f.set_deliveries)
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (const auto& m : sets[i].set) set_index[pid].emplace(m, i);
  std::optional<json> ordering;
  for (auto pi = set_index.begin(); pi != set_index.end() && !ordering; ++pi) {
    for (auto pj = set_index.begin(); pj != set_index.end() && !ordering; ++pj) {
      if (pi == pj) continue;
      for (const auto& [m, im] : pi->second) {
        for (const auto& [m2, im2] : pi->second) {
          if (!(im < im2)) continue;
          auto jm = pj->second.find(m);
          auto jm2 = pj->second.find(m2);
          if (jm == pj->second.end() || jm2 == pj->second.end()) continue;
          if (jm2->second < jm->second) {
            ordering = json{{"m", m.str()}, {"m_prime", m2.str()}, {"p_i", pi->first.index}, {"p_j", pj->first.index}};
            break;
          }
        }
        if (ordering) break;
      }
    }
  }
  w.result("KSCD-Ordering", ordering);

  std::optional<json> bounded;
  for (const auto& [pid, sets] : f.set_deliveries) {
    for (const auto& sd : sets)
      if (sd.set.empty() || sd.set.size() > f.k) {
        bounded = json{{"pid", pid.index}, {"round", sd.round}, {"size", sd.set.size()}, {"step", sd.step}};
        break;
      }
    if (bounded) break;
  }
  w.result("KSCD-Bounded", bounded);
  take("KSCD-Termination-1");
  take("KSCD-Termination-2");
}

inline void check_k2s(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"k2s", out};
  const char* props[] = {"K2S-Validity", "K2S-SetSize", "K2S-ViewSize", "K2S-IntraInclusion", "K2S-InterInclusion",
                         "K2S-Termination"};
  if (f.protocol == Protocol::ToChannels) {
    for (const char* p : props) w.skip(p, "protocol to-channels uses no K2S object");
    return;
  }
  std::optional<json> validity, set_size, view_size, intra, inter, term;
  for (const auto& [round, outputs] : f.k2s_outputs) {
    std::set<std::string> inputs;
    auto in = f.k2s_inputs.find(round);
    if (in != f.k2s_inputs.end())
      for (const auto& [_, v] : in->second) inputs.insert(v);
    const std::size_t bound = std::min<std::size_t>(f.k, inputs.size());
    for (const auto& [pid, sets] : outputs) {
      auto where = [&] { return json{{"round", round}, {"pid", pid.index}}; };
      if (!set_size && (sets.empty() || sets.size() > bound)) {
        set_size = where();
        (*set_size)["size"] = sets.size();
        (*set_size)["bound"] = bound;
      }
      for (const auto& view : sets) {
        if (!view_size && (view.empty() || view.size() > bound)) {
          view_size = where();
          (*view_size)["view_size"] = view.size();
          (*view_size)["bound"] = bound;
        }
        for (const auto& v : view)
          if (!validity && !inputs.contains(v)) {
            validity = where();
            (*validity)["value"] = v;
          }
        for (const auto& other : sets)
          if (!intra && !comparable(view, other)) intra = where();
      }
      for (const auto& [pid2, sets2] : outputs)
        if (!inter && !comparable(sets, sets2)) {
          inter = json{{"round", round}, {"p_i", pid.index}, {"p_j", pid2.index}};
        }
    }
  }
  w.result("K2S-Validity", validity);
  w.result("K2S-SetSize", set_size);
  w.result("K2S-ViewSize", view_size);
  w.result("K2S-IntraInclusion", intra);
  w.result("K2S-InterInclusion", inter);
  if (!f.quiescent) {
    w.skip("K2S-Termination", detail::kNotQuiescent);
  } else {
    for (const auto& [round, ins] : f.k2s_inputs) {
      for (const auto& [pid, _] : ins) {
        if (f.faulty.contains(pid)) continue;
        auto o = f.k2s_outputs.find(round);
        if (o == f.k2s_outputs.end() || !o->second.contains(pid)) {
          term = json{{"round", round}, {"pid", pid.index}};
          break;
        }
      }
      if (term) break;
    }
    w.result("K2S-Termination", term);
  }
}

inline void check_snapshot(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"snapshot", out};
  using Key = std::pair<std::string, std::optional<std::uint64_t>>;
  std::map<Key, json> cells;
  std::map<Key, std::vector<const TraceFacts::Access*>> one_shot_snaps;
  std::optional<json> replay, containment;

  for (const auto& a : f.accesses) {
    if (a.object != "MEM" && a.object != "SNAP1" && a.object != "SNAP2") continue;
    Key key{a.object, a.instance};
    auto& c = cells[key];
    if (c.is_null()) c = json::array();
    while (c.size() < f.n) c.push_back(nullptr);
    if (a.op == "write") {
      c[a.pid.slot()] = a.arg;
    } else if (a.op == "snapshot") {
      if (!replay && a.result != c) {
        replay = json{{"object", a.object}, {"step", a.step}, {"expected", c}, {"actual", a.result}};
        if (a.instance) (*replay)["instance"] = *a.instance;
      }
      if (a.object != "MEM") one_shot_snaps[key].push_back(&a);
    }
  }

  auto entries = [](const json& snap) {
    std::set<std::pair<std::size_t, std::string>> out;
    for (std::size_t i = 0; i < snap.size(); ++i)
      if (!snap[i].is_null()) out.emplace(i, snap[i].dump());
    return out;
  };
  for (const auto& [key, snaps] : one_shot_snaps) {
    for (std::size_t i = 0; i < snaps.size() && !containment; ++i)
      for (std::size_t j = i + 1; j < snaps.size(); ++j)
        if (!comparable(entries(snaps[i]->result), entries(snaps[j]->result))) {
          containment = json{{"object", key.first},
                             {"pids", json::array({snaps[i]->pid.index, snaps[j]->pid.index})},
                             {"steps", json::array({snaps[i]->step, snaps[j]->step})}};
          if (key.second) (*containment)["instance"] = *key.second;
          break;
        }
  }
  w.result("Snapshot-Containment", containment);
  w.result("Snapshot-Replay", replay);
}

inline void check_ksa(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"ksa", out};
  std::map<std::uint64_t, std::set<Value>> proposed;
  for (const auto& p : f.proposals) proposed[p.instance].insert(p.value);

  std::optional<json> validity, agreement, term;
  std::map<std::uint64_t, std::set<Value>> decided;
  for (const auto& [key, dv] : f.decisions) {
    const auto& [pid, instance] = key;
    decided[instance].insert(dv.first);
    if (!validity && !proposed[instance].contains(dv.first))
      validity = json{{"pid", pid.index}, {"instance", instance}, {"value", dv.first}, {"step", dv.second}};
  }
  for (const auto& [instance, values] : decided)
    if (!agreement && values.size() > f.k)
      agreement = json{{"instance", instance}, {"decided", values}, {"k", f.k}};
  w.result("KSA-Validity", validity);
  w.result("KSA-Agreement", agreement);
  if (!f.quiescent) {
    w.skip("KSA-Termination", detail::kNotQuiescent);
  } else {
    for (const auto& p : f.proposals)
      if (!f.faulty.contains(p.pid) && !f.decisions.contains({p.pid, p.instance})) {
        term = json{{"pid", p.pid.index}, {"instance", p.instance}};
        break;
      }
    w.result("KSA-Termination", term);
  }

  // The k-SA oracle objects underneath K2S.
  std::optional<json> ovalid, oagree;
  std::map<std::uint64_t, std::set<std::string>> args, results;
  for (const auto& a : f.accesses) {
    if (a.object != "KSA") continue;
    const auto inst = a.instance.value_or(0);
    args[inst].insert(a.arg.dump());
    results[inst].insert(a.result.dump());
    if (!ovalid && !args[inst].contains(a.result.dump()))
      ovalid = json{{"instance", inst}, {"step", a.step}, {"result", a.result}};
  }
  for (const auto& [inst, rs] : results)
    if (!oagree && rs.size() > f.k) {
      json vals = json::array();
      for (const auto& r : rs) vals.push_back(json::parse(r));
      oagree = json{{"instance", inst}, {"decided", vals}, {"k", f.k}};
    }
  w.result("KSA-OracleValidity", ovalid);
  w.result("KSA-OracleAgreement", oagree);
}

/// For a round r where every non-faulty process participates, some round r'
/// in (r, r+k] is also common to all of them and they delivered the same
/// messages in [r, r'). The round a process would enter after its last
/// delivery counts as participated.
inline void check_roundsync(const TraceFacts& f, std::vector<Verdict>& out) {
  detail::SuiteWriter w{"roundsync", out};
  if (f.protocol != Protocol::Stack) {
    w.skip("RoundSync", "protocol " + to_string(f.protocol) + " has no rounds");
    return;
  }
  if (!f.quiescent) {
    w.skip("RoundSync", detail::kNotQuiescent);
    return;
  }
  auto alive = f.non_faulty();
  if (alive.empty()) {
    w.pass("RoundSync", "no non-faulty process");
    return;
  }
  std::map<ProcessId, std::map<std::uint64_t, MessageSet>> by_round;
  std::map<ProcessId, std::set<std::uint64_t>> rounds;
  for (auto p : alive) {
    std::uint64_t total = 0;
    auto it = f.set_deliveries.find(p);
    if (it != f.set_deliveries.end())
      for (const auto& sd : it->second) {
        by_round[p][sd.round] = sd.set;
        rounds[p].insert(sd.round);
        total = sd.round + sd.set.size();
      }
    rounds[p].insert(total);
  }
  std::set<std::uint64_t> common = rounds[alive.front()];
  for (auto p : alive) {
    std::set<std::uint64_t> keep;
    for (auto r : common)
      if (rounds[p].contains(r)) keep.insert(r);
    common = std::move(keep);
  }
  auto msgs = [&](ProcessId p, std::uint64_t from, std::uint64_t to) {
    MessageSet s;
    for (const auto& [r, set] : by_round[p])
      if (r >= from && r < to) s.insert(set.begin(), set.end());
    return s;
  };
  std::optional<json> violation;
  for (auto r : common) {
    bool delivered_after = false;
    for (auto p : alive)
      if (!by_round[p].empty() && by_round[p].rbegin()->first >= r) delivered_after = true;
    if (!delivered_after) continue;
    bool found = false;
    for (auto r2 : common) {
      if (r2 <= r || r2 > r + f.k) continue;
      const auto ref = msgs(alive.front(), r, r2);
      if (std::all_of(alive.begin(), alive.end(), [&](ProcessId p) { return msgs(p, r, r2) == ref; })) {
        found = true;
        break;
      }
    }
    if (!found) {
      violation = json{{"round", r}, {"k", f.k}};
      break;
    }
  }
  w.result("RoundSync", violation);
}

/// Evaluates the selected suites; never stops at the first failure.
inline std::vector<Verdict> check_all(const Trace& t, const std::vector<Suite>& suites = all_suites()) {
  TraceFacts f = extract_facts(t);
  std::vector<Verdict> out;
  for (auto s : suites) {
    switch (s) {
      case Suite::KBO: check_kbo(f, out); break;
      case Suite::KSCD: check_kscd(f, out); break;
      case Suite::K2S: check_k2s(f, out); break;
      case Suite::Snapshot: check_snapshot(f, out); break;
      case Suite::KSA: check_ksa(f, out); break;
      case Suite::RoundSync: check_roundsync(f, out); break;
    }
  }
  return out;
}

inline DeliveryOrder delivery_order(const Trace& t) { return extract_facts(t).delivery_order(); }

}  // namespace kbo
