#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbo/config.hpp"
#include "kbo/k2s.hpp"
#include "kbo/kbo.hpp"
#include "kbo/ksa.hpp"
#include "kbo/kscd.hpp"
#include "kbo/prng.hpp"
#include "kbo/shared_objects.hpp"
#include "kbo/trace.hpp"

namespace kbo {

/// A schedulable unit: one thread of one process.
struct Action {
  ProcessId pid;
  Thread thread = Thread::App;

  auto operator<=>(const Action&) const = default;
};

/// Raised when a scripted schedule names an action that is not enabled.
class ScheduleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chooses the next action among the enabled ones.
///
///  - round-robin: cyclic over (p1,app), (p1,task), (p2,app), ...
///  - seeded-random: a uniformly chosen enabled action runs for a burst of
///    1..kMaxBurst consecutive picks (while it stays enabled), so processes
///    drift in and out of lockstep. Starvation guard: an action left waiting
///    for kWindowPerProcess * n consecutive picks while enabled is forced
///    next, so every continuously enabled action runs within
///    (kWindowPerProcess + 2) * n picks.
///  - scripted: follows the script token by token, then continues round-robin.
class Scheduler {
 public:
  Scheduler(SchedulePolicy policy, std::vector<ScriptStep> script, std::uint32_t n, Prng rng)
      : policy_(policy), script_(std::move(script)), n_(n), rng_(std::move(rng)) {}

  /// `enabled` must be sorted. Returns the action and, for scripted channel
  /// reads, the requested channel.
  std::pair<Action, std::optional<std::uint32_t>> pick(const std::vector<Action>& enabled) {
    if (enabled.empty()) throw std::logic_error("scheduler: nothing enabled");
    if (policy_ == SchedulePolicy::Scripted && script_pos_ < script_.size()) {
      const auto& st = script_[script_pos_];
      Action a{st.pid, st.thread};
      if (!std::binary_search(enabled.begin(), enabled.end(), a))
        throw ScheduleError("schedule_script[" + std::to_string(script_pos_) + "] '" + st.str() +
                            "' names an action that is not enabled");
      ++script_pos_;
      return {a, st.channel};
    }
    if (policy_ == SchedulePolicy::SeededRandom) return {pick_random(enabled), std::nullopt};
    return {pick_round_robin(enabled), std::nullopt};
  }

  Prng& rng() { return rng_; }
  bool script_exhausted() const { return script_pos_ >= script_.size(); }

 private:
  static std::uint32_t ordinal(const Action& a) { return a.pid.slot() * 2 + (a.thread == Thread::App ? 0 : 1); }

  Action pick_round_robin(const std::vector<Action>& enabled) {
    const std::uint32_t total = n_ * 2;
    const Action* best = nullptr;
    std::uint32_t best_dist = total;
    for (const auto& a : enabled) {
      std::uint32_t d = (ordinal(a) + total - cursor_) % total;
      if (d < best_dist) {
        best_dist = d;
        best = &a;
      }
    }
    cursor_ = (ordinal(*best) + 1) % total;
    return *best;
  }

  Action pick_random(const std::vector<Action>& enabled) {
    if (waiting_.size() != n_ * 2) waiting_.assign(n_ * 2, 0);
    std::vector<std::uint64_t> now(n_ * 2, 0);
    for (const auto& a : enabled) now[ordinal(a)] = waiting_[ordinal(a)];
    waiting_ = std::move(now);

    const Action* chosen = nullptr;
    std::uint64_t longest = 0;
    for (const auto& a : enabled)
      if (waiting_[ordinal(a)] + 1 >= kWindowPerProcess * n_ && (!chosen || waiting_[ordinal(a)] > longest)) {
        chosen = &a;
        longest = waiting_[ordinal(a)];
      }
    if (!chosen && burst_left_ > 0 && std::binary_search(enabled.begin(), enabled.end(), burst_)) {
      chosen = &*std::lower_bound(enabled.begin(), enabled.end(), burst_);
      --burst_left_;
    }
    if (!chosen) {
      chosen = &enabled[rng_.below(enabled.size())];
      burst_ = *chosen;
      burst_left_ = rng_.below(kMaxBurst);
    }
    for (const auto& a : enabled) ++waiting_[ordinal(a)];
    waiting_[ordinal(*chosen)] = 0;
    return *chosen;
  }

  static constexpr std::uint64_t kMaxBurst = 6;
  static constexpr std::uint64_t kWindowPerProcess = 8;

  SchedulePolicy policy_;
  std::vector<ScriptStep> script_;
  std::size_t script_pos_ = 0;
  std::uint32_t n_;
  Prng rng_;
  std::uint32_t cursor_ = 0;
  std::vector<std::uint64_t> waiting_;
  Action burst_;
  std::uint64_t burst_left_ = 0;
};

/// Deterministic wait-free shared-memory simulator.
///
/// Executes n process automata one scheduler tick at a time. A tick runs one
/// enabled action, which performs at most one shared-object operation; all
/// operations are therefore atomic and linearized at their event. The run
/// ends when every live process is idle (quiescent) or after step_budget
/// ticks.
///
/// Protocols:
///  - stack: repeated k-SA (propose) over k-BO over k-SCD over MEM + K2S.
///  - k2s: processes call the repeated K2S object directly.
///  - to-channels: k-BO as k total-order channels chosen by a daemon.
class Simulator {
 public:
  explicit Simulator(ScenarioConfig config)
      : config_(std::move(config)),
        scheduler_((validate(config_), config_.schedule_policy), config_.schedule_script, config_.n,
                   Prng::stream(config_.seed, 1)),
        daemon_(Prng::stream(config_.seed, 3)),
        mem_(config_.n, Mem::Mode::MultiShot, "MEM"),
        kss_(config_.n, config_.k, config_.oracle_policy, Prng::stream(config_.seed, 2)),
        value_kss_(config_.n, config_.k, config_.oracle_policy, Prng::stream(config_.seed, 2)),
        channels_(config_.k) {
    for (std::uint32_t i = 1; i <= config_.n; ++i) procs_.emplace_back(ProcessId(i), config_.k);
    trace_.config = config_;
  }

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Runs one scheduler tick. Returns false once the run has ended.
  bool step() {
    if (finished_) return false;
    for (const auto& cp : config_.crash_plan)
      if (cp.step <= tick_ && !proc(cp.pid).crashed) inject_crash(cp.pid);

    auto enabled = enabled_actions();
    if (enabled.empty()) {
      for (const auto& p : procs_)
        if (!p.crashed && !idle(p))
          throw std::logic_error("simulator: p" + std::to_string(p.pid.index) + " blocked with no enabled action");
      finish(Outcome::Quiescent);
      return false;
    }
    if (tick_ >= config_.step_budget) {
      finish(Outcome::BudgetExhausted);
      return false;
    }
    auto [action, channel] = scheduler_.pick(enabled);
    last_action_ = action;
    execute(action, channel);
    ++tick_;
    return true;
  }

  /// Stops pid: it takes no further steps; its earlier steps stay in the trace.
  void inject_crash(ProcessId pid) {
    auto& p = proc(pid);
    if (p.crashed) throw ProtocolViolation("p" + std::to_string(pid.index) + " already crashed");
    p.crashed = true;
    emit(pid, EventKind::Crash, json::object());
  }

  Trace run() {
    while (step()) {
    }
    return trace_;
  }

  const Trace& trace() const { return trace_; }
  bool finished() const { return finished_; }
  std::uint64_t tick() const { return tick_; }
  const ScenarioConfig& config() const { return config_; }

  const KscdProcess& kscd(ProcessId pid) const { return proc(pid).kscd; }
  const DecisionsTable& decisions(ProcessId pid) const { return proc(pid).decisions; }
  const Mem& mem() const { return mem_; }
  const MessageK2S& message_k2s() const { return kss_; }
  const RepeatedK2S<Value>& value_k2s() const { return value_kss_; }
  const std::vector<MessageId>& delivery_sequence(ProcessId pid) const { return proc(pid).delivered_seq; }
  bool crashed(ProcessId pid) const { return proc(pid).crashed; }
  /// Actions the scheduler may pick at the next tick (crashes not yet applied).
  std::vector<Action> enabled() const { return enabled_actions(); }
  const std::optional<Action>& last_action() const { return last_action_; }

 private:
  enum class AppState { Ready, Broadcasting, AwaitDecision, InK2S };

  struct Proc {
    Proc(ProcessId id, std::uint32_t k) : pid(id), kscd(id), reader(k) {}

    ProcessId pid;
    bool crashed = false;

    std::size_t next_item = 0;
    AppState app = AppState::Ready;
    std::uint32_t next_index = 0;  // per-sender message index
    std::optional<MessageId> current_msg;

    KscdProcess kscd;
    DecisionsTable decisions;
    ProposalSequence proposals;
    ChannelReader reader;
    std::optional<K2SInvocation<Value>> k2s;
    std::vector<MessageId> delivered_seq;
  };

  Proc& proc(ProcessId pid) { return procs_.at(pid.slot()); }
  const Proc& proc(ProcessId pid) const { return procs_.at(pid.slot()); }

  void emit(ProcessId pid, EventKind kind, json payload) {
    trace_.events.push_back(Event{trace_.events.size(), pid, kind, std::move(payload)});
  }

  Emit emitter(ProcessId pid) {
    return [this, pid](EventKind kind, json payload) { emit(pid, kind, std::move(payload)); };
  }

  const WorkloadItem* current_item(const Proc& p) const {
    const auto& items = config_.items(p.pid);
    return p.next_item < items.size() ? &items[p.next_item] : nullptr;
  }

  bool app_enabled(const Proc& p) const {
    switch (p.app) {
      case AppState::Ready:
        return current_item(p) != nullptr;
      case AppState::Broadcasting:
        return p.kscd.broadcast_phase() == KscdProcess::BroadcastPhase::NeedSnapshot || p.kscd.broadcast_can_return();
      case AppState::AwaitDecision:
        return p.decisions.ready(current_item(p)->instance);
      case AppState::InK2S:
        return true;
    }
    return false;
  }

  bool task_enabled(const Proc& p) const {
    switch (config_.protocol) {
      case Protocol::Stack: return p.kscd.task_has_work(mem_);
      case Protocol::ToChannels: return !p.reader.readable(channels_).empty();
      case Protocol::K2S: return false;
    }
    return false;
  }

  bool idle(const Proc& p) const { return p.app == AppState::Ready && !current_item(p) && !task_enabled(p); }

  std::vector<Action> enabled_actions() const {
    std::vector<Action> out;
    for (const auto& p : procs_) {
      if (p.crashed) continue;
      if (app_enabled(p)) out.push_back({p.pid, Thread::App});
      if (task_enabled(p)) out.push_back({p.pid, Thread::Task});
    }
    return out;
  }

  void finish(Outcome o) {
    finished_ = true;
    trace_.outcome = o;
    trace_.ticks = tick_;
  }

  void execute(const Action& a, std::optional<std::uint32_t> channel) {
    auto& p = proc(a.pid);
    if (a.thread == Thread::App)
      app_step(p);
    else
      task_step(p, channel);
  }

  MessageId new_message(Proc& p, Value payload, bool is_pair) {
    MessageId id{p.pid.index, p.next_index++};
    payloads_[id] = std::move(payload);
    if (is_pair) pair_messages_.insert(id);
    return id;
  }

  void app_step(Proc& p) {
    const WorkloadItem& item = *current_item(p);
    auto out = emitter(p.pid);
    switch (p.app) {
      case AppState::Ready: {
        if (item.kind == WorkloadItem::Kind::K2S) {
          json inv;
          inv["op"] = "k2s_propose";
          inv["round"] = item.instance;
          inv["value"] = item.value;
          out(EventKind::Invoke, inv);
          p.k2s.emplace(item.instance, p.pid, item.value);
          p.app = AppState::InK2S;
          k2s_step(p);
          return;
        }
        Value payload = item.value;
        bool is_pair = false;
        if (item.kind == WorkloadItem::Kind::Propose) {
          p.proposals.begin(item.instance);
          json inv;
          inv["op"] = "propose";
          inv["instance"] = item.instance;
          inv["value"] = item.value;
          out(EventKind::Invoke, inv);
          payload = encode_pair(item.instance, item.value);
          is_pair = true;
        }
        MessageId m = new_message(p, payload, is_pair);
        p.current_msg = m;
        json inv;
        inv["op"] = "kbo_broadcast";
        inv["msg"] = m.str();
        inv["payload"] = payload;
        out(EventKind::Invoke, inv);
        if (config_.protocol == Protocol::ToChannels) {
          std::uint32_t ch = item.channel ? *item.channel : static_cast<std::uint32_t>(daemon_.between(1, config_.k));
          channels_.append(ch, m);
          out(EventKind::ObjectAccess,
              ObjectAccess{"CHAN", ch, "append", m.str(), channels_.length(ch) - 1}.to_json());
          broadcast_returned(p);
        } else {
          p.kscd.begin_broadcast(m, mem_, out);
          p.app = AppState::Broadcasting;
        }
        return;
      }
      case AppState::Broadcasting:
        if (p.kscd.broadcast_phase() == KscdProcess::BroadcastPhase::NeedSnapshot) {
          p.kscd.broadcast_snapshot(mem_, out);
        } else {
          p.kscd.finish_broadcast();
          broadcast_returned(p);
        }
        return;
      case AppState::AwaitDecision: {
        Value x = p.decisions.take(item.instance);
        json dec;
        dec["instance"] = item.instance;
        dec["value"] = x;
        out(EventKind::Decide, dec);
        ++p.next_item;
        p.app = AppState::Ready;
        return;
      }
      case AppState::InK2S:
        k2s_step(p);
        return;
    }
  }

  void broadcast_returned(Proc& p) {
    json ret;
    ret["op"] = "kbo_broadcast";
    ret["msg"] = p.current_msg->str();
    emit(p.pid, EventKind::Return, ret);
    p.current_msg.reset();
    if (current_item(p)->kind == WorkloadItem::Kind::Propose) {
      p.app = AppState::AwaitDecision;
    } else {
      ++p.next_item;
      p.app = AppState::Ready;
    }
  }

  void k2s_step(Proc& p) {
    emit(p.pid, EventKind::ObjectAccess, p.k2s->step(value_kss_).to_json());
    if (!p.k2s->done()) return;
    json ret;
    ret["op"] = "k2s_propose";
    ret["round"] = p.k2s->round();
    ret["sets"] = encode(p.k2s->result());
    emit(p.pid, EventKind::Return, ret);
    p.k2s.reset();
    ++p.next_item;
    p.app = AppState::Ready;
  }

  void task_step(Proc& p, std::optional<std::uint32_t> channel) {
    if (config_.protocol == Protocol::ToChannels) {
      auto readable = p.reader.readable(channels_);
      std::uint32_t ch;
      if (channel) {
        if (std::find(readable.begin(), readable.end(), *channel) == readable.end())
          throw ScheduleError("schedule_script: p" + std::to_string(p.pid.index) + " has nothing to read on channel " +
                              std::to_string(*channel));
        ch = *channel;
      } else if (config_.schedule_policy == SchedulePolicy::SeededRandom) {
        ch = readable[scheduler_.rng().below(readable.size())];
      } else {
        ch = readable.front();
      }
      std::size_t pos = p.reader.position(ch);
      MessageId m = p.reader.read(channels_, ch);
      emit(p.pid, EventKind::ObjectAccess, ObjectAccess{"CHAN", ch, "read", pos, m.str()}.to_json());
      kbo_deliver(p, m);
      return;
    }

    auto delivery = p.kscd.task_step(mem_, kss_, emitter(p.pid));
    if (!delivery) return;
    json ds;
    ds["round"] = delivery->round;
    ds["set"] = encode(delivery->set);
    emit(p.pid, EventKind::DeliverSet, ds);
    for (const auto& m : unpack(delivery->set)) kbo_deliver(p, m);
  }

  void kbo_deliver(Proc& p, const MessageId& m) {
    json dm;
    dm["msg"] = m.str();
    dm["payload"] = payloads_.at(m);
    dm["position"] = p.delivered_seq.size();
    emit(p.pid, EventKind::DeliverMsg, dm);
    p.delivered_seq.push_back(m);
    if (pair_messages_.contains(m)) {
      auto pair = decode_pair(payloads_.at(m));
      p.decisions.on_deliver(pair->first, pair->second);
    }
  }

  ScenarioConfig config_;
  Scheduler scheduler_;
  Prng daemon_;
  Mem mem_;
  MessageK2S kss_;
  RepeatedK2S<Value> value_kss_;
  ChannelLogs channels_;
  std::vector<Proc> procs_;
  std::map<MessageId, Value> payloads_;
  std::set<MessageId> pair_messages_;
  Trace trace_;
  std::uint64_t tick_ = 0;
  bool finished_ = false;
  std::optional<Action> last_action_;
};

/// Executes a scenario to quiescence or budget exhaustion.
inline Trace run(const ScenarioConfig& config) { return Simulator(config).run(); }

}  // namespace kbo
