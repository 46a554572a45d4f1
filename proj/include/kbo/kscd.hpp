#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "kbo/k2s.hpp"
#include "kbo/shared_objects.hpp"
#include "kbo/trace.hpp"

namespace kbo {

/// MEM[1..n]: MEM[i] holds every message p_i has kscd-broadcast.
using Mem = SnapshotArray<MessageSet>;
using MessageK2S = RepeatedK2S<MessageId>;

struct SetDelivery {
  std::uint64_t round = 0;
  MessageSet set;
};

inline MessageSet union_of(const Mem::Cells& cells) {
  MessageSet out;
  for (const auto& c : cells)
    if (c) out.insert(c->begin(), c->end());
  return out;
}

inline void erase_all(MessageSet& from, const MessageSet& what) {
  for (const auto& m : what) from.erase(m);
}

/// k-SCD-broadcast from a multi-shot snapshot MEM and a repeated K2S object,
/// as the automaton of one process. The broadcast operation and the
/// background task are driven separately by the scheduler; each method that
/// touches a shared object performs exactly one operation on it.
class KscdProcess {
 public:
  enum class BroadcastPhase { Idle, NeedSnapshot, Waiting };
  enum class TaskPhase { Select, Propose, InK2S };

  explicit KscdProcess(ProcessId pid) : pid_(pid) {}

  // -- kscd_broadcast(m) --------------------------------------------------

  /// MEM.write(mem1[i] + {m}).
  void begin_broadcast(const MessageId& m, Mem& mem, const Emit& emit) {
    if (bphase_ != BroadcastPhase::Idle)
      throw ProtocolViolation("kscd_broadcast: p" + std::to_string(pid_.index) + " has a broadcast in progress");
    if (own_cell_.contains(m) || delivered_.contains(m))
      throw ProtocolViolation("kscd_broadcast: duplicate message " + m.str());
    MessageSet cell = own_cell_;
    cell.insert(m);
    mem.write(pid_, cell);
    emit(EventKind::ObjectAccess, ObjectAccess{"MEM", {}, "write", encode(cell), nullptr}.to_json());
    bphase_ = BroadcastPhase::NeedSnapshot;
  }

  /// mem1 <- MEM.snapshot(); todeliver1 <- (U mem1[j]) \ delivered.
  void broadcast_snapshot(Mem& mem, const Emit& emit) {
    if (bphase_ != BroadcastPhase::NeedSnapshot) throw ProtocolViolation("kscd_broadcast: snapshot out of order");
    auto mem1 = mem.snapshot(pid_);
    emit(EventKind::ObjectAccess, ObjectAccess{"MEM", {}, "snapshot", nullptr, encode(mem1)}.to_json());
    own_cell_ = mem1[pid_.slot()].value_or(MessageSet{});
    todeliver1_ = union_of(mem1);
    erase_all(todeliver1_, delivered_);
    bphase_ = BroadcastPhase::Waiting;
  }

  /// wait(todeliver1 subset of delivered)
  bool broadcast_can_return() const { return bphase_ == BroadcastPhase::Waiting && is_subset(todeliver1_, delivered_); }

  void finish_broadcast() {
    if (!broadcast_can_return()) throw ProtocolViolation("kscd_broadcast: returned before its wait predicate held");
    bphase_ = BroadcastPhase::Idle;
    todeliver1_.clear();
  }

  BroadcastPhase broadcast_phase() const { return bphase_; }

  // -- background task T ----------------------------------------------------

  /// False when the task is idle: no round in progress, seq empty and
  /// nothing undelivered in MEM. Reads MEM without taking a step.
  bool task_has_work(const Mem& mem) const {
    if (tphase_ != TaskPhase::Select || !seq_.empty()) return true;
    for (const auto& c : mem.peek())
      if (c && !is_subset(*c, delivered_)) return true;
    return false;
  }

  /// One step of task T; returns the set kscd-delivered by this step, if any.
  std::optional<SetDelivery> task_step(Mem& mem, MessageK2S& kss, const Emit& emit) {
    if (tphase_ == TaskPhase::Select) {
      if (seq_.empty()) {
        // mem2 <- MEM.snapshot(); todeliver2 <- (U mem2[j]) \ delivered
        auto mem2 = mem.snapshot(pid_);
        emit(EventKind::ObjectAccess, ObjectAccess{"MEM", {}, "snapshot", nullptr, encode(mem2)}.to_json());
        MessageSet todeliver2 = union_of(mem2);
        erase_all(todeliver2, delivered_);
        if (todeliver2.empty()) return std::nullopt;
        prop_ = *todeliver2.begin();  // smallest (sender, index)
        tphase_ = TaskPhase::Propose;
        return std::nullopt;
      }
      prop_ = *seq_.front().begin();
      tphase_ = TaskPhase::Propose;
    }

    if (tphase_ == TaskPhase::Propose) {
      round_ = delivered_.size();
      json inv;
      inv["op"] = "k2s_propose";
      inv["round"] = round_;
      inv["value"] = encode(prop_);
      emit(EventKind::Invoke, inv);
      k2s_.emplace(round_, pid_, prop_);
      tphase_ = TaskPhase::InK2S;
    }

    emit(EventKind::ObjectAccess, k2s_->step(kss).to_json());
    if (!k2s_->done()) return std::nullopt;

    const auto& sets = k2s_->result();
    json ret;
    ret["op"] = "k2s_propose";
    ret["round"] = round_;
    ret["sets"] = encode(sets);
    emit(EventKind::Return, ret);

    SetDelivery d{round_, absorb(sets)};
    k2s_.reset();
    tphase_ = TaskPhase::Select;
    return d;
  }

  const MessageSet& delivered() const { return delivered_; }
  const std::deque<MessageSet>& seq() const { return seq_; }
  TaskPhase task_phase() const { return tphase_; }
  std::uint64_t round() const { return round_; }
  ProcessId pid() const { return pid_; }

  /// Ordering of the K2S output into new_seq, merge with seq, and delivery of
  /// the head. Public for direct testing of the round logic.
  MessageSet absorb(const K2SOutput<MessageId>& output) {
    std::vector<MessageSet> sets(output.begin(), output.end());
    std::vector<MessageSet> new_seq;
    for (;;) {
      const MessageSet* min_set = nullptr;
      bool tie = false;
      for (const auto& s : sets) {
        if (s.empty()) continue;
        if (!min_set || s.size() < min_set->size()) {
          min_set = &s;
          tie = false;
        } else if (s.size() == min_set->size() && s != *min_set) {
          tie = true;
        }
      }
      if (!min_set) break;
      if (tie) throw ProtocolViolation("K2S output is not a chain of views");
      MessageSet chosen = *min_set;
      new_seq.push_back(chosen);
      for (auto& s : sets) erase_all(s, chosen);
    }
    if (new_seq.empty()) throw ProtocolViolation("K2S returned no non-empty view");

    MessageSet aux;
    for (const auto& s : new_seq) aux.insert(s.begin(), s.end());
    std::deque<MessageSet> purged;
    for (auto& s : seq_) {
      erase_all(s, aux);
      if (!s.empty()) purged.push_back(std::move(s));
    }
    seq_.assign(new_seq.begin(), new_seq.end());
    seq_.insert(seq_.end(), purged.begin(), purged.end());

    MessageSet first = std::move(seq_.front());
    seq_.pop_front();
    delivered_.insert(first.begin(), first.end());
    return first;
  }

 private:
  ProcessId pid_;

  BroadcastPhase bphase_ = BroadcastPhase::Idle;
  MessageSet own_cell_;  // mem1_i[i]
  MessageSet todeliver1_;

  TaskPhase tphase_ = TaskPhase::Select;
  MessageSet delivered_;
  std::deque<MessageSet> seq_;
  MessageId prop_;
  std::uint64_t round_ = 0;
  std::optional<K2SInvocation<MessageId>> k2s_;
};

}  // namespace kbo
