#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kbo/config.hpp"
#include "kbo/prng.hpp"
#include "kbo/types.hpp"

namespace kbo {

/// Array REG[1..n] of single-writer/multi-reader registers with atomic
/// write and atomic snapshot. Each call is one linearizable step; the
/// simulator gives every call its own scheduler step.
///
/// One-shot mode: each process writes at most once and then snapshots at
/// most once, in that order. Cells only move from empty to a value there, so
/// any two snapshots are ordered by inclusion (Containment).
template <class T>
class SnapshotArray {
 public:
  enum class Mode { MultiShot, OneShot };
  using Cells = std::vector<std::optional<T>>;

  SnapshotArray(std::uint32_t n, Mode mode, std::string name = "SNAP")
      : cells_(n), wrote_(n, false), snapped_(n, false), mode_(mode), name_(std::move(name)) {}

  void write(ProcessId p, T v) {
    check_pid(p);
    if (mode_ == Mode::OneShot && wrote_[p.slot()])
      throw ProtocolViolation(name_ + ": one-shot write repeated by p" + std::to_string(p.index));
    cells_[p.slot()] = std::move(v);
    wrote_[p.slot()] = true;
  }

  Cells snapshot(ProcessId p) {
    check_pid(p);
    if (mode_ == Mode::OneShot) {
      if (!wrote_[p.slot()])
        throw ProtocolViolation(name_ + ": one-shot snapshot before write by p" + std::to_string(p.index));
      if (snapped_[p.slot()])
        throw ProtocolViolation(name_ + ": one-shot snapshot repeated by p" + std::to_string(p.index));
    }
    snapped_[p.slot()] = true;
    return cells_;
  }

  /// Current cell state without taking a step (scheduler-side inspection only).
  const Cells& peek() const { return cells_; }
  Mode mode() const { return mode_; }
  const std::string& name() const { return name_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(cells_.size()); }

 private:
  void check_pid(ProcessId p) const {
    if (p.index < 1 || p.index > cells_.size())
      throw ProtocolViolation(name_ + ": process id out of range");
  }

  Cells cells_;
  std::vector<bool> wrote_;
  std::vector<bool> snapped_;
  Mode mode_;
  std::string name_;
};

/// {cells[j] | cells[j] != bottom}
template <class T>
std::set<T> values_of(const std::vector<std::optional<T>>& cells) {
  std::set<T> out;
  for (const auto& c : cells)
    if (c) out.insert(*c);
  return out;
}

template <class V>
struct KsaInstance {
  std::uint64_t instance_no = 0;
  std::vector<std::pair<ProcessId, V>> proposals;  // arrival order
  std::map<ProcessId, V> decisions;

  std::set<V> decided_values() const {
    std::set<V> out;
    for (const auto& [_, v] : decisions) out.insert(v);
    return out;
  }
};

/// Repeated k-set agreement, modeled as an oracle. Instances are created on
/// the first propose naming them. Every policy keeps each decision inside the
/// instance's proposals; all but `Permissive` keep at most k distinct decisions.
///
///  - First1: everyone decides the first proposal.
///  - FirstKAdversarial: a seeded choice among the first min(k, distinct)
///    distinct proposals seen at the moment of the call.
///  - Echo: every process decides its own proposal (only sound for k = n).
///  - Permissive: like FirstKAdversarial with k+1; breaks Agreement on purpose.
template <class V>
class RepeatedKsa {
 public:
  RepeatedKsa(std::uint32_t n, std::uint32_t k, OraclePolicy policy, Prng rng)
      : n_(n), k_(k), policy_(policy), rng_(std::move(rng)), last_instance_(n) {}

  V propose(std::uint64_t instance_no, ProcessId p, V v) {
    if (p.index < 1 || p.index > n_) throw ProtocolViolation("KSA: process id out of range");
    auto& last = last_instance_[p.slot()];
    if (last && instance_no <= *last)
      throw ProtocolViolation("KSA: p" + std::to_string(p.index) + " used instance " + std::to_string(instance_no) +
                              " after " + std::to_string(*last));
    last = instance_no;

    auto& inst = instances_[instance_no];
    inst.instance_no = instance_no;
    inst.proposals.emplace_back(p, v);

    V decided = choose(inst, v);
    inst.decisions.emplace(p, decided);
    return decided;
  }

  const std::map<std::uint64_t, KsaInstance<V>>& instances() const { return instances_; }
  std::uint32_t k() const { return k_; }

 private:
  V choose(const KsaInstance<V>& inst, const V& own) {
    switch (policy_) {
      case OraclePolicy::First1:
        return inst.proposals.front().second;
      case OraclePolicy::Echo:
        return own;
      case OraclePolicy::FirstKAdversarial:
        return pick(inst, k_);
      case OraclePolicy::Permissive:
        return pick(inst, k_ + 1);
    }
    return own;
  }

  V pick(const KsaInstance<V>& inst, std::uint32_t width) {
    std::vector<V> distinct;
    for (const auto& [_, v] : inst.proposals) {
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
      if (distinct.size() == width) break;
    }
    return distinct[rng_.below(distinct.size())];
  }

  std::uint32_t n_;
  std::uint32_t k_;
  OraclePolicy policy_;
  Prng rng_;
  std::vector<std::optional<std::uint64_t>> last_instance_;
  std::map<std::uint64_t, KsaInstance<V>> instances_;
};

}  // namespace kbo
