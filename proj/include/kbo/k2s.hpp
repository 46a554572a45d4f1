#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kbo/encode.hpp"
#include "kbo/shared_objects.hpp"

namespace kbo {

template <class V>
using View = std::set<V>;

/// sets_i: a family of views, duplicates collapsed.
template <class V>
using K2SOutput = std::set<View<V>>;

/// One K2S object: a k-SA instance plus two one-shot snapshot objects.
template <class V>
struct K2SInstance {
  K2SInstance(std::uint64_t round, std::uint32_t n)
      : round(round),
        snap1(n, SnapshotArray<V>::Mode::OneShot, "SNAP1[" + std::to_string(round) + "]"),
        snap2(n, SnapshotArray<View<V>>::Mode::OneShot, "SNAP2[" + std::to_string(round) + "]") {}

  std::uint64_t round;
  SnapshotArray<V> snap1;
  SnapshotArray<View<V>> snap2;
  std::set<ProcessId> invoked;
};

/// Repeated K2S object KSS: instance r pairs KSET.propose(r, -) with its own
/// SNAP1/SNAP2, created on first use.
template <class V>
class RepeatedK2S {
 public:
  RepeatedK2S(std::uint32_t n, std::uint32_t k, OraclePolicy policy, Prng rng)
      : n_(n), k_(k), ksa_(n, k, policy, std::move(rng)) {}

  K2SInstance<V>& instance(std::uint64_t round) {
    auto it = instances_.find(round);
    if (it == instances_.end()) it = instances_.emplace(round, K2SInstance<V>(round, n_)).first;
    return it->second;
  }

  RepeatedKsa<V>& ksa() { return ksa_; }
  const RepeatedKsa<V>& ksa() const { return ksa_; }
  const std::map<std::uint64_t, K2SInstance<V>>& instances() const { return instances_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t k() const { return k_; }

 private:
  std::uint32_t n_;
  std::uint32_t k_;
  RepeatedKsa<V> ksa_;
  std::map<std::uint64_t, K2SInstance<V>> instances_;
};

/// A k2s_propose(r, v) in flight. Each call to step() performs exactly one
/// shared-object operation of the three-phase algorithm:
///
///   val  <- KSET.propose(r, v)
///   SNAP1.write(val);  snap1 <- SNAP1.snapshot();  view <- non-empty cells of snap1
///   SNAP2.write(view); snap2 <- SNAP2.snapshot();  sets <- non-empty cells of snap2
///
/// so other processes may interleave between any two of them.
template <class V>
class K2SInvocation {
 public:
  enum class Phase { Propose, Snap1Write, Snap1Read, Snap2Write, Snap2Read, Done };

  K2SInvocation(std::uint64_t round, ProcessId pid, V value) : round_(round), pid_(pid), value_(std::move(value)) {}

  ObjectAccess step(RepeatedK2S<V>& kss) {
    auto& inst = kss.instance(round_);
    ObjectAccess acc;
    acc.instance = round_;
    switch (phase_) {
      case Phase::Propose: {
        if (!inst.invoked.insert(pid_).second)
          throw ProtocolViolation("K2S[" + std::to_string(round_) + "]: p" + std::to_string(pid_.index) +
                                  " invoked k2s_propose twice");
        val_ = kss.ksa().propose(round_, pid_, value_);
        acc.object = "KSA";
        acc.op = "propose";
        acc.arg = encode(value_);
        acc.result = encode(*val_);
        phase_ = Phase::Snap1Write;
        break;
      }
      case Phase::Snap1Write:
        inst.snap1.write(pid_, *val_);
        acc.object = "SNAP1";
        acc.op = "write";
        acc.arg = encode(*val_);
        phase_ = Phase::Snap1Read;
        break;
      case Phase::Snap1Read: {
        auto cells = inst.snap1.snapshot(pid_);
        view_ = values_of(cells);
        acc.object = "SNAP1";
        acc.op = "snapshot";
        acc.result = encode(cells);
        phase_ = Phase::Snap2Write;
        break;
      }
      case Phase::Snap2Write:
        inst.snap2.write(pid_, view_);
        acc.object = "SNAP2";
        acc.op = "write";
        acc.arg = encode(view_);
        phase_ = Phase::Snap2Read;
        break;
      case Phase::Snap2Read: {
        auto cells = inst.snap2.snapshot(pid_);
        sets_ = values_of(cells);
        acc.object = "SNAP2";
        acc.op = "snapshot";
        acc.result = encode(cells);
        phase_ = Phase::Done;
        break;
      }
      case Phase::Done:
        throw ProtocolViolation("K2S: step() after completion");
    }
    return acc;
  }

  bool done() const { return phase_ == Phase::Done; }
  Phase phase() const { return phase_; }
  std::uint64_t round() const { return round_; }
  const V& value() const { return value_; }
  const K2SOutput<V>& result() const {
    assert(done());
    return sets_;
  }

 private:
  std::uint64_t round_;
  ProcessId pid_;
  V value_;
  Phase phase_ = Phase::Propose;
  std::optional<V> val_;
  View<V> view_;
  K2SOutput<V> sets_;
};

/// Runs all phases of k2s_propose back to back (no interleaving).
template <class V>
K2SOutput<V> k2s_propose(RepeatedK2S<V>& kss, std::uint64_t round, ProcessId pid, V v) {
  K2SInvocation<V> inv(round, pid, std::move(v));
  while (!inv.done()) inv.step(kss);
  return inv.result();
}

}  // namespace kbo
