#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "kbo/types.hpp"

namespace kbo {

/// Repeated k-set agreement over k-BO-broadcast, local side.
///
/// propose(nb, v) broadcasts <nb, v> and waits for a pair <nb, -> in the
/// table; the first pair delivered for a sequence number wins and later ones
/// for the same number are dropped forever. A returned pair leaves `pending`
/// but its number stays in `seen`.
class DecisionsTable {
 public:
  /// Returns true when the pair was inserted.
  bool on_deliver(std::uint64_t sn, const Value& x) {
    if (!seen_.insert(sn).second) return false;
    pending_.emplace(sn, x);
    return true;
  }

  bool ready(std::uint64_t nb) const { return pending_.contains(nb); }

  /// Removes and returns the decision for nb.
  Value take(std::uint64_t nb) {
    auto it = pending_.find(nb);
    if (it == pending_.end()) throw ProtocolViolation("decisions: no pair for instance " + std::to_string(nb));
    Value v = std::move(it->second);
    pending_.erase(it);
    return v;
  }

  const std::map<std::uint64_t, Value>& pending() const { return pending_; }
  const std::set<std::uint64_t>& seen() const { return seen_; }

 private:
  std::map<std::uint64_t, Value> pending_;
  std::set<std::uint64_t> seen_;
};

/// Tracks one process's proposals; instance numbers must strictly increase.
class ProposalSequence {
 public:
  void begin(std::uint64_t nb) {
    if (last_ && nb <= *last_)
      throw ProtocolViolation("propose: instance " + std::to_string(nb) + " after " + std::to_string(*last_));
    last_ = nb;
  }

 private:
  std::optional<std::uint64_t> last_;
};

/// Wire payload of the <nb, v> message: "<nb>:<v>".
inline std::string encode_pair(std::uint64_t nb, const Value& v) { return std::to_string(nb) + ":" + v; }

inline std::optional<std::pair<std::uint64_t, Value>> decode_pair(const std::string& payload) {
  auto colon = payload.find(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  std::uint64_t nb = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = payload[i];
    if (c < '0' || c > '9') return std::nullopt;
    nb = nb * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return std::make_pair(nb, payload.substr(colon + 1));
}

}  // namespace kbo
