#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kbo/types.hpp"

namespace kbo {

/// Per-process kbo-delivery sequences plus the kscd set boundaries.
struct DeliveryOrder {
  std::uint32_t n = 0;
  std::map<ProcessId, std::vector<MessageId>> per_process;
  /// Index into per_process[p] where each delivered set starts.
  std::map<ProcessId, std::vector<std::size_t>> set_starts;
  std::set<ProcessId> faulty;
};

enum class OrderScope {
  NonFaultyOnly,        // intersect the orders of non-faulty processes
  PairsDeliveredByBoth  // every process constrains the pairs it delivered
};

class PosetError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Finite poset over message ids with an explicit strict order (transitively
/// closed, irreflexive, antisymmetric).
class Poset {
 public:
  Poset() = default;

  /// Builds from a strict relation; takes the transitive closure and rejects
  /// cycles.
  Poset(std::vector<MessageId> elements, std::vector<std::vector<char>> less)
      : elements_(std::move(elements)), less_(std::move(less)) {
    const std::size_t n = elements_.size();
    if (less_.size() != n) throw PosetError("relation size mismatch");
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t i = 0; i < n; ++i)
        if (less_[i][m])
          for (std::size_t j = 0; j < n; ++j)
            if (less_[m][j]) less_[i][j] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (less_[i][i])
        throw PosetError("order has a cycle through " + elements_[i].str());
    }
    for (std::size_t i = 0; i < n; ++i) index_[elements_[i]] = i;
  }

  std::size_t size() const { return elements_.size(); }
  const std::vector<MessageId>& elements() const { return elements_; }
  const MessageId& element(std::size_t i) const { return elements_[i]; }
  bool less(std::size_t i, std::size_t j) const { return less_[i][j] != 0; }
  bool comparable(std::size_t i, std::size_t j) const { return i == j || less(i, j) || less(j, i); }
  std::size_t index_of(const MessageId& m) const { return index_.at(m); }
  bool contains(const MessageId& m) const { return index_.contains(m); }

  bool less(const MessageId& a, const MessageId& b) const { return less(index_of(a), index_of(b)); }

  /// Messages delivered only by processes outside the scope.
  std::vector<MessageId> excluded;

 private:
  std::vector<MessageId> elements_;
  std::vector<std::vector<char>> less_;
  std::map<MessageId, std::size_t> index_;
};

/// m < m' iff at least one process in scope delivered both and every such
/// process delivered m first. Repeated deliveries count at their first position.
inline Poset build_order(const DeliveryOrder& order, OrderScope scope = OrderScope::NonFaultyOnly) {
  std::vector<std::map<MessageId, std::size_t>> positions;
  std::set<MessageId> in_scope, anywhere;
  for (const auto& [pid, seq] : order.per_process) {
    std::map<MessageId, std::size_t> pos;
    for (std::size_t i = 0; i < seq.size(); ++i) pos.emplace(seq[i], i);
    for (const auto& [m, _] : pos) anywhere.insert(m);
    if (scope == OrderScope::NonFaultyOnly && order.faulty.contains(pid)) continue;
    for (const auto& [m, _] : pos) in_scope.insert(m);
    positions.push_back(std::move(pos));
  }

  std::vector<MessageId> elems(in_scope.begin(), in_scope.end());
  const std::size_t n = elems.size();
  std::vector<std::vector<char>> less(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      bool constrained = false, a_first = true, b_first = true;
      for (const auto& pos : positions) {
        auto ia = pos.find(elems[a]);
        auto ib = pos.find(elems[b]);
        if (ia == pos.end() || ib == pos.end()) continue;
        constrained = true;
        if (ia->second < ib->second)
          b_first = false;
        else
          a_first = false;
      }
      if (!constrained) continue;
      if (a_first) less[a][b] = 1;
      if (b_first) less[b][a] = 1;
    }
  }
  Poset p(std::move(elems), std::move(less));
  for (const auto& m : anywhere)
    if (!in_scope.contains(m)) p.excluded.push_back(m);
  return p;
}

/// Maximum matching in the bipartite graph (left copy -> right copy) of the
/// strict order. Kuhn's augmenting paths; exact.
class ComparabilityMatching {
 public:
  explicit ComparabilityMatching(const Poset& p) : p_(p), match_left_(p.size(), kNone), match_right_(p.size(), kNone) {
    for (std::size_t u = 0; u < p.size(); ++u) {
      std::vector<char> seen(p.size(), 0);
      if (augment(u, seen)) ++size_;
    }
  }

  std::size_t size() const { return size_; }
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  /// Right vertex matched to left u (the chain successor of u), or kNone.
  std::size_t successor(std::size_t u) const { return match_left_[u]; }
  std::size_t predecessor(std::size_t v) const { return match_right_[v]; }

  /// Left vertices reachable from unmatched left vertices by alternating
  /// paths, and right vertices reached on the way (Konig's construction).
  std::pair<std::vector<char>, std::vector<char>> alternating_reach() const {
    const std::size_t n = p_.size();
    std::vector<char> left(n, 0), right(n, 0);
    std::vector<std::size_t> stack;
    for (std::size_t u = 0; u < n; ++u)
      if (match_left_[u] == kNone) {
        left[u] = 1;
        stack.push_back(u);
      }
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (!p_.less(u, v) || right[v]) continue;
        if (match_left_[u] == v) continue;
        right[v] = 1;
        std::size_t w = match_right_[v];
        if (w != kNone && !left[w]) {
          left[w] = 1;
          stack.push_back(w);
        }
      }
    }
    return {left, right};
  }

 private:
  bool augment(std::size_t u, std::vector<char>& seen) {
    for (std::size_t v = 0; v < p_.size(); ++v) {
      if (!p_.less(u, v) || seen[v]) continue;
      seen[v] = 1;
      if (match_right_[v] == kNone || augment(match_right_[v], seen)) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    return false;
  }

  const Poset& p_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::size_t size_ = 0;
};

/// Size of a maximum antichain: |elements| minus the maximum matching
/// (minimum chain cover, Dilworth).
inline std::size_t width(const Poset& p) { return p.size() - ComparabilityMatching(p).size(); }

/// A maximum antichain, read off a minimum vertex cover of the matching graph.
inline std::vector<MessageId> maximum_antichain(const Poset& p) {
  ComparabilityMatching mm(p);
  auto [left, right] = mm.alternating_reach();
  // Cover = (L not reached) + (R reached); the antichain is what the cover misses on both sides.
  std::vector<MessageId> out;
  for (std::size_t x = 0; x < p.size(); ++x)
    if (left[x] && !right[x]) out.push_back(p.element(x));
  return out;
}

/// Partition into chains from a maximum matching; chains are listed in order
/// of their least element and each chain is in increasing order.
inline std::vector<std::vector<MessageId>> minimum_chain_cover(const Poset& p) {
  ComparabilityMatching mm(p);
  std::vector<std::vector<MessageId>> chains;
  for (std::size_t u = 0; u < p.size(); ++u) {
    if (mm.predecessor(u) != ComparabilityMatching::kNone) continue;
    auto& chain = chains.emplace_back();
    for (std::size_t x = u; x != ComparabilityMatching::kNone; x = mm.successor(x)) chain.push_back(p.element(x));
  }
  return chains;
}

struct ChannelAssignment {
  std::vector<std::vector<MessageId>> channels;  // channels[c-1] in delivery order
  std::map<MessageId, std::uint32_t> channel_of;
};

/// Raised when the poset is wider than the number of channels; carries a
/// maximum antichain.
class BoundViolation : public std::runtime_error {
 public:
  BoundViolation(std::size_t k, std::vector<MessageId> antichain)
      : std::runtime_error("width " + std::to_string(antichain.size()) + " exceeds k=" + std::to_string(k)),
        antichain_(std::move(antichain)) {}
  const std::vector<MessageId>& antichain() const { return antichain_; }

 private:
  std::vector<MessageId> antichain_;
};

/// Assigns every message to one of at most k total-order channels such that
/// each channel is a chain of the order.
inline ChannelAssignment decompose_channels(const Poset& p, std::size_t k) {
  auto chains = minimum_chain_cover(p);
  if (chains.size() > k) throw BoundViolation(k, maximum_antichain(p));
  ChannelAssignment out;
  out.channels = std::move(chains);
  for (std::size_t c = 0; c < out.channels.size(); ++c)
    for (const auto& m : out.channels[c]) out.channel_of[m] = static_cast<std::uint32_t>(c + 1);
  return out;
}

/// True when the chains partition the poset and each is totally ordered.
inline bool is_chain_cover(const Poset& p, const std::vector<std::vector<MessageId>>& chains) {
  std::set<MessageId> seen;
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (!p.contains(chain[i]) || !seen.insert(chain[i]).second) return false;
      if (i > 0 && !p.less(chain[i - 1], chain[i])) return false;
    }
  }
  return seen.size() == p.size();
}

}  // namespace kbo
