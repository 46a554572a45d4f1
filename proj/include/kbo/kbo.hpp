#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kbo/types.hpp"

namespace kbo {

/// k-BO-broadcast over k-SCD-broadcast: kbo_broadcast(m) is kscd_broadcast(m),
/// and a kscd-delivered set is unpacked into single deliveries. The unpack
/// order inside a set is the canonical (sender, index) order.
inline std::vector<MessageId> unpack(const MessageSet& ms) { return {ms.begin(), ms.end()}; }

/// Non-deterministic k-TO-channel: k append-only total-order logs. A
/// broadcast goes to exactly one channel (picked by a daemon the sender does
/// not observe) and every process delivers each channel's log in order,
/// interleaving channels as the scheduler decides.
class ChannelLogs {
 public:
  explicit ChannelLogs(std::uint32_t k) : logs_(k) {}

  void append(std::uint32_t channel, const MessageId& m) { log(channel).push_back(m); }

  const MessageId& at(std::uint32_t channel, std::size_t pos) const {
    const auto& l = logs_.at(channel - 1);
    if (pos >= l.size()) throw ProtocolViolation("CHAN[" + std::to_string(channel) + "]: read past end");
    return l[pos];
  }

  std::size_t length(std::uint32_t channel) const { return logs_.at(channel - 1).size(); }
  std::uint32_t count() const { return static_cast<std::uint32_t>(logs_.size()); }

 private:
  std::vector<MessageId>& log(std::uint32_t channel) {
    if (channel < 1 || channel > logs_.size()) throw ProtocolViolation("CHAN: channel out of range");
    return logs_[channel - 1];
  }

  std::vector<std::vector<MessageId>> logs_;
};

/// Per-process read cursors over the channel logs.
class ChannelReader {
 public:
  explicit ChannelReader(std::uint32_t k) : next_(k, 0) {}

  std::vector<std::uint32_t> readable(const ChannelLogs& logs) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t c = 1; c <= logs.count(); ++c)
      if (next_[c - 1] < logs.length(c)) out.push_back(c);
    return out;
  }

  std::size_t position(std::uint32_t channel) const { return next_.at(channel - 1); }

  MessageId read(const ChannelLogs& logs, std::uint32_t channel) {
    const auto& m = logs.at(channel, next_.at(channel - 1));
    ++next_[channel - 1];
    return m;
  }

 private:
  std::vector<std::size_t> next_;
};

}  // namespace kbo
