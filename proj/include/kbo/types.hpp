#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kbo {

/// 1-based process identifier p_1..p_n.
struct ProcessId {
  std::uint32_t index = 0;

  constexpr ProcessId() = default;
  constexpr explicit ProcessId(std::uint32_t i) : index(i) {}

  constexpr auto operator<=>(const ProcessId&) const = default;
  constexpr std::size_t slot() const { return index - 1; }
};

/// Opaque value; ordered bytewise.
using Value = std::string;

/// Identity of a broadcast message: (sender, per-sender index). Globally unique.
struct MessageId {
  std::uint32_t sender = 0;
  std::uint32_t index = 0;

  constexpr auto operator<=>(const MessageId&) const = default;

  std::string str() const { return std::to_string(sender) + "." + std::to_string(index); }

  static MessageId parse(std::string_view s) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == s.size())
      throw std::invalid_argument("bad message id '" + std::string(s) + "'");
    auto num = [&](std::string_view part) {
      std::uint32_t v = 0;
      for (char c : part) {
        if (c < '0' || c > '9') throw std::invalid_argument("bad message id '" + std::string(s) + "'");
        v = v * 10 + static_cast<std::uint32_t>(c - '0');
      }
      return v;
    };
    return {num(s.substr(0, dot)), num(s.substr(dot + 1))};
  }
};

struct Message {
  MessageId id;
  Value payload;
};

using MessageSet = std::set<MessageId>;

/// A shared object was used against its sequential specification
/// (one-shot double write, non-increasing instance number, ...).
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
bool is_subset(const std::set<T>& a, const std::set<T>& b) {
  auto it = b.begin();
  for (const auto& x : a) {
    while (it != b.end() && *it < x) ++it;
    if (it == b.end() || x < *it) return false;
    ++it;
  }
  return true;
}

template <class T>
bool comparable(const std::set<T>& a, const std::set<T>& b) {
  return a.size() <= b.size() ? is_subset(a, b) : is_subset(b, a);
}

}  // namespace kbo
