#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kbo/types.hpp"

namespace kbo {

using json = nlohmann::ordered_json;

// Canonical JSON encodings used in traces. Sets encode as sorted arrays, so
// equal sets always print identically.

inline json encode(const std::string& v) { return v; }
inline json encode(const MessageId& m) { return m.str(); }

template <class T>
json encode(const std::set<T>& s) {
  json arr = json::array();
  for (const auto& x : s) arr.push_back(encode(x));
  return arr;
}

template <class T>
json encode(const std::optional<T>& v) {
  return v ? encode(*v) : json(nullptr);
}

template <class T>
json encode(const std::vector<std::optional<T>>& cells) {
  json arr = json::array();
  for (const auto& c : cells) arr.push_back(encode(c));
  return arr;
}

/// One shared-object operation, as recorded in an object-access event.
struct ObjectAccess {
  std::string object;                   // MEM, KSA, SNAP1, SNAP2, CHAN
  std::optional<std::uint64_t> instance;  // round / instance / channel number
  std::string op;                       // write, snapshot, propose, append, read
  json arg;
  json result;

  json to_json() const {
    json j;
    j["object"] = object;
    if (instance) j["instance"] = *instance;
    j["op"] = op;
    j["arg"] = arg;
    j["result"] = result;
    return j;
  }
};

}  // namespace kbo
