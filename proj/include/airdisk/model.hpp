#pragma once

// Message catalogs, grouping of equivalent messages, and the geometric
// rounding of probabilities and costs.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "airdisk/error.hpp"

namespace airdisk {

using MessageIndex = std::int32_t;
inline constexpr MessageIndex kIdle = -1;

struct Message {
  std::string id;
  double p = 0.0;  // request probability per slot
  double c = 0.0;  // broadcast cost
};

/// An immutable message catalog served over `channels` parallel channels.
///
/// Probabilities are normalized to sum to one on construction; the raw sum is
/// kept in normalization(). Message order is the catalog order used by every
/// scheduler that needs a fixed order.
class Instance {
 public:
  Instance() = default;

  static Instance create(std::vector<Message> messages, int channels,
                         std::optional<double> cost_bound = std::nullopt) {
    validate(messages, channels);
    double total = 0.0;
    for (const auto& m : messages) total += m.p;
    for (auto& m : messages) m.p /= total;
    return Instance(std::move(messages), channels, cost_bound, total);
  }

  /// Builds an instance whose probabilities are already normalized, keeping
  /// them bit-for-bit.
  static Instance create_normalized(std::vector<Message> messages, int channels,
                                    std::optional<double> cost_bound = std::nullopt) {
    validate(messages, channels);
    return Instance(std::move(messages), channels, cost_bound, 1.0);
  }

  const std::vector<Message>& messages() const { return messages_; }
  const Message& operator[](MessageIndex i) const { return messages_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return messages_.size(); }
  int channels() const { return channels_; }
  double cost_bound() const { return cost_bound_; }
  double normalization() const { return normalization_; }
  bool has_explicit_cost_bound() const { return explicit_bound_; }

  std::optional<MessageIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Same catalog with different channel count.
  Instance with_channels(int channels) const {
    Instance copy = *this;
    if (channels < 1) fail(ErrorCode::input, "channel count W < 1");
    copy.channels_ = channels;
    return copy;
  }

 private:
  Instance(std::vector<Message> messages, int channels,
           std::optional<double> cost_bound, double normalization)
      : messages_(std::move(messages)),
        channels_(channels),
        normalization_(normalization),
        explicit_bound_(cost_bound.has_value()) {
    double cmax = 0.0;
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      cmax = std::max(cmax, messages_[i].c);
      index_.emplace(messages_[i].id, static_cast<MessageIndex>(i));
    }
    if (cost_bound) {
      if (!std::isfinite(*cost_bound) || *cost_bound < cmax) {
        fail(ErrorCode::input, "cost_bound is smaller than some message cost");
      }
      cost_bound_ = *cost_bound;
    } else {
      cost_bound_ = cmax;
    }
  }

  static void validate(const std::vector<Message>& messages, int channels) {
    if (channels < 1) fail(ErrorCode::input, "channel count W < 1");
    if (messages.empty()) fail(ErrorCode::input, "empty instance");
    std::unordered_map<std::string, int> seen;
    for (const auto& m : messages) {
      if (!std::isfinite(m.p) || m.p <= 0.0) {
        fail(ErrorCode::input, "non-positive probability for message '" + m.id + "'");
      }
      if (!std::isfinite(m.c) || m.c < 0.0) {
        fail(ErrorCode::input, "negative cost for message '" + m.id + "'");
      }
      if (!seen.emplace(m.id, 0).second) {
        fail(ErrorCode::input, "duplicate id '" + m.id + "'");
      }
    }
  }

  std::vector<Message> messages_;
  std::unordered_map<std::string, MessageIndex> index_;
  int channels_ = 1;
  double cost_bound_ = 0.0;
  double normalization_ = 1.0;
  bool explicit_bound_ = false;
};

// ---------------------------------------------------------------------------
// Instance file format

inline Instance instance_from_json(const nlohmann::json& doc) {
  using nlohmann::json;
  if (!doc.is_object()) fail(ErrorCode::input, "malformed instance: expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "channels" && key != "cost_bound" && key != "messages") {
      fail(ErrorCode::input, "malformed instance: unknown key '" + key + "'");
    }
  }
  if (!doc.contains("channels") || !doc["channels"].is_number_integer()) {
    fail(ErrorCode::input, "malformed instance: 'channels' must be an integer");
  }
  if (!doc.contains("messages") || !doc["messages"].is_array()) {
    fail(ErrorCode::input, "malformed instance: 'messages' must be an array");
  }
  const auto channels = doc["channels"].get<std::int64_t>();
  if (channels < 1) fail(ErrorCode::input, "channel count W < 1");
  if (channels > 1'000'000) fail(ErrorCode::input, "malformed instance: 'channels' too large");

  std::optional<double> bound;
  if (doc.contains("cost_bound")) {
    if (!doc["cost_bound"].is_number()) {
      fail(ErrorCode::input, "malformed instance: 'cost_bound' must be a number");
    }
    bound = doc["cost_bound"].get<double>();
  }

  std::vector<Message> messages;
  for (const auto& entry : doc["messages"]) {
    if (!entry.is_object()) fail(ErrorCode::input, "malformed instance: message must be an object");
    for (const auto& [key, _] : entry.items()) {
      if (key != "id" && key != "p" && key != "c") {
        fail(ErrorCode::input, "malformed instance: unknown message key '" + key + "'");
      }
    }
    if (!entry.contains("id") || !entry["id"].is_string() || !entry.contains("p") ||
        !entry["p"].is_number() || !entry.contains("c") || !entry["c"].is_number()) {
      fail(ErrorCode::input, "malformed instance: message needs string 'id' and numeric 'p', 'c'");
    }
    messages.push_back({entry["id"].get<std::string>(), entry["p"].get<double>(),
                        entry["c"].get<double>()});
  }
  return Instance::create(std::move(messages), static_cast<int>(channels), bound);
}

inline Instance load_instance(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::input, std::string("malformed instance text: ") + e.what());
  }
  return instance_from_json(doc);
}

inline Instance load_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_instance(in);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["channels"] = inst.channels();
  if (inst.has_explicit_cost_bound()) doc["cost_bound"] = inst.cost_bound();
  auto& arr = doc["messages"] = nlohmann::json::array();
  for (const auto& m : inst.messages()) {
    arr.push_back({{"id", m.id}, {"p", m.p}, {"c", m.c}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Groups

/// Messages sharing one (probability, cost) pair. Members are scheduled
/// round-robin in the order listed.
struct Group {
  double p = 0.0;
  double c = 0.0;
  std::vector<MessageIndex> members;
  int j = -1;  // probability exponent, set when built from a rounded instance
  int k = -1;  // cost index, set when built from a rounded instance

  std::size_t size() const { return members.size(); }
  double weight() const { return static_cast<double>(size()) * std::sqrt(p); }
};

struct Grouping {
  std::vector<Group> groups;

  std::size_t size() const { return groups.size(); }
  bool empty() const { return groups.empty(); }
  const Group& operator[](std::size_t j) const { return groups[j]; }

  std::size_t message_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
  }

  double max_cost() const {
    double c = 0.0;
    for (const auto& g : groups) c = std::max(c, g.c);
    return c;
  }

  /// All members, sorted by catalog index.
  std::vector<MessageIndex> catalog_members() const {
    std::vector<MessageIndex> out;
    for (const auto& g : groups) out.insert(out.end(), g.members.begin(), g.members.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  Grouping subset(std::span<const std::size_t> which) const {
    Grouping out;
    for (auto j : which) out.groups.push_back(groups[j]);
    return out;
  }
};

namespace detail {

inline Grouping group_by_key(const Instance& inst,
                             const std::vector<std::pair<std::uint64_t, std::uint64_t>>& keys,
                             const std::vector<int>* j_of, const std::vector<int>* k_of) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> slot;
  Grouping out;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    auto [it, inserted] = slot.emplace(keys[i], out.groups.size());
    if (inserted) {
      Group g;
      g.p = inst.messages()[i].p;
      g.c = inst.messages()[i].c;
      if (j_of) g.j = (*j_of)[i];
      if (k_of) g.k = (*k_of)[i];
      out.groups.push_back(std::move(g));
    }
    out.groups[it->second].members.push_back(static_cast<MessageIndex>(i));
  }
  std::stable_sort(out.groups.begin(), out.groups.end(), [](const Group& a, const Group& b) {
    if (a.p != b.p) return a.p > b.p;
    return a.c < b.c;
  });
  return out;
}

}  // namespace detail

/// Groups messages with bit-identical (p, c). Groups are ordered by
/// decreasing p then increasing c; members keep catalog order.
inline Grouping group_messages(const Instance& inst) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
  keys.reserve(inst.size());
  for (const auto& m : inst.messages()) {
    keys.emplace_back(std::bit_cast<std::uint64_t>(m.p), std::bit_cast<std::uint64_t>(m.c));
  }
  return detail::group_by_key(inst, keys, nullptr, nullptr);
}

/// Every message in its own group, in catalog order.
inline Grouping singleton_grouping(const Instance& inst) {
  Grouping out;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& m = inst.messages()[i];
    out.groups.push_back({m.p, m.c, {static_cast<MessageIndex>(i)}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounding

/// Instance whose probabilities are r/(1+eps)^j and costs k*eps/W.
/// Message order and ids match the source instance, so indices map back
/// one-to-one.
struct RoundedInstance {
  Instance instance;
  double r = 1.0;
  double epsilon = 0.0;
  std::vector<int> j_of;
  std::vector<int> k_of;
  std::vector<double> grid_p;  // (1+eps)^-j before renormalization
};

/// Rounds each probability strictly down onto the grid (1+eps)^-j, j >= 1,
/// then rescales all of them by r = 1/sum so that they sum to one; rounds each
/// cost up to a multiple of eps/W.
inline RoundedInstance round_instance(const Instance& inst, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::usage, "rounding epsilon must lie in (0,1)");
  const double base = std::log1p(eps);
  const double cost_step = eps / inst.channels();
  RoundedInstance out;
  out.epsilon = eps;
  out.j_of.resize(inst.size());
  out.k_of.resize(inst.size());
  out.grid_p.resize(inst.size());

  long double grid_total = 0.0L;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& m = inst.messages()[i];
    const double level = -std::log(m.p) / base;
    int j = static_cast<int>(std::floor(level)) + 1;
    double q = std::pow(1.0 + eps, -j);
    // Guard the floor against log rounding on either side of a grid point.
    while (q >= m.p && j < std::numeric_limits<int>::max()) q = std::pow(1.0 + eps, -(++j));
    while (j > 1 && std::pow(1.0 + eps, -(j - 1)) < m.p) q = std::pow(1.0 + eps, -(--j));
    out.j_of[i] = j;
    out.grid_p[i] = q;
    grid_total += q;

    const double units = m.c / cost_step;
    out.k_of[i] = std::max(0, static_cast<int>(std::ceil(units - 1e-9)));
  }
  out.r = static_cast<double>(1.0L / grid_total);

  std::vector<Message> rounded;
  rounded.reserve(inst.size());
  double cmax = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double c = out.k_of[i] * cost_step;
    cmax = std::max(cmax, c);
    rounded.push_back({inst.messages()[i].id, out.r * out.grid_p[i], c});
  }
  std::optional<double> bound;
  if (inst.has_explicit_cost_bound()) {
    bound = std::max(cmax, std::ceil(inst.cost_bound() / cost_step - 1e-9) * cost_step);
  }
  out.instance = Instance::create_normalized(std::move(rounded), inst.channels(), bound);
  return out;
}

/// Groups a rounded instance by its integer (j, k) indices.
inline Grouping group_messages(const RoundedInstance& rounded) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
  keys.reserve(rounded.instance.size());
  for (std::size_t i = 0; i < rounded.instance.size(); ++i) {
    keys.emplace_back(static_cast<std::uint64_t>(rounded.j_of[i]),
                      static_cast<std::uint64_t>(rounded.k_of[i]));
  }
  return detail::group_by_key(rounded.instance, keys, &rounded.j_of, &rounded.k_of);
}

}  // namespace airdisk
