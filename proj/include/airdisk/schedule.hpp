#pragma once

// Slot grids over W channels and their JSON file format.

#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "airdisk/error.hpp"
#include "airdisk/model.hpp"

namespace airdisk {

/// A length x channels grid of message indices (kIdle for an empty slot).
/// Used both for finite prefixes and for one period of a periodic schedule.
class Schedule {
 public:
  Schedule() = default;
  Schedule(std::size_t length, int channels)
      : length_(length), channels_(channels),
        grid_(length * static_cast<std::size_t>(channels), kIdle) {
    if (channels < 1) fail(ErrorCode::usage, "schedule needs at least one channel");
  }

  /// One-channel schedule from a slot sequence.
  static Schedule from_slots(const std::vector<MessageIndex>& slots) {
    Schedule s(slots.size(), 1);
    s.grid_ = slots;
    return s;
  }

  std::size_t length() const { return length_; }
  std::size_t period() const { return length_; }
  int channels() const { return channels_; }
  bool empty() const { return length_ == 0; }

  MessageIndex at(std::size_t t, int w) const { return grid_[t * channels_ + w]; }
  MessageIndex& at(std::size_t t, int w) { return grid_[t * channels_ + w]; }

  const std::vector<MessageIndex>& cells() const { return grid_; }

  /// Channel-0 column as a slot sequence (convenient for one-channel schedules).
  std::vector<MessageIndex> slots(int w = 0) const {
    std::vector<MessageIndex> out(length_);
    for (std::size_t t = 0; t < length_; ++t) out[t] = at(t, w);
    return out;
  }

  void push_column() {
    ++length_;
    grid_.resize(length_ * channels_, kIdle);
  }

  std::size_t busy_cells() const {
    std::size_t n = 0;
    for (auto v : grid_) n += v != kIdle;
    return n;
  }

  double density() const {
    return grid_.empty() ? 0.0 : static_cast<double>(busy_cells()) / grid_.size();
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::size_t length_ = 0;
  int channels_ = 1;
  std::vector<MessageIndex> grid_;
};

using PeriodicSchedule = Schedule;

inline nlohmann::json schedule_to_json(const Schedule& s, const Instance& inst) {
  nlohmann::json doc;
  doc["period"] = s.length();
  doc["channels"] = s.channels();
  auto& rows = doc["slots"] = nlohmann::json::array();
  for (std::size_t t = 0; t < s.length(); ++t) {
    auto row = nlohmann::json::array();
    for (int w = 0; w < s.channels(); ++w) {
      const auto v = s.at(t, w);
      if (v == kIdle) {
        row.push_back(nullptr);
      } else {
        row.push_back(inst[v].id);
      }
    }
    rows.push_back(std::move(row));
  }
  return doc;
}

inline Schedule schedule_from_json(const nlohmann::json& doc, const Instance& inst) {
  if (!doc.is_object()) fail(ErrorCode::input, "malformed schedule: expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "period" && key != "channels" && key != "slots") {
      fail(ErrorCode::input, "malformed schedule: unknown key '" + key + "'");
    }
  }
  if (!doc.contains("period") || !doc["period"].is_number_integer() ||
      !doc.contains("channels") || !doc["channels"].is_number_integer() ||
      !doc.contains("slots") || !doc["slots"].is_array()) {
    fail(ErrorCode::input, "malformed schedule: need integer 'period', 'channels' and array 'slots'");
  }
  const auto period = doc["period"].get<std::int64_t>();
  const auto channels = doc["channels"].get<std::int64_t>();
  if (period < 1 || channels < 1 || channels > 1'000'000) {
    fail(ErrorCode::input, "malformed schedule: period and channels must be positive");
  }
  const auto& rows = doc["slots"];
  if (rows.size() != static_cast<std::size_t>(period)) {
    fail(ErrorCode::input, "malformed schedule: 'slots' length differs from 'period'");
  }
  Schedule s(static_cast<std::size_t>(period), static_cast<int>(channels));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& row = rows[t];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(channels)) {
      fail(ErrorCode::input, "malformed schedule: slot " + std::to_string(t) +
                                 " must list one entry per channel");
    }
    for (int w = 0; w < channels; ++w) {
      const auto& cell = row[static_cast<std::size_t>(w)];
      if (cell.is_null()) continue;
      if (!cell.is_string()) fail(ErrorCode::input, "malformed schedule: entries are ids or null");
      const auto id = cell.get<std::string>();
      const auto idx = inst.find(id);
      if (!idx) fail(ErrorCode::input, "schedule references unknown message '" + id + "'");
      s.at(t, w) = *idx;
    }
  }
  return s;
}

inline Schedule load_schedule(std::istream& in, const Instance& inst) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::input, std::string("malformed schedule text: ") + e.what());
  }
  return schedule_from_json(doc, inst);
}

inline Schedule load_schedule(std::string_view text, const Instance& inst) {
  std::istringstream in{std::string(text)};
  return load_schedule(in, inst);
}

}  // namespace airdisk
