#pragma once

// Synthetic instance generators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/model.hpp"

namespace airdisk {

enum class WorkloadKind { zipf, uniform_groups, geometric_groups };

inline WorkloadKind parse_workload_kind(std::string_view s) {
  if (s == "zipf") return WorkloadKind::zipf;
  if (s == "uniform-groups") return WorkloadKind::uniform_groups;
  if (s == "geometric-groups") return WorkloadKind::geometric_groups;
  fail(ErrorCode::usage, "unknown workload kind '" + std::string(s) + "'");
}

struct GenSpec {
  WorkloadKind kind = WorkloadKind::zipf;
  std::size_t m = 10;
  double s = 1.0;               // Zipf exponent
  std::size_t group_size = 1;   // uniform-groups
  double growth = 1.0;          // geometric-groups: group j has ceil((1+growth)^(j/2)) messages
  double cost_lo = 0.0;
  double cost_hi = 0.0;
  int channels = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1) fail(ErrorCode::usage, "m must be at least 1");
    if (!(s >= 0.0)) fail(ErrorCode::usage, "Zipf exponent must be non-negative");
    if (group_size < 1) fail(ErrorCode::usage, "group size must be at least 1");
    if (!(growth > 0.0)) fail(ErrorCode::usage, "growth must be positive");
    if (!(cost_lo >= 0.0) || !(cost_lo <= cost_hi)) fail(ErrorCode::usage, "cost range needs 0 <= lo <= hi");
    if (channels < 1) fail(ErrorCode::usage, "channel count W < 1");
  }
};

namespace detail {

class CostDraw {
 public:
  CostDraw(double lo, double hi, std::uint64_t seed) : lo_(lo), hi_(hi), rng_(seed) {}
  double operator()() {
    if (lo_ == hi_) return lo_;
    return std::uniform_real_distribution<double>(lo_, hi_)(rng_);
  }

 private:
  double lo_, hi_;
  std::mt19937_64 rng_;
};

inline std::string message_id(std::size_t i) { return "M" + std::to_string(i + 1); }

}  // namespace detail

/// zipf: p_i proportional to i^-s, one cost per message.
/// uniform-groups: m / group_size groups (the last may be short), equal p,
/// one cost per group.
/// geometric-groups: group j = 0, 1, ... holds ceil((1+growth)^(j/2))
/// messages of weight (1+growth)^-j each, one cost per group. Messages
/// short of a full next group are added to the last group.
inline Instance generate(const GenSpec& spec) {
  spec.validate();
  detail::CostDraw cost(spec.cost_lo, spec.cost_hi, spec.seed);
  std::vector<Message> msgs;
  msgs.reserve(spec.m);
  switch (spec.kind) {
    case WorkloadKind::zipf:
      for (std::size_t i = 0; i < spec.m; ++i) {
        msgs.push_back({detail::message_id(i), std::pow(static_cast<double>(i + 1), -spec.s), cost()});
      }
      break;
    case WorkloadKind::uniform_groups: {
      double c = 0.0;
      for (std::size_t i = 0; i < spec.m; ++i) {
        if (i % spec.group_size == 0) c = cost();
        msgs.push_back({detail::message_id(i), 1.0, c});
      }
      break;
    }
    case WorkloadKind::geometric_groups: {
      const double base = 1.0 + spec.growth;
      std::vector<std::size_t> sizes;
      std::size_t used = 0;
      for (int j = 0;; ++j) {
        const auto size = static_cast<std::size_t>(std::ceil(std::pow(base, j / 2.0) - 1e-9));
        if (used + size > spec.m) break;
        sizes.push_back(size);
        used += size;
      }
      // leftover messages join the last group rather than forming a short one
      sizes.back() += spec.m - used;
      for (std::size_t j = 0; j < sizes.size(); ++j) {
        const double w = std::pow(base, -static_cast<double>(j));
        const double c = cost();
        for (std::size_t k = 0; k < sizes[j]; ++k) msgs.push_back({detail::message_id(msgs.size()), w, c});
      }
      break;
    }
  }
  return Instance::create(std::move(msgs), spec.channels);
}

}  // namespace airdisk
