#pragma once

// Schedule transforms: unrolling, stretching with idle columns, scaling by a
// rational density, and mapping a one-channel schedule into reserved slots.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/evaluate.hpp"
#include "airdisk/numeric.hpp"
#include "airdisk/schedule.hpp"

namespace airdisk {

inline constexpr std::size_t kDefaultPeriodCap = 1'000'000;

/// `s` repeated `times` times.
inline Schedule unroll(const Schedule& s, std::size_t times, std::size_t cap = kDefaultPeriodCap) {
  if (times < 1) fail(ErrorCode::usage, "unroll factor must be positive");
  if (s.length() != 0 && times > cap / s.length()) {
    fail(ErrorCode::budget, "unrolled period exceeds cap of " + std::to_string(cap) + " slots");
  }
  Schedule out(s.length() * times, s.channels());
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (int w = 0; w < s.channels(); ++w) out.at(t, w) = s.at(t % s.length(), w);
  }
  return out;
}

/// `s` unrolled to the smallest multiple of its period divisible by `multiple`.
inline Schedule unroll_to_multiple(const Schedule& s, std::size_t multiple,
                                   std::size_t cap = kDefaultPeriodCap) {
  const auto l = checked_lcm(s.length(), multiple, cap, "unroll");
  return unroll(s, l / s.length(), cap);
}

/// Shortest prefix whose repetition equals `s`.
inline Schedule minimal_period(const Schedule& s) {
  const std::size_t T = s.length();
  const int W = s.channels();
  for (std::size_t d = 1; d < T; ++d) {
    if (T % d != 0) continue;
    bool ok = true;
    for (std::size_t t = d; t < T && ok; ++t) {
      for (int w = 0; w < W && ok; ++w) ok = s.at(t, w) == s.at(t - d, w);
    }
    if (ok) {
      Schedule out(d, W);
      for (std::size_t t = 0; t < d; ++t) {
        for (int w = 0; w < W; ++w) out.at(t, w) = s.at(t, w);
      }
      return out;
    }
  }
  return s;
}

/// Cyclic rotation: slot t of the result is slot (t + shift) mod T of `s`.
inline Schedule rotate(const Schedule& s, std::size_t shift) {
  Schedule out(s.length(), s.channels());
  for (std::size_t t = 0; t < s.length(); ++t) {
    for (int w = 0; w < s.channels(); ++w) out.at(t, w) = s.at((t + shift) % s.length(), w);
  }
  return out;
}

/// Fills the idle cells of `base` with the corresponding cells of `extra`.
/// Both must have the same shape; overlapping busy cells are an error.
inline Schedule overlay(const Schedule& base, const Schedule& extra) {
  if (base.length() != extra.length() || base.channels() != extra.channels()) {
    fail(ErrorCode::usage, "overlay needs schedules of identical shape");
  }
  Schedule out = base;
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (int w = 0; w < out.channels(); ++w) {
      const auto v = extra.at(t, w);
      if (v == kIdle) continue;
      if (out.at(t, w) != kIdle) fail(ErrorCode::usage, "overlay collision");
      out.at(t, w) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stretching

struct StretchResult {
  Schedule schedule;
  std::size_t offset = 1;
  std::vector<std::size_t> inserted;  // first column index of each inserted run
};

/// Inserts `y` idle columns before the 1-based positions x, x+kappa, ... of
/// `s` unrolled to a multiple of kappa.
inline StretchResult stretch_detail(const Schedule& s, std::size_t y, std::size_t kappa,
                                    std::size_t x, std::size_t cap = kDefaultPeriodCap) {
  if (y < 1) fail(ErrorCode::usage, "stretch needs y >= 1");
  if (kappa < 1) fail(ErrorCode::usage, "stretch needs kappa >= 1");
  if (x < 1 || x > kappa) fail(ErrorCode::usage, "stretch offset x must lie in [1, kappa]");
  if (s.empty()) fail(ErrorCode::usage, "cannot stretch an empty schedule");
  const std::size_t L = checked_lcm(s.length(), kappa, cap, "stretch");
  const std::size_t blocks = L / kappa;
  const std::size_t out_len = L + y * blocks;
  if (out_len > cap) fail(ErrorCode::budget, "stretched period exceeds cap");
  StretchResult res;
  res.offset = x;
  res.schedule = Schedule(out_len, s.channels());
  std::size_t pos = 0;
  for (std::size_t t = 0; t < L; ++t) {
    if (t % kappa == x - 1) {
      res.inserted.push_back(pos);
      pos += y;
    }
    for (int w = 0; w < s.channels(); ++w) res.schedule.at(pos, w) = s.at(t % s.length(), w);
    ++pos;
  }
  return res;
}

inline Schedule stretch(const Schedule& s, std::size_t y, std::size_t kappa, std::size_t x,
                        std::size_t cap = kDefaultPeriodCap) {
  return stretch_detail(s, y, kappa, x, cap).schedule;
}

/// Objective used to pick offsets: exact continuous COST restricted to the
/// messages that `s` serves (all of them when none is missing).
inline double served_cost(const Schedule& s, const Instance& inst) {
  const auto waits = periodic_waits(s, inst.size());
  std::vector<MessageIndex> served;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (!std::isinf(waits[i])) served.push_back(static_cast<MessageIndex>(i));
  }
  const auto c = exact_contribution(s, inst, served);
  return c.ert + 0.5 * c.prob + c.bc;
}

/// Stretches at every offset x in [1, kappa] and keeps the cheapest result
/// (ties to the smallest x).
inline std::pair<Schedule, std::size_t> best_offset_stretch(const Schedule& s, std::size_t y,
                                                            std::size_t kappa,
                                                            const Instance& inst,
                                                            std::size_t cap = kDefaultPeriodCap) {
  std::optional<Schedule> best;
  std::size_t best_x = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t x = 1; x <= kappa; ++x) {
    auto cand = stretch(s, y, kappa, x, cap);
    const double c = served_cost(cand, inst);
    if (!best || c < best_cost) {
      best_cost = c;
      best_x = x;
      best = std::move(cand);
    }
  }
  return {std::move(*best), best_x};
}

// ---------------------------------------------------------------------------
// Scaling

/// Spreads `s` out by the factor 1/alpha: slot t (of the period unrolled to a
/// multiple of alpha's numerator) moves to round(t / alpha); all other slots
/// are idle.
inline Schedule scale(const Schedule& s, Rational alpha, std::size_t cap = kDefaultPeriodCap) {
  if (alpha.num == 0 || alpha.num > alpha.den) fail(ErrorCode::usage, "alpha must lie in (0, 1]");
  if (s.empty()) fail(ErrorCode::usage, "cannot scale an empty schedule");
  const std::uint64_t a = alpha.num;
  const std::uint64_t b = alpha.den;
  const std::size_t unrolled = checked_lcm(s.length(), a, cap, "scale");
  const unsigned __int128 out_len128 = static_cast<unsigned __int128>(unrolled) * b / a;
  if (out_len128 > cap) fail(ErrorCode::budget, "scaled period exceeds cap");
  const auto out_len = static_cast<std::size_t>(out_len128);
  Schedule out(out_len, s.channels());
  for (std::size_t t = 0; t < unrolled; ++t) {
    // round(t*b/a) with halves rounded up, in exact integer arithmetic
    const auto pos = static_cast<std::size_t>(
        (2 * static_cast<unsigned __int128>(t) * b + a) / (2 * static_cast<unsigned __int128>(a)));
    for (int w = 0; w < s.channels(); ++w) out.at(pos, w) = s.at(t % s.length(), w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mapping

/// Periodic pattern of cells available to a schedule being mapped in.
struct ReservedSlots {
  std::size_t period = 0;
  int channels = 1;
  std::vector<char> mask;  // period x channels, time-major

  ReservedSlots() = default;
  ReservedSlots(std::size_t t, int w) : period(t), channels(w), mask(t * static_cast<std::size_t>(w), 0) {}

  /// Idle cells of `s`.
  static ReservedSlots idle_cells_of(const Schedule& s) {
    ReservedSlots r(s.length(), s.channels());
    for (std::size_t t = 0; t < s.length(); ++t) {
      for (int w = 0; w < s.channels(); ++w) r.at(t, w) = s.at(t, w) == kIdle;
    }
    return r;
  }

  char at(std::size_t t, int w) const { return mask[t * channels + w]; }
  char& at(std::size_t t, int w) { return mask[t * channels + w]; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : mask) n += b != 0;
    return n;
  }

  double alpha() const {
    return mask.empty() ? 0.0 : static_cast<double>(count()) / static_cast<double>(mask.size());
  }
};

/// Places slot i of the unrolled one-channel schedule `s` into the i-th
/// reserved cell of the unrolled pattern (time-major, channel-minor). Idle
/// slots of `s` consume a reserved cell too, so the mapped schedule keeps the
/// relative spacing of `s`. Cells outside the pattern stay idle.
///
/// The output period is T_r * lcm(T_s, K) / K, where K is the number of
/// reserved cells per pattern period.
inline Schedule map_into_reserved(const Schedule& s, const ReservedSlots& r,
                                  std::size_t cap = kDefaultPeriodCap) {
  if (s.channels() != 1) fail(ErrorCode::usage, "map_into_reserved expects a one-channel schedule");
  if (s.empty()) fail(ErrorCode::usage, "cannot map an empty schedule");
  if (r.period == 0) fail(ErrorCode::usage, "reserved pattern is empty");
  const std::size_t K = r.count();
  if (K == 0) fail(ErrorCode::usage, "reserved density is zero");
  const std::size_t slots = checked_lcm(s.length(), K, cap, "map_into_reserved");
  const std::size_t reps = slots / K;
  if (reps > cap / r.period) fail(ErrorCode::budget, "mapped period exceeds cap");
  Schedule out(r.period * reps, r.channels);
  std::size_t i = 0;
  for (std::size_t t = 0; t < out.length(); ++t) {
    for (int w = 0; w < r.channels; ++w) {
      if (r.at(t % r.period, w)) out.at(t, w) = s.at(i++ % s.length(), 0);
    }
  }
  return out;
}

}  // namespace airdisk
