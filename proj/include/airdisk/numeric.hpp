#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "airdisk/error.hpp"

namespace airdisk {

inline constexpr double kRelTol = 1e-12;

/// a <= b up to a relative floating-point slack of kRelTol.
inline bool leq_tol(double a, double b, double rel = kRelTol) {
  return a <= b + rel * std::max(std::abs(a), std::abs(b));
}

/// Sum of waits 1..d for the requests arriving in a gap of d slots.
inline constexpr std::uint64_t triangular(std::uint64_t d) {
  return d * (d + 1) / 2;
}

inline std::size_t checked_lcm(std::size_t a, std::size_t b, std::size_t cap,
                               const char* what) {
  const std::size_t g = std::gcd(a, b);
  const std::size_t q = a / g;
  if (b != 0 && q > cap / b) {
    fail(ErrorCode::budget, std::string(what) + ": period exceeds cap of " +
                                std::to_string(cap) + " slots");
  }
  const std::size_t l = q * b;
  if (l > cap) {
    fail(ErrorCode::budget, std::string(what) + ": period " +
                                std::to_string(l) + " exceeds cap of " +
                                std::to_string(cap) + " slots");
  }
  return l;
}

/// Positive rational number num/den in lowest terms.
struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  static Rational of(std::uint64_t n, std::uint64_t d) {
    if (d == 0) fail(ErrorCode::usage, "rational with zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    return g == 0 ? Rational{0, 1} : Rational{n / g, d / g};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// floor(this * k) computed exactly.
  std::uint64_t floor_times(std::uint64_t k) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(num) * k) / den);
  }

  friend bool operator==(const Rational&, const Rational&) = default;
};

}  // namespace airdisk
