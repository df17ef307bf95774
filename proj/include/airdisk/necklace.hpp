#pragma once

// Lyndon word enumeration (Fredricksen-Kessler-Maiorana), used to visit every
// periodic sequence exactly once up to rotation.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace airdisk {

/// Calls visit(word) for every Lyndon word of length n over {0..k-1}, in
/// lexicographic order. prune(prefix) is consulted after each symbol is fixed
/// and may return true to skip every word extending that prefix.
template <class Visit, class Prune>
void for_each_lyndon(std::size_t n, std::size_t k, Visit&& visit, Prune&& prune) {
  if (n == 0 || k == 0) return;
  std::vector<std::size_t> a(n + 1, 0);  // a[0] is a sentinel, the word is a[1..n]
  auto word = [&] { return std::span<const std::size_t>(a.data() + 1, n); };
  auto prefix = [&](std::size_t t) { return std::span<const std::size_t>(a.data() + 1, t); };

  auto rec = [&](auto&& self, std::size_t t, std::size_t p) -> void {
    if (t > n) {
      if (p == n) visit(word());
      return;
    }
    a[t] = a[t - p];
    if (!prune(prefix(t))) self(self, t + 1, p);
    for (std::size_t j = a[t - p] + 1; j < k; ++j) {
      a[t] = j;
      if (!prune(prefix(t))) self(self, t + 1, t);
    }
  };
  rec(rec, 1, 1);
}

template <class Visit>
void for_each_lyndon(std::size_t n, std::size_t k, Visit&& visit) {
  for_each_lyndon(n, k, std::forward<Visit>(visit), [](std::span<const std::size_t>) { return false; });
}

}  // namespace airdisk
