#pragma once

// Helpers shared by the test binaries: small instance builders, seeded
// random generators and naive reference evaluators.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "airdisk/airdisk.hpp"

namespace airdisk::testing {

inline Instance make_instance(const std::vector<double>& p, const std::vector<double>& c,
                              int W = 1) {
  std::vector<Message> msgs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    msgs.push_back({"M" + std::to_string(i + 1), p[i], c.empty() ? 0.0 : c[i]});
  }
  return Instance::create(std::move(msgs), W);
}

/// Instance of `g` identical messages per entry of `groups`, each entry given
/// as (size, weight per message, cost).
struct GroupSpec {
  std::size_t size;
  double weight;
  double cost;
};

inline Instance grouped_instance(const std::vector<GroupSpec>& groups, int W = 1) {
  std::vector<Message> msgs;
  int id = 1;
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < g.size; ++k) msgs.push_back({"M" + std::to_string(id++), g.weight, g.cost});
  }
  return Instance::create(std::move(msgs), W);
}

inline Schedule one_channel(std::initializer_list<MessageIndex> slots) {
  return Schedule::from_slots(std::vector<MessageIndex>(slots));
}

/// Random instance with m messages, costs in [0, cmax].
inline Instance random_instance(std::mt19937_64& rng, std::size_t m, double cmax, int W = 1,
                                double zero_cost_chance = 0.2) {
  std::uniform_real_distribution<double> up(0.05, 1.0);
  std::uniform_real_distribution<double> uc(0.0, cmax);
  std::bernoulli_distribution zero(zero_cost_chance);
  std::vector<Message> msgs;
  for (std::size_t i = 0; i < m; ++i) {
    msgs.push_back({"M" + std::to_string(i + 1), up(rng), zero(rng) ? 0.0 : uc(rng)});
  }
  return Instance::create(std::move(msgs), W);
}

/// Random grouping with q groups of sizes in [1, gmax].
inline Instance random_grouped_instance(std::mt19937_64& rng, std::size_t q, std::size_t gmax,
                                        double cmax, int W = 1) {
  std::uniform_int_distribution<std::size_t> ug(1, gmax);
  std::uniform_real_distribution<double> up(0.05, 1.0);
  std::uniform_real_distribution<double> uc(0.0, cmax);
  std::vector<GroupSpec> specs;
  for (std::size_t j = 0; j < q; ++j) {
    // distinct weights keep groups apart
    specs.push_back({ug(rng), up(rng) + 1e-6 * static_cast<double>(j), uc(rng)});
  }
  return grouped_instance(specs, W);
}

/// Random periodic schedule in which every message of `inst` appears.
inline Schedule random_schedule(std::mt19937_64& rng, const Instance& inst, std::size_t T,
                                int W = 1, double idle_chance = 0.2) {
  const std::size_t m = inst.size();
  if (T * static_cast<std::size_t>(W) < m) T = (m + W - 1) / W;
  Schedule s(T, W);
  std::uniform_int_distribution<MessageIndex> um(0, static_cast<MessageIndex>(m) - 1);
  std::bernoulli_distribution idle(idle_chance);
  for (std::size_t t = 0; t < T; ++t) {
    for (int w = 0; w < W; ++w) s.at(t, w) = idle(rng) ? kIdle : um(rng);
  }
  // guarantee coverage by writing each message into a distinct random cell
  std::vector<std::size_t> cells(T * W);
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  std::shuffle(cells.begin(), cells.end(), rng);
  for (std::size_t i = 0; i < m; ++i) {
    s.at(cells[i] / W, static_cast<int>(cells[i] % W)) = static_cast<MessageIndex>(i);
  }
  return s;
}

/// Slot-start wait of message i for a request at slot t, by scanning forward.
inline double naive_wait(const Schedule& s, MessageIndex i, std::size_t t, bool periodic) {
  const std::size_t T = s.length();
  const std::size_t limit = periodic ? 2 * T : T;
  for (std::size_t u = t; u < limit; ++u) {
    for (int w = 0; w < s.channels(); ++w) {
      if (s.at(u % T, w) == i) return static_cast<double>(u - t + 1);
    }
  }
  return periodic ? std::numeric_limits<double>::infinity() : static_cast<double>(T - t);
}

inline double naive_mean_wait(const Schedule& s, MessageIndex i, bool periodic) {
  double sum = 0.0;
  for (std::size_t t = 0; t < s.length(); ++t) sum += naive_wait(s, i, t, periodic);
  return sum / static_cast<double>(s.length());
}

inline double naive_ert(const Schedule& s, const Instance& inst, bool periodic) {
  double e = 0.0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    e += inst.messages()[i].p * naive_mean_wait(s, static_cast<MessageIndex>(i), periodic);
  }
  return e;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace airdisk::testing
