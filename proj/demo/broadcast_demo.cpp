// Compares the schedulers on a catalog and checks one of them by simulation.
//
//   broadcast_demo [instance.json]
//
// Without an argument a geometric catalog of 60 messages is generated.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "airdisk/airdisk.hpp"

using namespace airdisk;

namespace {

Instance load(const char* path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::input, std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_instance(std::string_view(ss.str()));
}

void row(const char* name, const CostReport& r, double lb, std::size_t period) {
  // finite schedules have no period
  const std::string t = period ? std::to_string(period) : "-";
  std::printf("%-16s %10.4f %10.4f %8.4f %8s\n", name, r.cost, r.bc, r.cost / lb, t.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  try {
    Instance inst = [&] {
      if (argc > 1) return load(argv[1]);
      GenSpec spec;
      spec.kind = WorkloadKind::geometric_groups;
      spec.m = 60;
      spec.cost_hi = 1.0;
      spec.seed = 42;
      return generate(spec);
    }();

    const auto g = group_messages(inst);
    const auto lb = solve_lb(g, 1.0, inst.channels());
    const auto tau = tau_from_lb(g);
    std::printf("%zu messages in %zu groups, %d channel(s)\n", inst.size(), g.size(), inst.channels());
    std::printf("lower bound %.4f (slot start), %.4f (continuous)\n\n", lb.value, lb.value + 0.5);

    const double ref = lb.value + 0.5;
    std::printf("%-16s %10s %10s %8s %8s\n", "algorithm", "cost", "bc", "ratio", "period");

    const std::size_t horizon = 200000;
    const auto rr = randomized_rr(RrPolicy(g, tau), horizon, 1);
    row("rr", exact_cost_finite(rr, inst), ref, 0);

    const auto single = singleton_grouping(inst);
    const auto base = per_message_baseline(inst, tau_from_lb(single), horizon, 1);
    row("baseline", exact_cost_finite(base, inst), ref, 0);

    const auto pg = periodic_greedy(g, tau, default_greedy_length(g, tau));
    row("periodic-greedy", exact_cost(pg, inst), ref, pg.length());

    try {
      const auto res = ptas(inst, PtasConfig{});
      row("ptas", exact_cost(res.schedule, inst), ref, res.schedule.length());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::certificate) throw;
      std::printf("%-16s %s\n", "ptas", e.what());
    }
    std::printf("\n");

    const auto sim = simulate_cost(pg, inst, 1000000, 7);
    const auto exact = exact_cost(pg, inst);
    std::printf("periodic-greedy simulated wait %.4f +- %.4f, exact %.4f\n", sim.mean_wait, sim.std_error,
                exact.ert_slot_start);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
