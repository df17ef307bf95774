#pragma once

// Command-line front end. run_cli is kept separate from main so tests can
// drive it in-process.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "airdisk/airdisk.hpp"

namespace airdisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCertificate = 3;

inline const char* const kCompareHeader = "instance,algorithm,lb,cost_ss,cost_cont,bc,ratio,wall_s,seed";

inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::input:
    case ErrorCode::infeasible:
    case ErrorCode::numeric:
      return kExitInput;
    case ErrorCode::usage:
    case ErrorCode::budget:
      return kExitUsage;
    case ErrorCode::certificate:
      return kExitCertificate;
  }
  return kExitInput;
}

/// Shortest decimal that reads back to the same double.
inline std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::input, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Instance read_instance(const std::string& path) { return load_instance(std::string_view(read_file(path))); }

/// Writes to `path`, or to `fallback` when the path is empty or "-".
inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::input, "cannot write '" + path + "'");
  f << text;
}

/// Parses "a_period=8,a_size=4,alpha_grid=32" into the config.
inline void apply_caps(PtasConfig& cfg, const std::string& caps) {
  if (caps.empty()) return;
  std::stringstream ss(caps);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::usage, "cap '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double v = 0.0;
    const auto r = std::from_chars(val.data(), val.data() + val.size(), v);
    if (r.ec != std::errc() || r.ptr != val.data() + val.size() || !(v > 0.0)) {
      fail(ErrorCode::usage, "cap '" + key + "' needs a positive number");
    }
    const auto whole = static_cast<std::size_t>(v);
    if (key == "a_period") {
      cfg.a_period_cap = whole;
    } else if (key == "a_size") {
      cfg.a_size_cap = whole;
    } else if (key == "alpha_grid") {
      cfg.alpha_grid_cap = whole;
    } else if (key == "composite") {
      cfg.composite_cap = whole;
    } else if (key == "period") {
      cfg.period_cap = whole;
    } else if (key == "repetitions") {
      cfg.repetitions = whole;
    } else if (key == "kappa") {
      cfg.kappa = v;
    } else if (key == "j0") {
      cfg.j0 = static_cast<int>(whole);
    } else if (key == "mu") {
      cfg.mu = v;
    } else {
      fail(ErrorCode::usage, "unknown cap '" + key + "'");
    }
  }
}

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"rr", "greedy", "periodic-greedy", "baseline", "ptas", "oracle"};
  return names;
}

struct RunOptions {
  std::size_t horizon = 10000;
  std::optional<std::size_t> length;  // periodic greedy T
  std::size_t t_max = 4;
  std::uint64_t seed = 0;
  PtasConfig ptas;
};

struct RunResult {
  Schedule schedule;
  bool periodic = true;
  std::optional<PtasReport> report;
};

inline RunResult run_algorithm(const std::string& name, const Instance& inst, const RunOptions& o) {
  RunResult r;
  if (name == "rr") {
    const auto g = group_messages(inst);
    r.schedule = randomized_rr(RrPolicy(g, tau_from_lb(g)), o.horizon, o.seed);
    r.periodic = false;
  } else if (name == "greedy") {
    const auto g = group_messages(inst);
    r.schedule = greedy(g, tau_from_lb(g), o.horizon);
    r.periodic = false;
  } else if (name == "periodic-greedy") {
    const auto g = group_messages(inst);
    const auto tau = tau_from_lb(g);
    r.schedule = periodic_greedy(g, tau, o.length.value_or(default_greedy_length(g, tau)));
  } else if (name == "baseline") {
    const auto g = singleton_grouping(inst);
    r.schedule = per_message_baseline(inst, tau_from_lb(g), o.horizon, o.seed);
    r.periodic = false;
  } else if (name == "ptas") {
    auto res = ptas(inst, o.ptas);
    r.schedule = std::move(res.schedule);
    r.report = std::move(res.report);
  } else if (name == "oracle") {
    r.schedule = brute_force_opt(inst, o.t_max).best;
  } else {
    fail(ErrorCode::usage, "unknown algorithm '" + name + "'");
  }
  return r;
}

inline CostReport cost_of(const RunResult& r, const Instance& inst) {
  return r.periodic ? exact_cost(r.schedule, inst) : exact_cost_finite(r.schedule, inst);
}

inline std::string cost_lines(const CostReport& c) {
  std::ostringstream os;
  os << "ert_slot_start=" << num(c.ert_slot_start) << "\n"
     << "ert_continuous=" << num(c.ert_continuous) << "\n"
     << "bc=" << num(c.bc) << "\n"
     << "cost=" << num(c.cost) << "\n"
     << "cost_slot_start=" << num(c.cost_slot_start()) << "\n"
     << "density=" << num(c.density) << "\n"
     << "period=" << c.period << "\n";
  return os.str();
}

inline std::string simulation_lines(const SimulationResult& s) {
  std::ostringstream os;
  os << "sim_ert_slot_start=" << num(s.mean_wait) << "\n"
     << "sim_std_error=" << num(s.std_error) << "\n"
     << "sim_cost_slot_start=" << num(s.cost_slot_start()) << "\n"
     << "sim_cost=" << num(s.cost_continuous()) << "\n"
     << "sim_requests=" << s.samples << "\n";
  return os.str();
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic broadcast schedules: lower bounds, schedulers and evaluation", "airdisk"};
  app.require_subcommand(1);

  // solve-lb
  auto* lb_cmd = app.add_subcommand("solve-lb", "Solve the density-constrained relaxation");
  std::string lb_inst;
  double lb_alpha = 1.0;
  std::optional<int> lb_channels;
  lb_cmd->add_option("-i,--instance", lb_inst, "Instance file")->required();
  lb_cmd->add_option("--alpha", lb_alpha, "Density in (0, 1]");
  lb_cmd->add_option("--channels", lb_channels, "Channel count (default: the instance's)");

  // schedule
  auto* sch_cmd = app.add_subcommand("schedule", "Build a schedule");
  std::string sch_inst, sch_alg, sch_out, sch_report, sch_caps;
  RunOptions sch_opt;
  double sch_eps = 0.1;
  bool tau_from_lb_flag = true;
  sch_cmd->add_option("-i,--instance", sch_inst, "Instance file")->required();
  sch_cmd->add_option("-a,--algorithm", sch_alg, "rr | greedy | periodic-greedy | baseline | ptas | oracle")
      ->required();
  sch_cmd->add_flag("--tau-from-lb", tau_from_lb_flag, "Take periods from the relaxation (the only mode)");
  sch_cmd->add_option("--horizon", sch_opt.horizon, "Slots for finite schedules");
  sch_cmd->add_option("--length", sch_opt.length, "Greedy slots T of a periodic-greedy period");
  sch_cmd->add_option("--t-max", sch_opt.t_max, "Longest period for the oracle");
  sch_cmd->add_option("--seed", sch_opt.seed, "Random seed");
  sch_cmd->add_option("--epsilon", sch_eps, "PTAS accuracy");
  sch_cmd->add_option("--caps", sch_caps, "PTAS caps, e.g. a_period=8,a_size=4,alpha_grid=32");
  sch_cmd->add_option("-o,--out", sch_out, "Schedule file (default stdout)");
  sch_cmd->add_option("--report", sch_report, "PTAS report file");

  // evaluate
  auto* ev_cmd = app.add_subcommand("evaluate", "Exact cost of a schedule");
  std::string ev_sched, ev_inst;
  bool ev_finite = false;
  std::size_t ev_sim = 0;
  std::uint64_t ev_seed = 0;
  ev_cmd->add_option("-s,--schedule", ev_sched, "Schedule file")->required();
  ev_cmd->add_option("-i,--instance", ev_inst, "Instance file")->required();
  ev_cmd->add_flag("--finite", ev_finite, "Treat the schedule as finite instead of periodic");
  ev_cmd->add_option("--simulate", ev_sim, "Also simulate this many requests");
  ev_cmd->add_option("--seed", ev_seed, "Simulation seed");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo estimate of a schedule's cost");
  std::string sim_sched, sim_inst;
  bool sim_finite = false;
  std::size_t sim_n = 100000;
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("-s,--schedule", sim_sched, "Schedule file")->required();
  sim_cmd->add_option("-i,--instance", sim_inst, "Instance file")->required();
  sim_cmd->add_flag("--finite", sim_finite, "Treat the schedule as finite");
  sim_cmd->add_option("-n,--requests", sim_n, "Requests to simulate");
  sim_cmd->add_option("--seed", sim_seed, "Simulation seed");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic instance");
  GenSpec gen;
  std::string gen_kind = "zipf", gen_out;
  std::vector<double> gen_costs;
  gen_cmd->add_option("--kind", gen_kind, "zipf | uniform-groups | geometric-groups");
  gen_cmd->add_option("--m", gen.m, "Message count");
  gen_cmd->add_option("--s", gen.s, "Zipf exponent");
  gen_cmd->add_option("--group-size", gen.group_size, "Group size for uniform-groups");
  gen_cmd->add_option("--growth", gen.growth, "Growth for geometric-groups");
  gen_cmd->add_option("--cost-range", gen_costs, "Cost range lo hi")->expected(2);
  gen_cmd->add_option("--channels", gen.channels, "Channel count");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("-o,--out", gen_out, "Instance file (default stdout)");

  // compare
  auto* cmp_cmd = app.add_subcommand("compare", "Run several algorithms on several instances");
  std::vector<std::string> cmp_insts, cmp_algs;
  std::string cmp_out, cmp_caps;
  RunOptions cmp_opt;
  double cmp_eps = 0.1;
  bool cmp_timing = false;
  cmp_cmd->add_option("-i,--instances", cmp_insts, "Instance files")->required();
  cmp_cmd->add_option("-a,--algorithms", cmp_algs, "Algorithms")->required()->delimiter(',');
  cmp_cmd->add_option("--horizon", cmp_opt.horizon, "Slots for finite schedules");
  cmp_cmd->add_option("--t-max", cmp_opt.t_max, "Longest period for the oracle");
  cmp_cmd->add_option("--seed", cmp_opt.seed, "Random seed");
  cmp_cmd->add_option("--epsilon", cmp_eps, "PTAS accuracy");
  cmp_cmd->add_option("--caps", cmp_caps, "PTAS caps");
  cmp_cmd->add_flag("--timing", cmp_timing, "Record wall time (otherwise 0, keeping output reproducible)");
  cmp_cmd->add_option("-o,--out", cmp_out, "CSV file (default stdout)");

  // report
  auto* rep_cmd = app.add_subcommand("report", "Run the approximation pipeline and print its report");
  std::string rep_inst, rep_caps, rep_out;
  double rep_eps = 0.1;
  rep_cmd->add_option("-i,--instance", rep_inst, "Instance file")->required();
  rep_cmd->add_option("--epsilon", rep_eps, "Accuracy");
  rep_cmd->add_option("--caps", rep_caps, "Caps");
  rep_cmd->add_option("-o,--out", rep_out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*lb_cmd) {
      const auto inst = read_instance(lb_inst);
      const auto g = group_messages(inst);
      const auto sol = solve_lb(g, lb_alpha, lb_channels.value_or(inst.channels()));
      std::ostringstream os;
      os << "key,value\n"
         << "lambda," << num(sol.lambda) << "\n"
         << "value," << num(sol.value) << "\n"
         << "binding," << (sol.binding ? 1 : 0) << "\n"
         << "\ngroup,size,p,c,tau\n";
      for (std::size_t j = 0; j < g.size(); ++j) {
        os << j + 1 << "," << g[j].size() << "," << num(g[j].p) << "," << num(g[j].c) << "," << num(sol.tau[j])
           << "\n";
      }
      out << os.str();
    } else if (*sch_cmd) {
      const auto inst = read_instance(sch_inst);
      sch_opt.ptas.epsilon = sch_eps;
      apply_caps(sch_opt.ptas, sch_caps);
      const auto r = run_algorithm(sch_alg, inst, sch_opt);
      write_text(sch_out, schedule_to_json(r.schedule, inst).dump(2) + "\n", out);
      if (r.report) {
        const auto text = r.report->to_json().dump(2) + "\n";
        if (!sch_report.empty()) {
          write_text(sch_report, text, out);
        } else if (!sch_out.empty() && sch_out != "-") {
          out << text;
        }
      }
    } else if (*ev_cmd) {
      const auto inst = read_instance(ev_inst);
      const auto s = load_schedule(std::string_view(read_file(ev_sched)), inst);
      const auto c = ev_finite ? exact_cost_finite(s, inst) : exact_cost(s, inst);
      out << cost_lines(c);
      if (ev_sim > 0) {
        out << simulation_lines(ev_finite ? simulate_cost_finite(s, inst, ev_sim, ev_seed)
                                          : simulate_cost(s, inst, ev_sim, ev_seed));
      }
    } else if (*sim_cmd) {
      const auto inst = read_instance(sim_inst);
      const auto s = load_schedule(std::string_view(read_file(sim_sched)), inst);
      out << simulation_lines(sim_finite ? simulate_cost_finite(s, inst, sim_n, sim_seed)
                                         : simulate_cost(s, inst, sim_n, sim_seed));
    } else if (*gen_cmd) {
      gen.kind = parse_workload_kind(gen_kind);
      if (!gen_costs.empty()) {
        gen.cost_lo = gen_costs[0];
        gen.cost_hi = gen_costs[1];
      }
      write_text(gen_out, instance_to_json(generate(gen)).dump(2) + "\n", out);
    } else if (*cmp_cmd) {
      for (const auto& a : cmp_algs) {
        if (std::find(algorithm_names().begin(), algorithm_names().end(), a) == algorithm_names().end()) {
          fail(ErrorCode::usage, "unknown algorithm '" + a + "'");
        }
      }
      cmp_opt.ptas.epsilon = cmp_eps;
      apply_caps(cmp_opt.ptas, cmp_caps);
      std::ostringstream os;
      os << kCompareHeader << "\n";
      for (const auto& path : cmp_insts) {
        const auto inst = read_instance(path);
        const std::string id = std::filesystem::path(path).stem().string();
        const double lb = solve_lb(group_messages(inst), 1.0, inst.channels()).value;
        for (const auto& a : cmp_algs) {
          const auto t0 = std::chrono::steady_clock::now();
          const auto r = run_algorithm(a, inst, cmp_opt);
          const auto c = cost_of(r, inst);
          const double wall =
              cmp_timing ? std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() : 0.0;
          os << id << "," << a << "," << num(lb) << "," << num(c.cost_slot_start()) << "," << num(c.cost) << ","
             << num(c.bc) << "," << num(c.cost / lb) << "," << num(wall) << "," << cmp_opt.seed << "\n";
        }
      }
      write_text(cmp_out, os.str(), out);
    } else if (*rep_cmd) {
      const auto inst = read_instance(rep_inst);
      PtasConfig cfg;
      cfg.epsilon = rep_eps;
      apply_caps(cfg, rep_caps);
      const auto r = ptas(inst, cfg);
      write_text(rep_out, r.report.to_json().dump(2) + "\n", out);
      if (r.report.period > r.report.period_bound) {
        err << "error: period " << r.report.period << " exceeds bound " << r.report.period_bound << "\n";
        return kExitCertificate;
      }
      if (!r.report.all_passed()) {
        for (const auto& c : r.report.certificates) {
          if (!c.passed) err << "error: certificate '" << c.name << "' failed\n";
        }
        return kExitCertificate;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace airdisk::cli
