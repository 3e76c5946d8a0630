#include "remest/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "remest/io.hpp"
#include "remest/policies.hpp"
#include "remest/simulator.hpp"

namespace remest::cli {

namespace fs = std::filesystem;
using io::format_real;

Experiment Experiment::build(const ExperimentConfig& cfg) {
  LtiSystem sys = cfg.build_system();
  HarqModel channel = cfg.build_channel();
  const auto rho = sys.rho_sq();
  if (!rho) throw ConfigError("could not determine rho^2(A): dominant eigenvalue is complex or not unique");
  RiccatiOptions ropts;
  ropts.table_max_index = table_index_for(cfg.mdp.q_max);
  SteadyKalman sk = riccati_steady_state(sys, ropts);
  StabilityReport stab = stability_check(channel, *rho);
  return Experiment{cfg, std::move(sys), std::move(channel), std::move(sk), stab};
}

RviOptions Experiment::rvi_options() const {
  RviOptions o;
  o.tol = config.mdp.tol;
  o.max_iter = config.mdp.max_iter;
  return o;
}

TruncatedMdp Experiment::mse_mdp() const { return build_mdp(kalman, channel, config.mdp.q_max, CostKind::mse); }

PolicyGrid resolve_policy(const Experiment& ex, const std::string& source) {
  const std::size_t q_max = ex.config.mdp.q_max;
  if (source == "optimal") return relative_value_iteration(ex.mse_mdp(), ex.rvi_options()).policy;
  if (source == "myopic") return myopic_policy(ex.kalman, ex.channel, q_max);
  if (source == "delay") return delay_optimal_policy(ex.channel, q_max, ex.rvi_options());
  if (source == "arq") return arq_baseline_policy(q_max);
  if (source == "psi") return psi_policy(q_max);
  std::ifstream in(source);
  if (!in) throw ConfigError("policy file '" + source + "' not found (and not one of optimal, myopic, delay, arq, psi)");
  try {
    return io::read_policy_csv(in, fs::path(source).stem().string());
  } catch (const Error& e) {
    throw ConfigError("policy file '" + source + "': " + e.what());
  }
}

std::size_t threads_from_env() {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("REMEST_THREADS");
  if (env == nullptr) return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return hw;
  return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
}

namespace {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "solver failure: " << e.what() << " (iterations " << e.iterations() << ", residual "
        << format_real(e.residual()) << ")\n";
    return kExitSolver;
  } catch (const SimulationBlowUp& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

bool stability_gate(const Experiment& ex, bool force, std::ostream& err) {
  if (ex.stability.stable || force) return true;
  err << "stability condition fails: (1-lambda') rho^2(A) = " << format_real(ex.stability.product)
      << " >= 1; rerun with --force to solve the truncated model anyway\n";
  return false;
}

fs::path output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
  fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.outputs.directory);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
}

template <class Writer>
void write_with(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  writer(out);
}

bool needs_solver(const std::string& source) { return source == "optimal" || source == "delay" || source == "all"; }

struct SimOutcome {
  SimReport report;
  std::optional<double> analytic_mse;
};

SimOutcome run_simulation(const Experiment& ex, const PolicyGrid& policy, const SimConfig& sc) {
  if (sc.mode == SimMode::trajectory) {
    TrajectoryReport tr = simulate_trajectory(policy, ex.system, ex.channel, ex.kalman, sc);
    return {std::move(tr.empirical), tr.final_analytic_mse};
  }
  return {simulate_chain(policy, ex.channel, ex.kalman, sc), std::nullopt};
}

SimConfig sim_config(const ExperimentConfig& cfg, const RunOptions& opts) {
  SimConfig sc = cfg.build_sim_config();
  if (opts.seed) sc.seed = *opts.seed;
  sc.threads = opts.threads;
  return sc;
}

}  // namespace

int cmd_stability(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LtiSystem sys = cfg.build_system();
    const HarqModel channel = cfg.build_channel();
    const auto rho = sys.rho_sq();
    if (!rho) throw ConfigError("could not determine rho^2(A): dominant eigenvalue is complex or not unique");
    const StabilityReport rep = stability_check(channel, *rho);
    out << "rho^2(A)              " << format_real(rep.rho_sq) << '\n'
        << "lambda'               " << format_real(rep.lambda_prime) << '\n'
        << "(1-lambda') rho^2(A)  " << format_real(rep.product) << '\n'
        << (rep.stable ? "PASS" : "FAIL") << '\n';
    return rep.stable ? kExitOk : kExitUnstable;
  });
}

int cmd_solve(const ExperimentConfig& cfg, CostKind kind, const RunOptions& opts, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const Experiment ex = Experiment::build(cfg);
    if (!stability_gate(ex, opts.force, err)) return static_cast<int>(kExitUnstable);
    const TruncatedMdp mdp =
        kind == CostKind::mse ? ex.mse_mdp() : build_delay_mdp(ex.channel, cfg.mdp.q_max);
    const MdpSolution sol = relative_value_iteration(mdp, ex.rvi_options());

    const fs::path dir = output_dir(cfg, opts);
    const std::string tag(to_string(kind));
    if (cfg.wants("csv")) {
      write_with(dir / ("policy_" + tag + ".csv"), [&](std::ostream& os) { io::write_policy_csv(os, sol.policy); });
      write_with(dir / ("bias_" + tag + ".csv"), [&](std::ostream& os) { io::write_bias_csv(os, mdp.space(), sol.bias); });
    }
    if (cfg.wants("json")) write_file(dir / ("solution_" + tag + ".json"), io::solution_summary_json(sol, kind) + "\n");

    const SwitchingReport sw = verify_switching(sol.policy);
    out << "cost " << tag << "  gain " << format_real(sol.gain) << "  iterations " << sol.iterations
        << "  switching " << (sw.switching ? "yes" : "no") << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& source, const RunOptions& opts, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Experiment ex = Experiment::build(cfg);
    if (needs_solver(source) && !stability_gate(ex, opts.force, err)) return static_cast<int>(kExitUnstable);

    std::vector<PolicyGrid> policies;
    if (source == "all") {
      for (const auto& name : kPolicyNames) policies.push_back(resolve_policy(ex, name));
    } else {
      policies.push_back(resolve_policy(ex, source));
    }

    const SimConfig sc = sim_config(cfg, opts);
    const fs::path dir = output_dir(cfg, opts);
    for (const PolicyGrid& policy : policies) {
      const SimOutcome res = run_simulation(ex, policy, sc);
      if (cfg.wants("csv")) {
        write_with(dir / ("sim_" + policy.label() + ".csv"), [&](std::ostream& os) { io::write_report_csv(os, res.report); });
      }
      if (cfg.wants("json")) {
        write_file(dir / ("sim_" + policy.label() + ".json"),
                   io::report_summary_json(res.report, policy.label(), sc.seed, sc.horizon) + "\n");
      }
      out << policy.label() << "  avg_mse " << format_real(res.report.final_avg_mse) << " +/- "
          << format_real(res.report.mse_half_width95) << "  avg_aoi " << format_real(res.report.final_avg_aoi);
      if (res.analytic_mse) out << "  analytic_mse " << format_real(*res.analytic_mse);
      out << '\n';
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_compare(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Experiment ex = Experiment::build(cfg);
    if (!stability_gate(ex, opts.force, err)) return static_cast<int>(kExitUnstable);

    const TruncatedMdp mdp = ex.mse_mdp();
    const MdpSolution opt = relative_value_iteration(mdp, ex.rvi_options());
    const SimConfig sc = sim_config(cfg, opts);
    const double baseline = cost_of_q(ex.kalman, 0);

    struct Row {
      std::string policy;
      double gain;
      double sim_mse;
      double sim_mse_hw95;
      double sim_aoi;
      bool switching;
    };
    std::vector<Row> rows;
    for (const auto& name : kPolicyNames) {
      const PolicyGrid policy = name == "optimal" ? opt.policy : resolve_policy(ex, name);
      const SimOutcome res = run_simulation(ex, policy, sc);
      rows.push_back({name, evaluate_policy(mdp, policy), res.report.final_avg_mse, res.report.mse_half_width95,
                      res.report.final_avg_aoi, verify_switching(policy).switching});
    }
    const double arq_mse =
        std::find_if(rows.begin(), rows.end(), [](const Row& r) { return r.policy == "arq"; })->sim_mse;

    nlohmann::json table = nlohmann::json::array();
    std::string csv = "policy,gain,sim_mse,sim_mse_hw95,sim_aoi,switching,reduction_raw,reduction_excess\n";
    out << "policy    gain       sim_mse    sim_aoi    switching  red_raw    red_excess\n";
    for (const Row& r : rows) {
      const double red_raw = 1.0 - r.sim_mse / arq_mse;
      const double red_excess = 1.0 - (r.sim_mse - baseline) / (arq_mse - baseline);
      nlohmann::json j{{"policy", r.policy},         {"gain", r.gain},         {"sim_mse", r.sim_mse},
                       {"sim_mse_hw95", r.sim_mse_hw95}, {"sim_aoi", r.sim_aoi},   {"switching", r.switching},
                       {"reduction_raw", red_raw},   {"reduction_excess", red_excess}};
      if (r.policy == "optimal") j["rvi_gain"] = opt.gain;
      table.push_back(std::move(j));
      csv += r.policy + "," + format_real(r.gain) + "," + format_real(r.sim_mse) + "," + format_real(r.sim_mse_hw95) +
             "," + format_real(r.sim_aoi) + "," + (r.switching ? "1" : "0") + "," + format_real(red_raw) + "," +
             format_real(red_excess) + "\n";
      char line[160];
      std::snprintf(line, sizeof line, "%-9s %-10s %-10s %-10s %-10s %-10s %s\n", r.policy.c_str(),
                    format_real(r.gain).c_str(), format_real(r.sim_mse).c_str(), format_real(r.sim_aoi).c_str(),
                    r.switching ? "yes" : "no", format_real(red_raw).c_str(), format_real(red_excess).c_str());
      out << line;
    }

    const fs::path dir = output_dir(cfg, opts);
    if (cfg.wants("csv")) write_file(dir / "compare.csv", csv);
    if (cfg.wants("json")) {
      nlohmann::json doc{{"baseline_mse", baseline}, {"seed", sc.seed}, {"runs", sc.runs},
                         {"horizon", sc.horizon}, {"rows", table}};
      write_file(dir / "compare.json", doc.dump(2) + "\n");
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_verify_policy(const ExperimentConfig& cfg, const std::string& source, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Experiment ex = Experiment::build(cfg);
    const PolicyGrid policy = resolve_policy(ex, source);
    const SwitchingReport rep = verify_switching(policy);
    out << policy.label() << ": " << (rep.switching ? "switching-type" : "NOT switching-type") << " ("
        << rep.violations.size() << " violations, " << policy.count(Action::transmit_new) << " of "
        << policy.space().size() << " states transmit new)\n";
    for (const auto& v : rep.violations) {
      out << "  condition " << (v.condition == 1 ? "(i)" : "(ii)") << ": (" << v.from.r << "," << v.from.q
          << ") -> (" << v.to.r << "," << v.to.q << ")\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transmit-or-retransmit policies for HARQ-based remote estimation", "remest"};
  app.require_subcommand(1);

  std::string config_path;
  bool use_default = false;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool force = false;
  std::string cost = "mse";
  std::string policy = "all";
  std::string verify_source = "optimal";

  auto add_common = [&](CLI::App* sub) {
    auto* cfg_opt = sub->add_option("--config", config_path, "Experiment config (JSON)");
    sub->add_flag("--default", use_default, "Use the built-in reference configuration")->excludes(cfg_opt);
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (overrides outputs.directory)");
    sub->add_option("--seed", seed, "Master seed (overrides sim.seed)");
    sub->add_flag("--force", force, "Skip the stability gate");
  };

  auto* stability = app.add_subcommand("stability", "Check the existence/stability condition");
  add_common(stability);
  auto* solve = app.add_subcommand("solve", "Solve the truncated MDP by relative value iteration");
  add_common(solve);
  add_run(solve);
  solve->add_option("--cost", cost, "Stage cost")->check(CLI::IsMember({"mse", "delay"}));
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo evaluation of policies");
  add_common(simulate);
  add_run(simulate);
  simulate->add_option("--policy", policy, "optimal|myopic|delay|arq|psi|all or a policy CSV path");
  auto* compare = app.add_subcommand("compare", "Solve and simulate every policy, emit a comparison table");
  add_common(compare);
  add_run(compare);
  auto* verify = app.add_subcommand("verify-policy", "Check the switching structure of a policy");
  add_common(verify);
  verify->add_option("--policy", verify_source, "optimal|myopic|delay|arq|psi or a policy CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  ExperimentConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = load_config(config_path);
    } catch (const Error& e) {
      err << "config error: " << e.what() << '\n';
      return kExitUsage;
    }
  }

  RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  for (auto* sub : {solve, simulate, compare}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
  }
  opts.force = force;
  opts.threads = threads_from_env();

  if (stability->parsed()) return cmd_stability(cfg, out, err);
  if (solve->parsed()) return cmd_solve(cfg, parse_cost_kind(cost), opts, out, err);
  if (simulate->parsed()) return cmd_simulate(cfg, policy, opts, out, err);
  if (compare->parsed()) return cmd_compare(cfg, opts, out, err);
  return cmd_verify_policy(cfg, verify_source, out, err);
}

}  // namespace remest::cli
