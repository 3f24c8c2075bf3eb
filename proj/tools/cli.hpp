#pragma once

// The aqec command-line front end, callable in-process so tests can drive it.
//
// Exit codes: 0 success, 1 unexpected failure, 2 parse error, 3 dimension or
// range error, 4 guarantee violated.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aqec/aqec.hpp"
#include "aqec/json_io.hpp"

namespace aqec::cli {

enum Exit : int { ok = 0, failure = 1, parse_error = 2, range_error = 3, guarantee_violated = 4 };

inline int exit_code_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "parse" || c == "io") return parse_error;
  if (c == "guarantee-violated") return guarantee_violated;
  return range_error;
}

inline CodeIsometry builtin_code(const std::string& name) {
  if (name == "leung") return codes::leung_code();
  if (name == "bit-flip") return codes::bit_flip_code();
  if (name == "five-qubit") return codes::five_qubit_code();
  throw Error("parse", "unknown code '" + name + "' (leung, bit-flip, five-qubit)");
}

/// Built-in name or path to a code file.
inline CodeIsometry load_code(const std::string& name) {
  if (name == "leung" || name == "bit-flip" || name == "five-qubit") return builtin_code(name);
  return io::code_from_json(io::read_file(name));
}

inline Channel builtin_noise(const std::string& kind, double param, int qubits) {
  if (qubits < 1) throw Error("bad-param", "--qubits must be positive");
  if (kind == "amplitude-damping") return tensor_power(noise::amplitude_damping(param), qubits);
  if (kind == "depolarizing") return tensor_power(noise::depolarizing(param), qubits);
  if (kind == "bit-flip") return tensor_power(noise::bit_flip(param), qubits);
  if (kind == "phase-flip") return tensor_power(noise::phase_flip(param), qubits);
  if (kind == "single-x") return noise::single_x_errors(qubits, param);
  if (kind == "single-pauli") return noise::uniform_single_qubit_paulis(qubits);
  throw Error("parse", "unknown channel kind '" + kind + "'");
}

inline std::optional<DensityMatrix> load_state(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return io::state_from_json(io::read_file(path));
}

struct Flags {
  // check
  std::string code_file;
  std::string channel_file;
  std::string sigma_file;
  double kl_tol = 1e-9;
  // estimate / recover
  std::string estimate_code;
  int starts = 16;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string tau_file;
  std::string out_file;
  // scan-gamma
  double gamma_min = 0.01;
  double gamma_max = 0.5;
  int steps = 25;
  std::string sweep_code = "leung";
  std::string sweep_out = "sweep.csv";
  std::string plot_file;
  bool no_timing = false;
  int threads = 0;
  // theorem1
  int dim = 2;
  int kraus = 2;
  int instances = 10;
  int restarts = 4;
  int rounds = 60;
  // export
  std::string export_what;
  std::string export_name;
  double export_param = 0.1;
  int export_qubits = 1;
  std::string export_code;
};

inline MinimizeConfig minimize_config(const Flags& f) {
  MinimizeConfig cfg;
  cfg.random_starts = f.starts;
  cfg.seed = f.seed;
  cfg.tol = f.tol;
  return cfg;
}

inline int cmd_check(const Flags& f, std::ostream& out) {
  const CodeIsometry code = load_code(f.code_file);
  const Channel noise = io::channel_from_json(io::read_file(f.channel_file));
  const KLExactResult exact = kl_check_exact(code, noise, f.kl_tol);
  const KLReport report = kl_residual(code, noise, load_state(f.sigma_file));
  io::json j = io::to_json(report);
  j["exact"] = exact.passes;
  j["max_residual"] = exact.max_residual;
  out << j.dump(2) << '\n';
  return ok;
}

inline Channel load_estimate_channel(const Flags& f) {
  const Channel c = io::channel_from_json(io::read_file(f.channel_file));
  if (f.estimate_code.empty()) return c;
  return encoded(load_code(f.estimate_code), c);
}

inline int cmd_estimate(const Flags& f, std::ostream& out) {
  const Channel n = load_estimate_channel(f);
  const RecoveryEstimate est = delta_estimate_id(n, load_state(f.sigma_file), minimize_config(f));
  out << io::to_json(est).dump(2) << '\n';
  return ok;
}

inline int cmd_recover(const Flags& f, std::ostream& out, std::ostream& err) {
  const Channel n = load_estimate_channel(f);
  const NearOptimalRecovery r = near_optimal_recovery(n, load_state(f.sigma_file), load_state(f.tau_file), minimize_config(f));
  io::json report = {{"estimate", io::to_json(r.estimate)}, {"guarantee", io::to_json(r.check)}};
  if (!r.check.passes) {
    out << report.dump(2) << '\n';
    err << "guarantee-violated: achieved distance " << r.check.achieved_distance << " exceeds delta " << r.estimate.delta << '\n';
    return guarantee_violated;
  }
  if (!f.out_file.empty()) {
    io::write_file(f.out_file, io::to_json(r.recovery));
    report["recovery_file"] = f.out_file;
  }
  out << report.dump(2) << '\n';
  return ok;
}

inline int cmd_scan_gamma(const Flags& f, std::ostream& out) {
  SweepConfig cfg;
  cfg.gamma_min = f.gamma_min;
  cfg.gamma_max = f.gamma_max;
  cfg.steps = f.steps;
  cfg.threads = f.threads;
  cfg.minimize = minimize_config(f);
  gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.steps);  // validates before any work
  const CodeIsometry code = load_code(f.sweep_code);
  const std::vector<SweepRow> rows = sweep(code, cfg);
  if (f.sweep_out == "-") {
    write_sweep_csv(out, rows, !f.no_timing);
  } else {
    std::ofstream csv(f.sweep_out, std::ios::binary);
    if (!csv) throw Error("io", "cannot write " + f.sweep_out);
    write_sweep_csv(csv, rows, !f.no_timing);
    out << "wrote " << rows.size() << " rows to " << f.sweep_out << '\n';
  }
  if (!f.plot_file.empty()) {
    std::ofstream gp(f.plot_file, std::ios::binary);
    if (!gp) throw Error("io", "cannot write " + f.plot_file);
    const std::string stem = f.sweep_out.substr(0, f.sweep_out.rfind('.'));
    write_plot_script(gp, f.sweep_out, stem + ".png");
    out << "wrote plot script " << f.plot_file << '\n';
  }
  return ok;
}

inline int cmd_theorem1(const Flags& f, std::ostream& out) {
  if (f.dim < 1 || f.kraus < 1 || f.instances < 0) throw Error("bad-param", "--dim and --kraus must be positive, --instances non-negative");
  if (static_cast<Index>(f.dim) * f.kraus < f.dim) throw Error("bad-param", "too few Kraus operators");
  random::Rng rng(f.seed);
  const Channel id = Channel::identity_channel(f.dim);
  const Channel trace = trace_channel(f.dim);
  out << "instance,primal,dual,gap\n";
  double max_gap = 0.0;
  for (int i = 0; i < f.instances; ++i) {
    const Channel n = random::channel(rng, f.dim, f.dim, f.kraus);
    oracles::SeesawConfig sc;
    sc.seed = f.seed + static_cast<std::uint64_t>(i);
    sc.restarts = f.restarts;
    sc.rounds = f.rounds;
    const oracles::Theorem1Gap g = oracles::theorem1_gap(n, id, trace, sc);
    max_gap = std::max(max_gap, g.gap);
    out << i << ',' << format_number(g.primal) << ',' << format_number(g.dual) << ',' << format_number(g.gap) << '\n';
  }
  out << "max_gap," << format_number(max_gap) << '\n';
  return ok;
}

inline int cmd_export(const Flags& f, std::ostream& out) {
  io::json j;
  if (f.export_what == "code") {
    j = io::to_json(builtin_code(f.export_name));
  } else {
    Channel c = builtin_noise(f.export_name, f.export_param, f.export_qubits);
    if (!f.export_code.empty()) c = encoded(load_code(f.export_code), c);
    j = io::to_json(c);
  }
  if (f.out_file.empty()) {
    out << j.dump(2) << '\n';
  } else {
    io::write_file(f.out_file, j);
  }
  return ok;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Flags f;
  CLI::App app{"Approximate quantum error correction toolkit"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Knill-Laflamme analysis of a code under a noise channel");
  check->add_option("code", f.code_file, "code file or built-in name")->required();
  check->add_option("channel", f.channel_file, "physical noise channel file")->required();
  check->add_option("--sigma", f.sigma_file, "physical-space state file for the residual");
  check->add_option("--tol", f.kl_tol, "tolerance of the exact condition");

  auto add_estimate_flags = [&](CLI::App* cmd) {
    cmd->add_option("channel", f.channel_file, "channel file (logical -> physical)")->required();
    cmd->add_option("--code", f.estimate_code, "encode with this code first");
    cmd->add_option("--sigma", f.sigma_file, "input-space state file");
    cmd->add_option("--starts", f.starts, "random starts of the state search")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--tol", f.tol, "step tolerance of the state search");
  };
  auto* estimate = app.add_subcommand("estimate", "Estimate the optimal recovery distance");
  add_estimate_flags(estimate);
  auto* recover = app.add_subcommand("recover", "Construct a near-optimal recovery channel");
  add_estimate_flags(recover);
  recover->add_option("--tau", f.tau_file, "logical state used for the completion");
  recover->add_option("--out", f.out_file, "recovery channel output file");

  auto* scan = app.add_subcommand("scan-gamma", "Sweep amplitude-damping strength over a code");
  scan->add_option("--gamma-min", f.gamma_min);
  scan->add_option("--gamma-max", f.gamma_max);
  scan->add_option("--steps", f.steps);
  scan->add_option("--code", f.sweep_code, "code file or built-in name");
  scan->add_option("--out", f.sweep_out, "CSV output ('-' for stdout)");
  scan->add_option("--plot", f.plot_file, "also write a gnuplot script here");
  scan->add_flag("--no-timing", f.no_timing, "write 0 in the seconds column");
  scan->add_option("--threads", f.threads, "worker threads (default AQEC_THREADS or all cores)");
  scan->add_option("--starts", f.starts)->check(CLI::NonNegativeNumber);
  scan->add_option("--seed", f.seed);
  scan->add_option("--tol", f.tol);

  auto* thm = app.add_subcommand("theorem1", "Primal/dual optimal-recovery gap on random channels");
  thm->add_option("--dim", f.dim);
  thm->add_option("--kraus", f.kraus);
  thm->add_option("--instances", f.instances);
  thm->add_option("--seed", f.seed);
  thm->add_option("--restarts", f.restarts);
  thm->add_option("--rounds", f.rounds);

  auto* exp = app.add_subcommand("export", "Write built-in codes and channels as JSON");
  exp->add_option("what", f.export_what, "code | channel")->required()->check(CLI::IsMember({"code", "channel"}));
  exp->add_option("name", f.export_name,
                  "code: leung | bit-flip | five-qubit; channel: amplitude-damping | depolarizing | bit-flip | phase-flip | single-x | single-pauli")
      ->required();
  exp->add_option("--param", f.export_param, "noise parameter");
  exp->add_option("--qubits", f.export_qubits, "number of qubits");
  exp->add_option("--code", f.export_code, "compose the channel with this code's encoding");
  exp->add_option("--out", f.out_file, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? ok : parse_error;
  }

  try {
    if (*check) return cmd_check(f, out);
    if (*estimate) return cmd_estimate(f, out);
    if (*recover) return cmd_recover(f, out, err);
    if (*scan) return cmd_scan_gamma(f, out);
    if (*thm) return cmd_theorem1(f, out);
    if (*exp) return cmd_export(f, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}

}  // namespace aqec::cli
