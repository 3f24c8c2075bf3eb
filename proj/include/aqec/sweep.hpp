#pragma once

// Amplitude-damping sweep over a code: one row per damping strength with the
// uncorrected distance, the estimate delta, the distance achieved by the
// constructed recovery and the KL residual.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "aqec/correctability.hpp"
#include "aqec/recovery.hpp"

namespace aqec {

struct SweepRow {
  double gamma = 0.0;
  double d_uncorrected = 0.0;
  double delta = 0.0;
  double d_near_optimal = 0.0;
  double epsilon_kl = 0.0;
  double seconds = 0.0;
};

struct SweepConfig {
  double gamma_min = 0.01;
  double gamma_max = 0.5;
  int steps = 25;
  MinimizeConfig minimize{};
  int threads = 0;  // 0: AQEC_THREADS, else hardware concurrency
};

/// Log-spaced grid; linear when gamma_min = 0. steps = 1 yields {gamma_min}.
inline std::vector<double> gamma_grid(double gamma_min, double gamma_max, int steps) {
  if (!(gamma_min >= 0.0 && gamma_min < gamma_max && gamma_max <= 1.0) || steps < 1) {
    throw Error("bad-range", "need 0 <= gamma-min < gamma-max <= 1 and steps >= 1");
  }
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    g[static_cast<std::size_t>(i)] = gamma_min == 0.0 ? gamma_min + t * (gamma_max - gamma_min)
                                                      : std::exp(std::log(gamma_min) + t * (std::log(gamma_max) - std::log(gamma_min)));
  }
  g.back() = gamma_max;
  return g;
}

inline int sweep_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AQEC_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Row for one gamma. The uncorrected distance is that of a single bare
/// qubit under amplitude damping.
inline SweepRow sweep_row(const CodeIsometry& code, double gamma, const MinimizeConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(code.dim_physical()))));
  if ((Index{1} << n) != code.dim_physical()) throw Error("bad-dims", "sweep needs a qubit code");
  const Channel ad = noise::amplitude_damping(gamma);
  const Channel physical = tensor_power(ad, n);
  SweepRow row;
  row.gamma = gamma;
  row.d_uncorrected = bures_distance(ad, Channel::identity_channel(2), cfg);
  const NearOptimalRecovery r = near_optimal_recovery(encoded(code, physical), std::nullopt, std::nullopt, cfg);
  if (!r.check.passes) throw Error("guarantee-violated", "constructed recovery exceeds delta at gamma = " + std::to_string(gamma));
  row.delta = r.estimate.delta;
  row.d_near_optimal = r.check.achieved_distance;
  row.epsilon_kl = kl_residual(code, physical, std::nullopt, cfg).epsilon;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

/// Rows in grid order regardless of which worker finishes first.
inline std::vector<SweepRow> sweep(const CodeIsometry& code, const SweepConfig& cfg) {
  const std::vector<double> grid = gamma_grid(cfg.gamma_min, cfg.gamma_max, cfg.steps);
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = sweep_row(code, grid[i], cfg.minimize);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(sweep_threads(cfg.threads), static_cast<int>(grid.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

inline constexpr const char* sweep_csv_header = "gamma,d_uncorrected,delta,d_near_optimal,epsilon_kl,seconds";

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// `with_timing = false` writes 0 in the seconds column so the file is reproducible.
inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool with_timing = true) {
  out << sweep_csv_header << '\n';
  for (const SweepRow& r : rows) {
    out << format_number(r.gamma) << ',' << format_number(r.d_uncorrected) << ',' << format_number(r.delta) << ','
        << format_number(r.d_near_optimal) << ',' << format_number(r.epsilon_kl) << ',' << format_number(with_timing ? r.seconds : 0.0)
        << '\n';
  }
}

/// gnuplot script drawing the distance columns of `csv_path` on log-log axes.
inline void write_plot_script(std::ostream& out, const std::string& csv_path, const std::string& image_path) {
  out << "set datafile separator ','\n"
      << "set terminal pngcairo size 800,600\n"
      << "set output '" << image_path << "'\n"
      << "set logscale xy\n"
      << "set xlabel 'gamma'\n"
      << "set ylabel 'distance'\n"
      << "set key left top\n"
      << "plot '" << csv_path << "' using 1:2 skip 1 with lines dt 3 title 'uncorrected', \\\n"
      << "     '' using 1:3 skip 1 with lines dt 2 title 'delta', \\\n"
      << "     '' using 1:4 skip 1 with lines dt 1 title 'constructed recovery', \\\n"
      << "     '' using 1:5 skip 1 with points title 'KL residual'\n";
}

}  // namespace aqec
