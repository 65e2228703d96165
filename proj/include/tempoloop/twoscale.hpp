#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "tempoloop/errors.hpp"
#include "tempoloop/growth.hpp"
#include "tempoloop/micro.hpp"

namespace tempoloop {

// Uniform macro time grid.
struct MacroGrid {
  double t_start = 0.0;  // days
  double t_end = 0.0;    // days
  double dt = 0.0;       // days
  long n_steps = 0;

  // Grid over [t_start, t_end]; the span must be an integer multiple of dt.
  static MacroGrid over(double t_start, double t_end, double dt) {
    if (!(dt > 0.0)) throw ConfigError("MacroGrid: dt must be > 0");
    const double span = t_end - t_start;
    if (span < 0.0) throw ConfigError("MacroGrid: t_end must be >= t_start");
    const long n = std::llround(span / dt);
    if (std::abs(n * dt - span) > 1e-12 * std::max(1.0, std::abs(span)))
      throw ConfigError("MacroGrid: span must be an integer multiple of dt");
    return MacroGrid{t_start, t_end, dt, n};
  }

  static MacroGrid from_steps(double t_start, long n_steps, double dt) {
    if (!(dt > 0.0)) throw ConfigError("MacroGrid: dt must be > 0");
    if (n_steps < 0) throw ConfigError("MacroGrid: n_steps must be >= 0");
    return MacroGrid{t_start, t_start + n_steps * dt, dt, n_steps};
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("MacroGrid: dt must be > 0");
    if (n_steps < 0) throw ConfigError("MacroGrid: n_steps must be >= 0");
  }
};

// Trajectory of the foam cell concentration over one macro interval,
// including the growth values that produced it and the micro solve costs.
struct TrajectorySegment {
  std::vector<double> times;         // days, n_steps + 1 entries
  std::vector<double> c_values;      // n_steps + 1 entries, non-decreasing
  std::vector<double> gamma_values;  // 1/s; gamma_values[n] advanced c_n
  std::vector<int> cycles_used;      // micro cycles behind gamma_values[n]
  MicroState end_micro_state;
  long micro_problems = 0;  // periodic micro solves (one per macro step)
  long micro_cycles = 0;    // total cycles across those solves

  double c_end() const { return c_values.back(); }
};

// Two-scale integration of the growth ODE over one macro grid: each macro
// step solves a periodic micro problem at the current concentration, then
// advances c with the averaged growth rate (forward Euler). The micro state
// chains through all steps, so consecutive solves start warm. Splitting an
// interval in two and chaining (c, micro state) reproduces the one-shot run
// bit for bit.
inline TrajectorySegment propagate(double c0, const MicroState& w0,
                                   const MacroGrid& grid,
                                   const MicroPropagator& prop) {
  grid.validate();
  if (c0 < 0.0) throw std::domain_error("propagate: c0 must be >= 0");
  if (c0 >= 1.0) throw LumenClosureError(c0);

  TrajectorySegment seg;
  seg.times.reserve(grid.n_steps + 1);
  seg.c_values.reserve(grid.n_steps + 1);
  seg.gamma_values.reserve(grid.n_steps);
  seg.cycles_used.reserve(grid.n_steps);
  seg.times.push_back(grid.t_start);
  seg.c_values.push_back(c0);
  seg.end_micro_state = w0;

  FoamCellState state{c0, grid.t_start};
  MicroState w = w0;
  for (long n = 0; n < grid.n_steps; ++n) {
    const PeriodicAverageResult micro = periodic_average(prop, w, state.c_s);
    w = micro.end_state;
    state = macro_euler_step(state, micro.growth.gamma_bar, grid.dt);

    seg.times.push_back(state.t);
    seg.c_values.push_back(state.c_s);
    seg.gamma_values.push_back(micro.growth.gamma_bar);
    seg.cycles_used.push_back(micro.growth.cycles_used);
    seg.micro_cycles += micro.growth.cycles_used;
  }
  seg.end_micro_state = w;
  seg.micro_problems = grid.n_steps;
  return seg;
}

// Serial reference: the two-scale algorithm over the whole horizon with the
// fine step, starting from zero concentration and zero flow. Its end value is
// the baseline for all error and speedup reporting; its micro problem count
// is the number of fine steps.
inline TrajectorySegment serial_reference(const MicroPropagator& prop,
                                          double t_end_days, double dt_days) {
  return propagate(0.0, MicroState{}, MacroGrid::over(0.0, t_end_days, dt_days),
                   prop);
}

// Columns: t_days, c_s, gamma_bar, cycles_used. The growth columns of a row
// belong to the step that produced the row's concentration; the initial row
// has none.
inline void write_trajectory_csv(std::ostream& out,
                                 const TrajectorySegment& seg) {
  out << "t_days,c_s,gamma_bar,cycles_used\n";
  char buf[96];
  for (std::size_t n = 0; n < seg.c_values.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", seg.times[n],
                  seg.c_values[n]);
    out << buf;
    if (n == 0) {
      out << ",,\n";
    } else {
      std::snprintf(buf, sizeof(buf), ",%.17g,%d", seg.gamma_values[n - 1],
                    seg.cycles_used[n - 1]);
      out << buf << "\n";
    }
  }
}

}  // namespace tempoloop
