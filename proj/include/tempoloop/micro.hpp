#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "tempoloop/errors.hpp"
#include "tempoloop/growth.hpp"

namespace tempoloop {

// State of the fast-scale problem, handed from one cycle to the next and
// across parareal intervals.
struct MicroState {
  double v = 0.0;    // flow state of the surrogate channel
  double tau = 0.0;  // phase within the pulsation cycle, seconds
};

// Text form round-trips bit for bit (17 significant digits reproduce an IEEE
// double exactly).
inline std::string serialize(const MicroState& w) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g", w.v, w.tau);
  return buf;
}

inline MicroState deserialize_micro_state(const std::string& text) {
  MicroState w;
  std::istringstream in(text);
  if (!(in >> w.v >> w.tau))
    throw ConfigError("MicroState: cannot parse '" + text + "'");
  return w;
}

// Configuration of the fast-scale solver.
struct MicroConfig {
  double delta_tau = 0.02;    // micro time step, s
  double cycle_length = 1.0;  // one pulsation period, s
  double lambda = 6.5;        // relaxation rate of the channel flow, 1/s
  double v_mean = 1.0;        // inflow scale
  double sigma_scale = 1.0;   // wall shear per unit velocity at c_s = 0
  double eps_p = 1e-3;        // relative periodicity tolerance
  int max_cycles = 20;        // cap on cycles per periodic solve

  // N_s; cycle_length must be an integer multiple of delta_tau.
  int steps_per_cycle() const {
    return static_cast<int>(std::llround(cycle_length / delta_tau));
  }

  void validate() const {
    if (!(delta_tau > 0.0))
      throw ConfigError("MicroConfig: delta_tau must be > 0");
    if (!(cycle_length > 0.0))
      throw ConfigError("MicroConfig: cycle_length must be > 0");
    const int n = steps_per_cycle();
    if (n < 1 || std::abs(n * delta_tau - cycle_length) > 1e-12 * cycle_length)
      throw ConfigError(
          "MicroConfig: cycle_length must be an integer multiple of "
          "delta_tau");
    if (!(lambda > 0.0)) throw ConfigError("MicroConfig: lambda must be > 0");
    if (!(v_mean > 0.0)) throw ConfigError("MicroConfig: v_mean must be > 0");
    if (!(sigma_scale > 0.0))
      throw ConfigError("MicroConfig: sigma_scale must be > 0");
    if (!(eps_p > 0.0)) throw ConfigError("MicroConfig: eps_p must be > 0");
    if (max_cycles < 1)
      throw ConfigError("MicroConfig: max_cycles must be >= 1");
  }
};

// Cycle-averaged growth rate together with the micro solve metadata.
struct AveragedGrowth {
  double gamma_bar = 0.0;        // 1/s
  int cycles_used = 0;           // cycles run until the periodicity criterion
  int micro_problems_solved = 0; // equals cycles_used
};

// Pulsating inflow, v_in(tau) = v_mean (1 + sin(2 pi tau / cycle_length)).
// Periodic with period cycle_length and nonnegative.
inline double inflow(double tau, const MicroConfig& cfg) {
  if (tau < 0.0) throw std::domain_error("inflow: tau must be >= 0");
  return cfg.v_mean *
         (1.0 + std::sin(2.0 * std::numbers::pi * tau / cfg.cycle_length));
}

// Wall shear magnitude in the narrowed channel. The plaque reduces the lumen
// half-width by c_s, and at fixed flux the shear scales with v / width^2, so
// it grows both with the flow and with the occlusion.
inline WallShearMagnitude wall_shear(double v, double c_s,
                                     const MicroConfig& cfg) {
  if (v < 0.0) throw std::domain_error("wall_shear: v must be >= 0");
  if (c_s < 0.0) throw std::domain_error("wall_shear: c_s must be >= 0");
  if (c_s >= 1.0) throw LumenClosureError(c_s);
  const double width = 1.0 - c_s;
  return WallShearMagnitude{cfg.sigma_scale * v / (width * width)};
}

// Result of one cycle of the fast problem.
struct CycleResult {
  MicroState end_state;
  double gamma_candidate = 0.0;  // growth rate averaged over this cycle, 1/s
};

// Interface of the fast-scale solver: advance one pulsation cycle at frozen
// concentration and report the cycle-averaged growth rate. A full
// flow-structure solver could implement this; the shipped implementation is
// SurrogatePropagator.
class MicroPropagator {
 public:
  virtual ~MicroPropagator() = default;

  virtual CycleResult run_cycle(const MicroState& w0, double c_s) const = 0;
  virtual const MicroConfig& config() const = 0;
  virtual const GrowthParams& growth() const = 0;
};

struct PeriodicAverageResult {
  AveragedGrowth growth;
  MicroState end_state;
};

// Runs cycles of the fast problem, chaining each end state into the next
// start, until the relative change of the growth candidate between two
// consecutive cycles drops below eps_p. At least two cycles always run (the
// criterion needs two candidates). Returns the last candidate and the final
// state, which warm-starts the next macro step.
inline PeriodicAverageResult periodic_average(const MicroPropagator& prop,
                                              const MicroState& w0,
                                              double c_s) {
  const MicroConfig& cfg = prop.config();
  MicroState w = w0;
  double prev_candidate = 0.0;
  double residual = 0.0;
  for (int r = 1; r <= cfg.max_cycles; ++r) {
    const CycleResult cycle = prop.run_cycle(w, c_s);
    w = cycle.end_state;
    if (r >= 2) {
      residual = std::abs(cycle.gamma_candidate - prev_candidate) /
                 std::abs(cycle.gamma_candidate);
      if (residual < cfg.eps_p) {
        AveragedGrowth result;
        result.gamma_bar = cycle.gamma_candidate;
        result.cycles_used = r;
        result.micro_problems_solved = r;
        return {result, w};
      }
    }
    prev_candidate = cycle.gamma_candidate;
  }
  std::ostringstream msg;
  msg << "periodic_average: no periodic state after " << cfg.max_cycles
      << " cycles at c_s = " << c_s << " (last relative residual " << residual
      << ", tolerance " << cfg.eps_p << ")";
  throw ConvergenceError(msg.str());
}

// Scalar relaxation model of the pulsating channel flow,
//   dv/dtau = -lambda (v - v_in(tau)),
// integrated with backward Euler at step delta_tau. The flow relaxes to a
// periodic orbit at rate lambda, so a cold start reaches the periodicity
// tolerance within a few cycles and a warm start confirms in two. The growth
// candidate of a cycle is the discrete average of growth_rate over the N_s
// states of that cycle.
class SurrogatePropagator : public MicroPropagator {
 public:
  using Forcing = std::function<double(double)>;

  SurrogatePropagator(MicroConfig cfg, GrowthParams gp)
      : cfg_(cfg), gp_(gp) {
    cfg_.validate();
    gp_.validate();
    forcing_ = [this](double tau) { return inflow(tau, cfg_); };
  }

  // Custom forcing replaces the pulsating inflow (used by tests; e.g. a
  // constant forcing makes v = v_mean an exact fixed point).
  SurrogatePropagator(MicroConfig cfg, GrowthParams gp, Forcing forcing)
      : cfg_(cfg), gp_(gp), forcing_(std::move(forcing)) {
    cfg_.validate();
    gp_.validate();
  }

  CycleResult run_cycle(const MicroState& w0, double c_s) const override {
    if (!std::isfinite(w0.v))
      throw std::domain_error("run_cycle: micro state must be finite");
    if (c_s < 0.0) throw std::domain_error("run_cycle: c_s must be >= 0");
    if (c_s >= 1.0) throw LumenClosureError(c_s);

    const int n = cfg_.steps_per_cycle();
    const double weight = cfg_.lambda * cfg_.delta_tau;
    double v = w0.v;
    double gamma_sum = 0.0;
    for (int m = 1; m <= n; ++m) {
      const double tau_m = w0.tau + m * cfg_.delta_tau;
      v = (v + weight * forcing_(tau_m)) / (1.0 + weight);
      gamma_sum += growth_rate(wall_shear(v, c_s, cfg_), c_s, gp_);
    }

    CycleResult result;
    result.end_state.v = v;
    result.end_state.tau = w0.tau;  // a full cycle returns to the same phase
    result.gamma_candidate = gamma_sum / n;
    return result;
  }

  const MicroConfig& config() const override { return cfg_; }
  const GrowthParams& growth() const override { return gp_; }

 private:
  MicroConfig cfg_;
  GrowthParams gp_;
  Forcing forcing_;
};

}  // namespace tempoloop
