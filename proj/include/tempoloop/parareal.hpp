#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tempoloop/errors.hpp"
#include "tempoloop/growth.hpp"
#include "tempoloop/growth_table.hpp"
#include "tempoloop/micro.hpp"
#include "tempoloop/twoscale.hpp"

namespace tempoloop {

// Coarse propagator choice.
enum class PararealVariant { standard, reuse, interpolation };

inline const char* to_string(PararealVariant v) {
  switch (v) {
    case PararealVariant::standard: return "standard";
    case PararealVariant::reuse: return "reuse";
    case PararealVariant::interpolation: return "interpolation";
  }
  return "unknown";
}

inline PararealVariant parse_variant(std::string_view name) {
  if (name == "standard") return PararealVariant::standard;
  if (name == "reuse") return PararealVariant::reuse;
  if (name == "interpolation") return PararealVariant::interpolation;
  throw ConfigError("unknown parareal variant '" + std::string(name) +
                    "' (expected standard, reuse or interpolation)");
}

struct PararealConfig {
  int processes = 10;        // P
  double t_end_days = 300.0;
  double dt_fine_days = 0.3;
  double eps_par = 1e-3;     // absolute stop on |c^(k+1)(T_end) - c^(k)(T_end)|
  PararealVariant variant = PararealVariant::standard;
  int max_iterations = 20;
  int force_iterations = 0;  // > 0: run exactly this many, ignore eps_par
  int threads = 1;           // workers for the fine sweep

  // N_l; the horizon must be an integer multiple of the fine step.
  long n_fine_steps() const {
    return std::llround(t_end_days / dt_fine_days);
  }

  // ceil(N_l / P): the longest interval, which sets the parallel makespan.
  long max_interval_steps() const {
    return (n_fine_steps() + processes - 1) / processes;
  }

  void validate() const {
    if (processes < 1) throw ConfigError("PararealConfig: processes must be >= 1");
    if (!(dt_fine_days > 0.0))
      throw ConfigError("PararealConfig: dt_fine_days must be > 0");
    if (!(t_end_days > 0.0))
      throw ConfigError("PararealConfig: t_end_days must be > 0");
    const long n = n_fine_steps();
    if (n < 1 || std::abs(n * dt_fine_days - t_end_days) > 1e-12 * t_end_days)
      throw ConfigError(
          "PararealConfig: t_end_days must be an integer multiple of "
          "dt_fine_days");
    if (n < processes)
      throw ConfigError(
          "PararealConfig: need at least one fine step per process (N_l >= P)");
    if (!(eps_par > 0.0)) throw ConfigError("PararealConfig: eps_par must be > 0");
    if (max_iterations < 1)
      throw ConfigError("PararealConfig: max_iterations must be >= 1");
    if (force_iterations < 0)
      throw ConfigError("PararealConfig: force_iterations must be >= 0");
    if (threads < 1) throw ConfigError("PararealConfig: threads must be >= 1");
  }
};

// Micro problem bookkeeping. serial_equivalent() expresses a run as the
// number of micro problems one process would work through: fine sweeps count
// as their longest interval (everything else runs in parallel), coarse work
// counts in full.
struct CostLedger {
  long fine_micro = 0;              // micro problems across all fine intervals
  long coarse_micro = 0;            // micro problems in coarse propagation
  long fine_serial_equivalent = 0;  // sum over sweeps of the longest interval
  int iterations = 0;               // k_par

  long serial_equivalent() const {
    return fine_serial_equivalent + coarse_micro;
  }

  // Closed-form cost of k iterations at process count p over n fine steps.
  // Standard coarse propagation pays p micro problems for the initialization
  // and p per iteration; the micro-free variants only pay the initialization.
  static long predicted_serial_equivalent(PararealVariant v, int p, int k,
                                          long n) {
    const long per_sweep = (n + p - 1) / p;
    const long coarse =
        (v == PararealVariant::standard) ? static_cast<long>(k + 1) * p : p;
    return static_cast<long>(k) * per_sweep + coarse;
  }
};

// Snapshot taken after each parareal iteration (k = 0 is the coarse
// initialization).
struct IterationRecord {
  int k = 0;
  double c_end = 0.0;           // c at T_end after this iteration
  double stop_residual = 0.0;   // |c^k(T_end) - c^(k-1)(T_end)|, 0 for k = 0
  std::vector<double> interfaces;  // P + 1 interface concentrations
  long fine_micro = 0;          // cumulative ledger state
  long coarse_micro = 0;
  long serial_equivalent = 0;
  std::size_t table_size = 0;   // growth table entries (interpolation)
};

struct PararealResult {
  PararealConfig config;
  bool stopped_by_criterion = false;
  int k_par = 0;
  std::vector<IterationRecord> iterations;  // k = 0 .. k_par
  CostLedger ledger;
  std::vector<TrajectorySegment> final_segments;  // fine sweep of the last k
  GrowthTable table;  // populated by the interpolation variant

  double c_end() const { return iterations.back().c_end; }
  double speedup() const {
    return static_cast<double>(config.n_fine_steps()) /
           static_cast<double>(ledger.serial_equivalent());
  }
  double efficiency() const { return speedup() / config.processes; }
};

// Parareal driver on the macro scale. The fine propagator is the two-scale
// integrator with step dt_fine on each sub-interval; the coarse propagator
// depends on the variant:
//   standard       one two-scale macro step spanning the whole interval
//                  (one micro problem per evaluation),
//   reuse          advance on the fine grid with the growth values stored by
//                  the latest fine sweep, indexed by time step (micro-free),
//   interpolation  advance on the fine grid with growth values interpolated
//                  from the (c_s, gamma_bar) table collected so far, queried
//                  at the running concentration (micro-free).
//
// Each iteration sweeps the fine intervals (in parallel if requested), then
// corrects the interfaces sequentially via
//   c^(k+1)(T_{p+1}) = [ C(c^(k+1)(T_p)) - C(c^k(T_p)) ] + F(c^k(T_p)),
// evaluated in that order: once an interface has converged the bracket is
// exactly zero and the fine value passes through bit for bit, so interfaces
// T_1..T_k reproduce the serial fine solution after k iterations.
//
// Micro states hand over along the time axis: interval p starts from the end
// state that interval p-1 produced in the previous iteration (the
// initialization provides them for the first sweep). The standard coarse
// propagator always warm-starts from the initialization's interface states,
// keeping its cost at exactly one micro problem per evaluation.
class Parareal {
 public:
  Parareal(const PararealConfig& cfg, const MicroPropagator& prop)
      : cfg_(cfg), prop_(prop) {
    cfg_.validate();
    const long n = cfg_.n_fine_steps();
    const int p_count = cfg_.processes;
    // Contiguous fine-index chunks, as equal as possible, longer ones first.
    offsets_.assign(p_count + 1, 0);
    const long base = n / p_count;
    const long remainder = n % p_count;
    for (int p = 0; p < p_count; ++p)
      offsets_[p + 1] = offsets_[p] + base + (p < remainder ? 1 : 0);
  }

  // Coarse serial run over the P intervals: one two-scale macro step each.
  // Produces the k = 0 interface values, the interface micro states used by
  // the first fine sweep and by the standard coarse propagator, and (for the
  // interpolation variant) the first P growth table entries.
  void initialize() {
    const int p_count = cfg_.processes;
    interfaces_.assign(p_count + 1, 0.0);
    init_states_.assign(p_count + 1, MicroState{});
    start_states_.assign(p_count, MicroState{});
    coarse_cache_.assign(p_count, 0.0);
    segments_.clear();
    stored_gammas_.clear();
    table_ = GrowthTable{};
    ledger_ = CostLedger{};

    double c = 0.0;
    MicroState w;  // zero-flow initial state
    interfaces_[0] = c;
    init_states_[0] = w;
    for (int p = 0; p < p_count; ++p) {
      try {
        const MacroGrid step =
            MacroGrid::from_steps(interface_time(p), 1, interval_span_days(p));
        const TrajectorySegment seg = propagate(c, w, step, prop_);
        ledger_.coarse_micro += seg.micro_problems;
        if (cfg_.variant == PararealVariant::interpolation)
          table_.insert(c, seg.gamma_values[0]);
        coarse_cache_[p] = seg.c_end();
        c = seg.c_end();
        w = seg.end_micro_state;
        interfaces_[p + 1] = c;
        init_states_[p + 1] = w;
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "initialization interval p=" << p << ": " << e.what();
        throw ConvergenceError(msg.str());
      }
    }
    for (int p = 0; p < p_count; ++p) start_states_[p] = init_states_[p];

    k_ = 0;
    records_.clear();
    records_.push_back(make_record(0.0));
    initialized_ = true;
  }

  // One parareal iteration: fine sweep, growth value collection, sequential
  // coarse correction. Returns true when the stopping criterion
  // |c^(k+1)(T_end) - c^k(T_end)| < eps_par holds for this iteration.
  bool iterate() {
    if (!initialized_) initialize();
    const int p_count = cfg_.processes;

    fine_sweep();

    if (cfg_.variant == PararealVariant::reuse) {
      stored_gammas_.resize(cfg_.n_fine_steps());
      for (int p = 0; p < p_count; ++p)
        std::copy(segments_[p].gamma_values.begin(),
                  segments_[p].gamma_values.end(),
                  stored_gammas_.begin() + offsets_[p]);
    } else if (cfg_.variant == PararealVariant::interpolation) {
      for (int p = 0; p < p_count; ++p) {
        const TrajectorySegment& seg = segments_[p];
        for (std::size_t q = 0; q < seg.gamma_values.size(); ++q)
          table_.insert(seg.c_values[q], seg.gamma_values[q]);
      }
    }

    // Correction sweep. The difference of the two coarse values is formed
    // first so that identical inputs cancel exactly.
    std::vector<double> corrected(p_count + 1);
    corrected[0] = interfaces_[0];
    for (int p = 0; p < p_count; ++p) {
      try {
        const double coarse_new = coarse_value(p, corrected[p]);
        double coarse_old;
        if (cfg_.variant == PararealVariant::standard) {
          coarse_old = coarse_cache_[p];
          coarse_cache_[p] = coarse_new;
        } else {
          coarse_old = coarse_value(p, interfaces_[p]);
        }
        corrected[p + 1] = (coarse_new - coarse_old) + segments_[p].c_end();
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "coarse interval p=" << p << " (iteration " << k_ + 1
            << "): " << e.what();
        throw ConvergenceError(msg.str());
      }
    }

    const double residual = std::abs(corrected[p_count] - interfaces_[p_count]);
    interfaces_ = std::move(corrected);
    for (int p = 0; p < p_count; ++p)
      start_states_[p] =
          (p == 0) ? init_states_[0] : segments_[p - 1].end_micro_state;

    ++k_;
    ledger_.iterations = k_;
    records_.push_back(make_record(residual));
    return residual < cfg_.eps_par;
  }

  // Full run: initialization plus iterations until the stopping criterion,
  // the iteration cap, or exactly force_iterations when requested.
  PararealResult run() {
    initialize();
    bool stopped = false;
    const int limit =
        cfg_.force_iterations > 0 ? cfg_.force_iterations : cfg_.max_iterations;
    for (int k = 0; k < limit; ++k) {
      const bool criterion = iterate();
      if (cfg_.force_iterations == 0 && criterion) {
        stopped = true;
        break;
      }
      if (cfg_.force_iterations > 0 && k + 1 == cfg_.force_iterations)
        stopped = criterion;
    }

    PararealResult result;
    result.config = cfg_;
    result.stopped_by_criterion = stopped;
    result.k_par = k_;
    result.iterations = records_;
    result.ledger = ledger_;
    result.final_segments = segments_;
    result.table = table_;
    return result;
  }

  int iteration() const { return k_; }
  const std::vector<double>& interface_values() const { return interfaces_; }
  // Micro state each interval starts from in the next fine sweep: the end
  // state its predecessor produced in the latest sweep.
  const std::vector<MicroState>& interval_start_states() const {
    return start_states_;
  }
  const std::vector<TrajectorySegment>& segments() const { return segments_; }
  const CostLedger& ledger() const { return ledger_; }
  const GrowthTable& table() const { return table_; }
  double interface_time(int p) const {
    return offsets_[p] * cfg_.dt_fine_days;
  }

 private:
  double interval_span_days(int p) const {
    return (offsets_[p + 1] - offsets_[p]) * cfg_.dt_fine_days;
  }

  MacroGrid interval_fine_grid(int p) const {
    return MacroGrid::from_steps(interface_time(p),
                                 offsets_[p + 1] - offsets_[p],
                                 cfg_.dt_fine_days);
  }

  // Fine problem on every interval, from the current interface values and the
  // handed-over micro states. Intervals are independent; results are merged
  // by interval index, so the thread count never changes the outcome.
  void fine_sweep() {
    const int p_count = cfg_.processes;
    segments_.assign(p_count, TrajectorySegment{});
    std::vector<std::exception_ptr> failures(p_count);

    auto run_interval = [&](int p) {
      try {
        segments_[p] =
            propagate(interfaces_[p], start_states_[p], interval_fine_grid(p),
                      prop_);
      } catch (...) {
        failures[p] = std::current_exception();
      }
    };

    const int workers = std::min<int>(cfg_.threads, p_count);
    if (workers <= 1) {
      for (int p = 0; p < p_count; ++p) run_interval(p);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int t = 0; t < workers; ++t)
        pool.emplace_back([&]() {
          for (int p = next.fetch_add(1); p < p_count; p = next.fetch_add(1))
            run_interval(p);
        });
      for (std::thread& t : pool) t.join();
    }

    for (int p = 0; p < p_count; ++p) {
      if (failures[p]) {
        try {
          std::rethrow_exception(failures[p]);
        } catch (const std::exception& e) {
          std::ostringstream msg;
          msg << "fine interval p=" << p << " (iteration " << k_ + 1
              << "): " << e.what();
          throw ConvergenceError(msg.str());
        }
      }
      ledger_.fine_micro += segments_[p].micro_problems;
    }
    ledger_.fine_serial_equivalent += cfg_.max_interval_steps();
  }

  // Coarse propagation of interval p from concentration c.
  double coarse_value(int p, double c) {
    switch (cfg_.variant) {
      case PararealVariant::standard: {
        const MacroGrid step =
            MacroGrid::from_steps(interface_time(p), 1, interval_span_days(p));
        const TrajectorySegment seg =
            propagate(c, init_states_[p], step, prop_);
        ledger_.coarse_micro += seg.micro_problems;
        return seg.c_end();
      }
      case PararealVariant::reuse: {
        // Stored growth values are indexed by time step, so this propagator
        // is a fixed shift of c: micro-free and independent of the input
        // trajectory.
        FoamCellState state{c, interface_time(p)};
        for (long j = offsets_[p]; j < offsets_[p + 1]; ++j)
          state = macro_euler_step(state, stored_gammas_[j], cfg_.dt_fine_days);
        return state.c_s;
      }
      case PararealVariant::interpolation: {
        // Growth values follow the running concentration, making the sweep
        // self-consistent in c.
        FoamCellState state{c, interface_time(p)};
        const long steps = offsets_[p + 1] - offsets_[p];
        for (long j = 0; j < steps; ++j)
          state = macro_euler_step(state, table_.interpolate(state.c_s),
                                   cfg_.dt_fine_days);
        return state.c_s;
      }
    }
    throw ConfigError("coarse_value: unknown variant");
  }

  IterationRecord make_record(double residual) const {
    IterationRecord rec;
    rec.k = k_;
    rec.c_end = interfaces_.back();
    rec.stop_residual = residual;
    rec.interfaces = interfaces_;
    rec.fine_micro = ledger_.fine_micro;
    rec.coarse_micro = ledger_.coarse_micro;
    rec.serial_equivalent = ledger_.serial_equivalent();
    rec.table_size = table_.size();
    return rec;
  }

  PararealConfig cfg_;
  const MicroPropagator& prop_;
  std::vector<long> offsets_;  // fine-index boundaries, size P + 1

  bool initialized_ = false;
  int k_ = 0;
  std::vector<double> interfaces_;        // current iterate, size P + 1
  std::vector<MicroState> init_states_;   // initialization states at T_p
  std::vector<MicroState> start_states_;  // fine start states, size P
  std::vector<TrajectorySegment> segments_;
  std::vector<double> coarse_cache_;      // standard: C(c^k(T_p)) from last sweep
  std::vector<double> stored_gammas_;     // reuse: gamma per fine step
  GrowthTable table_;                     // interpolation
  CostLedger ledger_;
  std::vector<IterationRecord> records_;
};

// Convenience wrapper.
inline PararealResult run_parareal(const PararealConfig& cfg,
                                   const MicroPropagator& prop) {
  Parareal driver(cfg, prop);
  return driver.run();
}

// Continuous cost model k n / P + P of the micro-free variants, minimized
// over integer P (ties toward smaller P). The minimizer sits near
// sqrt(k n).
inline double parareal_cost_continuous(int k, long n, int p) {
  return static_cast<double>(k) * static_cast<double>(n) / p + p;
}

inline double optimal_process_estimate(int k, long n) {
  return std::sqrt(static_cast<double>(k) * static_cast<double>(n));
}

inline int optimal_process_count(int k, long n, int p_min = 1,
                                 int p_max = 200) {
  int best = p_min;
  double best_cost = parareal_cost_continuous(k, n, p_min);
  for (int p = p_min + 1; p <= p_max; ++p) {
    const double cost = parareal_cost_continuous(k, n, p);
    if (cost < best_cost) {
      best = p;
      best_cost = cost;
    }
  }
  return best;
}

// Per-iteration diagnostics, one row per (P, k). Efficiency is the fraction
// speedup / P.
inline void write_iteration_csv(std::ostream& out, const PararealResult& result,
                                double c_star) {
  out << "k,P,variant,error_vs_serial,fine_micro,coarse_micro,"
         "serial_equivalent,speedup,efficiency\n";
  const long n = result.config.n_fine_steps();
  char buf[64];
  for (const IterationRecord& rec : result.iterations) {
    if (rec.k == 0) continue;
    const double speedup =
        static_cast<double>(n) / static_cast<double>(rec.serial_equivalent);
    out << rec.k << ',' << result.config.processes << ','
        << to_string(result.config.variant) << ',';
    std::snprintf(buf, sizeof(buf), "%.6e", std::abs(rec.c_end - c_star));
    out << buf << ',' << rec.fine_micro << ',' << rec.coarse_micro << ','
        << rec.serial_equivalent << ',';
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g", speedup,
                  speedup / result.config.processes);
    out << buf << "\n";
  }
}

}  // namespace tempoloop
