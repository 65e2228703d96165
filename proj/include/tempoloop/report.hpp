#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "tempoloop/config.hpp"
#include "tempoloop/parareal.hpp"
#include "tempoloop/twoscale.hpp"

namespace tempoloop {

struct VariantRun {
  PararealVariant variant;
  int processes = 0;
  PararealResult result;
};

struct ExperimentResults {
  TrajectorySegment reference;
  double c_star = 0.0;  // serial reference value at T_end
  std::vector<VariantRun> runs;
};

// Serial reference once, then one parareal run per (variant, P). Runs that
// hit max_iterations without meeting the stopping criterion are kept in the
// results with stopped_by_criterion = false.
inline ExperimentResults run_experiment(const ExperimentConfig& cfg,
                                        const MicroPropagator& prop,
                                        int force_iterations = 0) {
  cfg.validate();
  ExperimentResults results;
  results.reference = serial_reference(prop, cfg.t_end_days, cfg.dt_fine_days);
  results.c_star = results.reference.c_end();
  for (PararealVariant variant : cfg.variants) {
    for (int p : cfg.process_counts) {
      PararealConfig pcfg = cfg.parareal_for(p, variant);
      pcfg.force_iterations = force_iterations;
      results.runs.push_back({variant, p, run_parareal(pcfg, prop)});
    }
  }
  return results;
}

// Paper-style rounding: speedup to one decimal, efficiency to whole percent.
inline std::string format_speedup(double speedup) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", speedup);
  return buf;
}

inline long format_efficiency_pct(double efficiency_fraction) {
  return std::llround(efficiency_fraction * 100.0);
}

// Summary CSV, one row per (variant, P, k) plus a leading reference row.
// Columns: variant,P,k,error_abs,mp_fine,mp_coarse,mp_serial_equivalent,
// speedup,efficiency_pct. Cost columns are cumulative up to iteration k, so
// the last row of a run carries its final cost.
inline void write_summary_csv(std::ostream& out,
                              const ExperimentResults& results) {
  out << "variant,P,k,error_abs,mp_fine,mp_coarse,mp_serial_equivalent,"
         "speedup,efficiency_pct\n";
  const long n_ref = results.reference.micro_problems;
  out << "reference,1,0,0," << n_ref << ",0," << n_ref << ",1.0,100\n";
  char buf[48];
  for (const VariantRun& run : results.runs) {
    const long n = run.result.config.n_fine_steps();
    for (const IterationRecord& rec : run.result.iterations) {
      if (rec.k == 0) continue;
      const double speedup =
          static_cast<double>(n) / static_cast<double>(rec.serial_equivalent);
      out << to_string(run.variant) << ',' << run.processes << ',' << rec.k
          << ',';
      std::snprintf(buf, sizeof(buf), "%.6e",
                    std::abs(rec.c_end - results.c_star));
      out << buf << ',' << rec.fine_micro << ',' << rec.coarse_micro << ','
          << rec.serial_equivalent << ',' << format_speedup(speedup) << ','
          << format_efficiency_pct(speedup / run.processes) << "\n";
    }
  }
}

namespace detail {

inline std::string format_error(double error) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", error);
  return buf;
}

}  // namespace detail

// One table per variant in the layout of the experiment section: error rows
// per iteration over the swept process counts, then the cost, speedup and
// efficiency rows. Columns attaining the minimal micro problem count are
// flagged with '*'.
inline void render_sweep_report(std::ostream& out,
                                const ExperimentResults& results) {
  std::vector<PararealVariant> variants;
  for (const VariantRun& run : results.runs)
    if (std::find(variants.begin(), variants.end(), run.variant) ==
        variants.end())
      variants.push_back(run.variant);

  const int width = 13;
  for (PararealVariant variant : variants) {
    std::vector<const VariantRun*> runs;
    int max_k = 0;
    for (const VariantRun& run : results.runs)
      if (run.variant == variant) {
        runs.push_back(&run);
        max_k = std::max(max_k, run.result.k_par);
      }
    if (runs.empty()) continue;

    long best_cost = runs.front()->result.ledger.serial_equivalent();
    for (const VariantRun* run : runs)
      best_cost = std::min(best_cost, run->result.ledger.serial_equivalent());

    out << "variant: " << to_string(variant) << "\n";
    out << std::left << std::setw(width) << "k\\P";
    for (const VariantRun* run : runs)
      out << std::right << std::setw(width) << run->processes;
    out << std::right << std::setw(width) << "ref";
    out << "\n";

    for (int k = 1; k <= max_k; ++k) {
      out << std::left << std::setw(width) << k << std::right;
      for (const VariantRun* run : runs) {
        if (k <= run->result.k_par) {
          const double err =
              std::abs(run->result.iterations[k].c_end - results.c_star);
          out << std::setw(width) << detail::format_error(err);
        } else {
          out << std::setw(width) << "-";
        }
      }
      if (k == 1) {
        char ref[32];
        std::snprintf(ref, sizeof(ref), "%.8f", results.c_star);
        out << std::setw(width) << ref;
      } else {
        out << std::setw(width) << "-";
      }
      out << "\n";
    }

    out << std::left << std::setw(width) << "# mp" << std::right;
    for (const VariantRun* run : runs) {
      const long cost = run->result.ledger.serial_equivalent();
      std::string cell = std::to_string(cost);
      if (cost == best_cost) cell += "*";
      out << std::setw(width) << cell;
    }
    out << std::setw(width) << results.reference.micro_problems << "\n";

    out << std::left << std::setw(width) << "speedup" << std::right;
    for (const VariantRun* run : runs)
      out << std::setw(width) << format_speedup(run->result.speedup());
    out << std::setw(width) << "1.0" << "\n";

    out << std::left << std::setw(width) << "efficiency" << std::right;
    for (const VariantRun* run : runs) {
      const std::string cell =
          std::to_string(format_efficiency_pct(run->result.efficiency())) +
          " %";
      out << std::setw(width) << cell;
    }
    out << std::setw(width) << "100 %" << "\n";

    out << "best # mp:";
    for (const VariantRun* run : runs)
      if (run->result.ledger.serial_equivalent() == best_cost)
        out << " P=" << run->processes;
    out << " (" << best_cost << " micro problems)\n\n";
  }
}

}  // namespace tempoloop
