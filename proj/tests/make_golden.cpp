// Generator for the frozen values in tests/fixtures/golden.txt and the
// calibrated defaults in the headers.
//
// Workflow after changing the surrogate flow model:
//   1. make_golden --calibrate     -> paste sigma0 into growth.hpp
//   2. rebuild, make_golden        -> paste output into fixtures/golden.txt,
//                                     paste c_serial_end into config.hpp
//   3. make_golden --diagnose      -> sanity-check solver behavior
//
// Values are printed with 15 significant digits.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "support/oracle.hpp"
#include "tempoloop/tempoloop.hpp"

using namespace tempoloop;

namespace {

double serial_end_for_sigma0(double sigma0, double dt_days) {
  GrowthParams gp;
  gp.sigma0 = sigma0;
  SurrogatePropagator prop{MicroConfig{}, gp};
  return serial_reference(prop, 300.0, dt_days).c_end();
}

int calibrate(double target) {
  double lo = 0.1, hi = 50.0;
  if (serial_end_for_sigma0(lo, 0.3) > target ||
      serial_end_for_sigma0(hi, 0.3) < target) {
    std::fprintf(stderr, "calibrate: target %.8f not bracketed\n", target);
    return 1;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (serial_end_for_sigma0(mid, 0.3) < target ? lo : hi) = mid;
  }
  const double sigma0 = 0.5 * (lo + hi);
  std::printf("sigma0 (exact)   = %.17g\n", sigma0);
  std::printf("c_end at sigma0  = %.17g\n", serial_end_for_sigma0(sigma0, 0.3));
  // Rounded value for the header constant; re-run the default mode after
  // freezing it.
  char rounded[32];
  std::snprintf(rounded, sizeof(rounded), "%.9g", sigma0);
  std::printf("sigma0 (rounded) = %s\n", rounded);
  std::printf("c_end at rounded = %.17g\n",
              serial_end_for_sigma0(std::stod(rounded), 0.3));
  return 0;
}

void emit_fixtures() {
  const MicroConfig cfg;
  const GrowthParams gp;
  SurrogatePropagator prop{cfg, gp};

  const auto fine_cold = oracle::fine_cycle_sequence(cfg, gp, 0.0, 0.0, 50);
  const auto be_orbit = oracle::be_periodic_orbit(cfg, gp, 0.0);
  const auto serial = serial_reference(prop, 300.0, 0.3);
  const auto serial_half = serial_reference(prop, 300.0, 0.15);

  std::printf("# Golden oracle values for the default configuration.\n");
  std::printf("# Regenerate with tests/make_golden; see that file for the\n");
  std::printf("# provenance of each entry.\n");
  std::printf("sigma0_default = %.15g\n", gp.sigma0);
  std::printf("lambda_default = %.15g\n", cfg.lambda);
  std::printf("alpha_default = %.15g\n", gp.alpha);
  std::printf("gamma_cycle1_cold_fine_oracle = %.15g\n", fine_cold.gamma[0]);
  std::printf("gamma_periodic_fine_oracle = %.15g\n", fine_cold.gamma.back());
  std::printf("gamma_periodic_be_closed_form = %.15g\n", be_orbit.gamma_bar);
  std::printf("c_serial_end = %.15g\n", serial.c_end());
  std::printf("c_serial_end_half_dt = %.15g\n", serial_half.c_end());
  std::printf("# full precision for the header constant:\n");
  std::printf("# kSerialReferenceGolden = %.17g\n", serial.c_end());
}

void diagnose() {
  const MicroConfig cfg;
  const GrowthParams gp;
  SurrogatePropagator prop{cfg, gp};

  // Micro solver behavior from a cold start at c_s = 0.
  const auto pa = periodic_average(prop, MicroState{}, 0.0);
  const auto be_orbit = oracle::be_periodic_orbit(cfg, gp, 0.0);
  const auto fine = oracle::fine_cycle_sequence(cfg, gp, 0.0, 0.0, 50);
  std::printf("== micro ==\n");
  std::printf("cycles_used (cold, c=0)        = %d\n", pa.growth.cycles_used);
  std::printf("gamma_bar at stop              = %.15g\n", pa.growth.gamma_bar);
  std::printf("distance to BE periodic (rel)  = %.3e\n",
              std::abs(pa.growth.gamma_bar - be_orbit.gamma_bar) /
                  be_orbit.gamma_bar);
  std::printf("BE bias vs fine oracle (rel)   = %.3e\n",
              std::abs(be_orbit.gamma_bar - fine.gamma.back()) /
                  fine.gamma.back());
  std::printf("cycle-1 candidate (fine oracle)= %.15g\n", fine.gamma[0]);
  {
    MicroState w{};
    double prev_candidate = 0.0, prev_residual = 0.0;
    std::printf("impl cycle residual ratios     =");
    for (int r = 1; r <= 8; ++r) {
      const CycleResult cyc = prop.run_cycle(w, 0.0);
      w = cyc.end_state;
      if (r >= 2) {
        const double residual = std::abs(cyc.gamma_candidate - prev_candidate);
        if (r >= 3 && prev_residual > 0.0)
          std::printf(" %.4f", residual / prev_residual);
        prev_residual = residual;
      }
      prev_candidate = cyc.gamma_candidate;
    }
    std::printf("  (e^-lambda = %.4f)\n", std::exp(-cfg.lambda));
  }
  {
    std::printf("oracle cycle residual ratios   =");
    double prev_residual = 0.0;
    for (std::size_t r = 1; r + 1 < 12; ++r) {
      const double residual = std::abs(fine.gamma[r] - fine.gamma[r - 1]);
      if (r >= 2 && prev_residual > 0.0)
        std::printf(" %.4f", residual / prev_residual);
      prev_residual = residual;
    }
    std::printf("\n");
  }

  // Warm start: the returned state should confirm periodicity in 2 cycles.
  const auto warm = periodic_average(prop, pa.end_state, 0.0);
  std::printf("cycles_used (warm)             = %d\n", warm.growth.cycles_used);

  // Serial reference and Euler convergence.
  const auto serial = serial_reference(prop, 300.0, 0.3);
  const auto serial2 = serial_reference(prop, 300.0, 0.15);
  const auto serial4 = serial_reference(prop, 300.0, 0.075);
  std::printf("== twoscale ==\n");
  std::printf("c*(300d) dt=0.3                = %.15g\n", serial.c_end());
  std::printf("micro problems                 = %ld\n", serial.micro_problems);
  std::printf("micro cycles                   = %ld\n", serial.micro_cycles);
  std::printf("Euler ratio (dt vs dt/2)       = %.4f\n",
              std::abs(serial.c_end() - serial2.c_end()) /
                  std::abs(serial2.c_end() - serial4.c_end()));

  // Parareal behavior at defaults.
  std::printf("== parareal ==\n");
  for (PararealVariant variant :
       {PararealVariant::standard, PararealVariant::reuse,
        PararealVariant::interpolation}) {
    for (int p : {10, 20, 30, 40, 50, 60}) {
      PararealConfig pcfg;
      pcfg.processes = p;
      pcfg.variant = variant;
      pcfg.force_iterations = 8;
      Parareal driver(pcfg, prop);
      const PararealResult result = driver.run();

      int k_stop_abs = 0, k_rel = 0;
      for (const IterationRecord& rec : result.iterations) {
        if (rec.k == 0) continue;
        if (k_stop_abs == 0 && rec.stop_residual < 1e-3) k_stop_abs = rec.k;
        if (k_rel == 0 && rec.stop_residual / std::abs(rec.c_end) < 1e-6)
          k_rel = rec.k;
      }
      std::printf("%-14s P=%-3d k_par(abs 1e-3)=%d k(rel 1e-6)=%d errors:",
                  to_string(variant), p, k_stop_abs, k_rel);
      for (int k = 1; k <= std::min(result.k_par, 6); ++k)
        std::printf(" %.2e",
                    std::abs(result.iterations[k].c_end - serial.c_end()));
      std::printf("\n");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--calibrate") == 0) {
    const double target = argc > 2 ? std::stod(argv[2]) : 0.63831273;
    return calibrate(target);
  }
  if (argc > 1 && std::strcmp(argv[1], "--diagnose") == 0) {
    diagnose();
    return 0;
  }
  emit_fixtures();
  return 0;
}
