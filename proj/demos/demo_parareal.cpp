// Minimal library usage: serial reference plus one parareal run per coarse
// propagator variant, printing iteration counts and the cost model.

#include <cstdio>

#include "tempoloop/tempoloop.hpp"

int main() {
  using namespace tempoloop;

  const MicroConfig micro;
  const GrowthParams growth;
  const SurrogatePropagator propagator{micro, growth};

  const TrajectorySegment reference = serial_reference(propagator, 300.0, 0.3);
  std::printf("serial reference: c(300 d) = %.8f, %ld micro problems\n",
              reference.c_end(), reference.micro_problems);

  for (PararealVariant variant :
       {PararealVariant::standard, PararealVariant::reuse,
        PararealVariant::interpolation}) {
    PararealConfig cfg;
    cfg.processes = 40;
    cfg.variant = variant;
    const PararealResult result = run_parareal(cfg, propagator);
    std::printf(
        "%-14s P=%d: k_par=%d, error=%.2e, #mp=%ld, speedup %s, "
        "efficiency %ld%%\n",
        to_string(variant), cfg.processes, result.k_par,
        std::abs(result.c_end() - reference.c_end()),
        result.ledger.serial_equivalent(), format_speedup(result.speedup()).c_str(),
        format_efficiency_pct(result.efficiency()));
  }
  return 0;
}
