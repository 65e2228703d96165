// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exits nonzero if any fail.
//
// Usage: acceptance <path-to-tempoloop-cli> <scratch-dir>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracle.hpp"
#include "tempoloop/tempoloop.hpp"

using namespace tempoloop;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [pass, detail] = body();
    report(number, name, pass, detail);
  } catch (const std::exception& e) {
    report(number, name, false, std::string("exception: ") + e.what());
  }
}

int run_cli(const std::string& exe, const std::string& args) {
  const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

PararealConfig make_config(PararealVariant variant, int processes,
                           double t_end, int force = 0) {
  PararealConfig cfg;
  cfg.variant = variant;
  cfg.processes = processes;
  cfg.t_end_days = t_end;
  cfg.dt_fine_days = 0.3;
  cfg.force_iterations = force;
  return cfg;
}

const std::vector<PararealVariant> kVariants = {PararealVariant::standard,
                                                PararealVariant::reuse,
                                                PararealVariant::interpolation};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <tempoloop-cli> <scratch-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch = argv[2];
  std::filesystem::create_directories(scratch);

  const SurrogatePropagator prop{MicroConfig{}, GrowthParams{}};
  const TrajectorySegment reference = serial_reference(prop, 300.0, 0.3);
  const double c_star = reference.c_end();

  // 1. Cost model reproduces the published #mp entries exactly, and the
  //    counted ledger of real (scaled) runs matches the closed form.
  run_criterion(1, "cost model reproduction", [&] {
    struct Entry {
      PararealVariant variant;
      int p;
      int k;
      long mp;
    };
    const std::vector<Entry> table = {
        {PararealVariant::standard, 10, 4, 450},
        {PararealVariant::standard, 20, 3, 230},
        {PararealVariant::standard, 30, 3, 222},
        {PararealVariant::standard, 40, 3, 235},
        {PararealVariant::standard, 50, 3, 260},
        {PararealVariant::reuse, 10, 5, 510},
        {PararealVariant::reuse, 30, 5, 200},
        {PararealVariant::reuse, 40, 4, 140},
        {PararealVariant::reuse, 60, 4, 128},
        {PararealVariant::interpolation, 10, 2, 210},
        {PararealVariant::interpolation, 30, 2, 98},
        {PararealVariant::interpolation, 40, 2, 90},
        {PararealVariant::interpolation, 50, 2, 90},
        {PararealVariant::interpolation, 60, 2, 94},
    };
    for (const Entry& entry : table) {
      const long got = CostLedger::predicted_serial_equivalent(
          entry.variant, entry.p, entry.k, 1000);
      if (got != entry.mp) {
        std::ostringstream msg;
        msg << to_string(entry.variant) << " P=" << entry.p << " k=" << entry.k
            << ": got " << got << ", want " << entry.mp;
        return std::make_pair(false, msg.str());
      }
    }
    // Ledger arithmetic inside real runs on a scaled problem (N_l = 20).
    for (PararealVariant variant : kVariants) {
      for (int k : {2, 3}) {
        const PararealResult run =
            run_parareal(make_config(variant, 4, 6.0, k), prop);
        if (run.ledger.serial_equivalent() !=
            CostLedger::predicted_serial_equivalent(variant, 4, k, 20))
          return std::make_pair(false, std::string("scaled run ledger mismatch: ") +
                                            to_string(variant));
      }
    }
    return std::make_pair(true, std::string("14 table entries exact; scaled "
                                            "run ledgers match the model"));
  });

  // 2. Speedup and efficiency follow the table formatting rules.
  run_criterion(2, "derived speedup and efficiency", [&] {
    const bool pass = format_speedup(1000.0 / 222.0) == "4.5" &&
                      format_speedup(1000.0 / 128.0) == "7.8" &&
                      format_speedup(1000.0 / 90.0) == "11.1" &&
                      format_efficiency_pct(1000.0 / 450.0 / 10.0) == 22 &&
                      format_efficiency_pct(1000.0 / 128.0 / 60.0) == 13 &&
                      format_efficiency_pct(1000.0 / 90.0 / 40.0) == 28;
    return std::make_pair(pass,
                          std::string("4.5 / 7.8 / 11.1 and 22% / 13% / 28%"));
  });

  // 3. Optimal process count for the micro-free cost model.
  run_criterion(3, "optimal process count", [&] {
    const int best = optimal_process_count(2, 1000, 1, 200);
    const double estimate = optimal_process_estimate(2, 1000);
    std::ostringstream msg;
    msg << "argmin " << best << ", sqrt(2*1000) = " << estimate;
    return std::make_pair(
        (best == 44 || best == 45) && std::abs(estimate - 44.72) <= 0.01,
        msg.str());
  });

  // 4. Parareal exactness on the scaled problem for all three variants.
  run_criterion(4, "parareal exactness", [&] {
    const TrajectorySegment serial = serial_reference(prop, 6.0, 0.3);
    double worst = 0.0;
    for (PararealVariant variant : kVariants) {
      Parareal driver(make_config(variant, 4, 6.0), prop);
      driver.initialize();
      for (int k = 0; k < 4; ++k) driver.iterate();
      for (int p = 0; p <= 4; ++p) {
        const long index = std::llround(driver.interface_time(p) / 0.3);
        worst = std::max(worst, std::abs(driver.interface_values()[p] -
                                         serial.c_values[index]));
      }
    }
    std::ostringstream msg;
    msg << "max interface error after 4 iterations = " << worst;
    return std::make_pair(worst <= 1e-12, msg.str());
  });

  // 5. Convergence behavior at full size (N_l = 1000).
  run_criterion(5, "convergence behavior", [&] {
    std::ostringstream msg;
    for (int p : {10, 20, 30, 40, 50}) {
      const PararealResult standard_run =
          run_parareal(make_config(PararealVariant::standard, p, 300.0, 6), prop);
      int k_rel = 0;
      for (const IterationRecord& rec : standard_run.iterations) {
        if (rec.k == 0) continue;
        if (rec.stop_residual / std::abs(rec.c_end) < 1e-6) {
          k_rel = rec.k;
          break;
        }
      }
      if (k_rel == 0 || k_rel > 5) {
        msg << "standard P=" << p << " needs " << (k_rel == 0 ? 7 : k_rel)
            << " iterations for the relative 1e-6 criterion";
        return std::make_pair(false, msg.str());
      }
      for (int k = 2; k <= 5; ++k) {
        const double prev =
            std::abs(standard_run.iterations[k - 1].c_end - c_star);
        const double curr = std::abs(standard_run.iterations[k].c_end - c_star);
        if (!(curr < prev)) {
          msg << "standard P=" << p << " error not strictly decreasing at k="
              << k;
          return std::make_pair(false, msg.str());
        }
      }

      const PararealResult interp_run = run_parareal(
          make_config(PararealVariant::interpolation, p, 300.0, 3), prop);
      int k_rel_interp = 0;
      for (const IterationRecord& rec : interp_run.iterations) {
        if (rec.k == 0) continue;
        if (rec.stop_residual / std::abs(rec.c_end) < 1e-6) {
          k_rel_interp = rec.k;
          break;
        }
      }
      if (k_rel_interp == 0 || k_rel_interp > 2) {
        msg << "interpolation P=" << p << " needs "
            << (k_rel_interp == 0 ? 4 : k_rel_interp) << " iterations";
        return std::make_pair(false, msg.str());
      }
      const double interp_k1 =
          std::abs(interp_run.iterations[1].c_end - c_star);
      const double standard_k1 =
          std::abs(standard_run.iterations[1].c_end - c_star);
      if (!(interp_k1 <= standard_k1)) {
        msg << "interpolation k=1 error " << interp_k1
            << " exceeds standard's " << standard_k1 << " at P=" << p;
        return std::make_pair(false, msg.str());
      }
    }
    msg << "standard <= 5 and interpolation <= 2 iterations at relative 1e-6 "
           "for P in {10..50}; errors strictly decreasing";
    return std::make_pair(true, msg.str());
  });

  // 6. Micro problem periodicity against the independent oracles.
  run_criterion(6, "micro periodicity", [&] {
    const MicroConfig micro;
    const GrowthParams growth;
    const auto result = periodic_average(prop, MicroState{}, 0.0);
    const auto orbit = oracle::be_periodic_orbit(micro, growth, 0.0);
    const double distance =
        std::abs(result.growth.gamma_bar - orbit.gamma_bar) / orbit.gamma_bar;

    std::ostringstream msg;
    msg << "cycles=" << result.growth.cycles_used
        << ", relative distance to the algebraic periodic orbit = " << distance;
    if (result.growth.cycles_used < 2 || result.growth.cycles_used > 3 ||
        distance >= 1e-6)
      return std::make_pair(false, msg.str());

    const auto fine = oracle::fine_cycle_sequence(micro, growth, 0.0, 0.0, 7);
    const double expected = std::exp(-micro.lambda * micro.cycle_length);
    for (std::size_t r = 2; r <= 4; ++r) {
      const double ratio = std::abs(fine.gamma[r + 1] - fine.gamma[r]) /
                           std::abs(fine.gamma[r] - fine.gamma[r - 1]);
      if (ratio < 0.5 * expected || ratio > 1.5 * expected) {
        msg << "; oracle contraction ratio " << ratio << " outside +-50% of "
            << expected;
        return std::make_pair(false, msg.str());
      }
    }
    msg << "; oracle contraction ratios within +-50% of e^-lambda";
    return std::make_pair(true, msg.str());
  });

  // 7. Two-scale correctness: interval additivity and Euler order.
  run_criterion(7, "two-scale correctness", [&] {
    const TrajectorySegment first =
        propagate(0.0, MicroState{}, MacroGrid::over(0.0, 150.0, 0.3), prop);
    const TrajectorySegment second =
        propagate(first.c_end(), first.end_micro_state,
                  MacroGrid::from_steps(first.times.back(), 500, 0.3), prop);
    for (long n = 0; n <= 500; ++n) {
      if (first.c_values[n] != reference.c_values[n] ||
          second.c_values[n] != reference.c_values[500 + n])
        return std::make_pair(false,
                              std::string("interval additivity violated"));
    }
    if (second.end_micro_state.v != reference.end_micro_state.v)
      return std::make_pair(false,
                            std::string("micro state differs after chaining"));

    const double c2 = serial_reference(prop, 300.0, 0.15).c_end();
    const double c4 = serial_reference(prop, 300.0, 0.075).c_end();
    const double ratio = std::abs(c_star - c2) / std::abs(c2 - c4);
    std::ostringstream msg;
    msg << "additivity bit-exact; Euler refinement ratio = " << ratio;
    return std::make_pair(ratio > 1.7 && ratio < 2.3, msg.str());
  });

  // 8. Micro-free coarse guarantee on naturally stopped full-size runs.
  run_criterion(8, "micro-free coarse guarantee", [&] {
    std::ostringstream msg;
    for (int p : {10, 40}) {
      for (PararealVariant variant : kVariants) {
        const PararealResult run =
            run_parareal(make_config(variant, p, 300.0), prop);
        const long expected = variant == PararealVariant::standard
                                  ? static_cast<long>(run.k_par + 1) * p
                                  : p;
        if (run.ledger.coarse_micro != expected) {
          msg << to_string(variant) << " P=" << p << ": coarse_micro "
              << run.ledger.coarse_micro << ", want " << expected;
          return std::make_pair(false, msg.str());
        }
      }
    }
    msg << "reuse/interpolation pay P micro problems once; standard pays "
           "(k_par+1)*P";
    return std::make_pair(true, msg.str());
  });

  // 9. Determinism of the command line tool across thread counts.
  run_criterion(9, "determinism across thread counts", [&] {
    const std::filesystem::path dir_a = scratch / "threads1";
    const std::filesystem::path dir_b = scratch / "threads8";
    const std::string common =
        "--variant all --processes 10,20 ";
    const int rc_a = run_cli(cli, common + "--threads 1 --output-dir \"" +
                                      dir_a.string() + "\"");
    const int rc_b = run_cli(cli, common + "--threads 8 --output-dir \"" +
                                      dir_b.string() + "\"");
    if (rc_a != 0 || rc_b != 0) {
      std::ostringstream msg;
      msg << "CLI exit codes " << rc_a << " and " << rc_b;
      return std::make_pair(false, msg.str());
    }
    const std::string summary_a = slurp(dir_a / "summary.csv");
    const std::string summary_b = slurp(dir_b / "summary.csv");
    if (summary_a.empty() || summary_a != summary_b)
      return std::make_pair(false,
                            std::string("summary.csv differs between runs"));
    return std::make_pair(true, std::string("summary.csv byte-identical for "
                                            "--threads 1 and --threads 8"));
  });

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
