// Experiment harness: serial reference and parareal sweeps over process
// counts and coarse propagator variants, with CSV outputs in the layout of
// the comparison tables.
//
// Exit codes: 0 success, 2 configuration error, 3 non-convergence.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempoloop/tempoloop.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(std::stoi(item));
  return values;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw tempoloop::ConfigError("cannot write output file: " + path.string());
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace tempoloop;

  CLI::App app{
      "tempoloop: parallel-in-time integration of a two-scale plaque growth "
      "model"};

  std::string config_path;
  std::string variant_arg;
  std::string processes_arg;
  std::string force_arg;
  std::string output_dir_arg;
  int threads_arg = 0;
  bool reference_only = false;
  bool check_golden = false;
  bool emit_trajectories = false;

  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--variant", variant_arg,
                 "standard|reuse|interpolation|all (default: from config)");
  app.add_option("--processes", processes_arg,
                 "comma separated process counts, e.g. 10,20,30");
  app.add_option("--force-iterations", force_arg,
                 "run exactly k iterations instead of the stopping criterion; "
                 "one value per process count or a single value for all");
  app.add_option("--threads", threads_arg,
                 "fine sweep worker threads (fallback: TEMPOLOOP_THREADS)");
  app.add_option("--output-dir", output_dir_arg, "directory for CSV outputs");
  app.add_flag("--reference-only", reference_only,
               "run only the serial reference");
  app.add_flag("--check-golden", check_golden,
               "recompute the serial reference and compare against the "
               "frozen value");
  app.add_flag("--emit-trajectories", emit_trajectories,
               "write one trajectory CSV per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  ExperimentConfig cfg;
  std::vector<int> force_list;
  try {
    if (!config_path.empty()) cfg = parse_config_file(config_path);

    if (!variant_arg.empty()) {
      cfg.variants.clear();
      if (variant_arg == "all") {
        cfg.variants = {PararealVariant::standard, PararealVariant::reuse,
                        PararealVariant::interpolation};
      } else {
        cfg.variants.push_back(parse_variant(variant_arg));
      }
    }
    if (!processes_arg.empty()) cfg.process_counts = parse_int_list(processes_arg);
    if (!output_dir_arg.empty()) cfg.output_dir = output_dir_arg;
    if (emit_trajectories) cfg.emit_trajectories = true;

    if (threads_arg > 0) {
      cfg.threads = threads_arg;
    } else if (const char* env = std::getenv("TEMPOLOOP_THREADS")) {
      cfg.threads = std::stoi(env);
    }

    if (!force_arg.empty()) {
      force_list = parse_int_list(force_arg);
      if (force_list.size() != 1 &&
          force_list.size() != cfg.process_counts.size())
        throw ConfigError(
            "--force-iterations needs one value or one per process count");
      for (int k : force_list)
        if (k < 1) throw ConfigError("--force-iterations values must be >= 1");
    }

    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }

  const SurrogatePropagator propagator{cfg.micro, cfg.growth};
  const std::filesystem::path out_dir{cfg.output_dir};

  try {
    if (check_golden) {
      const TrajectorySegment reference =
          serial_reference(propagator, cfg.t_end_days, cfg.dt_fine_days);
      const double difference =
          std::abs(reference.c_end() - kSerialReferenceGolden);
      std::cout << "serial reference c(T_end) = " << std::setprecision(17)
                << reference.c_end() << "\n"
                << "stored golden             = " << kSerialReferenceGolden
                << "\n"
                << "difference                = " << difference << "\n";
      if (difference <= 1e-12) {
        std::cout << "golden check: PASS\n";
        return kExitOk;
      }
      std::cout << "golden check: FAIL (tolerance 1e-12; the stored value "
                   "belongs to the default configuration)\n";
      return kExitFailure;
    }

    std::filesystem::create_directories(out_dir);

    ExperimentResults results;
    results.reference =
        serial_reference(propagator, cfg.t_end_days, cfg.dt_fine_days);
    results.c_star = results.reference.c_end();
    if (cfg.emit_trajectories || reference_only) {
      std::ostringstream body;
      write_trajectory_csv(body, results.reference);
      write_file(out_dir / "trajectory_reference.csv", body.str());
    }

    if (reference_only) {
      std::ostringstream body;
      write_summary_csv(body, results);
      write_file(out_dir / "summary.csv", body.str());
      std::cout << "serial reference: " << results.reference.micro_problems
                << " micro problems, c(T_end) = " << std::setprecision(10)
                << results.c_star << ", speedup 1.0, efficiency 100%\n";
      return kExitOk;
    }

    std::vector<std::string> unconverged;
    for (PararealVariant variant : cfg.variants) {
      for (std::size_t i = 0; i < cfg.process_counts.size(); ++i) {
        const int p = cfg.process_counts[i];
        PararealConfig pcfg = cfg.parareal_for(p, variant);
        if (!force_list.empty())
          pcfg.force_iterations =
              force_list.size() == 1 ? force_list[0] : force_list[i];

        try {
          PararealResult result = run_parareal(pcfg, propagator);
          if (pcfg.force_iterations == 0 && !result.stopped_by_criterion) {
            std::ostringstream where;
            where << "variant=" << to_string(variant) << " P=" << p
                  << " k=" << result.k_par;
            unconverged.push_back(where.str());
          }
          if (cfg.emit_trajectories) {
            std::ostringstream body;
            TrajectorySegment whole;
            for (const TrajectorySegment& seg : result.final_segments) {
              const std::size_t skip = whole.c_values.empty() ? 0 : 1;
              whole.times.insert(whole.times.end(), seg.times.begin() + skip,
                                 seg.times.end());
              whole.c_values.insert(whole.c_values.end(),
                                    seg.c_values.begin() + skip,
                                    seg.c_values.end());
              whole.gamma_values.insert(whole.gamma_values.end(),
                                        seg.gamma_values.begin(),
                                        seg.gamma_values.end());
              whole.cycles_used.insert(whole.cycles_used.end(),
                                       seg.cycles_used.begin(),
                                       seg.cycles_used.end());
            }
            write_trajectory_csv(body, whole);
            std::ostringstream name;
            name << "trajectory_" << to_string(variant) << "_P" << p << ".csv";
            write_file(out_dir / name.str(), body.str());
          }
          results.runs.push_back({variant, p, std::move(result)});
        } catch (const std::exception& e) {
          std::cerr << "run failed: variant=" << to_string(variant)
                    << " P=" << p << ": " << e.what() << "\n";
          return kExitNoConvergence;
        }
      }
    }

    std::ostringstream body;
    write_summary_csv(body, results);
    write_file(out_dir / "summary.csv", body.str());

    render_sweep_report(std::cout, results);
    std::cout << "rule of thumb: optimal P near sqrt(2 * N_l) = "
              << format_speedup(optimal_process_estimate(2, cfg.n_fine_steps()))
              << " for the micro-free coarse variants\n";
    std::cout << "summary written to " << (out_dir / "summary.csv").string()
              << "\n";

    if (!unconverged.empty()) {
      for (const std::string& where : unconverged)
        std::cerr << "stopping criterion not met within max_iterations: "
                  << where << "\n";
      return kExitNoConvergence;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
}
