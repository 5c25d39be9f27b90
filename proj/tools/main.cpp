#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qct/parallel.hpp"
#include "qct/version.hpp"
#include "scenario.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> points;
  std::string engine;
  std::string out = ".";
};

void add_scenario_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON scenario config (defaults if omitted)");
  cmd->add_option("--seed", o.seed, "base RNG seed (u64)");
  cmd->add_option("--points", o.points, "samples per acquisition");
  cmd->add_option("--engine", o.engine, "direct | chain")
      ->check(CLI::IsMember({"direct", "chain"}));
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
}

qct::cli::ScenarioConfig resolve(const Overrides& o) {
  auto cfg = o.config.empty() ? qct::cli::ScenarioConfig{} : qct::cli::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.points) cfg.n_points = *o.points;
  if (o.engine == "direct") cfg.engine = qct::cli::Engine::Direct;
  if (o.engine == "chain") cfg.engine = qct::cli::Engine::Chain;
  return cfg;
}

void print_report(const char* label, const qct::TransferReport& r, double oracle_db) {
  std::cout << label << ": " << r.squeezing_db << " dB below SNL  [" << r.ci_low_db << ", "
            << r.ci_high_db << "]  kept " << r.kept_count << "/" << r.total
            << "  p=" << r.preparation_probability << "  (oracle " << oracle_db << " dB)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qct - conditional transfer of twin-beam intensity correlation"};
  app.set_version_flag("--version", std::string(qct::kVersion));
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "single conditioned + unconditioned experiment");
  add_scenario_flags(run, run_opts);

  Overrides sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep with oracle overlay");
  add_scenario_flags(sweep, sweep_opts);

  std::string fock_input;
  std::string fock_out = ".";
  auto* fock = app.add_subcommand("fock", "ideal photon-number transfer on a distribution file");
  fock->add_option("file", fock_input, "JSON file {\"p1\": [[...]], \"p2\": [[...]]}")->required();
  fock->add_option("--out", fock_out, "output directory")->capture_default_str();

  std::uint64_t selftest_seed = 20240607;
  auto* selftest = app.add_subcommand("selftest", "oracle-vs-Monte-Carlo checks");
  selftest->add_option("--seed", selftest_seed, "base RNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  qct::set_default_threads(threads);

  try {
    if (*run) {
      const auto cfg = resolve(run_opts);
      const auto result = qct::cli::run_scenario(cfg);
      qct::cli::write_scenario(result, cfg, run_opts.out);
      print_report("conditioned", result.conditioned, result.oracle_conditioned.transferred_db);
      print_report("unconditioned", result.unconditioned, result.oracle_unconditioned.transferred_db);
    } else if (*sweep) {
      const auto cfg = resolve(sweep_opts);
      const auto rows = qct::cli::run_sweep(cfg);
      qct::cli::write_sweep(rows, cfg, sweep_opts.out);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
      std::cout << rows.size() << " rows written to " << sweep_opts.out << "/sweep.csv";
      if (failed) std::cout << " (" << failed << " failed)";
      std::cout << "\n";
    } else if (*fock) {
      const auto t = qct::cli::run_fock(fock_input, fock_out);
      std::cout << "acceptance probability " << t.acceptance_probability << ", idler distribution "
                << (t.idlers.is_diagonal() ? "diagonal" : "not diagonal") << "\n";
    } else if (*selftest) {
      return qct::cli::run_selftest(std::cout, selftest_seed) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "qct: " << e.what() << "\n";
    return qct::cli::exit_code_for(e);
  }
  return 0;
}
