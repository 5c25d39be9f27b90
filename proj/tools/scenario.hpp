#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qct/dsp_chain.hpp"
#include "qct/errors.hpp"
#include "qct/model.hpp"
#include "qct/oracle.hpp"
#include "qct/selection.hpp"
#include "qct/stats.hpp"

namespace qct::cli {

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class Engine { Direct, Chain };

enum class SweepScale { Linear, Log };

struct SweepAxis {
  std::string parameter;  ///< squeezing_db, efficiency, rotation_deg, bandwidth_delta, excess_sum_db
  double min = 0.0;
  double max = 0.0;
  std::size_t steps = 2;
  SweepScale scale = SweepScale::Linear;

  std::vector<double> values() const;
};

struct ScenarioConfig {
  TwinPairParams pair1;
  TwinPairParams pair2;
  MeasurementSetting setting = MeasurementSetting::TwinBeams0deg;
  SelectionConfig selection;
  std::size_t n_points = 300000;
  std::uint64_t seed = 1;
  Engine engine = Engine::Direct;
  SignalChainConfig signal_chain;
  std::optional<SweepAxis> sweep;
  std::size_t scatter_points = 20000;
  double histogram_bin_width = 0.1;  ///< in units of δ
  std::size_t bootstrap_resamples = 1000;
  double bootstrap_level = 0.68;

  /// Throws ValidationError / ConfigError.
  void validate() const;
};

/// Strict parse: unknown keys and wrong types are ConfigErrors; missing keys keep defaults.
ScenarioConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON config file. Throws IoError if it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full config, every field explicit. parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Returns a copy of `cfg` with the sweep parameter set to `value`.
ScenarioConfig apply_axis(const ScenarioConfig& cfg, const std::string& parameter, double value);

struct ScatterPoint {
  double first = 0.0;
  double second = 0.0;
};

struct ScenarioResult {
  TransferReport conditioned;
  TransferReport unconditioned;
  TransferPrediction oracle_conditioned;
  TransferPrediction oracle_unconditioned;
  Histogram histogram_conditioned;
  Histogram histogram_unconditioned;
  std::vector<ScatterPoint> scatter_conditioned;
  std::vector<ScatterPoint> scatter_unconditioned;
};

/// Two acquisitions (seed substreams 0 and 1): one post-selected, one unconditioned.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// report.csv, scatter_{conditioned,unconditioned}.csv, histogram_{...}.csv.
void write_scenario(const ScenarioResult& result, const ScenarioConfig& cfg,
                    const std::filesystem::path& out_dir);

struct SweepRow {
  double axis_value = 0.0;
  std::optional<TransferReport> report;  ///< empty when the row failed
  std::optional<TransferPrediction> oracle;
  std::string error;
};

/// One conditioned acquisition per axis point; row r uses seed derive_seed(seed, r).
/// A failing row records its error instead of aborting the sweep.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg);

/// sweep.csv
void write_sweep(const std::vector<SweepRow>& rows, const ScenarioConfig& cfg,
                 const std::filesystem::path& out_dir);

/// Exit code for an exception escaping a subcommand:
/// 2 config/validation, 3 insufficient statistics, 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e) noexcept;

/// Transfer on a joint-distribution JSON file {"p1": [[...]], "p2": [[...]]}; writes fock.csv.
FockTransferResult run_fock(const std::filesystem::path& input, const std::filesystem::path& out_dir);

/// Oracle-vs-Monte-Carlo battery. Prints one PASS/FAIL line per check; true if all pass.
bool run_selftest(std::ostream& log, std::uint64_t seed);

}  // namespace qct::cli
