#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "qct/parallel.hpp"
#include "qct/random.hpp"
#include "qct/version.hpp"

namespace qct::cli {
namespace {

using nlohmann::json;

// Substreams of a scenario seed.
constexpr std::uint64_t kConditionedStream = 0;
constexpr std::uint64_t kUnconditionedStream = 1;
constexpr std::uint64_t kConditionedBootstrap = 2;
constexpr std::uint64_t kUnconditionedBootstrap = 3;

const char* const kSweepParameters[] = {"squeezing_db", "efficiency", "rotation_deg",
                                        "bandwidth_delta", "excess_sum_db"};

// Reads the members of one JSON object and rejects anything it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + "must be an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + "must be a number");
      out = v->get<double>();
    }
  }

  template <typename Unsigned>
  void count(const char* key, Unsigned& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(where(key) + "must be a non-negative integer");
      out = v->get<Unsigned>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + "must be a string");
      out = v->get<std::string>();
    }
  }

  void channels(const char* key, std::array<Channel, 2>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_string() || !(*v)[1].is_string()) {
        throw ConfigError(where(key) + "must be an array of two channel names");
      }
      out = {parse_channel((*v)[0].get<std::string>()), parse_channel((*v)[1].get<std::string>())};
    }
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError("unknown key '" + path_ + item.key() + "'");
    }
  }

  std::string child(const char* key) const { return path_ + key + "."; }

 private:
  std::string where(const char* key = "") const { return "'" + path_ + key + "' "; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

TwinPairParams parse_pair(const json& j, const std::string& path) {
  TwinPairParams p;
  ObjectReader r(j, path);
  r.number("squeezing_db", p.squeezing_db);
  r.number("excess_sum_db", p.excess_sum_db);
  r.number("efficiency", p.efficiency);
  r.number("rotation_deg", p.rotation_deg);
  r.finish();
  return p;
}

json pair_json(const TwinPairParams& p) {
  return {{"squeezing_db", p.squeezing_db},
          {"excess_sum_db", p.excess_sum_db},
          {"efficiency", p.efficiency},
          {"rotation_deg", p.rotation_deg}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& command, const ScenarioConfig* cfg)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
    out_ << "# qct " << kVersion << "\n# command: " << command << "\n";
    if (cfg) out_ << "# config: " << to_json(*cfg).dump() << "\n";
  }

  CsvFile& comment(const std::string& line) {
    out_ << "# " << line << "\n";
    return *this;
  }

  CsvFile& row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
    return *this;
  }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

SampleBatch acquisition(const ScenarioConfig& cfg, const FourChannelCovariance& cov,
                        std::uint64_t seed) {
  if (cfg.engine == Engine::Direct) return sample_batch(cov, cfg.n_points, seed);
  SignalChainConfig chain = cfg.signal_chain;
  chain.record_points = cfg.n_points;
  return acquire(cov, chain, seed);
}

BootstrapOptions bootstrap_options(const ScenarioConfig& cfg, std::uint64_t seed) {
  return {cfg.bootstrap_resamples, cfg.bootstrap_level, seed};
}

std::vector<ScatterPoint> scatter(const SampleBatch& batch, const SelectionResult& result,
                                  const SelectionConfig& sel, std::size_t limit) {
  const auto a = batch.channel(sel.target_channels[0]);
  const auto b = batch.channel(sel.target_channels[1]);
  std::vector<ScatterPoint> out;
  const std::size_t n = std::min(limit, result.kept_indices.size());
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = result.kept_indices[k];
    out.push_back({a[i], b[i]});
  }
  return out;
}

void write_histogram(const Histogram& h, const std::filesystem::path& path, const std::string& label,
                     const ScenarioConfig& cfg) {
  CsvFile csv(path, "run", &cfg);
  csv.comment("acquisition: " + label + "; bins in units of delta = sqrt(2) shot units");
  csv.row({"bin_low", "bin_high", "center", "count", "probability"});
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    csv.row({format_number(h.bin_edges[k]), format_number(h.bin_edges[k + 1]),
             format_number(h.center(k)), std::to_string(h.counts[k]),
             format_number(static_cast<double>(h.counts[k]) / static_cast<double>(h.total))});
  }
  csv.close();
}

void write_scatter(const std::vector<ScatterPoint>& pts, const std::filesystem::path& path,
                   const std::string& label, const ScenarioConfig& cfg) {
  CsvFile csv(path, "run", &cfg);
  csv.comment("acquisition: " + label);
  csv.row({std::string(channel_name(cfg.selection.target_channels[0])),
           std::string(channel_name(cfg.selection.target_channels[1]))});
  for (const auto& p : pts) csv.row({format_number(p.first), format_number(p.second)});
  csv.close();
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> out(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(steps - 1);
    out[k] = scale == SweepScale::Linear ? min + f * (max - min)
                                         : min * std::pow(max / min, f);
  }
  if (steps > 1) out.back() = max;
  return out;
}

void ScenarioConfig::validate() const {
  pair1.validate("pair1");
  pair2.validate("pair2");
  selection.validate();
  if (n_points < 1) throw ValidationError("n_points", "must be at least 1");
  if (engine == Engine::Chain) signal_chain.validate();
  if (!(histogram_bin_width > 0.0 && histogram_bin_width < 1.0)) {
    throw ValidationError("histogram_bin_width", "must lie in (0, 1)");
  }
  if (bootstrap_resamples < 200) throw ValidationError("bootstrap_resamples", "must be >= 200");
  if (!(bootstrap_level > 0.0 && bootstrap_level < 1.0)) {
    throw ValidationError("bootstrap_level", "must lie in (0, 1)");
  }
  if (sweep) {
    const auto& s = *sweep;
    if (std::find(std::begin(kSweepParameters), std::end(kSweepParameters), s.parameter) ==
        std::end(kSweepParameters)) {
      throw ConfigError("sweep.parameter '" + s.parameter + "' is not a sweepable parameter");
    }
    if (s.steps < 1) throw ValidationError("sweep.steps", "must be at least 1");
    if (!std::isfinite(s.min) || !std::isfinite(s.max)) {
      throw ValidationError("sweep.min", "bounds must be finite");
    }
    if (s.scale == SweepScale::Log && !(s.min > 0.0 && s.max > 0.0)) {
      throw ValidationError("sweep.min", "log sweeps need positive bounds");
    }
  }
}

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig cfg;
  ObjectReader r(doc, "");
  if (const json* v = r.find("pair1")) cfg.pair1 = parse_pair(*v, "pair1.");
  if (const json* v = r.find("pair2")) cfg.pair2 = parse_pair(*v, "pair2.");

  std::string text;
  r.string("setting", text);
  if (!text.empty()) cfg.setting = parse_setting(text);

  if (const json* v = r.find("selection")) {
    ObjectReader s(*v, "selection.");
    s.number("bandwidth_delta", cfg.selection.bandwidth_delta);
    s.channels("trigger_channels", cfg.selection.trigger_channels);
    s.channels("target_channels", cfg.selection.target_channels);
    s.count("min_kept", cfg.selection.min_kept);
    s.finish();
  }

  r.count("n_points", cfg.n_points);
  r.count("seed", cfg.seed);

  text.clear();
  r.string("engine", text);
  if (text == "direct") cfg.engine = Engine::Direct;
  else if (text == "chain") cfg.engine = Engine::Chain;
  else if (!text.empty()) throw ConfigError("'engine' must be \"direct\" or \"chain\"");

  if (const json* v = r.find("signal_chain")) {
    auto& c = cfg.signal_chain;
    ObjectReader s(*v, "signal_chain.");
    s.number("lo_frequency_hz", c.lo_frequency_hz);
    s.number("synth_rate_hz", c.synth_rate_hz);
    s.number("antialias_cutoff_hz", c.antialias_cutoff_hz);
    s.number("post_mixer_cutoff_hz", c.post_mixer_cutoff_hz);
    s.number("output_rate_hz", c.output_rate_hz);
    s.count("record_points", c.record_points);
    s.number("cavity_bandwidth_hz", c.cavity_bandwidth_hz);
    s.number("mixer_phase_rad", c.mixer_phase_rad);
    s.finish();
  }

  if (const json* v = r.find("sweep"); v && !v->is_null()) {
    SweepAxis axis;
    ObjectReader s(*v, "sweep.");
    s.string("parameter", axis.parameter);
    s.number("min", axis.min);
    s.number("max", axis.max);
    s.count("steps", axis.steps);
    std::string scale = "linear";
    s.string("scale", scale);
    if (scale == "log") axis.scale = SweepScale::Log;
    else if (scale != "linear") throw ConfigError("'sweep.scale' must be \"linear\" or \"log\"");
    s.finish();
    if (axis.parameter.empty()) throw ConfigError("'sweep.parameter' is required");
    cfg.sweep = axis;
  }

  r.count("scatter_points", cfg.scatter_points);
  r.number("histogram_bin_width", cfg.histogram_bin_width);
  r.count("bootstrap_resamples", cfg.bootstrap_resamples);
  r.number("bootstrap_level", cfg.bootstrap_level);
  r.finish();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ScenarioConfig& cfg) {
  const auto& sel = cfg.selection;
  const auto& c = cfg.signal_chain;
  json j = {
      {"pair1", pair_json(cfg.pair1)},
      {"pair2", pair_json(cfg.pair2)},
      {"setting", std::string(setting_name(cfg.setting))},
      {"selection",
       {{"bandwidth_delta", sel.bandwidth_delta},
        {"trigger_channels",
         {channel_name(sel.trigger_channels[0]), channel_name(sel.trigger_channels[1])}},
        {"target_channels",
         {channel_name(sel.target_channels[0]), channel_name(sel.target_channels[1])}},
        {"min_kept", sel.min_kept}}},
      {"n_points", cfg.n_points},
      {"seed", cfg.seed},
      {"engine", cfg.engine == Engine::Direct ? "direct" : "chain"},
      {"signal_chain",
       {{"lo_frequency_hz", c.lo_frequency_hz},
        {"synth_rate_hz", c.synth_rate_hz},
        {"antialias_cutoff_hz", c.antialias_cutoff_hz},
        {"post_mixer_cutoff_hz", c.post_mixer_cutoff_hz},
        {"output_rate_hz", c.output_rate_hz},
        {"record_points", c.record_points},
        {"cavity_bandwidth_hz", c.cavity_bandwidth_hz},
        {"mixer_phase_rad", c.mixer_phase_rad}}},
      {"scatter_points", cfg.scatter_points},
      {"histogram_bin_width", cfg.histogram_bin_width},
      {"bootstrap_resamples", cfg.bootstrap_resamples},
      {"bootstrap_level", cfg.bootstrap_level},
  };
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"min", cfg.sweep->min},
                  {"max", cfg.sweep->max},
                  {"steps", cfg.sweep->steps},
                  {"scale", cfg.sweep->scale == SweepScale::Linear ? "linear" : "log"}};
  } else {
    j["sweep"] = nullptr;
  }
  return j;
}

ScenarioConfig apply_axis(const ScenarioConfig& cfg, const std::string& parameter, double value) {
  ScenarioConfig out = cfg;
  auto both = [&](double TwinPairParams::*field) {
    out.pair1.*field = value;
    out.pair2.*field = value;
  };
  if (parameter == "squeezing_db") both(&TwinPairParams::squeezing_db);
  else if (parameter == "efficiency") both(&TwinPairParams::efficiency);
  else if (parameter == "rotation_deg") both(&TwinPairParams::rotation_deg);
  else if (parameter == "excess_sum_db") both(&TwinPairParams::excess_sum_db);
  else if (parameter == "bandwidth_delta") out.selection.bandwidth_delta = value;
  else throw ConfigError("unknown sweep parameter '" + parameter + "'");
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto cov = build_covariance(cfg.pair1, cfg.pair2, cfg.setting);
  const auto& sel = cfg.selection;
  const std::string echo = to_json(cfg).dump();

  ScenarioResult out;
  out.oracle_conditioned = predict_transfer(cfg.pair1, cfg.pair2, sel.bandwidth_delta, cfg.setting);
  out.oracle_unconditioned =
      predict_transfer(cfg.pair1, cfg.pair2, std::numeric_limits<double>::infinity(), cfg.setting);

  const SampleBatch cond = acquisition(cfg, cov, derive_seed(cfg.seed, kConditionedStream));
  const SelectionResult kept = select(cond, sel);
  out.conditioned = conditional_statistics(
      cond, kept, sel, bootstrap_options(cfg, derive_seed(cfg.seed, kConditionedBootstrap)));
  out.conditioned.config_echo = echo;
  out.histogram_conditioned = histogram(target_difference(cond, kept, sel), cfg.histogram_bin_width);
  out.scatter_conditioned = scatter(cond, kept, sel, cfg.scatter_points);

  const SampleBatch uncond = acquisition(cfg, cov, derive_seed(cfg.seed, kUnconditionedStream));
  const SelectionResult all = select_all(uncond);
  out.unconditioned = conditional_statistics(
      uncond, all, sel, bootstrap_options(cfg, derive_seed(cfg.seed, kUnconditionedBootstrap)));
  out.unconditioned.config_echo = echo;
  out.histogram_unconditioned =
      histogram(target_difference(uncond, all, sel), cfg.histogram_bin_width);
  out.scatter_unconditioned = scatter(uncond, all, sel, cfg.scatter_points);
  return out;
}

void write_scenario(const ScenarioResult& result, const ScenarioConfig& cfg,
                    const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  {
    CsvFile csv(out_dir / "report.csv", "run", &cfg);
    csv.comment("squeezing_db: dB below the two-beam shot-noise level of target difference");
    csv.row({"acquisition", "squeezing_db", "ci_low_db", "ci_high_db", "kept_count", "total",
             "preparation_probability", "oracle_db", "oracle_probability"});
    auto line = [&](const char* name, const TransferReport& r, const TransferPrediction& o) {
      csv.row({name, format_number(r.squeezing_db), format_number(r.ci_low_db),
               format_number(r.ci_high_db), std::to_string(r.kept_count), std::to_string(r.total),
               format_number(r.preparation_probability), format_number(o.transferred_db),
               format_number(o.selection_probability)});
    };
    line("conditioned", result.conditioned, result.oracle_conditioned);
    line("unconditioned", result.unconditioned, result.oracle_unconditioned);
    csv.close();
  }
  write_scatter(result.scatter_conditioned, out_dir / "scatter_conditioned.csv", "conditioned", cfg);
  write_scatter(result.scatter_unconditioned, out_dir / "scatter_unconditioned.csv",
                "unconditioned", cfg);
  write_histogram(result.histogram_conditioned, out_dir / "histogram_conditioned.csv",
                  "conditioned", cfg);
  write_histogram(result.histogram_unconditioned, out_dir / "histogram_unconditioned.csv",
                  "unconditioned", cfg);
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("sweep requires a 'sweep' axis in the config");
  const auto values = cfg.sweep->values();
  std::vector<SweepRow> rows(values.size());

  parallel_for(values.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      SweepRow& row = rows[r];
      row.axis_value = values[r];
      const std::uint64_t row_seed = derive_seed(cfg.seed, r);
      try {
        const ScenarioConfig rc = apply_axis(cfg, cfg.sweep->parameter, values[r]);
        rc.validate();
        row.oracle = predict_transfer(rc.pair1, rc.pair2, rc.selection.bandwidth_delta, rc.setting);
        const auto cov = build_covariance(rc.pair1, rc.pair2, rc.setting);
        const SampleBatch batch = acquisition(rc, cov, derive_seed(row_seed, kConditionedStream));
        const SelectionResult kept = select(batch, rc.selection);
        row.report = conditional_statistics(
            batch, kept, rc.selection,
            bootstrap_options(rc, derive_seed(row_seed, kConditionedBootstrap)));
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  });
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, const ScenarioConfig& cfg,
                 const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  CsvFile csv(out_dir / "sweep.csv", "sweep", &cfg);
  csv.row({"row", cfg.sweep ? cfg.sweep->parameter : "axis", "mc_db", "ci_low_db", "ci_high_db",
           "kept_count", "preparation_probability", "oracle_db", "oracle_probability", "error"});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto& rep = row.report;
    const auto& o = row.oracle;
    csv.row({std::to_string(r), format_number(row.axis_value),
             rep ? format_number(rep->squeezing_db) : "", rep ? format_number(rep->ci_low_db) : "",
             rep ? format_number(rep->ci_high_db) : "", rep ? std::to_string(rep->kept_count) : "",
             rep ? format_number(rep->preparation_probability) : "",
             o ? format_number(o->transferred_db) : "", o ? format_number(o->selection_probability) : "",
             csv_quote(row.error)});
  }
  csv.close();
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const InsufficientStatisticsError*>(&e) ||
      dynamic_cast<const EmptySelectionError*>(&e) || dynamic_cast<const EstimationError*>(&e)) {
    return 3;
  }
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const ModelError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const LengthError*>(&e) || dynamic_cast<const json::exception*>(&e)) {
    return 2;
  }
  return 1;
}

FockTransferResult run_fock(const std::filesystem::path& input, const std::filesystem::path& out_dir) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw IoError("cannot read distribution file '" + input.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("'" + input.string() + "' is not valid JSON: " + e.what());
  }
  ObjectReader r(doc, "");
  auto matrix = [&](const char* key) {
    const json* v = r.find(key);
    if (!v) throw ConfigError(std::string("'") + key + "' is required");
    try {
      return JointFockDistribution::from_rows(v->get<std::vector<std::vector<double>>>());
    } catch (const json::exception&) {
      throw ConfigError(std::string("'") + key + "' must be a matrix of numbers");
    }
  };
  const auto p1 = matrix("p1");
  const auto p2 = matrix("p2");
  r.finish();

  const auto result = fock_transfer(p1, p2);
  ensure_directory(out_dir);
  CsvFile csv(out_dir / "fock.csv", "fock", nullptr);
  csv.comment("input: " + input.filename().string());
  csv.comment("acceptance_probability: " + format_number(result.acceptance_probability));
  csv.comment(std::string("diagonal: ") + (result.idlers.is_diagonal() ? "true" : "false"));
  csv.row({"n_i1", "n_i2", "probability"});
  const std::size_t dim = result.idlers.dimension();
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      csv.row({std::to_string(a), std::to_string(b), format_number(result.idlers(a, b))});
    }
  }
  csv.close();
  return result;
}

bool run_selftest(std::ostream& log, std::uint64_t seed) {
  bool all = true;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all = all && ok;
  };

  {
    const TwinPairParams p{7.0, 20.0, 1.0, 0.0};
    const auto o = predict_transfer(p, p, 0.03);
    check("oracle headline", std::abs(o.transferred_db - 4.0) <= 0.01,
          "7 dB pairs -> " + format_number(o.transferred_db) + " dB");
  }

  struct Point {
    double squeezing_db, excess_db, delta;
    MeasurementSetting setting;
  };
  const Point points[] = {{7.0, 20.0, 0.03, MeasurementSetting::TwinBeams0deg},
                          {5.0, 30.0, 0.1, MeasurementSetting::TwinBeams0deg},
                          {9.0, 20.0, 0.3, MeasurementSetting::TwinBeams0deg},
                          {3.0, 20.0, 1.0, MeasurementSetting::TwinBeams0deg},
                          {7.0, 20.0, 0.03, MeasurementSetting::CoherentState}};
  constexpr std::size_t kPoints = 1000000;
  for (std::size_t k = 0; k < std::size(points); ++k) {
    const auto& pt = points[k];
    const TwinPairParams p{pt.squeezing_db, pt.excess_db, 1.0, 0.0};
    SelectionConfig sel;
    sel.bandwidth_delta = pt.delta;
    const auto oracle = predict_transfer(p, p, pt.delta, pt.setting);
    const auto batch =
        sample_batch(build_covariance(p, p, pt.setting), kPoints, derive_seed(seed, k));
    const auto kept = select(batch, sel);
    const auto rep = conditional_statistics(batch, kept, sel, {1000, 0.68, derive_seed(seed, 100 + k)});

    std::ostringstream name;
    name << setting_name(pt.setting) << " S=" << pt.squeezing_db << " dB, excess=" << pt.excess_db
         << " dB, dI=" << pt.delta;
    const double z = (rep.squeezing_db - oracle.transferred_db) / rep.standard_error_db();
    check("transfer " + name.str(), std::abs(z) <= 3.0,
          "MC " + format_number(rep.squeezing_db) + " dB vs oracle " +
              format_number(oracle.transferred_db) + " dB (z=" + format_number(z) + ")");

    const double prob = oracle.selection_probability;
    const double sigma = std::sqrt(prob * (1.0 - prob) / static_cast<double>(kPoints));
    const double zp = (rep.preparation_probability - prob) / sigma;
    check("probability " + name.str(), std::abs(zp) <= 3.0,
          "MC " + format_number(rep.preparation_probability) + " vs erf " + format_number(prob) +
              " (z=" + format_number(zp) + ")");
  }

  {
    const auto diag = JointFockDistribution::from_rows({{0.25, 0, 0}, {0, 0.5, 0}, {0, 0, 0.25}});
    const auto t = fock_transfer(diag, diag);
    check("fock diagonal", t.idlers.is_diagonal(),
          "acceptance " + format_number(t.acceptance_probability));
  }

  {
    const auto cov = build_covariance({}, {}, MeasurementSetting::TwinBeams0deg);
    const auto a = sample_batch(cov, 10000, seed);
    const auto b = sample_batch(cov, 10000, seed);
    check("determinism", a.channels == b.channels, "repeat draw with the same seed");
  }
  return all;
}

}  // namespace qct::cli
