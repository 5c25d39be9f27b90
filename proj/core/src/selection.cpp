#include "qct/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qct/errors.hpp"

namespace qct {

void SelectionConfig::validate() const {
  if (!(bandwidth_delta > 0.0)) {
    throw ValidationError("selection.bandwidth_delta", "must be positive");
  }
  if (trigger_channels[0] == trigger_channels[1]) {
    throw ConfigError("trigger_channels must name two different channels");
  }
  if (target_channels[0] == target_channels[1]) {
    throw ConfigError("target_channels must name two different channels");
  }
  for (Channel t : trigger_channels) {
    if (std::find(target_channels.begin(), target_channels.end(), t) != target_channels.end()) {
      throw ConfigError("trigger and target channels overlap on '" +
                        std::string(channel_name(t)) + "'");
    }
  }
}

std::string SelectionConfig::describe() const {
  std::ostringstream out;
  out << "bandwidth_delta=" << bandwidth_delta << " trigger=" << channel_name(trigger_channels[0])
      << "," << channel_name(trigger_channels[1]) << " target=" << channel_name(target_channels[0])
      << "," << channel_name(target_channels[1]) << " min_kept=" << min_kept;
  return out.str();
}

SelectionResult select(const SampleBatch& batch, const SelectionConfig& cfg) {
  cfg.validate();
  const auto a = batch.channel(cfg.trigger_channels[0]);
  const auto b = batch.channel(cfg.trigger_channels[1]);
  const double window = cfg.bandwidth_delta * kDelta;

  SelectionResult result;
  result.total = batch.size();
  for (std::size_t i = 0; i < result.total; ++i) {
    if (std::abs(a[i] - b[i]) <= window) result.kept_indices.push_back(i);
  }
  result.kept_count = result.kept_indices.size();
  if (result.kept_count == 0) {
    throw EmptySelectionError("selection window " + std::to_string(cfg.bandwidth_delta) +
                              "δ kept none of " + std::to_string(result.total) + " events");
  }
  result.preparation_probability =
      static_cast<double>(result.kept_count) / static_cast<double>(result.total);
  return result;
}

SelectionResult select_all(const SampleBatch& batch) {
  SelectionResult result;
  result.total = batch.size();
  result.kept_indices.resize(result.total);
  std::iota(result.kept_indices.begin(), result.kept_indices.end(), std::size_t{0});
  result.kept_count = result.total;
  result.preparation_probability = result.total == 0 ? 0.0 : 1.0;
  return result;
}

std::vector<double> target_difference(const SampleBatch& batch, const SelectionResult& result,
                                      const SelectionConfig& cfg) {
  const auto a = batch.channel(cfg.target_channels[0]);
  const auto b = batch.channel(cfg.target_channels[1]);
  std::vector<double> diff;
  diff.reserve(result.kept_indices.size());
  for (std::size_t i : result.kept_indices) diff.push_back(a[i] - b[i]);
  return diff;
}

TransferReport conditional_statistics(const SampleBatch& batch, const SelectionResult& result,
                                      const SelectionConfig& cfg,
                                      const BootstrapOptions& bootstrap) {
  cfg.validate();
  const std::size_t required = std::max<std::size_t>(cfg.min_kept, 2);
  if (result.kept_count < required) {
    throw InsufficientStatisticsError(result.kept_count, required);
  }
  const auto diff = target_difference(batch, result, cfg);

  TransferReport report;
  report.squeezing_db = variance_db(diff, kShotDifferenceVariance);
  const auto ci = bootstrap_ci(diff, kShotDifferenceVariance, bootstrap);
  report.ci_low_db = ci.low_db;
  report.ci_high_db = ci.high_db;
  report.kept_count = result.kept_count;
  report.total = result.total;
  report.preparation_probability = result.preparation_probability;
  report.config_echo = cfg.describe();
  return report;
}

}  // namespace qct
