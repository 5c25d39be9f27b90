#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qct/model.hpp"
#include "qct/stats.hpp"

namespace qct {

/// Post-selection rule: keep event i iff |trigger₁[i] − trigger₂[i]| ≤ bandwidth_delta·δ.
///
/// bandwidth_delta is the half-width of the acceptance window in units of δ, so
/// bandwidth_delta → 0 is exact coincidence and +∞ keeps everything.
struct SelectionConfig {
  double bandwidth_delta = 0.03;
  std::array<Channel, 2> trigger_channels{Channel::S1, Channel::S2};
  std::array<Channel, 2> target_channels{Channel::I1, Channel::I2};
  std::size_t min_kept = 100;  ///< below this, conditional_statistics refuses to report

  /// Throws ValidationError for a non-positive bandwidth, ConfigError for
  /// repeated or overlapping channels.
  void validate() const;

  std::string describe() const;
};

struct SelectionResult {
  std::vector<std::size_t> kept_indices;  ///< strictly increasing
  std::size_t kept_count = 0;
  std::size_t total = 0;
  double preparation_probability = 0.0;
};

/// Applies the coincidence window. Throws EmptySelectionError if nothing is kept.
SelectionResult select(const SampleBatch& batch, const SelectionConfig& cfg);

/// Every index of the batch: the unconditioned acquisition.
SelectionResult select_all(const SampleBatch& batch);

/// target₁ − target₂ over the kept indices, in index order.
std::vector<double> target_difference(const SampleBatch& batch, const SelectionResult& result,
                                      const SelectionConfig& cfg);

/// Var(target₁ − target₂) over kept events relative to the two-beam shot level,
/// with a bootstrap interval. Throws InsufficientStatisticsError below cfg.min_kept.
TransferReport conditional_statistics(const SampleBatch& batch, const SelectionResult& result,
                                      const SelectionConfig& cfg,
                                      const BootstrapOptions& bootstrap = {});

}  // namespace qct
