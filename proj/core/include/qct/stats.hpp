#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qct {

/// Unbiased (n−1) sample variance. Throws EstimationError for fewer than 2 values.
double sample_variance(std::span<const double> values);

/// −10·log₁₀(sample_variance / shot_reference): decibels below the shot reference.
double variance_db(std::span<const double> values, double shot_reference);

/// Histogram in units of δ, with a bin centred on zero.
struct Histogram {
  double bin_width = 0.0;           ///< in units of δ
  std::vector<double> bin_edges;    ///< counts.size() + 1 edges, in units of δ
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double center(std::size_t bin) const { return 0.5 * (bin_edges[bin] + bin_edges[bin + 1]); }
};

/// Bins `values` (model units) by value/δ with width `bin_width_delta` ∈ (0, 1).
Histogram histogram(std::span<const double> values, double bin_width_delta);

struct ConfidenceInterval {
  double low_db = 0.0;
  double high_db = 0.0;

  double half_width() const noexcept { return 0.5 * (high_db - low_db); }
};

struct BootstrapOptions {
  std::size_t resamples = 1000;
  double level = 0.68;
  std::uint64_t seed = 0;
};

/// Percentile bootstrap of variance_db. Deterministic per seed and independent of the
/// thread count; widened if necessary so that it contains the point estimate.
ConfidenceInterval bootstrap_ci(std::span<const double> values, double shot_reference,
                                std::size_t resamples, double level, std::uint64_t seed);

inline ConfidenceInterval bootstrap_ci(std::span<const double> values, double shot_reference,
                                       const BootstrapOptions& opts) {
  return bootstrap_ci(values, shot_reference, opts.resamples, opts.level, opts.seed);
}

/// Outcome of one conditioned (or unconditioned) acquisition.
struct TransferReport {
  double squeezing_db = 0.0;  ///< below SNL; negative means excess noise
  double ci_low_db = 0.0;
  double ci_high_db = 0.0;
  std::size_t kept_count = 0;
  std::size_t total = 0;
  double preparation_probability = 0.0;
  std::string config_echo;

  /// Bootstrap standard error, read off the 68% interval.
  double standard_error_db() const noexcept { return 0.5 * (ci_high_db - ci_low_db); }
};

}  // namespace qct
