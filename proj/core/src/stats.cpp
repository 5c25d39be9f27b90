#include "qct/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qct/errors.hpp"
#include "qct/model.hpp"
#include "qct/parallel.hpp"
#include "qct/random.hpp"

namespace qct {
namespace {

constexpr std::size_t kMinBootstrapValues = 30;
constexpr std::size_t kMinResamples = 200;

double to_db(double variance, double shot_reference) {
  return -10.0 * std::log10(variance / shot_reference);
}

// Type-7 (linear interpolation) quantile of sorted data.
double quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw EstimationError("variance needs at least 2 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double d = v - mean;
    ss += d * d;
    comp += d;
  }
  return (ss - comp * comp / n) / (n - 1.0);
}

double variance_db(std::span<const double> values, double shot_reference) {
  if (!(shot_reference > 0.0)) throw DomainError("shot_reference must be positive");
  return to_db(sample_variance(values), shot_reference);
}

Histogram histogram(std::span<const double> values, double bin_width_delta) {
  if (values.empty()) throw EstimationError("histogram of an empty sample");
  if (!(bin_width_delta > 0.0 && bin_width_delta < 1.0)) {
    throw DomainError("bin_width_delta must lie in (0, 1)");
  }
  double reach = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw EstimationError("histogram input is not finite");
    reach = std::max(reach, std::abs(v / kDelta));
  }
  // Bins are [(k − ½)w, (k + ½)w) for k = −K..K; (K + ½)w > reach by construction.
  const auto half = static_cast<std::int64_t>(std::floor(reach / bin_width_delta + 0.5));
  const std::size_t bins = static_cast<std::size_t>(2 * half + 1);

  Histogram h;
  h.bin_width = bin_width_delta;
  h.counts.assign(bins, 0);
  h.bin_edges.resize(bins + 1);
  for (std::size_t e = 0; e <= bins; ++e) {
    h.bin_edges[e] = (static_cast<double>(e) - static_cast<double>(half) - 0.5) * bin_width_delta;
  }
  for (double v : values) {
    auto k = static_cast<std::int64_t>(std::floor(v / kDelta / bin_width_delta + 0.5)) + half;
    k = std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(k)];
  }
  h.total = values.size();
  return h;
}

ConfidenceInterval bootstrap_ci(std::span<const double> values, double shot_reference,
                                std::size_t resamples, double level, std::uint64_t seed) {
  if (values.size() < kMinBootstrapValues) {
    throw EstimationError("bootstrap needs at least " + std::to_string(kMinBootstrapValues) +
                          " values, got " + std::to_string(values.size()));
  }
  if (resamples < kMinResamples) {
    throw DomainError("bootstrap needs at least " + std::to_string(kMinResamples) + " resamples");
  }
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (!(shot_reference > 0.0)) throw DomainError("shot_reference must be positive");

  const std::size_t n = values.size();
  const double nd = static_cast<double>(n);
  // Centre on the sample mean so the one-pass sums below stay well conditioned.
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / nd;
  std::vector<double> centred(values.begin(), values.end());
  for (double& v : centred) v -= mean;

  std::vector<double> estimates(resamples);
  parallel_for(resamples, 16, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Xoshiro256 pick(derive_seed(seed, r));
      double sum = 0.0;
      double sumsq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = centred[pick.below(n)];
        sum += v;
        sumsq += v * v;
      }
      const double var = (sumsq - sum * sum / nd) / (nd - 1.0);
      estimates[r] = to_db(var, shot_reference);
    }
  });
  std::sort(estimates.begin(), estimates.end());

  const double point = variance_db(values, shot_reference);
  ConfidenceInterval ci{quantile(estimates, 0.5 * (1.0 - level)),
                        quantile(estimates, 0.5 * (1.0 + level))};
  ci.low_db = std::min(ci.low_db, point);
  ci.high_db = std::max(ci.high_db, point);
  return ci;
}

}  // namespace qct
