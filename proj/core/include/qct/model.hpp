#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qct {

/// Two-beam difference variance of shot-noise-limited light (per-beam shot variance is 1).
inline constexpr double kShotDifferenceVariance = 2.0;

/// Standard deviation of the coherent-state difference photocurrent; the unit of ΔI.
inline constexpr double kDelta = std::numbers::sqrt2;

/// Detector channels, in sample-column order.
enum class Channel : std::uint8_t { S1 = 0, I1 = 1, S2 = 2, I2 = 3 };

inline constexpr std::size_t kChannelCount = 4;

std::string_view channel_name(Channel c) noexcept;

/// Parses "s1", "i1", "s2", "i2". Throws ConfigError on anything else.
Channel parse_channel(std::string_view name);

/// One OPO's twin-beam pair as seen by the detectors.
struct TwinPairParams {
  double squeezing_db = 7.0;    ///< difference noise below SNL, dB
  double excess_sum_db = 20.0;  ///< sum noise above SNL, dB
  double efficiency = 1.0;      ///< detection efficiency η
  double rotation_deg = 0.0;    ///< half-wave-plate angle θ

  /// Throws ValidationError naming `prefix.field` for the first out-of-range field.
  void validate(std::string_view prefix = "pair") const;
};

enum class MeasurementSetting : std::uint8_t { TwinBeams0deg, TwinBeams45deg, CoherentState };

std::string_view setting_name(MeasurementSetting s) noexcept;
MeasurementSetting parse_setting(std::string_view name);

/// Effective intra-pair variances: difference mode V₋ and sum mode V₊.
struct PairVariances {
  double difference = kShotDifferenceVariance;
  double sum = kShotDifferenceVariance;
};

/// Beam-splitter loss on a two-beam mode variance: V ← ηV + (1−η)·2.
constexpr double apply_loss(double variance, double efficiency) noexcept {
  return efficiency * variance + (1.0 - efficiency) * kShotDifferenceVariance;
}

/// Base variances, then half-wave-plate rotation, then loss; setting overrides applied first.
PairVariances effective_variances(const TwinPairParams& pair, MeasurementSetting setting);

/// Second moments of (s1, i1, s2, i2) in shot-noise units.
class FourChannelCovariance {
 public:
  using Matrix = std::array<std::array<double, kChannelCount>, kChannelCount>;

  /// Block-diagonal covariance of two independent pairs.
  static FourChannelCovariance from_pairs(const PairVariances& pair1, const PairVariances& pair2);

  /// Arbitrary symmetric matrix. Throws ModelError if it is not symmetric or not finite;
  /// positive semi-definiteness is checked where the matrix is factorized.
  static FourChannelCovariance from_matrix(const Matrix& m);

  /// Shot-noise covariance (identity).
  static FourChannelCovariance shot_noise();

  double operator()(Channel row, Channel col) const noexcept {
    return m_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  }
  const Matrix& matrix() const noexcept { return m_; }

  /// Var(s_k − i_k) and Var(s_k + i_k) for pair 1 or 2.
  PairVariances pair_variances(int pair_index) const;

 private:
  explicit FourChannelCovariance(const Matrix& m) : m_(m) {}
  Matrix m_{};
};

FourChannelCovariance build_covariance(const TwinPairParams& pair1, const TwinPairParams& pair2,
                                       MeasurementSetting setting);

/// −10·log₁₀(V₋/2) of the requested pair; positive means below shot noise.
double squeezing_db_of(const FourChannelCovariance& cov, int pair_index);

/// Columnar zero-mean fluctuation samples, one column per channel.
struct SampleBatch {
  std::uint64_t seed = 0;
  std::array<std::vector<double>, kChannelCount> channels;

  std::size_t size() const noexcept { return channels[0].size(); }
  std::span<const double> channel(Channel c) const noexcept {
    return channels[static_cast<std::size_t>(c)];
  }
  std::span<double> channel(Channel c) noexcept { return channels[static_cast<std::size_t>(c)]; }
};

/// n independent draws from N(0, cov). Output depends only on (cov, n, seed),
/// not on the configured thread count. Throws ModelError for a non-PSD matrix.
SampleBatch sample_batch(const FourChannelCovariance& cov, std::size_t n, std::uint64_t seed);

}  // namespace qct
