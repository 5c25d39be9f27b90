#include "qct/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qct/errors.hpp"
#include "qct/parallel.hpp"
#include "qct/random.hpp"

namespace qct {
namespace {

constexpr std::size_t kSampleGrain = 1 << 14;

void require_range(std::string_view prefix, const char* field, double value, double lo, double hi,
                   bool open_low = false) {
  const bool ok = std::isfinite(value) && (open_low ? value > lo : value >= lo) && value <= hi;
  if (!ok) {
    throw ValidationError(std::string(prefix) + "." + field,
                          "value " + std::to_string(value) + " outside " + (open_low ? "(" : "[") +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

using Mat4 = Eigen::Matrix4d;

Mat4 to_eigen(const FourChannelCovariance::Matrix& m) {
  Mat4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = m[r][c];
  return out;
}

// Factor A with A·Aᵀ = cov. Cholesky keeps a block-diagonal covariance block-diagonal
// in A; the eigen route handles singular but PSD matrices.
Mat4 factorize(const FourChannelCovariance& cov) {
  const Mat4 m = to_eigen(cov.matrix());
  Eigen::LLT<Mat4> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::SelfAdjointEigenSolver<Mat4> eig(m);
  if (eig.info() != Eigen::Success) throw ModelError("covariance eigendecomposition failed");
  const auto& values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -1e-12 * scale) {
    throw ModelError("covariance is not positive semi-definite (min eigenvalue " +
                     std::to_string(values.minCoeff()) + ")");
  }
  // Eigenvalues within round-off of zero are zero: keeps singular inputs exactly singular.
  const Eigen::Vector4d root =
      values.unaryExpr([&](double v) { return v <= 1e-12 * scale ? 0.0 : std::sqrt(v); });
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

std::string_view channel_name(Channel c) noexcept {
  switch (c) {
    case Channel::S1: return "s1";
    case Channel::I1: return "i1";
    case Channel::S2: return "s2";
    case Channel::I2: return "i2";
  }
  return "?";
}

Channel parse_channel(std::string_view name) {
  for (auto c : {Channel::S1, Channel::I1, Channel::S2, Channel::I2}) {
    if (channel_name(c) == name) return c;
  }
  throw ConfigError("unknown channel '" + std::string(name) + "' (expected s1, i1, s2 or i2)");
}

void TwinPairParams::validate(std::string_view prefix) const {
  require_range(prefix, "squeezing_db", squeezing_db, 0.0, 20.0);
  require_range(prefix, "excess_sum_db", excess_sum_db, 0.0, 60.0);
  require_range(prefix, "efficiency", efficiency, 0.0, 1.0, /*open_low=*/true);
  require_range(prefix, "rotation_deg", rotation_deg, 0.0, 45.0);
}

std::string_view setting_name(MeasurementSetting s) noexcept {
  switch (s) {
    case MeasurementSetting::TwinBeams0deg: return "TwinBeams0deg";
    case MeasurementSetting::TwinBeams45deg: return "TwinBeams45deg";
    case MeasurementSetting::CoherentState: return "CoherentState";
  }
  return "?";
}

MeasurementSetting parse_setting(std::string_view name) {
  for (auto s : {MeasurementSetting::TwinBeams0deg, MeasurementSetting::TwinBeams45deg,
                 MeasurementSetting::CoherentState}) {
    if (setting_name(s) == name) return s;
  }
  throw ValidationError("setting", "unknown measurement setting '" + std::string(name) + "'");
}

PairVariances effective_variances(const TwinPairParams& pair, MeasurementSetting setting) {
  if (setting == MeasurementSetting::CoherentState) return {};

  const double rotation_deg =
      setting == MeasurementSetting::TwinBeams45deg ? 45.0 : pair.rotation_deg;
  double diff = kShotDifferenceVariance * std::pow(10.0, -pair.squeezing_db / 10.0);
  double sum = kShotDifferenceVariance * std::pow(10.0, pair.excess_sum_db / 10.0);

  const double angle = 2.0 * rotation_deg * std::numbers::pi / 180.0;
  const double c2 = std::cos(angle) * std::cos(angle);
  const double s2 = std::sin(angle) * std::sin(angle);
  // At 45° the mixture is exactly shot noise; cos(π/2) is not exactly zero in floating point.
  diff = rotation_deg == 45.0 ? kShotDifferenceVariance : c2 * diff + s2 * kShotDifferenceVariance;

  diff = apply_loss(diff, pair.efficiency);
  sum = apply_loss(sum, pair.efficiency);
  return {diff, sum};
}

FourChannelCovariance FourChannelCovariance::from_pairs(const PairVariances& p1,
                                                        const PairVariances& p2) {
  Matrix m{};
  auto fill = [&m](std::size_t base, const PairVariances& p) {
    const double var = (p.sum + p.difference) / 4.0;
    const double cov = (p.sum - p.difference) / 4.0;
    m[base][base] = var;
    m[base + 1][base + 1] = var;
    m[base][base + 1] = cov;
    m[base + 1][base] = cov;
  };
  fill(0, p1);
  fill(2, p2);
  return FourChannelCovariance(m);
}

FourChannelCovariance FourChannelCovariance::from_matrix(const Matrix& m) {
  for (std::size_t r = 0; r < kChannelCount; ++r) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (!std::isfinite(m[r][c])) throw ModelError("covariance has a non-finite entry");
      if (m[r][c] != m[c][r]) throw ModelError("covariance is not symmetric");
    }
  }
  return FourChannelCovariance(m);
}

FourChannelCovariance FourChannelCovariance::shot_noise() {
  return from_pairs(PairVariances{}, PairVariances{});
}

PairVariances FourChannelCovariance::pair_variances(int pair_index) const {
  if (pair_index != 1 && pair_index != 2) {
    throw ValidationError("pair_index", "must be 1 or 2");
  }
  const std::size_t s = pair_index == 1 ? 0 : 2;
  const std::size_t i = s + 1;
  return {m_[s][s] + m_[i][i] - 2.0 * m_[s][i], m_[s][s] + m_[i][i] + 2.0 * m_[s][i]};
}

FourChannelCovariance build_covariance(const TwinPairParams& pair1, const TwinPairParams& pair2,
                                       MeasurementSetting setting) {
  pair1.validate("pair1");
  pair2.validate("pair2");
  return FourChannelCovariance::from_pairs(effective_variances(pair1, setting),
                                           effective_variances(pair2, setting));
}

double squeezing_db_of(const FourChannelCovariance& cov, int pair_index) {
  return -10.0 * std::log10(cov.pair_variances(pair_index).difference / kShotDifferenceVariance);
}

SampleBatch sample_batch(const FourChannelCovariance& cov, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("n", "sample count must be at least 1");
  const Mat4 a = factorize(cov);

  SampleBatch batch;
  batch.seed = seed;
  for (auto& col : batch.channels) col.resize(n);

  const NormalStream normals(seed, /*stream=*/0);
  parallel_for(n, kSampleGrain, [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(4 * (end - begin));
    normals.fill(4 * static_cast<std::uint64_t>(begin), z);
    for (std::size_t row = begin; row < end; ++row) {
      const double* zr = &z[4 * (row - begin)];
      for (int c = 0; c < 4; ++c) {
        // Lower-triangular or dense; the explicit loop keeps the summation order fixed.
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += a(c, k) * zr[k];
        batch.channels[c][row] = v;
      }
    }
  });
  return batch;
}

}  // namespace qct
