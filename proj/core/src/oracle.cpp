#include "qct/oracle.hpp"

#include <cmath>
#include <numbers>

#include "qct/errors.hpp"

namespace qct {
namespace {

// (∫₀ᵗ x²e^{−x²/2}dx) / (∫₀ᵗ e^{−x²/2}dx) from the termwise-integrated exponential series.
double truncated_ratio_series(double t) {
  const double u = t * t;
  double term = 1.0;  // (−u/2)^k / k!
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < 40; ++k) {
    num += term / (2.0 * k + 3.0);
    den += term / (2.0 * k + 1.0);
    term *= -0.5 * u / (k + 1.0);
    if (std::abs(term) < 1e-18) break;
  }
  return u * num / den;
}

}  // namespace

double truncated_gaussian_variance(double sigma, double half_width) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
  if (!(half_width > 0.0)) throw DomainError("half_width must be positive");
  if (std::isinf(half_width)) return sigma * sigma;

  const double t = half_width / sigma;
  if (t < 1.0) return sigma * sigma * truncated_ratio_series(t);

  const double pdf = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
  const double mass = std::erf(t / std::numbers::sqrt2);
  return sigma * sigma * (1.0 - 2.0 * t * pdf / mass);
}

TransferPrediction predict_transfer(const PairVariances& pair1, const PairVariances& pair2,
                                    double delta_i) {
  if (!(delta_i > 0.0)) throw DomainError("delta_i must be positive");
  const double va = (pair1.sum + pair2.sum) / 4.0;
  const double vb = (pair1.difference + pair2.difference) / 4.0;
  const double total = va + vb;
  const double rho = vb / total;
  const double half_width = delta_i * kDelta;

  TransferPrediction out;
  const double lever = 1.0 - 2.0 * rho;
  out.conditional_variance = lever * lever * truncated_gaussian_variance(std::sqrt(total), half_width) +
                             4.0 * va * vb / total;
  out.transferred_db = -10.0 * std::log10(out.conditional_variance / kShotDifferenceVariance);
  out.selection_probability =
      std::isinf(half_width) ? 1.0 : std::erf(half_width / (std::numbers::sqrt2 * std::sqrt(total)));
  return out;
}

TransferPrediction predict_transfer(const TwinPairParams& pair1, const TwinPairParams& pair2,
                                    double delta_i, MeasurementSetting setting) {
  pair1.validate("pair1");
  pair2.validate("pair2");
  return predict_transfer(effective_variances(pair1, setting), effective_variances(pair2, setting),
                          delta_i);
}

JointFockDistribution JointFockDistribution::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t dim = rows.size();
  if (dim == 0) throw ValidationError("distribution", "empty matrix");
  std::vector<double> p;
  p.reserve(dim * dim);
  double total = 0.0;
  for (const auto& row : rows) {
    if (row.size() != dim) throw ValidationError("distribution", "matrix must be square");
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("distribution", "entries must be finite and non-negative");
      }
      p.push_back(v);
      total += v;
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("distribution", "entries sum to " + std::to_string(total) + ", not 1");
  }
  return JointFockDistribution(dim, std::move(p));
}

bool JointFockDistribution::is_diagonal() const noexcept {
  for (std::size_t a = 0; a < dim_; ++a)
    for (std::size_t b = 0; b < dim_; ++b)
      if (a != b && p_[a * dim_ + b] != 0.0) return false;
  return true;
}

std::vector<std::vector<double>> JointFockDistribution::rows() const {
  std::vector<std::vector<double>> out(dim_);
  for (std::size_t a = 0; a < dim_; ++a) out[a].assign(p_.begin() + a * dim_, p_.begin() + (a + 1) * dim_);
  return out;
}

FockTransferResult fock_transfer(const JointFockDistribution& p1, const JointFockDistribution& p2) {
  if (p1.dimension() != p2.dimension()) {
    throw ValidationError("distribution", "p1 and p2 must have the same dimension");
  }
  const std::size_t dim = p1.dimension();
  std::vector<double> joint(dim * dim, 0.0);
  double acceptance = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      double v = 0.0;
      for (std::size_t n = 0; n < dim; ++n) v += p1(n, a) * p2(n, b);
      joint[a * dim + b] = v;
      acceptance += v;
    }
  }
  if (!(acceptance > 0.0)) {
    throw EmptySelectionError("no outcome has equal photon numbers on both signal beams");
  }
  for (double& v : joint) v /= acceptance;
  return {JointFockDistribution(dim, std::move(joint)), acceptance};
}

}  // namespace qct
