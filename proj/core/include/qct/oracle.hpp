#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qct/model.hpp"

namespace qct {

/// Var(X | |X| ≤ c) for X ~ N(0, σ²):
///   σ²·[1 − 2t·φ(t) / (2Φ(t) − 1)],  t = c/σ.
/// Evaluated by a power series for t < 1 where the closed form cancels.
/// `half_width` may be +∞. Throws DomainError for non-positive arguments.
double truncated_gaussian_variance(double sigma, double half_width);

/// Closed-form conditioned idler statistics for two Gaussian twin-beam pairs.
struct TransferPrediction {
  double conditional_variance = 0.0;  ///< Var(i₁ − i₂ | |s₁ − s₂| ≤ ΔI·δ), model units
  double transferred_db = 0.0;        ///< −10·log₁₀(conditional_variance / 2)
  double selection_probability = 0.0;
};

/// Conditioning derivation. With xₖ = sₖ + iₖ (variance V₊ᵏ) and yₖ = sₖ − iₖ (V₋ᵏ):
///
///   A = (x₁ − x₂)/2,  V_A = (V₊¹ + V₊²)/4
///   B = (y₁ − y₂)/2,  V_B = (V₋¹ + V₋²)/4
///   D_s = s₁ − s₂ = A + B,   D_i = i₁ − i₂ = A − B,   A ⟂ B.
///
/// Regressing B on D_s gives B = ρ·D_s + R with ρ = V_B/(V_A + V_B) and R independent of
/// D_s, Var(R) = V_A·V_B/(V_A + V_B). Hence D_i = (1 − 2ρ)·D_s − 2R and, since the selection
/// only truncates D_s ~ N(0, V_A + V_B) to |D_s| ≤ ΔI·δ,
///
///   Var(D_i | sel) = (1 − 2ρ)²·Var_trunc(√(V_A + V_B), ΔI·δ) + 4·V_A·V_B/(V_A + V_B),
///   P(sel)         = erf(ΔI·δ / (√2·√(V_A + V_B))).
///
/// For V₊ → ∞ and ΔI → 0 the variance tends to 4·V_B = V₋¹ + V₋², i.e. equal pairs lose
/// exactly 10·log₁₀2 ≈ 3.01 dB. `delta_i` may be +∞ (unconditioned).
TransferPrediction predict_transfer(const PairVariances& pair1, const PairVariances& pair2,
                                    double delta_i);

TransferPrediction predict_transfer(const TwinPairParams& pair1, const TwinPairParams& pair2,
                                    double delta_i,
                                    MeasurementSetting setting = MeasurementSetting::TwinBeams0deg);

class JointFockDistribution;
struct FockTransferResult;
FockTransferResult fock_transfer(const JointFockDistribution& p1, const JointFockDistribution& p2);

/// Square joint photon-number distribution p(n_a, n_b), 0 ≤ n < dimension.
class JointFockDistribution {
 public:
  /// Rows index the first mode. Throws ValidationError unless the matrix is square,
  /// non-negative and sums to 1 within 1e-9.
  static JointFockDistribution from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dimension() const noexcept { return dim_; }
  double operator()(std::size_t a, std::size_t b) const { return p_[a * dim_ + b]; }

  /// True iff every off-diagonal entry is exactly zero.
  bool is_diagonal() const noexcept;

  std::vector<std::vector<double>> rows() const;

 private:
  JointFockDistribution(std::size_t dim, std::vector<double> p) : dim_(dim), p_(std::move(p)) {}

  std::size_t dim_ = 0;
  std::vector<double> p_;

  friend FockTransferResult fock_transfer(const JointFockDistribution&,
                                          const JointFockDistribution&);
};

struct FockTransferResult {
  JointFockDistribution idlers;  ///< p₃(n_i1, n_i2)
  double acceptance_probability = 0.0;
};

/// Ideal photon-counting version of the transfer: keep outcomes with n_s1 = n_s2.
///   p₃(a, b) ∝ Σ_N p₁(N, a)·p₂(N, b),  acceptance = Σ_{N,a,b} p₁(N, a)·p₂(N, b).
/// Throws ValidationError on a dimension mismatch and EmptySelectionError when the
/// acceptance probability is zero.
FockTransferResult fock_transfer(const JointFockDistribution& p1, const JointFockDistribution& p2);

}  // namespace qct
