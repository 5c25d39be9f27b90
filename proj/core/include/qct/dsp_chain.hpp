#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qct/model.hpp"

namespace qct {

/// Photodetection and down-conversion chain. Defaults follow the experiment:
/// Ω = 3.5 MHz, 100 kHz post-mixer low-pass, 200 kS/s digitizer, 300 000 points.
struct SignalChainConfig {
  double lo_frequency_hz = 3.5e6;
  double synth_rate_hz = 5e7;
  double antialias_cutoff_hz = 2.14e7;
  double post_mixer_cutoff_hz = 1e5;
  double output_rate_hz = 2e5;
  std::size_t record_points = 300000;
  double cavity_bandwidth_hz = 1e7;  ///< Lorentzian half-width B_c of the correlated noise
  double mixer_phase_rad = 0.0;

  /// Throws ValidationError naming the first inconsistent field.
  void validate() const;

  /// synth_rate_hz / output_rate_hz; validate() requires it to be an integer.
  std::size_t decimation() const;

  /// Output samples discarded while the post-mixer filter settles.
  std::size_t warmup_points() const;

  /// Wideband samples per channel needed for one record.
  std::size_t synth_length() const { return (warmup_points() + record_points) * decimation(); }
};

/// Order of the post-mixer Butterworth low-pass.
inline constexpr int kPostMixerOrder = 8;

/// Transposed direct-form II second-order section (a0 = 1).
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double freq_hz, double rate_hz) const;
};

/// A cascade of biquads with its own state.
class BiquadCascade {
 public:
  BiquadCascade() = default;
  explicit BiquadCascade(std::vector<Biquad> sections)
      : sections_(std::move(sections)), state_(sections_.size()) {}

  double process(double x) noexcept {
    for (std::size_t k = 0; k < sections_.size(); ++k) {
      const Biquad& s = sections_[k];
      auto& z = state_[k];
      const double y = s.b0 * x + z[0];
      z[0] = s.b1 * x - s.a1 * y + z[1];
      z[1] = s.b2 * x - s.a2 * y;
      x = y;
    }
    return x;
  }

  void reset() noexcept { state_.assign(sections_.size(), {0.0, 0.0}); }

  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  /// |H(f)| of the whole cascade.
  double magnitude(double freq_hz, double rate_hz) const;

 private:
  std::vector<Biquad> sections_;
  std::vector<std::array<double, 2>> state_;
};

/// Butterworth low-pass (even order) by bilinear transform with cutoff pre-warping.
std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double rate_hz);

/// The post-mixer low-pass used by demodulate().
BiquadCascade post_mixer_filter(const SignalChainConfig& cfg);

/// Lorentzian 1/(1 + (f/B_c)²) on the bilinear-warped frequency axis
/// f → (fs/π)·tan(πf/fs); this is the shape the synthesis filters realize exactly.
double warped_lorentzian(double freq_hz, const SignalChainConfig& cfg);

/// One-sided PSD (unit = shot density of one beam) of sₖ − iₖ at `freq_hz`,
/// 2·[1 − d·L(f)], with d chosen so that the value at Ω is the pair's V₋.
double difference_psd(const PairVariances& pair, double freq_hz, const SignalChainConfig& cfg);

/// PSD of sₖ + iₖ, 2 + (V₊ − 2)·L(f)/L(Ω).
double sum_psd(const PairVariances& pair, double freq_hz, const SignalChainConfig& cfg);

/// Broadband photocurrent fluctuations of (s1, i1, s2, i2) at synth_rate_hz.
struct WidebandRecord {
  double rate_hz = 0.0;
  std::uint64_t seed = 0;
  std::array<std::vector<double>, kChannelCount> channels;

  std::size_t size() const noexcept { return channels[0].size(); }
};

/// Generates the wideband photocurrents block by block. Output index n of every
/// channel is the same whatever block sizes the caller asks for.
class WidebandSource {
 public:
  /// Throws ValidationError if cov is not made of two independent, symmetric pairs,
  /// or if V₋ at Ω is too deep for the cavity bandwidth.
  WidebandSource(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                 std::uint64_t seed);

  /// Writes the next out[c].size() samples of every channel; all spans must have equal size.
  void generate(const std::array<std::span<double>, kChannelCount>& out);

  std::uint64_t position() const noexcept { return position_; }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  // Per pair: sum-mode and difference-mode shaping filters.
  std::array<BiquadCascade, 4> shapers_;
};

/// Mixer, post-mixer low-pass, decimator and calibration for all four channels.
class Demodulator {
 public:
  explicit Demodulator(const SignalChainConfig& cfg);

  /// Consumes the next wideband block; returns false once record_points samples exist.
  bool push(const std::array<std::span<const double>, kChannelCount>& block);

  bool complete() const noexcept { return produced_ >= cfg_.record_points; }

  /// Moves out the decimated samples (exactly record_points once complete()).
  std::array<std::vector<double>, kChannelCount> take();

  /// 1/√(Σh²) of the low-pass: unit output variance for a unit white input.
  double calibration() const noexcept { return calibration_; }

 private:
  SignalChainConfig cfg_;
  std::size_t decimation_;
  std::size_t warmup_;
  double calibration_;
  double cycles_per_sample_;
  std::uint64_t position_ = 0;
  std::size_t produced_ = 0;
  std::array<BiquadCascade, kChannelCount> filters_;
  std::array<std::vector<double>, kChannelCount> out_;
};

/// Whole wideband record; intended for short records (tests, exports).
WidebandRecord synthesize(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                          std::uint64_t seed);

/// Demodulates a wideband record. Throws LengthError if it is shorter than cfg.synth_length().
SampleBatch demodulate(const WidebandRecord& rec, const SignalChainConfig& cfg);

/// synthesize + demodulate fused block-wise, bit-identical to demodulate(synthesize(...))
/// without holding the wideband record in memory.
SampleBatch acquire(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                    std::uint64_t seed);

}  // namespace qct
