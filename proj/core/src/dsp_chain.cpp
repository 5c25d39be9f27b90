#include "qct/dsp_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qct/errors.hpp"
#include "qct/parallel.hpp"
#include "qct/random.hpp"

namespace qct {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBlockOutputs = 1024;

void require_positive(const char* field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("signal_chain.") + field, "must be positive and finite");
  }
}

// First-order shelf with |H(f)|² = gain²·(1 + depth·L(f)), L the warped Lorentzian.
Biquad lorentzian_shelf(double depth, double gain, const SignalChainConfig& cfg) {
  const double wp = std::tan(kPi * cfg.cavity_bandwidth_hz / cfg.synth_rate_hz);
  const double wz = wp * std::sqrt(1.0 + depth);
  Biquad q;
  q.b0 = gain * (1.0 + wz) / (1.0 + wp);
  q.b1 = gain * (wz - 1.0) / (1.0 + wp);
  q.a1 = (wp - 1.0) / (1.0 + wp);
  return q;
}

// Lorentzian depth coefficients that pin the PSDs at Ω to V₋ and V₊.
double difference_depth(const PairVariances& p, const SignalChainConfig& cfg) {
  return -(1.0 - p.difference / kShotDifferenceVariance) /
         warped_lorentzian(cfg.lo_frequency_hz, cfg);
}

double sum_depth(const PairVariances& p, const SignalChainConfig& cfg) {
  return (p.sum / kShotDifferenceVariance - 1.0) / warped_lorentzian(cfg.lo_frequency_hz, cfg);
}

// The synthesis realizes two independent pairs with Var(sₖ) = Var(iₖ).
void require_pair_structure(const FourChannelCovariance& cov) {
  const auto& m = cov.matrix();
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * std::max(scale, 1.0);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 2; c < 4; ++c) {
      if (std::abs(m[r][c]) > tol) {
        throw ValidationError("cov", "pairs must be independent (cross-pair block non-zero)");
      }
    }
  }
  if (std::abs(m[0][0] - m[1][1]) > tol || std::abs(m[2][2] - m[3][3]) > tol) {
    throw ValidationError("cov", "signal and idler of a pair must have equal variance");
  }
}

double impulse_energy(BiquadCascade filter) {
  filter.reset();
  double energy = 0.0;
  double tail = 0.0;
  double x = 1.0;
  constexpr std::size_t kWindow = 1 << 14;
  for (std::size_t n = 0; n < (std::size_t{1} << 28); ++n) {
    const double y = filter.process(x);
    x = 0.0;
    energy += y * y;
    tail += y * y;
    if ((n + 1) % kWindow == 0) {
      if (tail <= 1e-18 * energy) break;
      tail = 0.0;
    }
  }
  return energy;
}

}  // namespace

void SignalChainConfig::validate() const {
  require_positive("lo_frequency_hz", lo_frequency_hz);
  require_positive("synth_rate_hz", synth_rate_hz);
  require_positive("antialias_cutoff_hz", antialias_cutoff_hz);
  require_positive("post_mixer_cutoff_hz", post_mixer_cutoff_hz);
  require_positive("output_rate_hz", output_rate_hz);
  require_positive("cavity_bandwidth_hz", cavity_bandwidth_hz);
  if (!std::isfinite(mixer_phase_rad)) {
    throw ValidationError("signal_chain.mixer_phase_rad", "must be finite");
  }
  if (record_points < 1) throw ValidationError("signal_chain.record_points", "must be at least 1");
  if (output_rate_hz < 2.0 * post_mixer_cutoff_hz) {
    throw ValidationError("signal_chain.output_rate_hz", "must be at least 2·post_mixer_cutoff_hz");
  }
  if (!(synth_rate_hz > 2.0 * (lo_frequency_hz + post_mixer_cutoff_hz))) {
    throw ValidationError("signal_chain.synth_rate_hz",
                          "must exceed 2·(lo_frequency_hz + post_mixer_cutoff_hz)");
  }
  if (antialias_cutoff_hz > 0.5 * synth_rate_hz) {
    throw ValidationError("signal_chain.antialias_cutoff_hz", "must not exceed synth_rate_hz/2");
  }
  if (antialias_cutoff_hz < lo_frequency_hz + post_mixer_cutoff_hz) {
    throw ValidationError("signal_chain.antialias_cutoff_hz",
                          "front-end filter must pass lo_frequency_hz + post_mixer_cutoff_hz");
  }
  if (!(cavity_bandwidth_hz < 0.5 * synth_rate_hz)) {
    throw ValidationError("signal_chain.cavity_bandwidth_hz", "must be below synth_rate_hz/2");
  }
  const double ratio = synth_rate_hz / output_rate_hz;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || ratio < 1.0) {
    throw ValidationError("signal_chain.output_rate_hz",
                          "synth_rate_hz must be an integer multiple of output_rate_hz");
  }
}

std::size_t SignalChainConfig::decimation() const {
  return static_cast<std::size_t>(std::llround(synth_rate_hz / output_rate_hz));
}

std::size_t SignalChainConfig::warmup_points() const {
  // Slowest Butterworth pole decays at 2π·fc·sin(π/2N); wait for e^{-30}.
  const double decay = 2.0 * kPi * post_mixer_cutoff_hz * std::sin(kPi / (2.0 * kPostMixerOrder));
  const auto points = static_cast<std::size_t>(std::ceil(30.0 / decay * output_rate_hz));
  return std::max<std::size_t>(points, 8);
}

std::complex<double> Biquad::response(double freq_hz, double rate_hz) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * freq_hz / rate_hz);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

double BiquadCascade::magnitude(double freq_hz, double rate_hz) const {
  double mag = 1.0;
  for (const auto& s : sections_) mag *= std::abs(s.response(freq_hz, rate_hz));
  return mag;
}

std::vector<Biquad> butterworth_lowpass(int order, double cutoff_hz, double rate_hz) {
  if (order < 2 || order % 2 != 0) throw DomainError("Butterworth order must be even and >= 2");
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * rate_hz)) {
    throw DomainError("cutoff must lie in (0, rate/2)");
  }
  const double w = std::tan(kPi * cutoff_hz / rate_hz);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double zeta = std::sin(kPi * (2.0 * k + 1.0) / (2.0 * order));
    const double a0 = 1.0 + 2.0 * zeta * w + w * w;
    Biquad s;
    s.b0 = w * w / a0;
    s.b1 = 2.0 * s.b0;
    s.b2 = s.b0;
    s.a1 = 2.0 * (w * w - 1.0) / a0;
    s.a2 = (1.0 - 2.0 * zeta * w + w * w) / a0;
    sections.push_back(s);
  }
  return sections;
}

BiquadCascade post_mixer_filter(const SignalChainConfig& cfg) {
  return BiquadCascade(
      butterworth_lowpass(kPostMixerOrder, cfg.post_mixer_cutoff_hz, cfg.synth_rate_hz));
}

double warped_lorentzian(double freq_hz, const SignalChainConfig& cfg) {
  const double x = std::tan(kPi * freq_hz / cfg.synth_rate_hz) /
                   std::tan(kPi * cfg.cavity_bandwidth_hz / cfg.synth_rate_hz);
  return 1.0 / (1.0 + x * x);
}

double difference_psd(const PairVariances& pair, double freq_hz, const SignalChainConfig& cfg) {
  return kShotDifferenceVariance * (1.0 + difference_depth(pair, cfg) * warped_lorentzian(freq_hz, cfg));
}

double sum_psd(const PairVariances& pair, double freq_hz, const SignalChainConfig& cfg) {
  return kShotDifferenceVariance * (1.0 + sum_depth(pair, cfg) * warped_lorentzian(freq_hz, cfg));
}

WidebandSource::WidebandSource(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                               std::uint64_t seed)
    : seed_(seed) {
  cfg.validate();
  require_pair_structure(cov);
  for (int k = 0; k < 2; ++k) {
    const PairVariances p = cov.pair_variances(k + 1);
    const double dd = difference_depth(p, cfg);
    const double sd = sum_depth(p, cfg);
    if (1.0 + dd < 0.0) {
      throw ValidationError("pair" + std::to_string(k + 1) + ".squeezing_db",
                            "squeezing at the analysis frequency is unattainable with cavity "
                            "bandwidth " + std::to_string(cfg.cavity_bandwidth_hz) + " Hz");
    }
    if (1.0 + sd < 0.0) {
      throw ValidationError("pair" + std::to_string(k + 1) + ".excess_sum_db",
                            "sum-mode variance below the attainable minimum");
    }
    // Modes X = sₖ + iₖ and Y = sₖ − iₖ carry twice the per-beam shot density.
    shapers_[2 * k] = BiquadCascade({lorentzian_shelf(sd, std::numbers::sqrt2, cfg)});
    shapers_[2 * k + 1] = BiquadCascade({lorentzian_shelf(dd, std::numbers::sqrt2, cfg)});
  }
}

void WidebandSource::generate(const std::array<std::span<double>, kChannelCount>& out) {
  const std::size_t m = out[0].size();
  for (const auto& col : out) {
    if (col.size() != m) throw LengthError("channel blocks must have equal length");
  }
  // Streams 0..3 are the white inputs of X₁, Y₁, X₂, Y₂; they land in s1, i1, s2, i2
  // and are turned into the channel currents in place.
  parallel_for(kChannelCount, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      NormalStream(seed_, j).fill(position_, out[j]);
      auto& shaper = shapers_[j];
      for (double& v : out[j]) v = shaper.process(v);
    }
  });
  for (std::size_t k = 0; k < 2; ++k) {
    auto x = out[2 * k];
    auto y = out[2 * k + 1];
    for (std::size_t n = 0; n < m; ++n) {
      const double sum = x[n];
      const double diff = y[n];
      x[n] = 0.5 * (sum + diff);
      y[n] = 0.5 * (sum - diff);
    }
  }
  position_ += m;
}

Demodulator::Demodulator(const SignalChainConfig& cfg)
    : cfg_(cfg),
      decimation_((cfg.validate(), cfg.decimation())),
      warmup_(cfg.warmup_points()),
      calibration_(1.0 / std::sqrt(impulse_energy(post_mixer_filter(cfg)))),
      cycles_per_sample_(cfg.lo_frequency_hz / cfg.synth_rate_hz) {
  for (auto& f : filters_) f = post_mixer_filter(cfg);
  for (auto& o : out_) o.reserve(cfg.record_points);
}

bool Demodulator::push(const std::array<std::span<const double>, kChannelCount>& block) {
  const std::size_t m = block[0].size();
  for (const auto& col : block) {
    if (col.size() != m) throw LengthError("channel blocks must have equal length");
  }
  if (complete()) return false;

  std::vector<double> lo(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double t = static_cast<double>(position_ + n) * cycles_per_sample_;
    lo[n] = std::numbers::sqrt2 * std::cos(2.0 * kPi * (t - std::floor(t)) + cfg_.mixer_phase_rad);
  }

  // Output k (counting warm-up) is the filter state after wideband sample (k+1)·D − 1.
  const std::size_t already = produced_;
  std::array<std::size_t, kChannelCount> made{};
  parallel_for(kChannelCount, 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      auto& filter = filters_[c];
      auto& out = out_[c];
      std::size_t count = already;
      for (std::size_t n = 0; n < m && count < cfg_.record_points; ++n) {
        const double y = filter.process(block[c][n] * lo[n]);
        const std::uint64_t t = position_ + n + 1;
        if (t % decimation_ == 0 && t / decimation_ > warmup_) {
          out.push_back(y * calibration_);
          ++count;
        }
      }
      made[c] = count;
    }
  });
  produced_ = made[0];
  position_ += m;
  return !complete();
}

std::array<std::vector<double>, kChannelCount> Demodulator::take() { return std::move(out_); }

WidebandRecord synthesize(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                          std::uint64_t seed) {
  WidebandSource source(cov, cfg, seed);
  WidebandRecord rec;
  rec.rate_hz = cfg.synth_rate_hz;
  rec.seed = seed;
  const std::size_t length = cfg.synth_length();
  std::array<std::span<double>, kChannelCount> spans;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    rec.channels[c].resize(length);
    spans[c] = rec.channels[c];
  }
  source.generate(spans);
  return rec;
}

SampleBatch demodulate(const WidebandRecord& rec, const SignalChainConfig& cfg) {
  cfg.validate();
  if (rec.size() < cfg.synth_length()) {
    throw LengthError("wideband record has " + std::to_string(rec.size()) + " samples, " +
                      std::to_string(cfg.synth_length()) + " needed for " +
                      std::to_string(cfg.record_points) + " output points");
  }
  Demodulator demod(cfg);
  std::array<std::span<const double>, kChannelCount> spans;
  for (std::size_t c = 0; c < kChannelCount; ++c) spans[c] = rec.channels[c];
  demod.push(spans);

  SampleBatch batch;
  batch.seed = rec.seed;
  batch.channels = demod.take();
  return batch;
}

SampleBatch acquire(const FourChannelCovariance& cov, const SignalChainConfig& cfg,
                    std::uint64_t seed) {
  WidebandSource source(cov, cfg, seed);
  Demodulator demod(cfg);
  const std::size_t block = kBlockOutputs * cfg.decimation();
  std::array<std::vector<double>, kChannelCount> buffers;
  std::array<std::span<double>, kChannelCount> out;
  std::array<std::span<const double>, kChannelCount> in;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    buffers[c].resize(block);
    out[c] = buffers[c];
    in[c] = buffers[c];
  }
  while (!demod.complete()) {
    source.generate(out);
    demod.push(in);
  }
  SampleBatch batch;
  batch.seed = seed;
  batch.channels = demod.take();
  return batch;
}

}  // namespace qct
