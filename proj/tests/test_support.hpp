#pragma once

// Small helpers shared by the unit tests. Everything here is independent of the
// code under test so it can serve as an oracle.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace qct::test {

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double covariance(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

inline double variance(std::span<const double> a) { return covariance(a, a); }

inline std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

inline double db_below(double variance, double reference) {
  return -10.0 * std::log10(variance / reference);
}

/// Averaged Hann-windowed periodogram at one frequency, normalized so that white
/// noise of unit per-sample variance reads 1.
inline double psd_at(std::span<const double> x, double freq_hz, double rate_hz,
                     std::size_t segment = 1024) {
  std::vector<double> w(segment);
  double wsum = 0.0;
  for (std::size_t n = 0; n < segment; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / segment);
    wsum += w[n] * w[n];
  }
  const double omega = 2.0 * std::numbers::pi * freq_hz / rate_hz;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start + segment <= x.size(); start += segment / 2) {
    std::complex<double> s = 0.0;
    for (std::size_t n = 0; n < segment; ++n) {
      s += w[n] * x[start + n] * std::polar(1.0, -omega * static_cast<double>(n));
    }
    acc += std::norm(s) / wsum;
    ++count;
  }
  return acc / static_cast<double>(count);
}

/// Simpson's rule on [a, b] with an even number of intervals.
template <typename F>
double simpson(F f, double a, double b, std::size_t intervals = 20000) {
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  return s * h / 3.0;
}

}  // namespace qct::test
