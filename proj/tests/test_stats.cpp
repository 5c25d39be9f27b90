#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "qct/errors.hpp"
#include "qct/model.hpp"
#include "qct/stats.hpp"
#include "test_support.hpp"

using namespace qct;

namespace {

std::vector<double> gaussian(std::size_t n, double variance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, std::sqrt(variance));
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Gaussian mass of [a, b] for N(0, σ²).
double normal_mass(double a, double b, double sigma) {
  return 0.5 * (std::erf(b / (sigma * std::sqrt(2.0))) - std::erf(a / (sigma * std::sqrt(2.0))));
}

}  // namespace

TEST_CASE("variance_db on exact-variance samples") {
  // Symmetric ±a samples have unbiased variance a²·n/(n−1); pick a to hit the target exactly.
  auto exact = [](double variance) {
    const std::size_t n = 1000;
    const double a = std::sqrt(variance * (n - 1) / n);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = (k % 2 ? a : -a);
    return v;
  };
  CHECK(variance_db(exact(2.0), 2.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(variance_db(exact(0.3990), 2.0) == doctest::Approx(7.00).epsilon(1e-3));
  CHECK(variance_db(exact(0.7972), 2.0) == doctest::Approx(3.99).epsilon(1e-3));
  CHECK(variance_db(exact(4.0), 2.0) == doctest::Approx(-3.0103).epsilon(1e-4));
}

TEST_CASE("sample_variance is stable for large offsets") {
  std::vector<double> v;
  for (int k = 0; k < 1000; ++k) v.push_back(1e9 + (k % 2 ? 1.0 : -1.0));
  CHECK(sample_variance(v) == doctest::Approx(1000.0 / 999.0).epsilon(1e-9));
}

TEST_CASE("variance_db error cases") {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, -1.0};
  CHECK_THROWS_AS(variance_db(one, 2.0), EstimationError);
  CHECK_THROWS_AS(variance_db(std::vector<double>{}, 2.0), EstimationError);
  CHECK_THROWS_AS(variance_db(two, 0.0), DomainError);
  CHECK_THROWS_AS(variance_db(two, -1.0), DomainError);
}

TEST_CASE("property: variance_db is invariant to scaling data and reference together") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  const auto v = gaussian(5000, 1.3, 17);
  const double base = variance_db(v, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double c = scale(rng);
    auto w = v;
    for (auto& x : w) x *= c;
    CHECK(variance_db(w, 2.0 * c * c) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("histogram of a single value") {
  const std::vector<double> v{0.0};
  const auto h = histogram(v, 0.1);
  CHECK(h.total == 1);
  std::uint64_t nonzero = 0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    if (h.counts[b]) {
      ++nonzero;
      CHECK(std::abs(h.center(b)) < 1e-12);
    }
  }
  CHECK(nonzero == 1);
  CHECK(h.bin_edges.size() == h.counts.size() + 1);
}

TEST_CASE("histogram error cases") {
  const std::vector<double> v{0.0, 1.0};
  CHECK_THROWS_AS(histogram(std::vector<double>{}, 0.1), EstimationError);
  CHECK_THROWS_AS(histogram(v, 0.0), DomainError);
  CHECK_THROWS_AS(histogram(v, 1.0), DomainError);
  const std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS_AS(histogram(bad, 0.1), EstimationError);
}

TEST_CASE("histogram of shot-noise samples follows the Gaussian (chi-square)") {
  const auto v = gaussian(200000, 2.0, 41);  // difference of two shot-noise channels
  const auto h = histogram(v, 0.1);
  CHECK(h.total == v.size());
  // Bin edges are in units of δ; the data have σ = δ, so σ = 1 in bin units.
  double chi2 = 0.0;
  int dof = -1;
  double pooled_obs = 0.0, pooled_exp = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double expected = h.total * normal_mass(h.bin_edges[b], h.bin_edges[b + 1], 1.0);
    pooled_obs += h.counts[b];
    pooled_exp += expected;
    if (pooled_exp >= 5.0) {
      chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      ++dof;
      pooled_obs = pooled_exp = 0.0;
    }
  }
  REQUIRE(dof > 10);
  const double p = boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
  CHECK_MESSAGE(p > 1e-3, "chi2 = " << chi2 << " dof = " << dof);
}

TEST_CASE("histogram width ratio: 4 dB conditioned against coherent") {
  const auto coherent = gaussian(200000, 2.0, 1);
  const auto squeezed = gaussian(200000, 2.0 * std::pow(10.0, -0.4), 2);
  auto width = [](const Histogram& h) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      m1 += h.counts[b] * h.center(b);
      m2 += h.counts[b] * h.center(b) * h.center(b);
    }
    m1 /= h.total;
    return std::sqrt(m2 / h.total - m1 * m1);
  };
  const double ratio = width(histogram(squeezed, 0.1)) / width(histogram(coherent, 0.1));
  CHECK(ratio == doctest::Approx(std::pow(10.0, -0.2)).epsilon(0.03));  // ≈ 0.63
}

TEST_CASE("bootstrap interval width scales with sample size") {
  const auto big = gaussian(100000, 0.8, 5);
  const auto ci_big = bootstrap_ci(big, 2.0, 1000, 0.68, 9);
  CHECK(ci_big.high_db - ci_big.low_db < 0.1);

  const auto small = gaussian(1000, 2.0 * std::pow(10.0, -0.4), 6);
  const auto ci_small = bootstrap_ci(small, 2.0, 1000, 0.68, 9);
  // Var of log sample variance ≈ 2/n, so the 68% full width is about 2·4.34·√(2/1000) ≈ 0.39 dB.
  CHECK(ci_small.high_db - ci_small.low_db > 0.2);
  CHECK(ci_small.high_db - ci_small.low_db < 0.45);
  const double point = variance_db(small, 2.0);
  CHECK(ci_small.low_db <= point);
  CHECK(point <= ci_small.high_db);
}

TEST_CASE("bootstrap: 200 and 1000 resamples agree on the width") {
  const auto v = gaussian(5000, 1.0, 8);
  const auto a = bootstrap_ci(v, 2.0, 200, 0.68, 1);
  const auto b = bootstrap_ci(v, 2.0, 1000, 0.68, 1);
  CHECK(a.half_width() == doctest::Approx(b.half_width()).epsilon(0.2));
}

TEST_CASE("bootstrap coverage of the 68% interval") {
  const double truth_db = 4.0;
  const double variance = 2.0 * std::pow(10.0, -truth_db / 10.0);
  int covered = 0;
  constexpr int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto v = gaussian(1000, variance, 1000 + r);
    const auto ci = bootstrap_ci(v, 2.0, 300, 0.68, 7 + r);
    covered += (ci.low_db <= truth_db && truth_db <= ci.high_db) ? 1 : 0;
  }
  CHECK(covered >= 120);  // 60%
  CHECK(covered <= 152);  // 76%
}

TEST_CASE("bootstrap is deterministic and validates its inputs") {
  const auto v = gaussian(2000, 1.0, 4);
  const auto a = bootstrap_ci(v, 2.0, 500, 0.68, 11);
  const auto b = bootstrap_ci(v, 2.0, 500, 0.68, 11);
  const auto c = bootstrap_ci(v, 2.0, 500, 0.68, 12);
  CHECK(a.low_db == b.low_db);
  CHECK(a.high_db == b.high_db);
  CHECK((a.low_db != c.low_db || a.high_db != c.high_db));

  const std::vector<double> few(29, 1.0);
  CHECK_THROWS_AS(bootstrap_ci(few, 2.0, 500, 0.68, 1), EstimationError);
  CHECK_THROWS_AS(bootstrap_ci(v, 2.0, 199, 0.68, 1), DomainError);
  CHECK_THROWS_AS(bootstrap_ci(v, 2.0, 500, 1.0, 1), DomainError);
  CHECK_THROWS_AS(bootstrap_ci(v, 0.0, 500, 0.68, 1), DomainError);
}
