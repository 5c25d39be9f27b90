#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "qct/errors.hpp"
#include "qct/model.hpp"
#include "qct/oracle.hpp"
#include "qct/selection.hpp"
#include "test_support.hpp"

using namespace qct;

namespace {

const TwinPairParams kPair{7.0, 20.0, 1.0, 0.0};

SampleBatch twin_batch(std::size_t n, std::uint64_t seed,
                       MeasurementSetting setting = MeasurementSetting::TwinBeams0deg) {
  return sample_batch(build_covariance(kPair, kPair, setting), n, seed);
}

}  // namespace

TEST_CASE("infinite bandwidth keeps every event") {
  const auto batch = twin_batch(20000, 3);
  SelectionConfig cfg;
  cfg.bandwidth_delta = std::numeric_limits<double>::infinity();
  const auto sel = select(batch, cfg);
  CHECK(sel.kept_count == batch.size());
  CHECK(sel.preparation_probability == 1.0);

  const auto all = select_all(batch);
  CHECK(all.kept_indices == sel.kept_indices);
  const auto a = conditional_statistics(batch, sel, cfg, {200, 0.68, 1});
  const auto b = conditional_statistics(batch, all, cfg, {200, 0.68, 1});
  CHECK(a.squeezing_db == b.squeezing_db);
  const auto d = test::difference(batch.channel(Channel::I1), batch.channel(Channel::I2));
  CHECK(a.squeezing_db == doctest::Approx(test::db_below(test::variance(d), 2.0)).epsilon(1e-9));
}

TEST_CASE("coherent selection probability equals erf(ΔI/√2)") {
  const auto batch = sample_batch(FourChannelCovariance::shot_noise(), 1000000, 8);
  SelectionConfig cfg;
  const auto sel = select(batch, cfg);
  const double p = std::erf(0.03 / std::sqrt(2.0));
  const double sigma = std::sqrt(p * (1 - p) / batch.size());
  CHECK(std::abs(sel.preparation_probability - p) < 3 * sigma);
}

TEST_CASE("twin-beam selection probability matches a direct count") {
  const auto batch = twin_batch(300000, 21);
  SelectionConfig cfg;
  const auto sel = select(batch, cfg);
  std::size_t count = 0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double d = batch.channels[0][k] - batch.channels[2][k];
    count += std::abs(d) <= 0.03 * std::sqrt(2.0) ? 1 : 0;
  }
  CHECK(sel.kept_count == count);
  CHECK(sel.total == batch.size());
  CHECK(sel.preparation_probability == doctest::Approx(double(count) / batch.size()));
  CHECK(std::is_sorted(sel.kept_indices.begin(), sel.kept_indices.end()));
}

TEST_CASE("headline transfer: 7 dB pairs give about 4 dB on the idlers") {
  const auto batch = twin_batch(300000, 1);
  SelectionConfig cfg;
  const auto report = conditional_statistics(batch, select(batch, cfg), cfg);
  CHECK(report.squeezing_db == doctest::Approx(4.0).epsilon(0.3 / 4.0));
  CHECK(report.ci_low_db <= report.squeezing_db);
  CHECK(report.squeezing_db <= report.ci_high_db);
  CHECK(report.total == 300000);
}

TEST_CASE("coherent conditioned idlers stay at shot noise") {
  const auto batch = twin_batch(300000, 2, MeasurementSetting::CoherentState);
  SelectionConfig cfg;
  const auto report = conditional_statistics(batch, select(batch, cfg), cfg);
  CHECK(std::abs(report.squeezing_db) < 0.2);
}

TEST_CASE("45 degree conditioned idlers agree with the closed form") {
  const auto batch = twin_batch(300000, 4, MeasurementSetting::TwinBeams45deg);
  SelectionConfig cfg;
  const auto report = conditional_statistics(batch, select(batch, cfg), cfg);
  const auto oracle = predict_transfer(kPair, kPair, cfg.bandwidth_delta,
                                       MeasurementSetting::TwinBeams45deg);
  CHECK(std::abs(report.squeezing_db - oracle.transferred_db) < 3 * report.standard_error_db());
}

TEST_CASE("property: selection does not depend on row order within the window") {
  const auto batch = twin_batch(50000, 6);
  SelectionConfig cfg;
  cfg.bandwidth_delta = 0.2;
  const auto sel = select(batch, cfg);

  SampleBatch reversed;
  for (std::size_t c = 0; c < kChannelCount; ++c)
    reversed.channels[c].assign(batch.channels[c].rbegin(), batch.channels[c].rend());
  const auto rsel = select(reversed, cfg);
  CHECK(rsel.kept_count == sel.kept_count);

  auto va = target_difference(batch, sel, cfg);
  auto vb = target_difference(reversed, rsel, cfg);
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  CHECK(va == vb);
}

TEST_CASE("property: a wider window keeps a superset") {
  const auto batch = twin_batch(50000, 7);
  SelectionConfig narrow, wide;
  narrow.bandwidth_delta = 0.05;
  wide.bandwidth_delta = 0.3;
  const auto a = select(batch, narrow);
  const auto b = select(batch, wide);
  CHECK(std::includes(b.kept_indices.begin(), b.kept_indices.end(), a.kept_indices.begin(),
                      a.kept_indices.end()));
}

TEST_CASE("property: events exactly on the window edge are kept") {
  SampleBatch batch;
  const double edge = 0.5 * std::sqrt(2.0);
  batch.channels[0] = {edge, edge, 0.0};
  batch.channels[1] = {0.0, 0.0, 0.0};
  batch.channels[2] = {0.0, -1e-9, 0.0};
  batch.channels[3] = {0.0, 0.0, 0.0};
  SelectionConfig cfg;
  cfg.bandwidth_delta = 0.5;
  const auto sel = select(batch, cfg);
  CHECK(sel.kept_indices == std::vector<std::size_t>{0, 2});
}

TEST_CASE("selection error cases") {
  const auto batch = twin_batch(1000, 9);
  SelectionConfig cfg;
  cfg.bandwidth_delta = 0.0;
  CHECK_THROWS_AS(select(batch, cfg), ValidationError);
  cfg.bandwidth_delta = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);

  cfg = {};
  cfg.trigger_channels = {Channel::S1, Channel::S1};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.target_channels = {Channel::S1, Channel::I2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = {};
  cfg.bandwidth_delta = 1e-12;
  CHECK_THROWS_AS(select(batch, cfg), EmptySelectionError);

  cfg = {};
  cfg.min_kept = 100;
  const auto small = select(batch, cfg);  // about 3 of 1000 events
  REQUIRE(small.kept_count < 100);
  try {
    conditional_statistics(batch, small, cfg);
    FAIL("expected InsufficientStatisticsError");
  } catch (const InsufficientStatisticsError& e) {
    CHECK(e.count() == small.kept_count);
    CHECK(e.required() == 100);
  }
}
