// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/decoy.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "oracle.hpp"

using namespace qkd::decoy;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

const std::vector<IntensityRecord> kField{
    {0.66, 5.63e-3, {0.00216, 0.0181, 0.00217}},
    {0.04, 3.56e-4, {0.0124, 0.0277, 0.0124}},
    {0.0016, 2.92e-5, {0.134, 0.142, 0.134}},
};

const std::vector<IntensityRecord> kDegraded{
    {0.66, 5.63e-3, {0.00216, 0.151, 0.00217}},
    {0.04, 3.56e-4, {0.0124, 0.194, 0.0124}},
    {0.0016, 2.92e-5, {0.134, 0.204, 0.134}},
};

// Records generated by summing a yield/error profile to n = 60.
IntensityRecord forward(double mu, const std::vector<double>& y, const std::vector<std::array<double, 3>>& e) {
  IntensityRecord r;
  r.intensity = mu;
  double gain = 0.0;
  std::array<double, 3> err{};
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double w = oracle::poisson(static_cast<int>(n), mu) * y[n];
    gain += w;
    for (std::size_t g = 0; g < 3; ++g) err[g] += w * e[n][g];
  }
  r.gain = gain;
  for (std::size_t g = 0; g < 3; ++g) r.error_rates[g] = err[g] / gain;
  return r;
}

}  // namespace

TEST_CASE("poisson_mix trivial profiles") {
  auto all_one = poisson_mix([](int) { return 1.0; }, [](int) { return ErrorSpectrum4{}; }, 0.7);
  CHECK(all_one.gain == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(all_one.errors[0] == doctest::Approx(1.0));

  const double y1 = 0.3, mu = 0.5;
  const std::vector<double> only1{0.0, y1};
  const std::vector<ErrorSpectrum4> errs{ErrorSpectrum4{}, ErrorSpectrum4{}};
  CHECK(poisson_mix(only1, errs, mu).gain == doctest::Approx(y1 * mu * std::exp(-mu)).epsilon(1e-15));
}

TEST_CASE("poisson_mix against a partial sum") {
  const double eta = 0.021, mu = 0.66, dark = 1.7e-5;
  auto yield = [&](int n) { return std::min(1.0, 1.0 - std::pow(1.0 - eta, n) + dark); };
  double want = 0.0;
  for (int n = 0; n <= 50; ++n) want += oracle::poisson(n, mu) * yield(n);
  const auto got = poisson_mix(yield, [](int) { return ErrorSpectrum4{}; }, mu);
  CHECK(std::abs(got.gain - want) < 1e-9);
  // Closed form: 1 - (1 - dark) e^{-mu eta} up to the min() clamp, which never binds here.
  CHECK(std::abs(got.gain - (dark + (1.0 - std::exp(-mu * eta)))) < 1e-9);
}

TEST_CASE("poisson_mix rejects bad input") {
  CHECK_THROWS_AS(poisson_mix([](int) { return 1.0; }, [](int) { return ErrorSpectrum4{}; }, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(poisson_mix([](int) { return 1.5; }, [](int) { return ErrorSpectrum4{}; }, 0.5),
                  std::invalid_argument);
}

TEST_CASE("field data bounds") {
  CHECK(rel(estimate_y0(kField[1], kField[2]), 1.50e-5) < 0.02);
  const auto b = estimate_all(kField);
  CHECK(rel(b.y1, 8.38e-3) < 0.01);
  CHECK(rel(b.e1[1], 0.0021) < 0.05);
  CHECK(rel(b.e1[3], 0.0021) < 0.05);
  CHECK(rel(b.e1[2], 0.019) < 0.03);
  CHECK_FALSE(b.clamped);
  CHECK(b.e1[0] == doctest::Approx(1.0 - b.e1[1] - b.e1[2] - b.e1[3]));
}

TEST_CASE("degraded data: g = 2 bound") {
  const auto b = estimate_all(kDegraded);
  CHECK(rel(b.e1[2], 0.205) < 0.02);
}

TEST_CASE("floors and degenerate inputs") {
  IntensityRecord nu = kField[1], up = kField[2];
  up.gain = 0.0;
  CHECK(estimate_y0(nu, up) == 0.0);

  std::vector<IntensityRecord> dead = kField;
  for (auto& r : dead) r.gain = 0.0;
  CHECK(estimate_y1(dead[0], dead[1], dead[2], 0.0) == 0.0);
  CHECK_THROWS_AS(estimate_e1_class(dead[1], dead[2], 1, 0.0), std::invalid_argument);
}

TEST_CASE("ordering and shape errors") {
  CHECK_THROWS_AS(estimate_y0(kField[2], kField[1]), std::invalid_argument);
  std::vector<IntensityRecord> two(kField.begin(), kField.begin() + 2);
  CHECK_THROWS_AS(estimate_all(two), std::invalid_argument);
  std::vector<IntensityRecord> swapped{kField[1], kField[0], kField[2]};
  CHECK_THROWS_AS(estimate_all(swapped), std::invalid_argument);
  // mu(nu - up) - nu^2 + up^2 <= 0 when nu + up >= mu.
  std::vector<IntensityRecord> close{kField[0], kField[1], kField[2]};
  close[1].intensity = 0.65;
  CHECK_THROWS_AS(estimate_all(close), std::invalid_argument);
  IntensityRecord bad = kField[0];
  bad.error_rates = {0.5, 0.4, 0.3};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("noiseless forward model gives zero single-photon errors") {
  std::vector<double> y(60);
  std::vector<std::array<double, 3>> e(60, {0.0, 0.0, 0.0});
  for (std::size_t n = 0; n < y.size(); ++n) y[n] = 1.0 - std::pow(0.9, static_cast<double>(n));
  const std::vector<IntensityRecord> recs{forward(0.6, y, e), forward(0.1, y, e), forward(0.01, y, e)};
  const auto b = estimate_all(recs);
  for (int g = 1; g < 4; ++g) CHECK(b.e1[g] == 0.0);
  CHECK(b.y1 <= 0.1 + 1e-12);
  CHECK(b.y1 > 0.09);
  CHECK(b.y0 <= 1e-12);
}

TEST_CASE("dark-count yield recovered on a lossless toy channel") {
  const double y0 = 1e-3;
  std::vector<double> y(60, 1.0);
  y[0] = y0;
  std::vector<std::array<double, 3>> e(60, {0.0, 0.0, 0.0});
  // Small decoys keep the multi-photon slack tiny.
  const auto nu = forward(0.002, y, e), up = forward(0.001, y, e);
  const double est = estimate_y0(nu, up);
  const double slack = 0.002 * 0.001 / 2.0 * 1.01;  // leading n = 2 term
  CHECK(est <= y0 + 1e-15);
  CHECK(est >= y0 - slack);
}

TEST_CASE("bounds hold for random yield and error profiles") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double up = 0.001 + 0.05 * u(gen);
    const double nu = up + 0.01 + 0.2 * u(gen);
    const double mu = nu + up + 0.01 + 0.8 * u(gen);
    std::vector<double> y(60);
    std::vector<std::array<double, 3>> e(60);
    for (std::size_t n = 0; n < y.size(); ++n) {
      y[n] = u(gen);
      double s = 0.0;
      for (auto& x : e[n]) s += (x = u(gen));
      const double scale = u(gen) / std::max(1.0, s);
      for (auto& x : e[n]) x *= scale;
    }
    if (trial % 3 == 0)  // monotone detector-like profile
      for (std::size_t n = 0; n < y.size(); ++n) y[n] = std::min(1.0, y[0] * 1e-3 + 1.0 - std::pow(1.0 - 0.3 * u(gen), n));
    const std::vector<IntensityRecord> recs{forward(mu, y, e), forward(nu, y, e), forward(up, y, e)};
    const double y0b = estimate_y0(recs[1], recs[2]);
    const double y1b = estimate_y1(recs[0], recs[1], recs[2], y0b);
    CHECK(y0b <= y[0] + 1e-12);
    CHECK(y1b <= y[1] + 1e-12);
    if (y1b > 1e-6) {
      for (int g = 1; g <= 3; ++g) CHECK(estimate_e1_class(recs[1], recs[2], g, y1b) >= e[1][g - 1] - 1e-9);
    }
  }
}

TEST_CASE("single photon fraction") {
  const double omega = single_photon_fraction(kField[0], 8.38e-3);
  CHECK(omega == doctest::Approx(8.38e-3 * 0.66 * std::exp(-0.66) / 5.63e-3));
  IntensityRecord zero = kField[0];
  zero.gain = 0.0;
  CHECK_THROWS_AS(single_photon_fraction(zero, 1e-3), std::invalid_argument);
}
