// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qkd::decoy {
namespace {

constexpr double kSeriesCutoff = 1e-15;

// Poisson weights mu^n e^-mu / n! until mu^n/n! falls below the cutoff.
std::vector<double> poisson_weights(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson_mix: intensity must be >= 0");
  std::vector<double> w;
  double term = 1.0;  // mu^n / n!
  const double damp = std::exp(-mu);
  for (int n = 0; n < 10000; ++n) {
    if (n > mu && term < kSeriesCutoff) break;
    w.push_back(term * damp);
    term *= mu / (n + 1);
  }
  return w;
}

void check_ordered(const IntensityRecord& hi, const IntensityRecord& lo) {
  if (!(hi.intensity > lo.intensity)) throw std::invalid_argument("decoy intensities must be strictly decreasing");
}

}  // namespace

void IntensityRecord::validate() const {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw std::invalid_argument("record: intensity must be > 0");
  if (!(gain >= 0.0 && gain <= 1.0)) throw std::invalid_argument("record: gain outside [0,1]");
  double sum = 0.0;
  for (double e : error_rates) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("record: error rate outside [0,1]");
    sum += e;
  }
  if (sum > 1.0 + kNormTolerance) throw std::invalid_argument("record: error rates sum past 1");
}

MixResult poisson_mix(const std::function<double(int)>& yield, const std::function<ErrorSpectrum4(int)>& errors,
                      double mu) {
  const std::vector<double> weights = poisson_weights(mu);
  double gain = 0.0;
  std::array<double, 4> err{};
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const double y = yield(static_cast<int>(n));
    if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("poisson_mix: yield outside [0,1]");
    const double wy = y * weights[n];
    gain += wy;
    if (wy > 0.0) {
      const ErrorSpectrum4 en = errors(static_cast<int>(n));
      for (std::size_t g = 0; g < 4; ++g) err[g] += en.e[g] * wy;
    }
  }
  MixResult out;
  out.gain = gain;
  if (gain > 0.0) out.errors = ErrorSpectrum4::make(err[0] / gain, err[1] / gain, err[2] / gain, err[3] / gain);
  return out;
}

MixResult poisson_mix(std::span<const double> yields, std::span<const ErrorSpectrum4> errors, double mu) {
  if (errors.size() < yields.size()) throw std::invalid_argument("poisson_mix: missing error spectra");
  return poisson_mix(
      [&](int n) { return static_cast<std::size_t>(n) < yields.size() ? yields[static_cast<std::size_t>(n)] : 0.0; },
      [&](int n) { return errors[static_cast<std::size_t>(n)]; }, mu);
}

double estimate_y0(const IntensityRecord& nu, const IntensityRecord& up) {
  check_ordered(nu, up);
  const double v = (nu.intensity * up.gain * std::exp(up.intensity) - up.intensity * nu.gain * std::exp(nu.intensity)) /
                   (nu.intensity - up.intensity);
  return std::max(0.0, v);
}

double estimate_y1(const IntensityRecord& mu, const IntensityRecord& nu, const IntensityRecord& up, double y0) {
  check_ordered(mu, nu);
  check_ordered(nu, up);
  const double m = mu.intensity, n = nu.intensity, u = up.intensity;
  const double denom = m * (n - u) - n * n + u * u;
  if (!(denom > 0.0)) throw std::invalid_argument("estimate_y1: non-positive denominator mu(nu-up) - nu^2 + up^2");
  const double bracket = nu.gain * std::exp(n) - up.gain * std::exp(u) -
                         (n * n - u * u) / (m * m) * (mu.gain * std::exp(m) - y0);
  return std::max(0.0, m / denom * bracket);
}

double estimate_e1_rate(double nu, double gain_nu, double err_nu, double up, double gain_up, double err_up,
                        double y1) {
  if (!(nu > up)) throw std::invalid_argument("estimate_e1: decoy intensities must be strictly decreasing");
  if (!(y1 > 0.0)) throw std::invalid_argument("estimate_e1: single-photon yield bound is zero");
  const double v = (err_nu * gain_nu * std::exp(nu) - err_up * gain_up * std::exp(up)) / ((nu - up) * y1);
  return std::clamp(v, 0.0, 1.0);
}

double estimate_e1_class(const IntensityRecord& nu, const IntensityRecord& up, int g, double y1) {
  if (g < 1 || g > 3) throw std::invalid_argument("estimate_e1_class: class must be 1, 2 or 3");
  const auto i = static_cast<std::size_t>(g - 1);
  return estimate_e1_rate(nu.intensity, nu.gain, nu.error_rates[i], up.intensity, up.gain, up.error_rates[i], y1);
}

SinglePhotonBounds estimate_all(std::span<const IntensityRecord> records) {
  if (records.size() != 3) throw std::invalid_argument("estimate_all: expected exactly three intensity records");
  for (const auto& r : records) r.validate();
  const auto& mu = records[0];
  const auto& nu = records[1];
  const auto& up = records[2];
  check_ordered(mu, nu);
  check_ordered(nu, up);

  SinglePhotonBounds out;
  out.y0 = estimate_y0(nu, up);
  out.y1 = estimate_y1(mu, nu, up, out.y0);
  std::array<double, 3> cls{};
  for (int g = 1; g <= 3; ++g) cls[static_cast<std::size_t>(g - 1)] = estimate_e1_class(nu, up, g, out.y1);
  const double total = cls[0] + cls[1] + cls[2];
  if (total > 1.0) {
    out.clamped = true;
    for (double& c : cls) c /= total;
  }
  out.e1 = ErrorSpectrum4::make(std::max(0.0, 1.0 - cls[0] - cls[1] - cls[2]), cls[0], cls[1], cls[2]);
  return out;
}

double single_photon_fraction(const IntensityRecord& signal, double y1) {
  if (!(signal.gain > 0.0)) throw std::invalid_argument("single_photon_fraction: signal gain is zero");
  return std::clamp(y1 * signal.intensity * std::exp(-signal.intensity) / signal.gain, 0.0, 1.0);
}

}  // namespace qkd::decoy
