// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Two-decoy (vacuum+weak) single-photon bounds and the Poisson forward
// model that links per-photon-number yields to observed gains.

#pragma once

#include <array>
#include <functional>
#include <span>

#include "qkd/cww.hpp"

namespace qkd::decoy {

using cww::ErrorSpectrum4;

/// One intensity row: mean photons per packet, gain per packet and the
/// observed error rates for classes g = 1, 2, 3.
struct IntensityRecord {
  double intensity = 0.0;
  double gain = 0.0;
  std::array<double, 3> error_rates{};

  /// Throws std::invalid_argument on a malformed row.
  void validate() const;
  ErrorSpectrum4 spectrum() const { return ErrorSpectrum4::from_errors(error_rates[0], error_rates[1], error_rates[2]); }
};

struct SinglePhotonBounds {
  double y0 = 0.0;  ///< lower bound on the vacuum yield
  double y1 = 0.0;  ///< lower bound on the single-photon yield
  /// Classes 1..3 are upper bounds; class 0 is their complement.
  ErrorSpectrum4 e1;
  /// Set when the per-class bounds summed past one and had to be clamped.
  bool clamped = false;
};

struct MixResult {
  double gain = 0.0;
  ErrorSpectrum4 errors;
};

/// Q = sum_n Y_n mu^n e^-mu / n!, E^g = sum_n e_n^g Y_n mu^n e^-mu / (Q n!).
/// The series stops once mu^n / n! drops below 1e-15.
MixResult poisson_mix(const std::function<double(int)>& yield,
                      const std::function<ErrorSpectrum4(int)>& errors, double mu);

/// Finite-profile overload: entries beyond the spans are zero yields.
MixResult poisson_mix(std::span<const double> yields, std::span<const ErrorSpectrum4> errors, double mu);

/// Y0 >= max{(nu Q_up e^up - up Q_nu e^nu) / (nu - up), 0}.
double estimate_y0(const IntensityRecord& nu, const IntensityRecord& upsilon);

/// Y1 >= mu / (mu(nu-up) - nu^2 + up^2) *
///       [Q_nu e^nu - Q_up e^up - (nu^2 - up^2)/mu^2 (Q_mu e^mu - Y0)], floored at 0.
double estimate_y1(const IntensityRecord& mu, const IntensityRecord& nu, const IntensityRecord& upsilon, double y0);

/// e1 <= (E_nu Q_nu e^nu - E_up Q_up e^up) / ((nu - up) Y1), clamped to [0,1].
double estimate_e1_rate(double nu, double gain_nu, double err_nu, double up, double gain_up, double err_up,
                        double y1);

/// Class-g (1..3) version of estimate_e1_rate reading the records' error rates.
double estimate_e1_class(const IntensityRecord& nu, const IntensityRecord& upsilon, int g, double y1);

/// Records ordered signal, decoy, weak decoy (strictly decreasing intensity).
SinglePhotonBounds estimate_all(std::span<const IntensityRecord> records);

/// Single-photon fraction of the signal gain, Y1 mu e^-mu / Q_mu.
double single_photon_fraction(const IntensityRecord& signal, double y1);

}  // namespace qkd::decoy
