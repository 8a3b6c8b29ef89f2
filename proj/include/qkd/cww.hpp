// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Key-rate mathematics for the four-dimensional round-robin qudit scheme
// (CWW4): the A/B/C/D single-photon channel model, phase-error spectra,
// the decoy-state key-rate formula and the worst-case (DER / BER) curves.

#pragma once

#include <array>

#include "qkd/probmath.hpp"

namespace qkd::cww {

/// Probabilities of the four dit-error classes g = 0..3, where g is the
/// bitwise XOR of Alice's and Bob's two raw bits (bit 0 = pair bit,
/// bit 1 = sign bit).
struct ErrorSpectrum4 {
  std::array<double, 4> e{1.0, 0.0, 0.0, 0.0};

  /// Validates entries in [0,1] and the unit sum (renormalizing within
  /// kNormTolerance). Throws std::invalid_argument otherwise.
  static ErrorSpectrum4 make(double e0, double e1, double e2, double e3);
  /// Class 0 is the complement 1 - (e1 + e2 + e3).
  static ErrorSpectrum4 from_errors(double e1, double e2, double e3);

  double operator[](int g) const { return e[static_cast<std::size_t>(g)]; }
  double total_error() const { return e[1] + e[2] + e[3]; }
  /// BER of the raw key, (e1 + e2)/2 + e3.
  double bit_error_rate() const { return 0.5 * (e[1] + e[2]) + e[3]; }
  ProbVec dist() const { return ProbVec{e[0], e[1], e[2], e[3]}; }
};

/// Combined spin/phase error table e_jk; j is the error class g, k the
/// phase index. Stored row major.
struct PauliTable16 {
  std::array<double, 16> e{};

  double operator()(int j, int k) const { return e[static_cast<std::size_t>(4 * j + k)]; }
  double& operator()(int j, int k) { return e[static_cast<std::size_t>(4 * j + k)]; }
  /// Row sums, i.e. the single-photon error spectrum.
  ErrorSpectrum4 spin_marginal() const;
  double entropy_bits() const;
};

/// Single-photon channel weights with A + 3B + 3C + 9D = 1.
struct AbcdModel {
  double a = 1.0, b = 0.0, c = 0.0, d = 0.0;

  /// e1^0 = A+B+C+D, e1^1 = 2(B+D), e1^2 = 2(C+D), e1^3 = 4D.
  ErrorSpectrum4 single_photon_spectrum() const;
  /// Rows (A,B,C,D), (B,B,D,D), (C,C,D,D), (D,D,D,D).
  PauliTable16 pauli_table() const;
  double constraint_sum() const { return a + 3.0 * b + 3.0 * c + 9.0 * d; }
};

struct AbcdFit {
  AbcdModel model;
  /// Largest absolute change the clamping made to the input spectrum.
  double clamp_shift = 0.0;
  bool consistent() const { return clamp_shift <= 1e-6; }
};

/// Inverts the four linear relations of the model. Negative B, C or A are
/// clamped to zero and the model rescaled onto the A+3B+3C+9D=1 surface.
AbcdFit abcd_from_single_photon(const ErrorSpectrum4& e1);

/// Minimizing phase-error spectra for a fixed model: delta^0 ∝ (A,B,C,D),
/// delta^1 ∝ (B,B,D,D), delta^2 ∝ (C,C,D,D), delta^3 uniform. A zero
/// normalizer yields the uniform spectrum (its class carries zero weight).
std::array<ProbVec, 4> delta_spectra(const AbcdModel& m);

struct KeyRateReport {
  double rate = 0.0;      ///< max(raw_rate, 0), secret bits per packet
  double raw_rate = 0.0;  ///< signed value before clamping
  double gain_q = 0.0;
  double entropy_e = 0.0;  ///< H2({E^g})
  double omega = 0.0;
  double sift_q = 0.0;
  double bits_per_dit = 0.0;
  std::array<double, 4> delta_entropies{};
  ErrorSpectrum4 single_photon;
  AbcdModel abcd;
  bool abcd_clamped = false;
};

/// R = (qQ/s) { -H2({E^g}) + omega [s - sum_g e1^g H2(delta^g)] }.
KeyRateReport secret_key_rate(double q, double s, double gain, const ErrorSpectrum4& observed,
                           double omega, const ErrorSpectrum4& e1);

/// Stationarity condition of H({e_jk}) in e01 for the symmetric DER worst
/// case: e01^3 - (1 - 3 e01 - e*) (e* - 6 e01)^2 / 36.
double worstcase_stationarity(double e01, double e_star);

/// Unique root of worstcase_stationarity on [0, min(e*/6, (1-e*)/3)],
/// absolute tolerance 1e-12. Domain e* in (0, 3/4).
double solve_worstcase_e01(double e_star);

PauliTable16 worstcase_table(double e_star);

/// Ideal-apparatus rate (q=1/3, s=2) against the DER of the raw key.
double rate_cww4_der(double e_star);
double rate_cww4_der_raw(double e_star);

/// Ideal-apparatus rate minimized over every A/B/C/D model with the given
/// raw-key BER (B + C + 6D = e). Domain [0, 2/3].
double rate_cww4_ber(double ber);
double rate_cww4_ber_raw(double ber);

/// Model attaining the BER worst case.
AbcdModel worstcase_ber_model(double ber);

inline constexpr double kSiftQ = 1.0 / 3.0;
inline constexpr double kBitsPerDit = 2.0;

}  // namespace qkd::cww
