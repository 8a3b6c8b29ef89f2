// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Ideal-apparatus asymptotic key-rate curves for the comparator protocols,
// plus threshold and crossover finders.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qkd::rates {

enum class Protocol {
  six_state,
  bb84,
  ss4_unbiased,
  ss4_islam,
  ss4_extreme,
  ss4_biased,
  cww4_ber,
  cww4_der,
  reduced_cww4,
};

enum class Axis { ber, der };

/// A protocol together with its free parameter: the sifting factor for
/// ss4_biased, the acceptance fraction for reduced_cww4; ignored otherwise.
struct ProtocolSpec {
  Protocol protocol = Protocol::six_state;
  double param = 1.0;

  /// "ss4_biased:0.7", "reduced_cww4:0.8", "six_state", ...
  static ProtocolSpec parse(std::string_view name);
  std::string name() const;
};

/// Basis-sifting factor of p^2 + (1-p)^2 for a basis bias p.
double biased_sift_factor(double bias);
inline constexpr double kIslamBias = 0.9;

/// 1 - H(1 - 3e/2, e/2, e/2, e/2), per qubit. Domain [0, 2/3].
double rate_six_state_core(double ber);
double rate_six_state_core_raw(double ber);
/// 1 - 2 h(e), per qubit. Domain [0, 1/2].
double rate_bb84(double ber);
double rate_bb84_raw(double ber);
/// sift (2 - 2 H(1 - e*, e*/3, e*/3, e*/3)) / 2, per qudit.
double rate_ss4(double e_star, double sift_factor);
double rate_ss4_raw(double e_star, double sift_factor);
/// accept * rate_six_state_core(e) / 2.
double rate_reduced_cww4(double ber, double accept_fraction);

/// Plotted per-packet rate at error rate x on the given axis. BER-native
/// curves read e = 2x/3 on the DER axis, DER-native ones e* = 3x/2 on the
/// BER axis. Sifting factors are included (six-state and reduced CWW4
/// 1/3, BB84 1/2). `raw` skips the clamp at zero.
double curve_rate(const ProtocolSpec& p, Axis axis, double x, bool raw = false);

/// Largest admissible error rate for the protocol on the axis.
double domain_end(const ProtocolSpec& p, Axis axis);

/// Error rate where the unclamped rate first reaches zero, to 1e-5.
/// Throws std::runtime_error when the sign does not change in the domain.
double find_threshold(const ProtocolSpec& p, Axis axis);

/// First error rate where curve a rises above curve b, to 1e-5.
double find_crossover(const ProtocolSpec& a, const ProtocolSpec& b, Axis axis);

struct RateCurveSpec {
  ProtocolSpec protocol;
  Axis axis = Axis::ber;
  std::vector<double> grid;
};

/// (error rate, clamped rate) pairs. The grid must be strictly increasing.
std::vector<std::pair<double, double>> emit_curve(const RateCurveSpec& spec);

}  // namespace qkd::rates
