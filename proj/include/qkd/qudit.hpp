// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Four-slot time-bin qudits and the unbalanced delay interferometer.

#pragma once

#include <array>
#include <complex>

namespace qkd::sim {

using Amplitude = std::complex<double>;

inline constexpr int kSlots = 4;       ///< time bins per packet
inline constexpr int kOutSlots = 7;    ///< slots 0..6 after a delay of up to 3
inline constexpr int kPorts = 2;       ///< + and - interferometer outputs
inline constexpr int kDelays = 3;      ///< delays 1, 2, 3
inline constexpr int kGatesPerFmi = kOutSlots * kPorts;
inline constexpr int kGates = kDelays * kGatesPerFmi;

struct QuditKet {
  std::array<Amplitude, kSlots> amp{};

  double norm2() const;
  /// Throws std::invalid_argument unless the squared norm is 1 within 1e-9.
  void validate() const;
};

/// One of the twelve preparation states (|j> ± |k>)/sqrt(2), j < k.
struct StateLabel {
  int j = 0;
  int k = 1;
  bool minus = false;

  /// The three bases are the perfect matchings {01,23}, {02,13}, {03,12}.
  int basis() const;
  /// Basis-local pair bit: 0 when the pair contains slot 0.
  int pair_bit() const { return j == 0 ? 0 : 1; }
  int sign_bit() const { return minus ? 1 : 0; }
  /// 0..11, ordered by pair (01,02,03,12,13,23) then sign.
  int index() const;
  static StateLabel from_index(int index);
};

/// Throws std::invalid_argument unless 0 <= j < k <= 3.
QuditKet prepare_state(int j, int k, bool minus);
inline QuditKet prepare_state(const StateLabel& s) { return prepare_state(s.j, s.k, s.minus); }
/// |t>, a single populated time bin.
QuditKet time_bin_state(int slot);

/// |<a|b>|^2
double overlap2(const QuditKet& a, const QuditKet& b);

/// 12x12 table of |<psi_a|psi_b>|^2 in StateLabel::index order.
std::array<std::array<double, 12>, 12> overlap_table();

/// Click probabilities for one delay interferometer, indexed [slot][port]
/// with port 0 = '+', port 1 = '-'.
struct FmiDistribution {
  std::array<std::array<double, kPorts>, kOutSlots> prob{};
  std::array<bool, kOutSlots> interfering{};

  double total() const;
};

/// Port ± at time t carries [a_t ± a_{t-delay} e^{i phase}] / 2. A slot is
/// interfering when both contributing amplitudes are nonzero.
FmiDistribution measure_fmi(const QuditKet& ket, int delay, double phase_offset);

/// Distribution for the maximally mixed qudit (average over |t>).
FmiDistribution measure_fmi_mixed(int delay);

/// Pair measured by a click at `slot` of the interferometer with `delay`,
/// or {-1,-1} when the slot cannot interfere two time bins of a packet.
std::array<int, 2> measured_pair(int delay, int slot);

}  // namespace qkd::sim
