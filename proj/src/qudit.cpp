// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/qudit.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd::sim {

double QuditKet::norm2() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s;
}

void QuditKet::validate() const {
  if (std::abs(norm2() - 1.0) > 1e-9) throw std::invalid_argument("QuditKet: not normalized");
}

int StateLabel::basis() const {
  if (k - j == 2) return 1;  // {02, 13}
  if (j + k == 3) return 2;  // {03, 12}
  return 0;                  // {01, 23}
}

int StateLabel::index() const {
  static constexpr int kPairIndex[4][4] = {{-1, 0, 1, 2}, {-1, -1, 3, 4}, {-1, -1, -1, 5}, {-1, -1, -1, -1}};
  return 2 * kPairIndex[j][k] + (minus ? 1 : 0);
}

StateLabel StateLabel::from_index(int index) {
  static constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  if (index < 0 || index >= 12) throw std::invalid_argument("StateLabel: index outside 0..11");
  return {kPairs[index / 2][0], kPairs[index / 2][1], (index % 2) == 1};
}

QuditKet prepare_state(int j, int k, bool minus) {
  if (!(0 <= j && j < k && k < kSlots)) throw std::invalid_argument("prepare_state: need 0 <= j < k <= 3");
  const double h = 1.0 / std::sqrt(2.0);
  QuditKet ket;
  ket.amp[static_cast<std::size_t>(j)] = h;
  ket.amp[static_cast<std::size_t>(k)] = minus ? -h : h;
  return ket;
}

QuditKet time_bin_state(int slot) {
  if (slot < 0 || slot >= kSlots) throw std::invalid_argument("time_bin_state: slot outside 0..3");
  QuditKet ket;
  ket.amp[static_cast<std::size_t>(slot)] = 1.0;
  return ket;
}

double overlap2(const QuditKet& a, const QuditKet& b) {
  Amplitude s = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
  return std::norm(s);
}

std::array<std::array<double, 12>, 12> overlap_table() {
  std::array<std::array<double, 12>, 12> t{};
  for (int a = 0; a < 12; ++a)
    for (int b = 0; b < 12; ++b)
      t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          overlap2(prepare_state(StateLabel::from_index(a)), prepare_state(StateLabel::from_index(b)));
  return t;
}

double FmiDistribution::total() const {
  double s = 0.0;
  for (const auto& row : prob) s += row[0] + row[1];
  return s;
}

FmiDistribution measure_fmi(const QuditKet& ket, int delay, double phase_offset) {
  if (delay < 1 || delay > kDelays) throw std::invalid_argument("measure_fmi: delay outside 1..3");
  const Amplitude shift = std::polar(1.0, phase_offset);
  FmiDistribution out;
  for (int t = 0; t < kOutSlots; ++t) {
    const Amplitude early = t < kSlots ? ket.amp[static_cast<std::size_t>(t)] : Amplitude{};
    const int src = t - delay;
    const Amplitude late = (src >= 0 && src < kSlots) ? ket.amp[static_cast<std::size_t>(src)] * shift : Amplitude{};
    const auto ts = static_cast<std::size_t>(t);
    out.prob[ts][0] = std::norm((early + late) / 2.0);
    out.prob[ts][1] = std::norm((early - late) / 2.0);
    out.interfering[ts] = std::abs(early) > 0.0 && std::abs(late) > 0.0;
  }
  return out;
}

FmiDistribution measure_fmi_mixed(int delay) {
  FmiDistribution out;
  for (int s = 0; s < kSlots; ++s) {
    const FmiDistribution one = measure_fmi(time_bin_state(s), delay, 0.0);
    for (std::size_t t = 0; t < kOutSlots; ++t)
      for (std::size_t p = 0; p < kPorts; ++p) out.prob[t][p] += one.prob[t][p] / kSlots;
  }
  return out;
}

std::array<int, 2> measured_pair(int delay, int slot) {
  const int j = slot - delay;
  if (j < 0 || slot >= kSlots) return {-1, -1};
  return {j, slot};
}

}  // namespace qkd::sim
