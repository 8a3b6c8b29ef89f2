// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Closed-form expectations of the sampled model. Phase-randomized coherent
// light makes the photon counts at distinct gates independent Poisson
// variables, so each gate clicks independently and the squashed outcome
// follows from a Poisson-binomial count of the other gates.

#include <cmath>
#include <stdexcept>

#include "qkd/simulator.hpp"

namespace qkd::sim {
namespace {

// Sifted error class of a click at `gate` for Alice's state, or -1.
int classify(const StateLabel& alice, int gate) {
  const Gate g = Gate::from_index(gate);
  const auto pair = measured_pair(g.delay, g.slot);
  if (pair[0] < 0) return -1;
  const StateLabel bob{pair[0], pair[1], g.port == 1};
  if (bob.basis() != alice.basis()) return -1;
  return error_class(alice, bob);
}

std::array<double, kGates> photon_pmf(const ReceiverModel& model, int state) {
  const double p = model.config().depolarize_p;
  const auto& coh = model.gate_pmf(state, false);
  const auto& mix = model.gate_pmf(state, true);
  std::array<double, kGates> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - p) * coh[i] + p * mix[i];
  return out;
}

// E[1 / (offset + Bin(n, d))]
double inverse_binomial_mean(int n, double d, int offset) {
  if (d <= 0.0) return 1.0 / offset;
  if (d >= 1.0) return 1.0 / (offset + n);
  double sum = 0.0;
  double pk = std::pow(1.0 - d, n);
  const double ratio = d / (1.0 - d);
  for (int k = 0; k <= n; ++k) {
    sum += pk / (offset + k);
    pk *= static_cast<double>(n - k) / (k + 1) * ratio;
  }
  return sum;
}

// P(pick y) for independent per-gate click probabilities c.
std::array<double, kGates> squash_independent(const std::array<double, kGates>& c) {
  std::array<double, kGates> out{};
  for (int y = 0; y < kGates; ++y) {
    // Poisson-binomial pmf of the other gates.
    std::array<double, kGates> pmf{};
    pmf[0] = 1.0;
    int len = 1;
    for (int x = 0; x < kGates; ++x) {
      if (x == y) continue;
      const double q = c[static_cast<std::size_t>(x)];
      for (int k = len; k >= 1; --k)
        pmf[static_cast<std::size_t>(k)] = pmf[static_cast<std::size_t>(k)] * (1.0 - q) + pmf[static_cast<std::size_t>(k - 1)] * q;
      pmf[0] *= 1.0 - q;
      if (len < kGates) ++len;
    }
    double inv = 0.0;
    for (int k = 0; k < len; ++k) inv += pmf[static_cast<std::size_t>(k)] / (1 + k);
    out[static_cast<std::size_t>(y)] = c[static_cast<std::size_t>(y)] * inv;
  }
  return out;
}

struct Accumulator {
  double clicked = 0.0;
  double sifted = 0.0;
  double multi = 0.0;
  std::array<double, 4> errors{};

  void add_picks(const StateLabel& alice, const std::array<double, kGates>& pick, double weight) {
    for (int y = 0; y < kGates; ++y) {
      const int g = classify(alice, y);
      if (g < 0) continue;
      const double w = pick[static_cast<std::size_t>(y)] * weight;
      sifted += w;
      errors[static_cast<std::size_t>(g)] += w;
    }
  }

  ExpectedRow finish() const {
    ExpectedRow row;
    row.gain = clicked;
    row.sifted = sifted;
    row.multi_click = multi;
    if (sifted > 0.0)
      row.errors = cww::ErrorSpectrum4::make(errors[0] / sifted, errors[1] / sifted, errors[2] / sifted,
                                             errors[3] / sifted);
    return row;
  }
};

// Exactly one photon emitted.
Accumulator single_photon_expectation(const ReceiverModel& model) {
  const double eta = model.config().transmittance();
  const double d = model.config().dark_rate;
  const double a1 = d > 0.0 ? (1.0 - std::pow(1.0 - d, kGates)) / (kGates * d) : 1.0;
  const double b2 = inverse_binomial_mean(kGates - 2, d, 2);
  const double keep_all = std::pow(1.0 - d, kGates);
  const double keep_others = std::pow(1.0 - d, kGates - 1);

  Accumulator acc;
  acc.clicked = 1.0 - (1.0 - eta) * keep_all;
  const double p1 = eta * keep_others + (1.0 - eta) * kGates * d * keep_others;
  acc.multi = 1.0 - (1.0 - eta) * keep_all - p1;
  for (int s = 0; s < 12; ++s) {
    const StateLabel alice = StateLabel::from_index(s);
    const auto pmf = photon_pmf(model, s);
    std::array<double, kGates> pick{};
    for (std::size_t y = 0; y < pick.size(); ++y) {
      const double pi = eta * pmf[y];
      pick[y] = pi * a1 + (eta - pi) * d * b2 + (1.0 - eta) * d * a1;
    }
    acc.add_picks(alice, pick, 1.0 / 12.0);
  }
  return acc;
}

Accumulator poisson_expectation(const ReceiverModel& model, double mu) {
  const double eta = model.config().transmittance();
  const double d = model.config().dark_rate;
  Accumulator acc;
  for (int s = 0; s < 12; ++s) {
    const StateLabel alice = StateLabel::from_index(s);
    const auto pmf = photon_pmf(model, s);
    std::array<double, kGates> c{};
    double none = 1.0;
    for (std::size_t x = 0; x < c.size(); ++x) {
      c[x] = 1.0 - (1.0 - d) * std::exp(-mu * eta * pmf[x]);
      none *= 1.0 - c[x];
    }
    double one = 0.0;
    for (std::size_t x = 0; x < c.size(); ++x)
      if (c[x] < 1.0) one += c[x] / (1.0 - c[x]) * none;
    acc.clicked += (1.0 - none) / 12.0;
    acc.multi += (1.0 - none - one) / 12.0;
    acc.add_picks(alice, squash_independent(c), 1.0 / 12.0);
  }
  return acc;
}

}  // namespace

ExpectedRow expected_row(const SimConfig& config, int intensity_index) {
  if (intensity_index < 0 || intensity_index > 2) throw std::invalid_argument("expected_row: index outside 0..2");
  const ReceiverModel model(config);
  if (config.source == Source::single_photon) return single_photon_expectation(model).finish();
  return poisson_expectation(model, config.intensities[static_cast<std::size_t>(intensity_index)]).finish();
}

std::vector<decoy::IntensityRecord> expected_records(const SimConfig& config) {
  std::vector<decoy::IntensityRecord> out;
  for (int i = 0; i < 3; ++i) {
    const ExpectedRow row = expected_row(config, i);
    decoy::IntensityRecord r;
    r.intensity = config.intensities[static_cast<std::size_t>(i)];
    r.gain = row.gain;
    r.error_rates = {row.errors[1], row.errors[2], row.errors[3]};
    out.push_back(r);
  }
  return out;
}

SinglePhotonTruth single_photon_truth(const SimConfig& config) {
  const ReceiverModel model(config);
  const ExpectedRow row = single_photon_expectation(model).finish();
  SinglePhotonTruth t;
  t.y0 = 1.0 - std::pow(1.0 - config.dark_rate, kGates);
  t.y1 = row.gain;
  t.sifted_given_detected = row.gain > 0.0 ? row.sifted / row.gain : 0.0;
  t.e1 = row.errors;
  return t;
}

}  // namespace qkd::sim
