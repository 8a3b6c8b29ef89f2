// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace qkd::sim {

ChannelKind sample_channel(double depolarize_p, double loss, PacketRng& rng) {
  if (rng.uniform() < loss) return ChannelKind::lost;
  if (depolarize_p > 0.0 && rng.uniform() < depolarize_p) return ChannelKind::depolarized;
  return ChannelKind::passed;
}

ChannelOutcome apply_channel(const QuditKet& ket, double depolarize_p, double loss, PacketRng& rng) {
  ket.validate();
  return {sample_channel(depolarize_p, loss, rng), ket};
}

Gate Gate::from_index(int index) {
  if (index < 0 || index >= kGates) throw std::invalid_argument("Gate: index outside 0..41");
  return {index / kGatesPerFmi + 1, (index % kGatesPerFmi) / kPorts, index % kPorts};
}

ReceiverModel::ReceiverModel(const SimConfig& config) : config_(config) {
  config_.validate();
  loss_ = 1.0 - config_.transmittance();
  no_dark_ = std::pow(1.0 - config_.dark_rate, kGates);
  for (std::size_t i = 0; i < 3; ++i) vacuum_[i] = std::exp(-config_.intensities[i]);
  for (int d = 1; d <= kDelays; ++d) {
    const auto di = static_cast<std::size_t>(d - 1);
    const FmiDistribution mixed = measure_fmi_mixed(d);
    double acc_mixed = 0.0;
    for (int s = 0; s < 12; ++s) {
      const auto si = static_cast<std::size_t>(s);
      const FmiDistribution coh =
          measure_fmi(prepare_state(StateLabel::from_index(s)), d, config_.misalignment[di]);
      double acc = 0.0;
      for (int t = 0; t < kOutSlots; ++t) {
        for (int p = 0; p < kPorts; ++p) {
          const auto ti = static_cast<std::size_t>(t), pi = static_cast<std::size_t>(p);
          const int g = Gate{d, t, p}.index();
          coherent_pmf_[si][static_cast<std::size_t>(g)] = coh.prob[ti][pi] / kDelays;
          acc += coh.prob[ti][pi];
          coherent_cdf_[si][di][static_cast<std::size_t>(t * kPorts + p)] = acc;
        }
      }
      coherent_cdf_[si][di].back() = 1.0;
    }
    for (int t = 0; t < kOutSlots; ++t) {
      for (int p = 0; p < kPorts; ++p) {
        const auto ti = static_cast<std::size_t>(t), pi = static_cast<std::size_t>(p);
        mixed_pmf_[static_cast<std::size_t>(Gate{d, t, p}.index())] = mixed.prob[ti][pi] / kDelays;
        acc_mixed += mixed.prob[ti][pi];
        mixed_cdf_[di][static_cast<std::size_t>(t * kPorts + p)] = acc_mixed;
      }
    }
    mixed_cdf_[di].back() = 1.0;
  }
}

int ReceiverModel::sample_gate(int state_index, bool depolarized, PacketRng& rng) const {
  const auto delay = rng.below(kDelays);
  const auto& cdf = depolarized ? mixed_cdf_[delay] : coherent_cdf_[static_cast<std::size_t>(state_index)][delay];
  const double u = rng.uniform();
  int local = 0;
  while (local < kGatesPerFmi - 1 && u >= cdf[static_cast<std::size_t>(local)]) ++local;
  return static_cast<int>(delay) * kGatesPerFmi + local;
}

int error_class(const StateLabel& alice, const StateLabel& bob) {
  return (alice.pair_bit() ^ bob.pair_bit()) | ((alice.sign_bit() ^ bob.sign_bit()) << 1);
}

PacketOutcome receive_packet(const StateLabel& alice, int passed, int depolarized, const ReceiverModel& model,
                             PacketRng& rng) {
  PacketOutcome out;
  out.alice = alice;
  const int state = alice.index();

  std::uint64_t clicks = 0;
  for (int i = 0; i < passed; ++i) clicks |= 1ULL << model.sample_gate(state, false, rng);
  for (int i = 0; i < depolarized; ++i) clicks |= 1ULL << model.sample_gate(state, true, rng);

  // Dark counts: independent Bernoulli per gate, drawn by geometric skips.
  // The first uniform alone decides the common no-dark case.
  const double dark = model.config().dark_rate;
  if (dark > 0.0) {
    double u = 1.0 - rng.uniform();  // (0, 1]
    if (u > model.no_dark_probability()) {
      const double log_keep = std::log1p(-dark);
      int gate = -1;
      while (true) {
        const double skip = dark >= 1.0 ? 0.0 : std::floor(std::log(u) / log_keep);
        if (!(skip < kGates - 1 - gate)) break;
        gate += static_cast<int>(skip) + 1;
        clicks |= 1ULL << gate;
        u = 1.0 - rng.uniform();
      }
    }
  }

  out.clicks = std::popcount(clicks);
  if (out.clicks == 0) return out;

  // Squash multiple clicks to one uniformly chosen gate.
  int pick = out.clicks == 1 ? 0 : static_cast<int>(rng.below(static_cast<std::uint32_t>(out.clicks)));
  std::uint64_t m = clicks;
  while (pick-- > 0) m &= m - 1;
  out.gate = Gate::from_index(std::countr_zero(m));

  const auto pair = measured_pair(out.gate.delay, out.gate.slot);
  if (pair[0] < 0) return out;
  out.conclusive = true;
  out.bob = StateLabel{pair[0], pair[1], out.gate.port == 1};
  out.sifted = out.bob.basis() == alice.basis();
  if (out.sifted) out.error_class = error_class(alice, out.bob);
  return out;
}

namespace {

int sample_poisson(double mu, double p0, PacketRng& rng) {
  double u = rng.uniform();
  double term = p0;
  int n = 0;
  while (u >= term && n < 200) {
    u -= term;
    ++n;
    term *= mu / n;
  }
  return n;
}

}  // namespace

PacketOutcome simulate_packet(const ReceiverModel& model, std::uint64_t index) {
  const SimConfig& c = model.config();
  PacketRng rng(c.seed, index);

  const double u = rng.uniform();
  int level = 0;
  if (u >= c.selection[0]) level = u < c.selection[0] + c.selection[1] ? 1 : 2;
  const StateLabel alice = StateLabel::from_index(static_cast<int>(rng.below(12)));

  const double mu = c.intensities[static_cast<std::size_t>(level)];
  const int photons =
      c.source == Source::single_photon ? 1 : sample_poisson(mu, model.vacuum_probability(level), rng);

  const double loss = model.photon_loss();
  int passed = 0, depolarized = 0;
  for (int i = 0; i < photons; ++i) {
    switch (sample_channel(c.depolarize_p, loss, rng)) {
      case ChannelKind::passed: ++passed; break;
      case ChannelKind::depolarized: ++depolarized; break;
      case ChannelKind::lost: break;
    }
  }
  PacketOutcome out = receive_packet(alice, passed, depolarized, model, rng);
  out.intensity_index = level;
  out.photons = photons;
  return out;
}

void IntensityTally::record(const PacketOutcome& p) {
  ++sent;
  const bool single = p.photons == 1;
  if (single) ++single_sent;
  if (!p.detected()) return;
  ++detected;
  if (single) ++single_detected;
  if (p.clicks > 1) ++multi_click;
  if (!p.sifted) return;
  const auto g = static_cast<std::size_t>(p.error_class);
  const auto b = static_cast<std::size_t>(p.alice.basis());
  ++sifted;
  ++error_counts[g];
  ++sifted_by_basis[b];
  ++errors_by_basis[b][g];
  if (single) {
    ++single_sifted;
    ++single_errors[g];
  }
}

IntensityTally& IntensityTally::operator+=(const IntensityTally& o) {
  sent += o.sent;
  detected += o.detected;
  sifted += o.sifted;
  multi_click += o.multi_click;
  single_sent += o.single_sent;
  single_detected += o.single_detected;
  single_sifted += o.single_sifted;
  for (std::size_t g = 0; g < 4; ++g) {
    error_counts[g] += o.error_counts[g];
    single_errors[g] += o.single_errors[g];
  }
  for (std::size_t b = 0; b < 3; ++b) {
    sifted_by_basis[b] += o.sifted_by_basis[b];
    for (std::size_t g = 0; g < 4; ++g) errors_by_basis[b][g] += o.errors_by_basis[b][g];
  }
  return *this;
}

TallySheet& TallySheet::operator+=(const TallySheet& o) {
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += o.rows[i];
  return *this;
}

TallySheet run_packet_range(const ReceiverModel& model, std::uint64_t first, std::uint64_t last) {
  TallySheet sheet;
  sheet.intensities = model.config().intensities;
  for (std::uint64_t i = first; i < last; ++i) {
    const PacketOutcome p = simulate_packet(model, i);
    sheet.rows[static_cast<std::size_t>(p.intensity_index)].record(p);
  }
  return sheet;
}

TallySheet run_campaign(const SimConfig& config, unsigned workers) {
  const ReceiverModel model(config);
  const std::uint64_t n = config.packets;
  workers = std::clamp<unsigned>(workers, 1, 256);
  if (workers == 1 || n < 10'000) return run_packet_range(model, 0, n);

  std::vector<TallySheet> parts(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t first = n * w / workers;
    const std::uint64_t last = n * (w + 1) / workers;
    pool.emplace_back([&, w, first, last] { parts[w] = run_packet_range(model, first, last); });
  }
  for (auto& t : pool) t.join();
  TallySheet total;
  total.intensities = config.intensities;
  for (const auto& p : parts) total += p;
  return total;
}

std::vector<decoy::IntensityRecord> tally_to_records(const TallySheet& sheet) {
  std::vector<decoy::IntensityRecord> out;
  for (std::size_t i = 0; i < sheet.rows.size(); ++i) {
    const auto& row = sheet.rows[i];
    if (row.sifted == 0)
      throw std::runtime_error("tally_to_records: no sifted events at intensity " + std::to_string(sheet.intensities[i]));
    decoy::IntensityRecord r;
    r.intensity = sheet.intensities[i];
    r.gain = static_cast<double>(row.detected) / static_cast<double>(row.sent);
    for (std::size_t g = 1; g < 4; ++g)
      r.error_rates[g - 1] = static_cast<double>(row.error_counts[g]) / static_cast<double>(row.sifted);
    out.push_back(r);
  }
  return out;
}

}  // namespace qkd::sim
