// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Packet-level Monte Carlo of the passive time-bin receiver: decoy source,
// lossy depolarizing channel, 1x3 splitter into delay-1/2/3 interferometers,
// gated detectors with dark counts, random squashing of multi-clicks,
// basis sifting and per-intensity tallies.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qkd/decoy.hpp"
#include "qkd/qudit.hpp"
#include "qkd/rng.hpp"

namespace qkd::sim {

enum class Source { poisson, single_photon };

inline constexpr std::uint64_t kMaxPackets = 100'000'000'000ULL;

/// Simulation parameters. The text form is one `key = value` per line,
/// `#` starts a comment, lists are comma separated:
///
///     intensities        = 0.66, 0.04, 0.0016   # signal, decoy, weak decoy
///     selection          = 0.8, 0.1, 0.1        # must sum to 1
///     source             = poisson              # or single_photon
///     channel_loss_db    = 10
///     insertion_loss_db  = 0.80                 # per interferometer
///     depolarize_p       = 0
///     misalignment       = 0, 0, 0              # radians, delays 1, 2, 3
///     detector_efficiency = 0.2023
///     dark_rate          = 2.58e-6              # per detector channel per gate
///     packets            = 10000000
///     seed               = 1
struct SimConfig {
  std::array<double, 3> intensities{0.66, 0.04, 0.0016};
  std::array<double, 3> selection{0.8, 0.1, 0.1};
  Source source = Source::poisson;
  double channel_loss_db = 10.0;
  double insertion_loss_db = 0.80;
  double depolarize_p = 0.0;
  std::array<double, 3> misalignment{0.0, 0.0, 0.0};
  double detector_efficiency = 0.2023;
  double dark_rate = 2.58e-6;
  std::uint64_t packets = 1'000'000;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
  /// Probability that an emitted photon reaches a detector and clicks it.
  double transmittance() const;
};

SimConfig parse_sim_config(std::istream& in);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string format_sim_config(const SimConfig& config);

enum class ChannelKind { lost, passed, depolarized };

struct ChannelOutcome {
  ChannelKind kind = ChannelKind::passed;
  QuditKet ket;  ///< unchanged input when passed
};

/// A photon is dropped with probability `loss`; otherwise it is flagged
/// depolarized with probability `depolarize_p`, else passes unchanged.
ChannelOutcome apply_channel(const QuditKet& ket, double depolarize_p, double loss, PacketRng& rng);
ChannelKind sample_channel(double depolarize_p, double loss, PacketRng& rng);

/// Gate = (delay, slot, port), packed as (delay-1)*14 + slot*2 + port.
struct Gate {
  int delay = 1;
  int slot = 0;
  int port = 0;

  int index() const { return (delay - 1) * kGatesPerFmi + slot * kPorts + port; }
  static Gate from_index(int index);
};

/// Precomputed click tables for a configuration.
class ReceiverModel {
 public:
  explicit ReceiverModel(const SimConfig& config);

  const SimConfig& config() const { return config_; }
  /// Per-photon gate probabilities given the photon reached a detector:
  /// one third per interferometer, coherent or maximally mixed.
  const std::array<double, kGates>& gate_pmf(int state_index, bool depolarized) const {
    return depolarized ? mixed_pmf_ : coherent_pmf_[static_cast<std::size_t>(state_index)];
  }
  int sample_gate(int state_index, bool depolarized, PacketRng& rng) const;

  double photon_loss() const { return loss_; }
  double vacuum_probability(int level) const { return vacuum_[static_cast<std::size_t>(level)]; }
  /// (1 - dark_rate)^42
  double no_dark_probability() const { return no_dark_; }

 private:
  SimConfig config_;
  double loss_ = 0.0;
  double no_dark_ = 1.0;
  std::array<double, 3> vacuum_{};
  std::array<std::array<double, kGates>, 12> coherent_pmf_{};
  std::array<double, kGates> mixed_pmf_{};
  // Per-interferometer cumulative tables for sampling after routing.
  std::array<std::array<std::array<double, kGatesPerFmi>, kDelays>, 12> coherent_cdf_{};
  std::array<std::array<double, kGatesPerFmi>, kDelays> mixed_cdf_{};
};

struct PacketOutcome {
  int intensity_index = 0;
  StateLabel alice;
  int photons = 0;
  int clicks = 0;  ///< distinct clicked gates
  Gate gate;       ///< chosen click when clicks > 0
  bool conclusive = false;
  StateLabel bob;  ///< valid when conclusive
  bool sifted = false;
  int error_class = 0;

  bool detected() const { return clicks > 0; }
};

/// Routing, detection, dark counts and squashing for one packet whose
/// surviving photons are already split into coherent and depolarized ones.
PacketOutcome receive_packet(const StateLabel& alice, int passed, int depolarized, const ReceiverModel& model,
                             PacketRng& rng);

/// Full packet: source, channel, receiver.
PacketOutcome simulate_packet(const ReceiverModel& model, std::uint64_t index);

/// Error class between two sifted labels: pair-bit XOR in bit 0, sign XOR in bit 1.
int error_class(const StateLabel& alice, const StateLabel& bob);

struct IntensityTally {
  std::uint64_t sent = 0;
  std::uint64_t detected = 0;
  std::uint64_t sifted = 0;
  std::array<std::uint64_t, 4> error_counts{};
  std::uint64_t multi_click = 0;
  std::array<std::uint64_t, 3> sifted_by_basis{};
  std::array<std::array<std::uint64_t, 4>, 3> errors_by_basis{};
  // Packets that emitted exactly one photon.
  std::uint64_t single_sent = 0;
  std::uint64_t single_detected = 0;
  std::uint64_t single_sifted = 0;
  std::array<std::uint64_t, 4> single_errors{};

  void record(const PacketOutcome& p);
  IntensityTally& operator+=(const IntensityTally& other);
  bool operator==(const IntensityTally&) const = default;
};

struct TallySheet {
  std::array<double, 3> intensities{};
  std::array<IntensityTally, 3> rows{};

  TallySheet& operator+=(const TallySheet& other);
  bool operator==(const TallySheet&) const = default;
};

/// Runs config.packets packets split over `workers` threads. The result
/// depends only on the configuration (seed included), not on `workers`.
TallySheet run_campaign(const SimConfig& config, unsigned workers = 1);

/// Packets [first, last) into a fresh sheet.
TallySheet run_packet_range(const ReceiverModel& model, std::uint64_t first, std::uint64_t last);

/// Q = detected / sent, E^g = errors_g / sifted. Throws when a row has no
/// sifted events.
std::vector<decoy::IntensityRecord> tally_to_records(const TallySheet& sheet);

// Exact expectations for a configuration, independent of the sampler.

struct ExpectedRow {
  double gain = 0.0;
  double sifted = 0.0;  ///< per packet
  double multi_click = 0.0;
  cww::ErrorSpectrum4 errors;  ///< among sifted events
};

/// Per-intensity expectation. Poisson sources use independent per-gate
/// Poisson photon counts; single-photon sources the one-photon formula.
ExpectedRow expected_row(const SimConfig& config, int intensity_index);
std::vector<decoy::IntensityRecord> expected_records(const SimConfig& config);

struct SinglePhotonTruth {
  double y0 = 0.0;
  double y1 = 0.0;
  double sifted_given_detected = 0.0;
  cww::ErrorSpectrum4 e1;
};

/// Planted single-photon parameters of the configured apparatus.
SinglePhotonTruth single_photon_truth(const SimConfig& config);

}  // namespace qkd::sim
