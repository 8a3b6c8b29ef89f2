// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch front end: key-rate curves, thresholds, decoy experiment analysis
// and simulation campaigns.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkd/cww.hpp"
#include "qkd/decoy.hpp"
#include "qkd/rates.hpp"
#include "qkd/simulator.hpp"

namespace qkd::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNoKey = 2 };

/// Three intensity rows (mu > nu > upsilon) plus the sifting fraction q and bits per dit s.
///
/// JSON form:
///
///     {"q": 0.3333333333333333, "s": 2,
///      "records": [{"intensity": 0.66, "gain": 5.63e-3,
///                   "error_rates": [0.00216, 0.0181, 0.00217]}, ...]}
///
/// `q` and `s` are optional. Simulation output also carries "tallies" and
/// "config", which the parser accepts and ignores.
struct ExperimentInput {
  std::vector<decoy::IntensityRecord> records;
  double q = cww::kSiftQ;
  double s = cww::kBitsPerDit;

  void validate() const;
};

ExperimentInput parse_experiment_input(const nlohmann::json& j);
ExperimentInput load_experiment_input(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentInput& input);

enum class AnalysisProtocol { cww4, bb84 };

struct ExperimentReport {
  AnalysisProtocol protocol = AnalysisProtocol::cww4;
  decoy::SinglePhotonBounds bounds;
  double raw_ber = 0.0;  ///< signal row, (E1 + E2)/2 + E3
  double raw_der = 0.0;  ///< signal row, E1 + E2 + E3
  double omega = 0.0;
  cww::KeyRateReport cww;
  // BB84 view: error rate E^2, single-photon bound from the g = 2 column.
  double bb84_e1 = 0.0;
  double bb84_raw_rate = 0.0;

  double rate() const;
  double raw_rate() const;
  bool positive() const { return raw_rate() > 0.0; }
};

ExperimentReport analyze_experiment(const ExperimentInput& input, AnalysisProtocol protocol);
void print_report(const ExperimentReport& report, std::ostream& out);

/// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_grid(const std::string& text);
/// Default curve set for the axis, highest zero-noise rate first.
std::vector<rates::ProtocolSpec> default_protocols(rates::Axis axis);
/// Header `error_rate,<protocol>...`, 6 significant digits, LF endings.
std::string curves_csv(const std::vector<rates::ProtocolSpec>& protocols, rates::Axis axis,
                       const std::vector<double>& grid);

struct ThresholdRow {
  std::string label;
  rates::Axis axis;
  double value;
};
std::vector<ThresholdRow> canonical_thresholds();
std::vector<ThresholdRow> canonical_crossovers();
void print_thresholds(std::ostream& out);

/// Records plus tallies and the effective config; what `simulate` writes.
nlohmann::json simulation_json(const sim::SimConfig& config, const sim::TallySheet& sheet);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkd::cli
