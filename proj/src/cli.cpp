// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace qkd::cli {
namespace {

using rates::Axis;
using rates::Protocol;
using rates::ProtocolSpec;

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string percent(double v) { return fmt6(100.0 * v) + "%"; }

const char* axis_name(Axis a) { return a == Axis::ber ? "ber" : "der"; }

Axis parse_axis(const std::string& s) {
  if (s == "ber") return Axis::ber;
  if (s == "der") return Axis::der;
  throw std::invalid_argument("axis must be ber or der");
}

std::vector<std::string> split_list(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    std::stringstream ss(a);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << text;
  if (!f) throw std::invalid_argument("write failed for " + path);
}

nlohmann::json tally_json(double intensity, const sim::IntensityTally& t) {
  return {{"intensity", intensity},
          {"sent", t.sent},
          {"detected", t.detected},
          {"sifted", t.sifted},
          {"error_counts", t.error_counts},
          {"multi_click", t.multi_click},
          {"sifted_by_basis", t.sifted_by_basis},
          {"errors_by_basis", t.errors_by_basis},
          {"single_sent", t.single_sent},
          {"single_detected", t.single_detected},
          {"single_sifted", t.single_sifted},
          {"single_errors", t.single_errors}};
}

}  // namespace

void ExperimentInput::validate() const {
  if (records.size() != 3) throw std::invalid_argument("experiment input needs exactly three records");
  for (const auto& r : records) r.validate();
  if (!(records[0].intensity > records[1].intensity && records[1].intensity > records[2].intensity))
    throw std::invalid_argument("experiment input: intensities must be strictly decreasing");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("experiment input: q outside (0,1]");
  if (!(s > 0.0)) throw std::invalid_argument("experiment input: s must be positive");
}

ExperimentInput parse_experiment_input(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment input must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "q" && key != "s" && key != "records" && key != "tallies" && key != "config")
      throw std::invalid_argument("experiment input: unknown field '" + key + "'");
  }
  auto number = [](const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw std::invalid_argument(std::string("experiment input: '") + what + "' must be a number");
    return v.get<double>();
  };
  ExperimentInput in;
  if (j.contains("q")) in.q = number(j["q"], "q");
  if (j.contains("s")) in.s = number(j["s"], "s");
  if (!j.contains("records") || !j["records"].is_array())
    throw std::invalid_argument("experiment input: 'records' array missing");
  for (const auto& r : j["records"]) {
    if (!r.is_object()) throw std::invalid_argument("experiment input: record must be an object");
    for (const auto& [key, value] : r.items()) {
      (void)value;
      if (key != "intensity" && key != "gain" && key != "error_rates")
        throw std::invalid_argument("experiment input: unknown record field '" + key + "'");
    }
    if (!r.contains("intensity") || !r.contains("gain") || !r.contains("error_rates"))
      throw std::invalid_argument("experiment input: record needs intensity, gain and error_rates");
    decoy::IntensityRecord rec;
    rec.intensity = number(r["intensity"], "intensity");
    rec.gain = number(r["gain"], "gain");
    const auto& e = r["error_rates"];
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("experiment input: error_rates must hold three numbers");
    for (std::size_t g = 0; g < 3; ++g) rec.error_rates[g] = number(e[g], "error_rates");
    in.records.push_back(rec);
  }
  in.validate();
  return in;
}

ExperimentInput load_experiment_input(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_experiment_input(j);
}

nlohmann::json to_json(const ExperimentInput& input) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : input.records)
    records.push_back({{"intensity", r.intensity}, {"gain", r.gain}, {"error_rates", r.error_rates}});
  return {{"q", input.q}, {"s", input.s}, {"records", records}};
}

double ExperimentReport::raw_rate() const {
  return protocol == AnalysisProtocol::cww4 ? cww.raw_rate : bb84_raw_rate;
}

double ExperimentReport::rate() const { return std::max(0.0, raw_rate()); }

ExperimentReport analyze_experiment(const ExperimentInput& input, AnalysisProtocol protocol) {
  input.validate();
  const auto& mu = input.records[0];
  const auto& nu = input.records[1];
  const auto& up = input.records[2];

  ExperimentReport rep;
  rep.protocol = protocol;
  rep.raw_ber = 0.5 * (mu.error_rates[0] + mu.error_rates[1]) + mu.error_rates[2];
  rep.raw_der = mu.error_rates[0] + mu.error_rates[1] + mu.error_rates[2];
  rep.bounds = decoy::estimate_all(input.records);
  rep.omega = decoy::single_photon_fraction(mu, rep.bounds.y1);

  if (protocol == AnalysisProtocol::cww4) {
    rep.cww = cww::secret_key_rate(input.q, input.s, mu.gain, mu.spectrum(), rep.omega, rep.bounds.e1);
  } else {
    // One error rate per row: the phase-encoded BB84 error equals E^2.
    rep.bb84_e1 = decoy::estimate_e1_class(nu, up, 2, rep.bounds.y1);
    const double e = mu.error_rates[1];
    rep.bb84_raw_rate = 0.5 * mu.gain * (-binary_entropy(e) + rep.omega * (1.0 - binary_entropy(rep.bb84_e1)));
  }
  return rep;
}

void print_report(const ExperimentReport& rep, std::ostream& out) {
  const bool bb84 = rep.protocol == AnalysisProtocol::bb84;
  out << "protocol      " << (bb84 ? "bb84" : "cww4") << '\n';
  out << "raw BER       " << percent(rep.raw_ber) << '\n';
  out << "raw DER       " << percent(rep.raw_der) << '\n';
  out << "Y0            " << fmt6(rep.bounds.y0) << '\n';
  out << "Y1            " << fmt6(rep.bounds.y1) << '\n';
  out << "omega         " << fmt6(rep.omega) << '\n';
  if (bb84) {
    out << "e1            " << percent(rep.bb84_e1) << '\n';
  } else {
    for (int g = 1; g <= 3; ++g) out << "e1^" << g << "          " << percent(rep.bounds.e1[g]) << '\n';
    out << "A B C D       " << fmt6(rep.cww.abcd.a) << ' ' << fmt6(rep.cww.abcd.b) << ' ' << fmt6(rep.cww.abcd.c)
        << ' ' << fmt6(rep.cww.abcd.d) << (rep.cww.abcd_clamped ? "  (clamped)" : "") << '\n';
    out << "H(E)          " << fmt6(rep.cww.entropy_e) << '\n';
    out << "H(delta^g)    ";
    for (std::size_t g = 0; g < 4; ++g) out << (g ? " " : "") << fmt6(rep.cww.delta_entropies[g]);
    out << '\n';
  }
  out << "R raw         " << fmt6(rep.raw_rate()) << '\n';
  out << "R             " << fmt6(rep.rate()) << " secret bits per packet\n";
  if (!rep.positive()) out << "no positive key rate\n";
}

std::vector<double> parse_grid(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ':')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw std::invalid_argument("grid must be lo:hi:step");
    v.push_back(x);
  }
  if (v.size() != 3) throw std::invalid_argument("grid must be lo:hi:step");
  const double lo = v[0], hi = v[1], step = v[2];
  if (!(step > 0.0) || !(hi >= lo) || lo < 0.0) throw std::invalid_argument("grid needs 0 <= lo <= hi and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw std::invalid_argument("grid has too many points");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

std::vector<ProtocolSpec> default_protocols(Axis axis) {
  std::vector<ProtocolSpec> p{{Protocol::ss4_extreme, 1.0}, {Protocol::ss4_islam, 1.0}, {Protocol::ss4_unbiased, 1.0}};
  if (axis == Axis::der) {
    p.push_back({Protocol::cww4_der, 1.0});
    p.push_back({Protocol::six_state, 1.0});
  } else {
    p.push_back({Protocol::six_state, 1.0});
    p.push_back({Protocol::cww4_ber, 1.0});
  }
  return p;
}

std::string curves_csv(const std::vector<ProtocolSpec>& protocols, Axis axis, const std::vector<double>& grid) {
  if (protocols.empty()) throw std::invalid_argument("no protocols requested");
  std::vector<std::vector<std::pair<double, double>>> cols;
  for (const auto& p : protocols) cols.push_back(rates::emit_curve({p, axis, grid}));
  std::string out = "error_rate";
  for (const auto& p : protocols) out += "," + p.name();
  out += '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += fmt6(grid[i]);
    for (const auto& c : cols) out += "," + fmt6(c[i].second);
    out += '\n';
  }
  return out;
}

std::vector<ThresholdRow> canonical_thresholds() {
  using rates::find_threshold;
  return {{"six_state", Axis::ber, find_threshold({Protocol::six_state, 1.0}, Axis::ber)},
          {"bb84", Axis::ber, find_threshold({Protocol::bb84, 1.0}, Axis::ber)},
          {"cww4_der", Axis::der, find_threshold({Protocol::cww4_der, 1.0}, Axis::der)},
          {"cww4_der", Axis::ber, find_threshold({Protocol::cww4_der, 1.0}, Axis::ber)},
          {"ss4_unbiased", Axis::der, find_threshold({Protocol::ss4_unbiased, 1.0}, Axis::der)}};
}

std::vector<ThresholdRow> canonical_crossovers() {
  const ProtocolSpec cww4{Protocol::cww4_der, 1.0};
  return {{"cww4_der>ss4_unbiased", Axis::der,
           rates::find_crossover(cww4, {Protocol::ss4_unbiased, 1.0}, Axis::der)},
          {"cww4_der>ss4_extreme", Axis::der, rates::find_crossover(cww4, {Protocol::ss4_extreme, 1.0}, Axis::der)}};
}

void print_thresholds(std::ostream& out) {
  auto row = [&](const ThresholdRow& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-22s %-4s %s\n", r.label.c_str(), axis_name(r.axis), fmt_fixed(r.value, 4).c_str());
    out << buf;
  };
  out << "# threshold\nprotocol               axis value\n";
  for (const auto& r : canonical_thresholds()) row(r);
  out << "# crossover\n";
  for (const auto& r : canonical_crossovers()) row(r);
}

nlohmann::json simulation_json(const sim::SimConfig& config, const sim::TallySheet& sheet) {
  ExperimentInput input;
  input.records = sim::tally_to_records(sheet);
  nlohmann::json j = to_json(input);
  nlohmann::json tallies = nlohmann::json::array();
  for (std::size_t i = 0; i < sheet.rows.size(); ++i) tallies.push_back(tally_json(sheet.intensities[i], sheet.rows[i]));
  j["tallies"] = tallies;
  j["config"] = sim::format_sim_config(config);
  return j;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key rates, thresholds, decoy analysis and Monte Carlo for four-dimensional time-bin QKD"};
  app.require_subcommand(1);

  std::string axis = "der", grid = "0:0.25:0.001", curves_out;
  std::vector<std::string> protocols;
  auto* curves = app.add_subcommand("curves", "ideal-apparatus key rate curves as CSV");
  curves->add_option("--axis", axis, "ber or der")->check(CLI::IsMember({"ber", "der"}));
  curves->add_option("--grid", grid, "lo:hi:step");
  auto* proto_opt = curves->add_option("--protocol", protocols, "protocol names (comma separated or repeated)");
  curves->add_option("--output", curves_out, "CSV path (default stdout)");

  app.add_subcommand("thresholds", "noise thresholds and crossovers");

  std::string input_path, analysis = "cww4";
  auto* experiment = app.add_subcommand("experiment", "decoy-state analysis of measured intensity records");
  experiment->add_option("input", input_path, "experiment JSON")->required();
  experiment->add_option("--protocol", analysis, "cww4 or bb84")->check(CLI::IsMember({"cww4", "bb84"}));

  std::string config_path, sim_out;
  std::uint64_t seed = 0;
  std::uint64_t packets = 0;
  unsigned workers = 1;
  auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo campaign and analyze it");
  simulate->add_option("config", config_path, "simulation config file")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "override the config seed");
  auto* packets_opt = simulate->add_option("--packets", packets, "override the config packet count");
  simulate->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
  simulate->add_option("--output", sim_out, "records JSON path")->required();
  auto* sim_protocol = simulate->add_option("--protocol", analysis, "cww4 or bb84");
  sim_protocol->check(CLI::IsMember({"cww4", "bb84"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*curves) {
      const Axis ax = parse_axis(axis);
      std::vector<ProtocolSpec> specs;
      if (proto_opt->count() > 0) {
        for (const auto& name : split_list(protocols)) specs.push_back(ProtocolSpec::parse(name));
        if (specs.empty()) throw std::invalid_argument("empty protocol set");
      } else {
        specs = default_protocols(ax);
      }
      write_text(curves_out, curves_csv(specs, ax, parse_grid(grid)), out);
      return kOk;
    }
    if (app.got_subcommand("thresholds")) {
      print_thresholds(out);
      return kOk;
    }
    const AnalysisProtocol proto = analysis == "bb84" ? AnalysisProtocol::bb84 : AnalysisProtocol::cww4;
    if (*experiment) {
      const ExperimentReport rep = analyze_experiment(load_experiment_input(input_path), proto);
      print_report(rep, out);
      return rep.positive() ? kOk : kNoKey;
    }
    if (*simulate) {
      sim::SimConfig config = sim::load_sim_config(config_path);
      if (seed_opt->count() > 0) config.seed = seed;
      if (packets_opt->count() > 0) config.packets = packets;
      config.validate();
      const sim::TallySheet sheet = sim::run_campaign(config, workers);
      const nlohmann::json j = simulation_json(config, sheet);
      write_text(sim_out, j.dump(2) + "\n", out);
      const ExperimentReport rep = analyze_experiment(parse_experiment_input(j), proto);
      print_report(rep, out);
      return rep.positive() ? kOk : kNoKey;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace qkd::cli
