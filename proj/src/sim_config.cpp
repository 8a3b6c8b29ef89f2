// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qkd/simulator.hpp"

namespace qkd::sim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0 || !std::isfinite(v))
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
  // Accept 1e7-style counts as long as they are exact integers.
  const double v = parse_double(key, text);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
    throw std::invalid_argument("config: '" + key + "' expects a nonnegative integer");
  if (text.find_first_of(".eE") == std::string::npos) return std::stoull(text);
  return static_cast<std::uint64_t>(v);
}

std::array<double, 3> parse_triple(const std::string& key, const std::string& text) {
  std::array<double, 3> out{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw std::invalid_argument("config: '" + key + "' expects three values");
    out[n++] = parse_double(key, trim(item));
  }
  if (n != 3) throw std::invalid_argument("config: '" + key + "' expects three values");
  return out;
}

void check_unit(const char* what, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string("config: ") + what + " outside [0,1]");
}

}  // namespace

void SimConfig::validate() const {
  for (double mu : intensities)
    if (!(mu > 0.0) || mu > 50.0) throw std::invalid_argument("config: intensities must be in (0, 50]");
  if (!(intensities[0] > intensities[1] && intensities[1] > intensities[2]))
    throw std::invalid_argument("config: intensities must be strictly decreasing (signal, decoy, weak decoy)");
  double sum = 0.0;
  for (double s : selection) {
    check_unit("selection probability", s);
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("config: selection probabilities must sum to 1");
  if (!(channel_loss_db >= 0.0) || !(insertion_loss_db >= 0.0))
    throw std::invalid_argument("config: losses must be >= 0 dB");
  check_unit("depolarize_p", depolarize_p);
  check_unit("detector_efficiency", detector_efficiency);
  check_unit("dark_rate", dark_rate);
  for (double theta : misalignment)
    if (!std::isfinite(theta)) throw std::invalid_argument("config: misalignment must be finite");
  if (packets < 1) throw std::invalid_argument("config: packets must be >= 1");
  if (packets > kMaxPackets) throw std::invalid_argument("config: packets exceeds the campaign cap");
}

double SimConfig::transmittance() const {
  return std::pow(10.0, -(channel_loss_db + insertion_loss_db) / 10.0) * detector_efficiency;
}

SimConfig parse_sim_config(std::istream& in) {
  SimConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw std::invalid_argument("config: duplicate key '" + key + "'");

    if (key == "intensities") c.intensities = parse_triple(key, value);
    else if (key == "selection") c.selection = parse_triple(key, value);
    else if (key == "misalignment") c.misalignment = parse_triple(key, value);
    else if (key == "channel_loss_db") c.channel_loss_db = parse_double(key, value);
    else if (key == "insertion_loss_db") c.insertion_loss_db = parse_double(key, value);
    else if (key == "depolarize_p") c.depolarize_p = parse_double(key, value);
    else if (key == "detector_efficiency") c.detector_efficiency = parse_double(key, value);
    else if (key == "dark_rate") c.dark_rate = parse_double(key, value);
    else if (key == "packets") c.packets = parse_count(key, value);
    else if (key == "seed") c.seed = parse_count(key, value);
    else if (key == "source") {
      if (value == "poisson") c.source = Source::poisson;
      else if (value == "single_photon") c.source = Source::single_photon;
      else throw std::invalid_argument("config: source must be poisson or single_photon");
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  return parse_sim_config(in);
}

std::string format_sim_config(const SimConfig& c) {
  auto triple = [](const std::array<double, 3>& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g, %.17g, %.17g", v[0], v[1], v[2]);
    return std::string(buf);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "intensities = " << triple(c.intensities) << '\n'
      << "selection = " << triple(c.selection) << '\n'
      << "source = " << (c.source == Source::poisson ? "poisson" : "single_photon") << '\n'
      << "channel_loss_db = " << num(c.channel_loss_db) << '\n'
      << "insertion_loss_db = " << num(c.insertion_loss_db) << '\n'
      << "depolarize_p = " << num(c.depolarize_p) << '\n'
      << "misalignment = " << triple(c.misalignment) << '\n'
      << "detector_efficiency = " << num(c.detector_efficiency) << '\n'
      << "dark_rate = " << num(c.dark_rate) << '\n'
      << "packets = " << c.packets << '\n'
      << "seed = " << c.seed << '\n';
  return out.str();
}

}  // namespace qkd::sim
