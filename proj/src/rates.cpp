// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qkd/cww.hpp"
#include "qkd/probmath.hpp"

namespace qkd::rates {
namespace {

struct NameEntry {
  Protocol protocol;
  std::string_view name;
};

constexpr NameEntry kNames[] = {
    {Protocol::six_state, "six_state"},       {Protocol::bb84, "bb84"},
    {Protocol::ss4_unbiased, "ss4_unbiased"}, {Protocol::ss4_islam, "ss4_islam"},
    {Protocol::ss4_extreme, "ss4_extreme"},   {Protocol::ss4_biased, "ss4_biased"},
    {Protocol::cww4_ber, "cww4_ber"},         {Protocol::cww4_der, "cww4_der"},
    {Protocol::reduced_cww4, "reduced_cww4"},
};

bool der_native(Protocol p) {
  switch (p) {
    case Protocol::ss4_unbiased:
    case Protocol::ss4_islam:
    case Protocol::ss4_extreme:
    case Protocol::ss4_biased:
    case Protocol::cww4_der:
      return true;
    default:
      return false;
  }
}

double ss4_sift(const ProtocolSpec& p) {
  switch (p.protocol) {
    case Protocol::ss4_unbiased: return 0.5;
    case Protocol::ss4_islam: return biased_sift_factor(kIslamBias);
    case Protocol::ss4_extreme: return 1.0;
    default: return p.param;
  }
}

// Native-axis domain end for each protocol.
double native_end(Protocol p) {
  switch (p) {
    case Protocol::bb84: return 0.5;
    case Protocol::cww4_der: return 0.75 - 1e-9;
    case Protocol::six_state:
    case Protocol::reduced_cww4:
    case Protocol::cww4_ber: return 2.0 / 3.0;
    default: return 0.75;
  }
}

// Per-packet raw rate on the protocol's own axis.
double native_rate(const ProtocolSpec& p, double x) {
  switch (p.protocol) {
    case Protocol::six_state: return cww::kSiftQ * rate_six_state_core_raw(x);
    case Protocol::bb84: return 0.5 * rate_bb84_raw(x);
    case Protocol::ss4_unbiased:
    case Protocol::ss4_islam:
    case Protocol::ss4_extreme:
    case Protocol::ss4_biased: return rate_ss4_raw(x, ss4_sift(p));
    case Protocol::cww4_ber: return cww::rate_cww4_ber_raw(x);
    case Protocol::cww4_der: return cww::rate_cww4_der_raw(x);
    case Protocol::reduced_cww4: return cww::kSiftQ * p.param * rate_six_state_core_raw(x) / 2.0;
  }
  throw std::logic_error("native_rate: unknown protocol");
}

double to_native(const ProtocolSpec& p, Axis axis, double x) {
  if (axis == Axis::der && !der_native(p.protocol)) return 2.0 * x / 3.0;
  if (axis == Axis::ber && der_native(p.protocol)) return 1.5 * x;
  return x;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(std::string(what) + " outside [0,1]");
}

}  // namespace

ProtocolSpec ProtocolSpec::parse(std::string_view name) {
  std::string_view base = name;
  std::string_view arg;
  if (auto colon = name.find(':'); colon != std::string_view::npos) {
    base = name.substr(0, colon);
    arg = name.substr(colon + 1);
  }
  for (const auto& entry : kNames) {
    if (entry.name != base) continue;
    ProtocolSpec spec{entry.protocol, 1.0};
    const bool takes_arg = entry.protocol == Protocol::ss4_biased || entry.protocol == Protocol::reduced_cww4;
    if (!arg.empty()) {
      if (!takes_arg) throw std::invalid_argument("protocol takes no parameter: " + std::string(name));
      // std::from_chars for double is missing from older libstdc++.
      try {
        std::size_t used = 0;
        spec.param = std::stod(std::string(arg), &used);
        if (used != arg.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument("bad protocol parameter: " + std::string(name));
      }
    } else if (entry.protocol == Protocol::ss4_biased) {
      throw std::invalid_argument("ss4_biased needs a sift factor, e.g. ss4_biased:0.7");
    }
    if (takes_arg && !(spec.param > 0.0 && spec.param <= 1.0))
      throw std::invalid_argument("protocol parameter outside (0,1]: " + std::string(name));
    return spec;
  }
  throw std::invalid_argument("unknown protocol: " + std::string(name));
}

std::string ProtocolSpec::name() const {
  for (const auto& entry : kNames) {
    if (entry.protocol != protocol) continue;
    std::string out(entry.name);
    const bool show = protocol == Protocol::ss4_biased || (protocol == Protocol::reduced_cww4 && param != 1.0);
    if (show) {
      char buf[32];
      std::snprintf(buf, sizeof buf, ":%g", param);
      out += buf;
    }
    return out;
  }
  return "unknown";
}

double biased_sift_factor(double bias) {
  check_unit(bias, "basis bias");
  return bias * bias + (1.0 - bias) * (1.0 - bias);
}

double rate_six_state_core_raw(double ber) {
  if (!(ber >= 0.0 && ber <= 2.0 / 3.0)) throw std::domain_error("six-state BER outside [0, 2/3]");
  const double h = shannon_entropy_bits(ProbVec{1.0 - 1.5 * ber, ber / 2.0, ber / 2.0, ber / 2.0});
  return 1.0 - h;
}

double rate_six_state_core(double ber) { return std::max(0.0, rate_six_state_core_raw(ber)); }

double rate_bb84_raw(double ber) {
  if (!(ber >= 0.0 && ber <= 0.5)) throw std::domain_error("BB84 BER outside [0, 1/2]");
  return 1.0 - 2.0 * binary_entropy(ber);
}

double rate_bb84(double ber) { return std::max(0.0, rate_bb84_raw(ber)); }

double rate_ss4_raw(double e_star, double sift_factor) {
  if (!(e_star >= 0.0 && e_star <= 0.75)) throw std::domain_error("SS4 DER outside [0, 3/4]");
  if (!(sift_factor > 0.0 && sift_factor <= 1.0)) throw std::domain_error("SS4 sift factor outside (0,1]");
  const double t = e_star / 3.0;
  const double h = shannon_entropy_bits(ProbVec{1.0 - e_star, t, t, t});
  return sift_factor * (2.0 - 2.0 * h) / 2.0;
}

double rate_ss4(double e_star, double sift_factor) { return std::max(0.0, rate_ss4_raw(e_star, sift_factor)); }

double rate_reduced_cww4(double ber, double accept_fraction) {
  check_unit(accept_fraction, "acceptance fraction");
  return accept_fraction * rate_six_state_core(ber) / 2.0;
}

double domain_end(const ProtocolSpec& p, Axis axis) {
  const double end = native_end(p.protocol);
  if (axis == Axis::der && !der_native(p.protocol)) return std::min(0.75, 1.5 * end);
  if (axis == Axis::ber && der_native(p.protocol)) return end / 1.5;
  return end;
}

double curve_rate(const ProtocolSpec& p, Axis axis, double x, bool raw) {
  const double r = native_rate(p, to_native(p, axis, x));
  return raw ? r : std::max(0.0, r);
}

double find_threshold(const ProtocolSpec& p, Axis axis) {
  double lo = 0.0;
  double hi = domain_end(p, axis);
  auto f = [&](double x) { return curve_rate(p, axis, x, true); };
  if (!(f(lo) > 0.0) || f(hi) > 0.0) throw std::runtime_error("find_threshold: no sign change for " + p.name());
  // Scan first so a non-monotone tail cannot hide the first zero.
  constexpr int kScan = 200;
  for (int i = 1; i <= kScan; ++i) {
    const double x = hi * i / kScan;
    if (f(x) <= 0.0) {
      lo = hi * (i - 1) / kScan;
      hi = x;
      break;
    }
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double find_crossover(const ProtocolSpec& a, const ProtocolSpec& b, Axis axis) {
  const double end = std::min(domain_end(a, axis), domain_end(b, axis));
  auto diff = [&](double x) { return curve_rate(a, axis, x, true) - curve_rate(b, axis, x, true); };
  constexpr double kStep = 1e-3;
  constexpr double kEps = 1e-12;
  double prev_x = 0.0;
  bool below = diff(0.0) <= kEps;
  const int n = static_cast<int>(std::floor(end / kStep));
  for (int i = 1; i <= n; ++i) {
    const double x = std::min(end, i * kStep);
    const bool above = diff(x) > kEps;
    if (below && above) {
      double lo = prev_x, hi = x;
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (diff(mid) > kEps ? hi : lo) = mid;
      }
      return 0.5 * (lo + hi);
    }
    below = !above;
    prev_x = x;
  }
  throw std::runtime_error("find_crossover: " + a.name() + " never rises above " + b.name());
}

std::vector<std::pair<double, double>> emit_curve(const RateCurveSpec& spec) {
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1])) throw std::invalid_argument("emit_curve: grid not strictly increasing");
  std::vector<std::pair<double, double>> out;
  out.reserve(spec.grid.size());
  for (double x : spec.grid) out.emplace_back(x, curve_rate(spec.protocol, spec.axis, x));
  return out;
}

}  // namespace qkd::rates
