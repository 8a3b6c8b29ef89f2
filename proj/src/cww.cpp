// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/cww.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkd::cww {
namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// H of the 16-entry table {A, B x3, C x3, D x9} without building it.
double abcd_table_entropy(double a, double b, double c, double d) {
  const double h = -(xlog2x(a) + 3.0 * xlog2x(b) + 3.0 * xlog2x(c) + 9.0 * xlog2x(d));
  return h < 0.0 ? 0.0 : h;
}

// Golden-section maximization of a concave function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double* arg = nullptr) {
  constexpr double kInvPhi = 0.6180339887498949;
  if (hi - lo <= 0.0) {
    if (arg) *arg = lo;
    return f(lo);
  }
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  // Endpoints matter when the maximum sits on the boundary.
  double best_x = f1 > f2 ? x1 : x2;
  double best = std::max(f1, f2);
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  if (arg) *arg = best_x;
  return best;
}

void check_probability(double v, const char* what) {
  if (!std::isfinite(v) || v < -kNormTolerance || v > 1.0 + kNormTolerance)
    throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

}  // namespace

ErrorSpectrum4 ErrorSpectrum4::make(double e0, double e1, double e2, double e3) {
  const ProbVec p{e0, e1, e2, e3};
  ErrorSpectrum4 out;
  for (std::size_t g = 0; g < 4; ++g) out.e[g] = p[g];
  return out;
}

ErrorSpectrum4 ErrorSpectrum4::from_errors(double e1, double e2, double e3) {
  return make(1.0 - e1 - e2 - e3, e1, e2, e3);
}

ErrorSpectrum4 PauliTable16::spin_marginal() const {
  std::array<double, 4> rows{};
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) rows[static_cast<std::size_t>(j)] += (*this)(j, k);
  return ErrorSpectrum4::make(rows[0], rows[1], rows[2], rows[3]);
}

double PauliTable16::entropy_bits() const { return shannon_entropy_bits(std::span<const double>(e)); }

ErrorSpectrum4 AbcdModel::single_photon_spectrum() const {
  return ErrorSpectrum4::make(a + b + c + d, 2.0 * (b + d), 2.0 * (c + d), 4.0 * d);
}

PauliTable16 AbcdModel::pauli_table() const {
  PauliTable16 t;
  t.e = {a, b, c, d,  //
         b, b, d, d,  //
         c, c, d, d,  //
         d, d, d, d};
  return t;
}

AbcdFit abcd_from_single_photon(const ErrorSpectrum4& e1) {
  double d = e1[3] / 4.0;
  double b = std::max(0.0, e1[1] / 2.0 - d);
  double c = std::max(0.0, e1[2] / 2.0 - d);
  double a = 1.0 - 3.0 * b - 3.0 * c - 9.0 * d;
  if (a < 0.0) {
    const double norm = 3.0 * b + 3.0 * c + 9.0 * d;
    a = 0.0;
    b /= norm;
    c /= norm;
    d /= norm;
  }
  AbcdFit fit;
  fit.model = AbcdModel{a, b, c, d};
  const ErrorSpectrum4 back = fit.model.single_photon_spectrum();
  for (int g = 0; g < 4; ++g) fit.clamp_shift = std::max(fit.clamp_shift, std::abs(back[g] - e1[g]));
  return fit;
}

std::array<ProbVec, 4> delta_spectra(const AbcdModel& m) {
  const ProbVec uniform{0.25, 0.25, 0.25, 0.25};
  auto normalized = [&](double x0, double x1, double x2, double x3) {
    const double t = x0 + x1 + x2 + x3;
    if (!(t > 0.0)) return uniform;
    return ProbVec{x0 / t, x1 / t, x2 / t, x3 / t};
  };
  return {normalized(m.a, m.b, m.c, m.d), normalized(m.b, m.b, m.d, m.d),
          normalized(m.c, m.c, m.d, m.d), uniform};
}

KeyRateReport secret_key_rate(double q, double s, double gain, const ErrorSpectrum4& observed,
                           double omega, const ErrorSpectrum4& e1) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("secret_key_rate: q outside (0,1]");
  if (std::abs(s - kBitsPerDit) > 1e-12)
    throw std::invalid_argument("secret_key_rate: s must be 2 for four-dimensional dits");
  if (!(gain > 0.0 && gain <= 1.0)) throw std::invalid_argument("secret_key_rate: gain outside (0,1]");
  check_probability(omega, "secret_key_rate: omega");
  omega = std::clamp(omega, 0.0, 1.0);

  KeyRateReport r;
  r.sift_q = q;
  r.bits_per_dit = s;
  r.gain_q = gain;
  r.omega = omega;
  r.single_photon = e1;
  r.entropy_e = shannon_entropy_bits(observed.dist());

  const AbcdFit fit = abcd_from_single_photon(e1);
  r.abcd = fit.model;
  r.abcd_clamped = !fit.consistent();

  // Weight the minimizing spectra by the (possibly clamped) model so the
  // phase-error term stays consistent with the table it came from.
  const ErrorSpectrum4 weights = fit.model.single_photon_spectrum();
  const auto deltas = delta_spectra(fit.model);
  double phase_cost = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    r.delta_entropies[g] = shannon_entropy_bits(deltas[g]);
    phase_cost += weights.e[g] * r.delta_entropies[g];
  }
  r.raw_rate = (q * gain / s) * (-r.entropy_e + omega * (s - phase_cost));
  r.rate = std::max(0.0, r.raw_rate);
  return r;
}

double worstcase_stationarity(double e01, double e_star) {
  const double e00 = 1.0 - 3.0 * e01 - e_star;
  const double t6 = e_star - 6.0 * e01;  // 6 * e12
  return e01 * e01 * e01 - e00 * t6 * t6 / 36.0;
}

double solve_worstcase_e01(double e_star) {
  if (!(e_star > 0.0 && e_star < 0.75))
    throw std::domain_error("solve_worstcase_e01: e* outside (0, 3/4)");
  double lo = 0.0;
  double hi = std::min(e_star / 6.0, (1.0 - e_star) / 3.0);
  auto deriv = [e_star](double x) {
    const double e00 = 1.0 - 3.0 * x - e_star;
    const double t6 = e_star - 6.0 * x;
    return 3.0 * x * x + (3.0 * t6 * t6 + 12.0 * e00 * t6) / 36.0;
  };
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double fx = worstcase_stationarity(x, e_star);
    if (fx == 0.0) return x;
    (fx < 0.0 ? lo : hi) = x;
    const double dfx = deriv(x);
    double next = dfx > 0.0 ? x - fx / dfx : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-16) return next;
    x = next;
  }
  return x;
}

PauliTable16 worstcase_table(double e_star) {
  const double e01 = solve_worstcase_e01(e_star);
  const double e12 = std::max(0.0, (e_star - 6.0 * e01) / 6.0);
  const double e00 = std::max(0.0, 1.0 - 9.0 * e01 - 6.0 * e12);
  PauliTable16 t;
  t(0, 0) = e00;
  for (auto [j, k] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 0}, {3, 0}, {1, 1}, {2, 3}, {3, 2}})
    t(j, k) = e01;
  for (auto [j, k] : {std::pair{1, 2}, {2, 1}, {3, 3}}) t(j, k) = e12;
  for (auto [j, k] : {std::pair{1, 3}, {2, 2}, {3, 1}}) t(j, k) = e12;
  return t;
}

double rate_cww4_der_raw(double e_star) {
  if (!(e_star >= 0.0 && e_star < 0.75)) throw std::domain_error("rate_cww4_der: e* outside [0, 3/4)");
  if (e_star == 0.0) return kSiftQ;
  return (kSiftQ / kBitsPerDit) * (kBitsPerDit - worstcase_table(e_star).entropy_bits());
}

double rate_cww4_der(double e_star) { return std::max(0.0, rate_cww4_der_raw(e_star)); }

namespace {

// Maximum of H(table) over models with B + C + 6D = e; returns the argmax.
double max_table_entropy_at_ber(double e, AbcdModel* argmax) {
  const double d_lo = std::max(0.0, (3.0 * e - 1.0) / 9.0);
  const double d_hi = e / 6.0;
  auto entropy_at = [e](double c, double d) {
    const double b = std::max(0.0, e - c - 6.0 * d);
    const double a = std::max(0.0, 1.0 - 3.0 * e + 9.0 * d);
    return abcd_table_entropy(a, b, c, d);
  };
  auto best_over_c = [&](double d, double* c_arg) {
    return golden_max([&](double c) { return entropy_at(c, d); }, 0.0, std::max(0.0, e - 6.0 * d), c_arg);
  };
  double d_best = d_lo;
  const double h = golden_max([&](double d) { return best_over_c(d, nullptr); }, d_lo, d_hi, &d_best);
  if (argmax) {
    double c_best = 0.0;
    best_over_c(d_best, &c_best);
    argmax->d = d_best;
    argmax->c = c_best;
    argmax->b = std::max(0.0, e - c_best - 6.0 * d_best);
    argmax->a = std::max(0.0, 1.0 - 3.0 * e + 9.0 * d_best);
  }
  return h;
}

void check_ber_domain(double ber) {
  if (!(ber >= 0.0 && ber <= 2.0 / 3.0))
    throw std::domain_error("rate_cww4_ber: BER outside the feasible range [0, 2/3]");
}

}  // namespace

double rate_cww4_ber_raw(double ber) {
  check_ber_domain(ber);
  if (ber == 0.0) return kSiftQ;
  return (kSiftQ / kBitsPerDit) * (kBitsPerDit - max_table_entropy_at_ber(ber, nullptr));
}

double rate_cww4_ber(double ber) { return std::max(0.0, rate_cww4_ber_raw(ber)); }

AbcdModel worstcase_ber_model(double ber) {
  check_ber_domain(ber);
  AbcdModel m;
  if (ber > 0.0) max_table_entropy_at_ber(ber, &m);
  return m;
}

}  // namespace qkd::cww
