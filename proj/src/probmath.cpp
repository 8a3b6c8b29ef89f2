// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0

#include "qkd/probmath.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qkd {

ProbVec::ProbVec(std::span<const double> entries)
    : entries_(entries.begin(), entries.end()) {
  if (entries_.empty()) throw std::invalid_argument("ProbVec: empty distribution");
  for (double x : entries_) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0 + kNormTolerance)
      throw std::invalid_argument("ProbVec: entry outside [0,1]: " + std::to_string(x));
  }
  const double sum = std::accumulate(entries_.begin(), entries_.end(), 0.0);
  if (std::abs(sum - 1.0) > kNormTolerance)
    throw std::invalid_argument("ProbVec: entries sum to " + std::to_string(sum));
  for (double& x : entries_) x /= sum;
}

ProbVec::ProbVec(std::initializer_list<double> entries)
    : ProbVec(std::span<const double>(entries.begin(), entries.size())) {}

double shannon_entropy_bits(const ProbVec& dist) {
  double h = 0.0;
  for (double x : dist.entries())
    if (x > 0.0) h -= x * std::log2(x);
  // Rounding can leave -0 or a hair below zero for degenerate inputs.
  return h < 0.0 ? 0.0 : h;
}

double shannon_entropy_bits(std::span<const double> dist) {
  return shannon_entropy_bits(ProbVec(dist));
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("binary_entropy: p outside [0,1]");
  return shannon_entropy_bits(ProbVec{p, 1.0 - p});
}

}  // namespace qkd
