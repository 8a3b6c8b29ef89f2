// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shannon-entropy kernels over normalized probability vectors.

#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace qkd {

/// Absolute tolerance on the entry sum of a probability vector.
inline constexpr double kNormTolerance = 1e-9;

/// Normalized, nonnegative probability vector.
///
/// Construction validates every entry and the sum. Sums within
/// kNormTolerance of one are renormalized exactly; anything further off
/// throws std::invalid_argument.
class ProbVec {
 public:
  explicit ProbVec(std::span<const double> entries);
  ProbVec(std::initializer_list<double> entries);

  std::span<const double> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<double> entries_;
};

/// -sum x log2 x with 0 log 0 = 0.
double shannon_entropy_bits(const ProbVec& dist);

/// Validating overload for raw spans; same rules as the ProbVec constructor.
double shannon_entropy_bits(std::span<const double> dist);

/// H(p, 1-p). Throws std::domain_error outside [0, 1].
double binary_entropy(double p);

}  // namespace qkd
