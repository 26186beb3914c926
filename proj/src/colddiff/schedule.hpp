// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <span>
#include <vector>

namespace colddiff {

// Mixing coefficients a_0..a_T (a_0 = 1 clean, a_T = 0 reverberant) and step
// sizes g_t = a_{t-1} - a_t for t = 1..T. Immutable.
class Schedule {
 public:
  // Cosine-squared schedule a_t = cos^2(pi/2 * t/T). Throws UsageError if
  // steps < 1.
  static Schedule cosine_squared(int steps);

  // Any strictly decreasing sequence from 1 to 0.
  static Schedule from_alphas(std::vector<double> alphas);

  int steps() const { return static_cast<int>(alpha_.size()) - 1; }

  // 0 <= t <= T
  double alpha(int t) const;
  // 1 <= t <= T
  double step_size(int t) const;

  std::span<const double> alphas() const { return alpha_; }
  std::span<const double> step_sizes() const { return step_; }

 private:
  explicit Schedule(std::vector<double> alphas);

  std::vector<double> alpha_;
  std::vector<double> step_;
};

inline Schedule make_schedule(int steps) { return Schedule::cosine_squared(steps); }

}  // namespace colddiff
