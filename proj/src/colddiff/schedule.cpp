// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/schedule.hpp"

#include <cmath>
#include <string>

#include "colddiff/error.hpp"
#include "colddiff/util.hpp"

namespace colddiff {

Schedule::Schedule(std::vector<double> alphas) : alpha_(std::move(alphas)) {
  const int T = steps();
  require(T >= 1, "schedule needs at least one step");
  require(alpha_.front() == 1.0 && alpha_.back() == 0.0,
          "schedule must start at 1 and end at 0");
  step_.resize(T);
  for (int t = 1; t <= T; ++t) {
    step_[t - 1] = alpha_[t - 1] - alpha_[t];
    require(step_[t - 1] > 0.0, "schedule must be strictly decreasing");
  }
}

Schedule Schedule::cosine_squared(int steps) {
  require(steps >= 1, "schedule step count must be >= 1, got " + std::to_string(steps));
  std::vector<double> a(steps + 1);
  // cos^2(x/2) written as (1 + cos x)/2 so the midpoint lands exactly on 0.5.
  for (int t = 0; t <= steps; ++t)
    a[t] = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(t) / steps));
  a.front() = 1.0;
  a.back() = 0.0;
  return Schedule(std::move(a));
}

Schedule Schedule::from_alphas(std::vector<double> alphas) { return Schedule(std::move(alphas)); }

double Schedule::alpha(int t) const {
  require(t >= 0 && t <= steps(), "schedule index " + std::to_string(t) + " outside [0, " +
                                      std::to_string(steps()) + "]");
  return alpha_[t];
}

double Schedule::step_size(int t) const {
  require(t >= 1 && t <= steps(), "step index " + std::to_string(t) + " outside [1, " +
                                      std::to_string(steps()) + "]");
  return step_[t - 1];
}

}  // namespace colddiff
