// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/diffusion.hpp"

#include <cmath>

#include "colddiff/error.hpp"

namespace colddiff {

std::string to_string(ReverseMode m) {
  return m == ReverseMode::kDirect ? "direct" : "delta";
}

ReverseMode reverse_mode_from_string(const std::string& name) {
  if (name == "direct") return ReverseMode::kDirect;
  if (name == "delta" || name == "delta-normalized") return ReverseMode::kDeltaNormalized;
  throw UsageError("unknown reverse mode '" + name + "' (expected direct or delta)");
}

SpectroTensor forward_mix(const SpectroTensor& x0, const SpectroTensor& y, const Schedule& s,
                          int t) {
  require_same_shape(x0, y, "forward_mix");
  const double a = s.alpha(t);
  const double b = 1.0 - a;
  SpectroTensor out = x0;
  auto dst = out.values();
  const auto src = y.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a * dst[i] + b * src[i];
  return out;
}

OraclePredictor::OraclePredictor(SpectroTensor x0, SpectroTensor y, Schedule schedule,
                                 ReverseMode mode)
    : x0_(std::move(x0)), y_(std::move(y)), schedule_(std::move(schedule)), mode_(mode) {
  require_same_shape(x0_, y_, "oracle_predictor");
}

SpectroTensor OraclePredictor::predict(const SpectroTensor& x_t, int t) const {
  require_same_shape(x_t, x0_, "oracle predictor input");
  SpectroTensor prev = forward_mix(x0_, y_, schedule_, t - 1);
  if (mode_ == ReverseMode::kDirect) return prev;
  const SpectroTensor cur = forward_mix(x0_, y_, schedule_, t);
  const double g = schedule_.step_size(t);
  auto dst = prev.values();
  const auto src = cur.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (dst[i] - src[i]) / g;
  return prev;
}

std::unique_ptr<Predictor> oracle_predictor(const SpectroTensor& x0, const SpectroTensor& y,
                                            const Schedule& s, ReverseMode mode) {
  return std::make_unique<OraclePredictor>(x0, y, s, mode);
}

std::unique_ptr<Predictor> direct_as_delta(const Predictor& direct, const Schedule& s) {
  return std::make_unique<FunctionPredictor>([&direct, s](const SpectroTensor& x, int t) {
    SpectroTensor d = direct.predict(x, t);
    require_same_shape(d, x, "direct_as_delta");
    const double g = s.step_size(t);
    auto dst = d.values();
    const auto src = x.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (dst[i] - src[i]) / g;
    return d;
  });
}

SpectroTensor reverse_sample(const SpectroTensor& y, const Predictor& p, const Schedule& s,
                             ReverseMode mode, std::vector<SpectroTensor>* trajectory) {
  const int T = s.steps();
  if (trajectory) trajectory->assign(T + 1, SpectroTensor{});
  SpectroTensor x = y;
  if (trajectory) (*trajectory)[T] = x;
  for (int t = T; t >= 1; --t) {
    SpectroTensor out = p.predict(x, t);
    if (!out.same_shape(x))
      throw UsageError("predictor output shape mismatch at step t=" + std::to_string(t));
    if (mode == ReverseMode::kDirect) {
      x = std::move(out);
    } else {
      const double g = s.step_size(t);
      auto dst = x.values();
      const auto v = out.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g * v[i];
    }
    if (!x.all_finite())
      throw NumericalError("reverse sampling produced non-finite values at step t=" +
                           std::to_string(t) + " of " + std::to_string(T) + " (" +
                           to_string(mode) + " mode)");
    if (trajectory) (*trajectory)[t - 1] = x;
  }
  return x;
}

}  // namespace colddiff
