// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "colddiff/schedule.hpp"
#include "colddiff/stft.hpp"

namespace colddiff {

enum class ReverseMode { kDirect, kDeltaNormalized };

std::string to_string(ReverseMode m);
ReverseMode reverse_mode_from_string(const std::string& name);

// Reverse transition model f(x_t, t). Direct mode: output estimates x_{t-1}.
// Delta mode: output estimates v_t = (x_{t-1} - x_t) / g_t. Implementations
// must be deterministic and shape-preserving.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual SpectroTensor predict(const SpectroTensor& x_t, int t) const = 0;
};

// Adapts a callable to the Predictor interface.
class FunctionPredictor final : public Predictor {
 public:
  using Fn = std::function<SpectroTensor(const SpectroTensor&, int)>;
  explicit FunctionPredictor(Fn fn) : fn_(std::move(fn)) {}
  SpectroTensor predict(const SpectroTensor& x_t, int t) const override { return fn_(x_t, t); }

 private:
  Fn fn_;
};

// x_t = a_t x0 + (1 - a_t) y
SpectroTensor forward_mix(const SpectroTensor& x0, const SpectroTensor& y, const Schedule& s,
                          int t);

// Knows the clean/reverberant pair and returns the exact target for `mode`:
// x_{t-1} (Direct) or (x_{t-1} - x_t) / g_t (Delta), ignoring its input.
class OraclePredictor final : public Predictor {
 public:
  OraclePredictor(SpectroTensor x0, SpectroTensor y, Schedule schedule, ReverseMode mode);
  SpectroTensor predict(const SpectroTensor& x_t, int t) const override;

 private:
  SpectroTensor x0_;
  SpectroTensor y_;
  Schedule schedule_;
  ReverseMode mode_;
};

std::unique_ptr<Predictor> oracle_predictor(const SpectroTensor& x0, const SpectroTensor& y,
                                            const Schedule& s, ReverseMode mode);

// Wraps a Direct predictor d as the Delta predictor (d(x, t) - x) / g_t.
std::unique_ptr<Predictor> direct_as_delta(const Predictor& direct, const Schedule& s);

// Iterates t = T..1 from x_T = y. Direct: x_{t-1} = p(x_t, t). Delta:
// x_{t-1} = x_t + g_t p(x_t, t). When `trajectory` is given it receives all
// T + 1 states indexed by t (trajectory[T] == y, trajectory[0] == result).
// Throws UsageError on predictor shape mismatch and NumericalError naming the
// step on non-finite output.
SpectroTensor reverse_sample(const SpectroTensor& y, const Predictor& p, const Schedule& s,
                             ReverseMode mode,
                             std::vector<SpectroTensor>* trajectory = nullptr);

}  // namespace colddiff
