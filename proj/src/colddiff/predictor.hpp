// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colddiff/diffusion.hpp"
#include "colddiff/losses.hpp"
#include "colddiff/schedule.hpp"
#include "colddiff/stft.hpp"
#include "colddiff/util.hpp"

namespace colddiff {

// Reference predictor: for every step t a per-bin complex affine map
//   out(f, k) = W_t[f] * X(f, k) + b_t[f]
// applied to each stereo channel's complex bins (channels share parameters).
// Parameter layout per step: [Re W (F), Im W (F), Re b (F), Im b (F)].
class GainPredictor final : public Predictor {
 public:
  // Direct mode starts at the identity (W = 1, b = 0); Delta mode at zero.
  GainPredictor(int steps, int bins, ReverseMode mode);

  int steps() const { return steps_; }
  int bins() const { return bins_; }
  ReverseMode mode() const { return mode_; }

  std::size_t params_per_step() const { return 4 * static_cast<std::size_t>(bins_); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> step_params(int t);
  std::span<const double> step_params(int t) const;

  Complex gain(int t, int f) const;
  Complex bias(int t, int f) const;
  void set_gain(int t, int f, Complex w);
  void set_bias(int t, int f, Complex b);

  SpectroTensor predict(const SpectroTensor& x_t, int t) const override;

  // Adds d loss / d (step-t params) into `grad` (size params_per_step()),
  // given d loss / d output.
  void accumulate_gradient(const SpectroTensor& x_t, const SpectroTensor& d_out,
                           std::span<double> grad) const;

  bool operator==(const GainPredictor& o) const {
    return steps_ == o.steps_ && bins_ == o.bins_ && mode_ == o.mode_ && params_ == o.params_;
  }

 private:
  int steps_;
  int bins_;
  ReverseMode mode_;
  std::vector<double> params_;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double ema_decay = 0.995;
  int epochs = 20;
  int batch_size = 8;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

class Adam {
 public:
  Adam(std::size_t size, double beta1, double beta2, double eps);
  void step(std::span<double> params, std::span<const double> grad, double learning_rate);
  long steps() const { return steps_; }

 private:
  double beta1_, beta2_, eps_;
  long steps_ = 0;
  std::vector<double> m_, v_;
};

// Shadow parameters: ema <- decay * ema + (1 - decay) * current.
class Ema {
 public:
  Ema(std::span<const double> initial, double decay);
  void update(std::span<const double> current);
  std::span<const double> values() const { return values_; }
  long updates() const { return updates_; }

 private:
  double decay_;
  long updates_ = 0;
  std::vector<double> values_;
};

// Aligned clean/reverberant pair used for training.
struct TrainingPair {
  std::string id;
  Waveform dry;
  Waveform wet;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double spec = 0.0;
  double aud = 0.0;
};

// Loss and parameter gradient of one example at step t (gradient covers
// only the step-t parameters).
struct ExampleGradient {
  int t = 0;
  LossTerms terms;
  std::vector<double> grad;
};

ExampleGradient example_gradient(const GainPredictor& p, const TrainingPair& pair, int t,
                                 const Schedule& s, const LossWeights& w,
                                 const StftConfig& cfg);

// Stateful training run: Adam on the raw parameters plus an EMA shadow.
class Trainer {
 public:
  Trainer(GainPredictor init, Schedule schedule, LossWeights weights, StftConfig stft,
          TrainConfig config);

  // One pass over `data` in seeded shuffled order; returns mean example loss
  // (measured before each batch's update).
  EpochStats run_epoch(std::span<const TrainingPair> data);

  const GainPredictor& current() const { return current_; }
  // Throws UsageError when no update has run yet.
  GainPredictor ema_weights() const;
  const std::vector<EpochStats>& history() const { return history_; }

 private:
  GainPredictor current_;
  Schedule schedule_;
  LossWeights weights_;
  StftConfig stft_;
  TrainConfig config_;
  Adam adam_;
  Ema ema_;
  Rng rng_;
  std::vector<EpochStats> history_;
};

struct TrainResult {
  GainPredictor trained;
  GainPredictor ema;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

TrainResult train(GainPredictor init, std::span<const TrainingPair> data, const Schedule& s,
                  const LossWeights& w, const StftConfig& cfg, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch = {});

}  // namespace colddiff
