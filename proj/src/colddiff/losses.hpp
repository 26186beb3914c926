// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <span>

#include "colddiff/diffusion.hpp"
#include "colddiff/stft.hpp"
#include "colddiff/waveform.hpp"

namespace colddiff {

struct LossWeights {
  double lambda_aud = 8.0;
  double delta_weight = 0.7;
  double state_weight = 0.3;

  void validate() const;
};

// Mean absolute elementwise difference.
double l1(std::span<const double> a, std::span<const double> b);
double l1(const SpectroTensor& a, const SpectroTensor& b);
double l1(const Waveform& a, const Waveform& b);

// (x_prev - x_t) / g_t
SpectroTensor v_target(const SpectroTensor& x_prev, const SpectroTensor& x_t, double g_t);

// The next-state estimate implied by a prediction: pred itself in Direct
// mode, x_t + g_t * pred in Delta mode.
SpectroTensor predicted_state(ReverseMode mode, const SpectroTensor& pred,
                              const SpectroTensor& x_t, double g_t);

double spec_loss(ReverseMode mode, const SpectroTensor& pred, const SpectroTensor& x_prev,
                 const SpectroTensor& x_t, double g_t, const LossWeights& w);

// L1 between the inverse-STFT waveforms of two states.
double audio_loss(const SpectroTensor& pred_state, const SpectroTensor& target_state,
                  const StftConfig& cfg, std::size_t out_len);

struct LossTerms {
  double total = 0.0;
  double spec = 0.0;
  double aud = 0.0;
};

// total = spec + lambda_aud * aud, with aud measured on the step t-1 states.
LossTerms total_loss(ReverseMode mode, const SpectroTensor& pred, const SpectroTensor& x_prev,
                     const SpectroTensor& x_t, double g_t, const LossWeights& w,
                     const StftConfig& cfg, std::size_t out_len);

struct LossGradient {
  LossTerms terms;
  SpectroTensor d_pred;  // d total / d pred, subgradient 0 at L1 kinks
};

LossGradient total_loss_gradient(ReverseMode mode, const SpectroTensor& pred,
                                 const SpectroTensor& x_prev, const SpectroTensor& x_t,
                                 double g_t, const LossWeights& w, const StftConfig& cfg,
                                 std::size_t out_len);

}  // namespace colddiff
