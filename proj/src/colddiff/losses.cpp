// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/losses.hpp"

#include <cmath>

#include "colddiff/error.hpp"

namespace colddiff {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

void LossWeights::validate() const {
  require(lambda_aud >= 0.0 && delta_weight >= 0.0 && state_weight >= 0.0,
          "loss weights must be non-negative");
}

double l1(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "l1: size mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
  require(!a.empty(), "l1: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double l1(const SpectroTensor& a, const SpectroTensor& b) {
  require_same_shape(a, b, "l1");
  return l1(a.values(), b.values());
}

double l1(const Waveform& a, const Waveform& b) {
  require(a.size() == b.size(), "l1: waveform length mismatch");
  return l1(a.concatenated(), b.concatenated());
}

SpectroTensor v_target(const SpectroTensor& x_prev, const SpectroTensor& x_t, double g_t) {
  require(g_t > 0.0, "v_target: step size must be positive");
  require_same_shape(x_prev, x_t, "v_target");
  SpectroTensor v = x_prev;
  auto dst = v.values();
  const auto src = x_t.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (dst[i] - src[i]) / g_t;
  return v;
}

SpectroTensor predicted_state(ReverseMode mode, const SpectroTensor& pred,
                              const SpectroTensor& x_t, double g_t) {
  require_same_shape(pred, x_t, "predicted_state");
  if (mode == ReverseMode::kDirect) return pred;
  SpectroTensor s = x_t;
  auto dst = s.values();
  const auto p = pred.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g_t * p[i];
  return s;
}

double spec_loss(ReverseMode mode, const SpectroTensor& pred, const SpectroTensor& x_prev,
                 const SpectroTensor& x_t, double g_t, const LossWeights& w) {
  require_same_shape(pred, x_prev, "spec_loss");
  if (mode == ReverseMode::kDirect) return l1(pred, x_prev);
  return w.delta_weight * l1(pred, v_target(x_prev, x_t, g_t)) +
         w.state_weight * l1(predicted_state(mode, pred, x_t, g_t), x_prev);
}

double audio_loss(const SpectroTensor& pred_state, const SpectroTensor& target_state,
                  const StftConfig& cfg, std::size_t out_len) {
  require_same_shape(pred_state, target_state, "audio_loss");
  return l1(istft_inverse(pred_state, cfg, out_len), istft_inverse(target_state, cfg, out_len));
}

LossTerms total_loss(ReverseMode mode, const SpectroTensor& pred, const SpectroTensor& x_prev,
                     const SpectroTensor& x_t, double g_t, const LossWeights& w,
                     const StftConfig& cfg, std::size_t out_len) {
  w.validate();
  LossTerms r;
  r.spec = spec_loss(mode, pred, x_prev, x_t, g_t, w);
  r.aud = audio_loss(predicted_state(mode, pred, x_t, g_t), x_prev, cfg, out_len);
  r.total = r.spec + w.lambda_aud * r.aud;
  return r;
}

LossGradient total_loss_gradient(ReverseMode mode, const SpectroTensor& pred,
                                 const SpectroTensor& x_prev, const SpectroTensor& x_t,
                                 double g_t, const LossWeights& w, const StftConfig& cfg,
                                 std::size_t out_len) {
  w.validate();
  require_same_shape(pred, x_prev, "total_loss_gradient");
  require_same_shape(pred, x_t, "total_loss_gradient");
  if (mode == ReverseMode::kDeltaNormalized) require(g_t > 0.0, "step size must be positive");

  const SpectroTensor state = predicted_state(mode, pred, x_t, g_t);
  const double jac = mode == ReverseMode::kDirect ? 1.0 : g_t;  // d state / d pred
  const auto p = pred.values();
  const auto s = state.values();
  const auto prev = x_prev.values();
  const auto cur = x_t.values();
  const double m = static_cast<double>(p.size());

  LossGradient out;
  out.d_pred = SpectroTensor(pred.bins(), pred.frames(), pred.fft_size(), pred.hop(),
                             pred.sample_rate());
  auto grad = out.d_pred.values();

  double spec_state = 0.0;
  double spec_delta = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e_state = s[i] - prev[i];
    spec_state += std::abs(e_state);
    if (mode == ReverseMode::kDirect) {
      grad[i] = sign(e_state) / m;
    } else {
      const double e_delta = p[i] - (prev[i] - cur[i]) / g_t;
      spec_delta += std::abs(e_delta);
      grad[i] = (w.delta_weight * sign(e_delta) + w.state_weight * g_t * sign(e_state)) / m;
    }
  }
  out.terms.spec = mode == ReverseMode::kDirect
                       ? spec_state / m
                       : w.delta_weight * spec_delta / m + w.state_weight * spec_state / m;

  const Waveform est = istft_inverse(state, cfg, out_len);
  const Waveform ref = istft_inverse(x_prev, cfg, out_len);
  Waveform resid = Waveform::zeros(out_len, est.sample_rate());
  double aud = 0.0;
  const double n = 2.0 * static_cast<double>(out_len);
  for (int c = 0; c < 2; ++c) {
    const auto a = est.channel(c);
    const auto b = ref.channel(c);
    auto r = resid.channel(c);
    for (std::size_t i = 0; i < out_len; ++i) {
      const double e = a[i] - b[i];
      aud += std::abs(e);
      r[i] = w.lambda_aud * jac * sign(e) / n;
    }
  }
  out.terms.aud = aud / n;
  out.terms.total = out.terms.spec + w.lambda_aud * out.terms.aud;

  if (w.lambda_aud != 0.0) {
    const SpectroTensor back = istft_adjoint(resid, cfg, pred.frames());
    const auto bv = back.values();
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += bv[i];
  }
  return out;
}

}  // namespace colddiff
