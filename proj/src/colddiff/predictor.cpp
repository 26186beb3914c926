// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/predictor.hpp"

#include <cmath>
#include <sstream>

#include "colddiff/error.hpp"

namespace colddiff {

GainPredictor::GainPredictor(int steps, int bins, ReverseMode mode)
    : steps_(steps), bins_(bins), mode_(mode) {
  require(steps >= 1 && bins >= 1, "GainPredictor needs positive steps and bins");
  params_.assign(static_cast<std::size_t>(steps) * params_per_step(), 0.0);
  if (mode == ReverseMode::kDirect)
    for (int t = 1; t <= steps; ++t)
      for (int f = 0; f < bins; ++f) set_gain(t, f, {1.0, 0.0});
}

std::span<double> GainPredictor::step_params(int t) {
  require(t >= 1 && t <= steps_, "predictor step " + std::to_string(t) + " out of range");
  return std::span<double>(params_).subspan((t - 1) * params_per_step(), params_per_step());
}

std::span<const double> GainPredictor::step_params(int t) const {
  require(t >= 1 && t <= steps_, "predictor step " + std::to_string(t) + " out of range");
  return std::span<const double>(params_).subspan((t - 1) * params_per_step(),
                                                  params_per_step());
}

Complex GainPredictor::gain(int t, int f) const {
  const auto p = step_params(t);
  return {p[f], p[bins_ + f]};
}

Complex GainPredictor::bias(int t, int f) const {
  const auto p = step_params(t);
  return {p[2 * bins_ + f], p[3 * bins_ + f]};
}

void GainPredictor::set_gain(int t, int f, Complex w) {
  auto p = step_params(t);
  p[f] = w.real();
  p[bins_ + f] = w.imag();
}

void GainPredictor::set_bias(int t, int f, Complex b) {
  auto p = step_params(t);
  p[2 * bins_ + f] = b.real();
  p[3 * bins_ + f] = b.imag();
}

SpectroTensor GainPredictor::predict(const SpectroTensor& x_t, int t) const {
  require(x_t.bins() == bins_, "predictor expects " + std::to_string(bins_) +
                                   " frequency bins, got " + std::to_string(x_t.bins()));
  const auto p = step_params(t);
  SpectroTensor out = x_t;
  for (int c = 0; c < 2; ++c) {
    for (int f = 0; f < bins_; ++f) {
      const double wr = p[f], wi = p[bins_ + f];
      const double br = p[2 * bins_ + f], bi = p[3 * bins_ + f];
      for (int k = 0; k < x_t.frames(); ++k) {
        const double xr = x_t.at(2 * c, f, k);
        const double xi = x_t.at(2 * c + 1, f, k);
        out.at(2 * c, f, k) = wr * xr - wi * xi + br;
        out.at(2 * c + 1, f, k) = wr * xi + wi * xr + bi;
      }
    }
  }
  return out;
}

void GainPredictor::accumulate_gradient(const SpectroTensor& x_t, const SpectroTensor& d_out,
                                        std::span<double> grad) const {
  require_same_shape(x_t, d_out, "accumulate_gradient");
  require(x_t.bins() == bins_ && grad.size() == params_per_step(),
          "accumulate_gradient: size mismatch");
  for (int c = 0; c < 2; ++c) {
    for (int f = 0; f < bins_; ++f) {
      double dwr = 0.0, dwi = 0.0, dbr = 0.0, dbi = 0.0;
      for (int k = 0; k < x_t.frames(); ++k) {
        const double xr = x_t.at(2 * c, f, k);
        const double xi = x_t.at(2 * c + 1, f, k);
        const double gr = d_out.at(2 * c, f, k);
        const double gi = d_out.at(2 * c + 1, f, k);
        dwr += gr * xr + gi * xi;
        dwi += gi * xr - gr * xi;
        dbr += gr;
        dbi += gi;
      }
      grad[f] += dwr;
      grad[bins_ + f] += dwi;
      grad[2 * bins_ + f] += dbr;
      grad[3 * bins_ + f] += dbi;
    }
  }
}

void TrainConfig::validate() const {
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(ema_decay >= 0.0 && ema_decay < 1.0, "ema_decay must lie in [0, 1)");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0,
          "Adam betas must lie in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be positive");
  require(epochs >= 1, "epochs must be >= 1");
  require(batch_size >= 1, "batch_size must be >= 1");
}

Adam::Adam(std::size_t size, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad, double learning_rate) {
  require(params.size() == m_.size() && grad.size() == m_.size(), "Adam: size mismatch");
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= learning_rate * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

Ema::Ema(std::span<const double> initial, double decay)
    : decay_(decay), values_(initial.begin(), initial.end()) {
  require(decay >= 0.0 && decay < 1.0, "EMA decay must lie in [0, 1)");
}

void Ema::update(std::span<const double> current) {
  require(current.size() == values_.size(), "EMA: size mismatch");
  ++updates_;
  for (std::size_t i = 0; i < values_.size(); ++i)
    values_[i] = decay_ * values_[i] + (1.0 - decay_) * current[i];
}

ExampleGradient example_gradient(const GainPredictor& p, const TrainingPair& pair, int t,
                                 const Schedule& s, const LossWeights& w,
                                 const StftConfig& cfg) {
  if (pair.dry.size() != pair.wet.size())
    throw DataError("training pair '" + pair.id + "': dry/wet length mismatch");
  const SpectroTensor x0 = stft_forward(pair.dry, cfg);
  const SpectroTensor y = stft_forward(pair.wet, cfg);
  const SpectroTensor x_t = forward_mix(x0, y, s, t);
  const SpectroTensor x_prev = forward_mix(x0, y, s, t - 1);
  const double g = s.step_size(t);
  const SpectroTensor pred = p.predict(x_t, t);
  const LossGradient lg = total_loss_gradient(p.mode(), pred, x_prev, x_t, g, w, cfg,
                                              pair.dry.size());
  ExampleGradient out;
  out.t = t;
  out.terms = lg.terms;
  out.grad.assign(p.params_per_step(), 0.0);
  p.accumulate_gradient(x_t, lg.d_pred, out.grad);
  return out;
}

Trainer::Trainer(GainPredictor init, Schedule schedule, LossWeights weights, StftConfig stft,
                 TrainConfig config)
    : current_(std::move(init)),
      schedule_(std::move(schedule)),
      weights_(weights),
      stft_(stft),
      config_(config),
      adam_(current_.params().size(), config.adam_beta1, config.adam_beta2, config.adam_eps),
      ema_(current_.params(), config.ema_decay),
      rng_(config.seed) {
  config_.validate();
  weights_.validate();
  stft_.validate();
  require(current_.steps() == schedule_.steps(),
          "predictor has " + std::to_string(current_.steps()) + " steps but schedule has " +
              std::to_string(schedule_.steps()));
  require(current_.bins() == stft_.bins(), "predictor bins do not match fft_size");
}

EpochStats Trainer::run_epoch(std::span<const TrainingPair> data) {
  if (data.empty()) throw DataError("training data is empty");
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng_.shuffle(order);

  EpochStats stats;
  stats.epoch = static_cast<int>(history_.size()) + 1;
  const std::size_t batch = static_cast<std::size_t>(config_.batch_size);
  const std::size_t per_step = current_.params_per_step();
  std::vector<double> grad(current_.params().size());

  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t count = std::min(batch, order.size() - start);
    std::vector<int> steps(count);
    for (auto& t : steps) t = 1 + static_cast<int>(rng_.index(schedule_.steps()));

    std::vector<ExampleGradient> results(count);
    parallel_for(count, config_.jobs, [&](std::size_t i) {
      results[i] = example_gradient(current_, data[order[start + i]], steps[i], schedule_,
                                    weights_, stft_);
    });

    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const ExampleGradient& r = results[i];
      if (!std::isfinite(r.terms.total) || !all_finite(r.grad)) {
        std::ostringstream msg;
        msg << "non-finite loss in epoch " << stats.epoch << ", batch " << start / batch
            << ", example '" << data[order[start + i]].id << "' at step t=" << r.t
            << " (spec=" << r.terms.spec << ", aud=" << r.terms.aud << ")";
        throw NumericalError(msg.str());
      }
      stats.loss += r.terms.total;
      stats.spec += r.terms.spec;
      stats.aud += r.terms.aud;
      double* dst = grad.data() + (r.t - 1) * per_step;
      for (std::size_t j = 0; j < per_step; ++j) dst[j] += r.grad[j] / static_cast<double>(count);
    }
    adam_.step(current_.params(), grad, config_.learning_rate);
    if (!all_finite(current_.params()))
      throw NumericalError("parameters became non-finite in epoch " +
                           std::to_string(stats.epoch) + ", batch " +
                           std::to_string(start / batch));
    ema_.update(current_.params());
  }
  const double n = static_cast<double>(data.size());
  stats.loss /= n;
  stats.spec /= n;
  stats.aud /= n;
  history_.push_back(stats);
  return stats;
}

GainPredictor Trainer::ema_weights() const {
  require(ema_.updates() > 0, "EMA weights requested before any training step");
  GainPredictor out = current_;
  std::copy(ema_.values().begin(), ema_.values().end(), out.params().begin());
  return out;
}

TrainResult train(GainPredictor init, std::span<const TrainingPair> data, const Schedule& s,
                  const LossWeights& w, const StftConfig& cfg, const TrainConfig& tcfg,
                  const EpochCallback& on_epoch) {
  if (data.empty()) throw DataError("training data is empty");
  Trainer trainer(std::move(init), s, w, cfg, tcfg);
  for (int e = 0; e < tcfg.epochs; ++e) {
    const EpochStats st = trainer.run_epoch(data);
    if (on_epoch) on_epoch(st);
  }
  return {trainer.current(), trainer.ema_weights(), trainer.history()};
}

}  // namespace colddiff
