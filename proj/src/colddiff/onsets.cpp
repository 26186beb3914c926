// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/onsets.hpp"

#include <algorithm>
#include <cmath>

#include "colddiff/error.hpp"
#include "colddiff/stft.hpp"

namespace colddiff {

void OnsetConfig::validate() const {
  require(fft_size >= 2 && fft_size % 2 == 0, "onset fft_size must be even and >= 2");
  require(hop >= 1, "onset hop must be >= 1");
  require(median_seconds > 0.0 && peak_seconds >= 0.0 && delta >= 0.0 && min_gap_seconds >= 0.0,
          "onset detector parameters must be positive");
}

std::vector<double> onset_strength(const Waveform& x, const OnsetConfig& cfg) {
  cfg.validate();
  const std::vector<double> mono = x.mono();
  if (mono.size() <= static_cast<std::size_t>(cfg.fft_size / 2))
    throw DataError("signal too short for onset detection");
  const ComplexSpectrogram s = stft_channel(mono, cfg.fft_size, cfg.hop);
  std::vector<double> flux(s.frames, 0.0);
  std::vector<double> prev(s.bins), cur(s.bins);
  for (int f = 0; f < s.bins; ++f) prev[f] = std::log1p(std::abs(s.at(f, 0)));
  for (int k = 1; k < s.frames; ++k) {
    double acc = 0.0;
    for (int f = 0; f < s.bins; ++f) {
      cur[f] = std::log1p(std::abs(s.at(f, k)));
      acc += std::max(0.0, cur[f] - prev[f]);
    }
    flux[k] = acc;
    std::swap(prev, cur);
  }
  return flux;
}

std::vector<double> detect_onsets(const Waveform& x, const OnsetConfig& cfg) {
  const std::vector<double> flux = onset_strength(x, cfg);
  const double top = *std::max_element(flux.begin(), flux.end());
  if (!(top > 1e-10)) return {};
  const double fs = x.sample_rate();
  const double frame_s = cfg.hop / fs;
  const int n = static_cast<int>(flux.size());
  const int med_w = std::max(1, static_cast<int>(std::lround(cfg.median_seconds / frame_s)));
  const int peak_w = static_cast<int>(std::lround(cfg.peak_seconds / frame_s));

  std::vector<double> out;
  std::vector<double> window;
  for (int k = 0; k < n; ++k) {
    const double v = flux[k];
    if (v <= 0.0) continue;
    bool is_max = true;
    for (int j = std::max(0, k - peak_w); j <= std::min(n - 1, k + peak_w) && is_max; ++j)
      if (flux[j] > v || (flux[j] == v && j < k)) is_max = false;
    if (!is_max) continue;
    window.assign(flux.begin() + std::max(0, k - med_w), flux.begin() + std::min(n, k + med_w + 1));
    auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
    std::nth_element(window.begin(), mid, window.end());
    if (v < *mid + cfg.delta * top) continue;
    const double t = k * frame_s;
    if (!out.empty() && t - out.back() < cfg.min_gap_seconds) continue;
    out.push_back(t);
  }
  return out;
}

OnsetMatch match_onsets(std::vector<double> estimated, std::vector<double> reference,
                        double tolerance) {
  std::sort(estimated.begin(), estimated.end());
  std::sort(reference.begin(), reference.end());
  OnsetMatch m;
  std::size_t i = 0, j = 0;
  while (i < estimated.size() && j < reference.size()) {
    const double d = estimated[i] - reference[j];
    if (std::abs(d) <= tolerance) {
      ++m.matched;
      ++i;
      ++j;
    } else if (d < 0.0) {
      ++i;
    } else {
      ++j;
    }
  }
  m.precision = estimated.empty() ? 0.0 : static_cast<double>(m.matched) / estimated.size();
  m.recall = reference.empty() ? 0.0 : static_cast<double>(m.matched) / reference.size();
  m.f_measure = m.precision + m.recall > 0.0
                    ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                    : 0.0;
  return m;
}

}  // namespace colddiff
