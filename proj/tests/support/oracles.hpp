// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Independent reference implementations and synthetic signals for tests.
// Nothing here calls the FFT wrapper; transforms are evaluated directly.

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "colddiff/stft.hpp"
#include "colddiff/waveform.hpp"

namespace oracle {

using colddiff::Waveform;
using Cx = std::complex<double>;

// X[f] = sum_n x[n] e^{-2 pi i f n / N}, f = 0..N/2.
std::vector<Cx> naive_rdft(const std::vector<double>& x);

// Centre-padded (reflect) Hann STFT evaluated by the DFT sum; [frame][bin].
std::vector<std::vector<Cx>> naive_stft(const std::vector<double>& x, int fft, int hop);

// Full linear convolution truncated to x.size().
std::vector<double> direct_convolution(const std::vector<double>& x, const std::vector<double>& h);

Waveform white_noise(std::size_t n, std::uint64_t seed, double amp = 0.5,
                     double sample_rate = colddiff::kDefaultSampleRate);

// Decaying noise bursts ("hits") at the given times; each hit lasts
// `hit_seconds` with an exponential envelope of time constant `tau`.
Waveform click_track(const std::vector<double>& times, std::size_t n, std::uint64_t seed,
                     double tau = 0.004, double hit_seconds = 0.015, double amp = 0.8,
                     double sample_rate = colddiff::kDefaultSampleRate);

// Seeded random hit pattern of percussive excerpt length n.
Waveform random_percussion(std::size_t n, std::uint64_t seed,
                           double sample_rate = colddiff::kDefaultSampleRate);

// Noise with a sinusoidal amplitude modulation at rate_hz.
Waveform am_noise(double rate_hz, std::size_t n, std::uint64_t seed,
                  double sample_rate = colddiff::kDefaultSampleRate);

// Mutual information and entropies (nats) of two integer labelings,
// counted with ordered maps.
struct MiResult {
  double mi, hu, hv;
};
MiResult label_mi(const std::vector<int>& u, const std::vector<int>& v);

// Per-bin complex least-squares affine fit x0 ~ W y + b over all frames of
// all pairs (both channels pooled); returns the fitted estimate of each
// pair's clean spectrogram.
std::vector<colddiff::SpectroTensor> affine_fit(const std::vector<colddiff::SpectroTensor>& x0,
                                                const std::vector<colddiff::SpectroTensor>& y,
                                                const std::vector<colddiff::SpectroTensor>& apply_to);

double rel_l2(std::span<const double> a, std::span<const double> b);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace oracle
