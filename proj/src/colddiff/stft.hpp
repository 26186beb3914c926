// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "colddiff/fft.hpp"
#include "colddiff/waveform.hpp"

namespace colddiff {

enum class WindowKind { kHann, kRectangular };

std::string to_string(WindowKind w);
WindowKind window_from_string(const std::string& name);

// Periodic window of length n.
std::vector<double> make_window(WindowKind kind, int n);

struct StftConfig {
  int fft_size = 1024;
  int hop = 384;
  WindowKind window = WindowKind::kHann;
  double segment_seconds = 2.0;
  double sample_rate = kDefaultSampleRate;

  int bins() const { return fft_size / 2 + 1; }
  // Frame count for a signal of `length` samples under centre padding.
  int frames_for(std::size_t length) const;
  std::size_t segment_samples() const;
  // Throws UsageError when an invariant is violated.
  void validate() const;
};

// Stereo RI spectrogram, shape 4 x F x K with channel order
// [Re L, Im L, Re R, Im R]. Storage is row-major over (channel, bin, frame).
class SpectroTensor {
 public:
  static constexpr int kChannels = 4;

  SpectroTensor() = default;
  // Zero tensor.
  SpectroTensor(int bins, int frames, int fft_size, int hop, double sample_rate);

  int bins() const { return bins_; }
  int frames() const { return frames_; }
  int fft_size() const { return fft_size_; }
  int hop() const { return hop_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return data_.size(); }

  double& at(int c, int f, int k) { return data_[index(c, f, k)]; }
  double at(int c, int f, int k) const { return data_[index(c, f, k)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const SpectroTensor& o) const {
    return bins_ == o.bins_ && frames_ == o.frames_ && fft_size_ == o.fft_size_ &&
           hop_ == o.hop_;
  }
  bool all_finite() const;

  SpectroTensor& operator+=(const SpectroTensor& o);
  SpectroTensor& operator-=(const SpectroTensor& o);
  SpectroTensor& operator*=(double s);

  bool operator==(const SpectroTensor&) const = default;

 private:
  std::size_t index(int c, int f, int k) const {
    return (static_cast<std::size_t>(c) * bins_ + f) * frames_ + k;
  }

  int bins_ = 0;
  int frames_ = 0;
  int fft_size_ = 0;
  int hop_ = 0;
  double sample_rate_ = kDefaultSampleRate;
  std::vector<double> data_;
};

SpectroTensor operator+(SpectroTensor a, const SpectroTensor& b);
SpectroTensor operator-(SpectroTensor a, const SpectroTensor& b);
SpectroTensor operator*(double s, SpectroTensor a);

// Throws UsageError unless a and b have identical shapes.
void require_same_shape(const SpectroTensor& a, const SpectroTensor& b, const char* what);

// Complex spectrogram of one channel, indexed [frame][bin].
struct ComplexSpectrogram {
  int bins = 0;
  int frames = 0;
  std::vector<Complex> data;

  Complex at(int f, int k) const { return data[static_cast<std::size_t>(k) * bins + f]; }
};

// Centre-padded (reflect, fft_size/2) STFT of a single channel.
// Requires signal length > fft_size / 2.
ComplexSpectrogram stft_channel(std::span<const double> signal, int fft_size, int hop,
                                WindowKind window = WindowKind::kHann);

SpectroTensor stft_forward(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add inverse normalized by the summed squared window,
// cropped or zero-padded to out_len samples.
Waveform istft_inverse(const SpectroTensor& s, const StftConfig& cfg, std::size_t out_len);

// Adjoint (transpose) of istft_inverse as a linear map from tensor entries to
// samples: returns the tensor g with <istft_inverse(s), w> = <s, g> for all s.
SpectroTensor istft_adjoint(const Waveform& w, const StftConfig& cfg, int frames);

enum class SegmentMode { kDeterministic, kRandom };

// Splits into segment_samples() excerpts. Deterministic mode: consecutive,
// non-overlapping, tail discarded. Random mode: the same count at
// seeded uniform offsets.
std::vector<Waveform> segment(const Waveform& w, const StftConfig& cfg,
                              SegmentMode mode = SegmentMode::kDeterministic,
                              std::uint64_t seed = 0);

// Segment start offsets that segment() would use.
std::vector<std::size_t> segment_offsets(std::size_t length, const StftConfig& cfg,
                                         SegmentMode mode, std::uint64_t seed);

}  // namespace colddiff
