// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace colddiff {

inline constexpr double kDefaultSampleRate = 44100.0;

// Stereo signal in full-scale units. Invariants: two channels of equal
// length, positive sample rate, finite samples.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> left, std::vector<double> right,
           double sample_rate = kDefaultSampleRate);

  // Throws UsageError unless `channels` holds exactly two channels.
  static Waveform from_channels(std::vector<std::vector<double>> channels,
                                double sample_rate = kDefaultSampleRate);
  static Waveform zeros(std::size_t length, double sample_rate = kDefaultSampleRate);

  std::size_t size() const { return channels_[0].size(); }
  bool empty() const { return size() == 0; }
  double sample_rate() const { return sample_rate_; }

  std::span<const double> channel(int c) const { return channels_.at(c); }
  std::span<double> channel(int c) { return channels_.at(c); }

  // Copy of [start, start + length); zero-padded past the end.
  Waveform slice(std::size_t start, std::size_t length) const;

  // Both channels laid end to end (left then right).
  std::vector<double> concatenated() const;

  // (left + right) / 2
  std::vector<double> mono() const;

  Waveform scaled(double gain) const;

  bool operator==(const Waveform&) const = default;

 private:
  std::array<std::vector<double>, 2> channels_;
  double sample_rate_ = kDefaultSampleRate;
};

}  // namespace colddiff
