// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/waveform.hpp"

#include <string>

#include "colddiff/error.hpp"
#include "colddiff/util.hpp"

namespace colddiff {

Waveform::Waveform(std::vector<double> left, std::vector<double> right,
                   double sample_rate)
    : channels_{std::move(left), std::move(right)}, sample_rate_(sample_rate) {
  require(sample_rate_ > 0.0, "waveform sample rate must be positive");
  require(channels_[0].size() == channels_[1].size(),
          "waveform channels must have equal length");
  if (!all_finite(channels_[0]) || !all_finite(channels_[1]))
    throw DataError("waveform contains non-finite samples");
}

Waveform Waveform::from_channels(std::vector<std::vector<double>> channels,
                                 double sample_rate) {
  if (channels.size() != 2)
    throw UsageError("expected a stereo signal, got " + std::to_string(channels.size()) +
                     " channel(s)");
  return Waveform(std::move(channels[0]), std::move(channels[1]), sample_rate);
}

Waveform Waveform::zeros(std::size_t length, double sample_rate) {
  return Waveform(std::vector<double>(length, 0.0), std::vector<double>(length, 0.0),
                  sample_rate);
}

Waveform Waveform::slice(std::size_t start, std::size_t length) const {
  Waveform out = zeros(length, sample_rate_);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < length && start + i < size(); ++i)
      out.channels_[c][i] = channels_[c][start + i];
  }
  return out;
}

std::vector<double> Waveform::concatenated() const {
  std::vector<double> out(channels_[0]);
  out.insert(out.end(), channels_[1].begin(), channels_[1].end());
  return out;
}

std::vector<double> Waveform::mono() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i)
    out[i] = 0.5 * (channels_[0][i] + channels_[1][i]);
  return out;
}

Waveform Waveform::scaled(double gain) const {
  Waveform out = *this;
  for (auto& ch : out.channels_)
    for (double& v : ch) v *= gain;
  return out;
}

}  // namespace colddiff
