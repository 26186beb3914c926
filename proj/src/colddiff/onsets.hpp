// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <vector>

#include "colddiff/waveform.hpp"

namespace colddiff {

struct OnsetConfig {
  int fft_size = 1024;
  int hop = 384;
  double median_seconds = 0.1;  // half-width of the moving-median threshold
  double peak_seconds = 0.03;   // half-width of the local-maximum test
  double delta = 0.07;          // threshold offset, as a fraction of the peak flux
  double min_gap_seconds = 0.05;

  void validate() const;
};

// Spectral-flux onset detector on the mono downmix: log(1 + |S|)
// compression, half-wave rectified frame difference summed over bins, then
// peaks that are local maxima and exceed moving median + delta * max flux.
// Times are frame centres in seconds, ascending. Silence yields no onsets.
std::vector<double> detect_onsets(const Waveform& x, const OnsetConfig& cfg = {});

// Raw onset strength envelope, one value per frame.
std::vector<double> onset_strength(const Waveform& x, const OnsetConfig& cfg = {});

struct OnsetMatch {
  int matched = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

// One-to-one matching within +-tolerance seconds, greedy in time order over
// sorted copies of both lists (maximal for equal-width windows).
OnsetMatch match_onsets(std::vector<double> estimated, std::vector<double> reference,
                        double tolerance);

}  // namespace colddiff
