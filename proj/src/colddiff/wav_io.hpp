// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "colddiff/waveform.hpp"

namespace colddiff {

struct AudioData {
  std::vector<std::vector<double>> channels;
  double sample_rate = 0.0;

  std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

// Reads RIFF/WAVE with 16/24/32-bit integer PCM or 32-bit float samples
// (plain or WAVE_FORMAT_EXTENSIBLE). Throws DataError on anything else.
AudioData read_wav(const std::filesystem::path& path);

// Writes 32-bit float WAV via a temporary file and rename.
void write_wav(const std::filesystem::path& path, const AudioData& audio);

// Stereo convenience wrappers. `expected_rate` > 0 enforces the pipeline
// sample rate (no resampling).
Waveform read_stereo_wav(const std::filesystem::path& path, double expected_rate = 0.0);
void write_stereo_wav(const std::filesystem::path& path, const Waveform& w);

// Writes `contents` to `path` through a sibling temp file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace colddiff
