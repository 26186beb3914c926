// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "colddiff/checkpoint.hpp"
#include "colddiff/config.hpp"
#include "colddiff/dataset.hpp"
#include "colddiff/metrics.hpp"

namespace colddiff {

namespace fs = std::filesystem;

// Inference on inputs of any length: non-overlapping segment-length tiles
// (the last one zero-padded), each run through reverse_sample from x_T = y,
// then hard-concatenated and cropped to the input length.
Waveform dereverb_waveform(const Waveform& input, const GainPredictor& p,
                           const StftConfig& stft);

// Same tiling with an oracle predictor built from a paired clean reference.
Waveform dereverb_oracle(const Waveform& input, const Waveform& reference,
                         const StftConfig& stft, int steps, ReverseMode mode);

struct RenderOutput {
  Manifest manifest;
  BuildReport report;
};

// Each command writes the fully resolved config next to its outputs.
RenderOutput cmd_render(const fs::path& dry_dir, const std::optional<fs::path>& rir_dir,
                        const fs::path& out_dir, const RunConfig& cfg,
                        const ProgressFn& progress = {});

// Writes the checkpoint, <checkpoint stem>.loss.csv and
// <checkpoint stem>.config.json.
TrainResult cmd_train(const fs::path& manifest_path, const fs::path& out_checkpoint,
                      const RunConfig& cfg, const ProgressFn& progress = {});

struct DereverbRequest {
  fs::path input;  // WAV file or directory of WAVs
  fs::path out_dir;
  std::optional<fs::path> checkpoint;
  // Test mode: a clean reference file (or directory with matching names)
  // drives an oracle predictor instead of a checkpoint.
  std::optional<fs::path> oracle_reference;
  // When set, must equal the checkpoint's mode.
  std::optional<ReverseMode> mode;
};

// Returns the written estimate paths.
std::vector<fs::path> cmd_dereverb(const DereverbRequest& req, const RunConfig& cfg,
                                   const ProgressFn& progress = {});

// Writes metrics.csv, metrics.json and config.json into out_dir.
MetricReport cmd_evaluate(const fs::path& manifest_path, const fs::path& estimates_dir,
                          const fs::path& out_dir, const RunConfig& cfg,
                          const ProgressFn& progress = {});

}  // namespace colddiff
