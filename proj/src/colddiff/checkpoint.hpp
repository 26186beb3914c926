// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "colddiff/predictor.hpp"
#include "colddiff/stft.hpp"

namespace colddiff {

inline constexpr int kCheckpointFormatVersion = 1;

// Raw and EMA parameters of a trained GainPredictor plus the STFT geometry
// it was trained for. Serialized as JSON; doubles are written in shortest
// round-trip form, so save/load is bit-exact.
struct Checkpoint {
  GainPredictor raw;
  GainPredictor ema;
  StftConfig stft;
  nlohmann::json metadata = nlohmann::json::object();
};

std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace colddiff
