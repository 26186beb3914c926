// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "colddiff/dataset.hpp"
#include "colddiff/diffusion.hpp"
#include "colddiff/losses.hpp"
#include "colddiff/metrics.hpp"
#include "colddiff/predictor.hpp"
#include "colddiff/stft.hpp"

namespace colddiff {

inline constexpr int kConfigFormatVersion = 1;

// Everything a command needs, with JSON (de)serialization. The JSON form is
// sectioned: stft, diffusion, loss, train, render, rooms, metrics, evaluate.
struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  StftConfig stft;
  int steps = 16;
  ReverseMode mode = ReverseMode::kDeltaNormalized;
  LossWeights loss;
  TrainConfig train;    // seed and jobs mirror the top-level values
  DatasetConfig render; // stft and jobs mirror the top-level values
  MetricConfig metrics;
  std::optional<Split> eval_split = Split::kTest;  // nullopt = every entry

  // Propagates shared fields and validates every section.
  void finalize();
};

nlohmann::json config_to_json(const RunConfig& c);

// Strict parse: keys missing from the file keep their defaults, unknown keys
// and wrongly typed values raise UsageError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Applies a dotted-key override such as "train.epochs=5". The value is read
// as JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);
void apply_override(nlohmann::json& j, const std::string& key, const std::string& value);

}  // namespace colddiff
