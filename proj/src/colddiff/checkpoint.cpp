// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/checkpoint.hpp"

#include "colddiff/error.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace {

using nlohmann::json;

json params_json(const GainPredictor& p) {
  return json(std::vector<double>(p.params().begin(), p.params().end()));
}

GainPredictor params_from_json(const json& j, int steps, int bins, ReverseMode mode) {
  GainPredictor p(steps, bins, mode);
  const auto values = j.get<std::vector<double>>();
  if (values.size() != p.params().size())
    throw DataError("checkpoint parameter count " + std::to_string(values.size()) +
                    " does not match steps x 4 x bins = " + std::to_string(p.params().size()));
  if (!all_finite(values)) throw DataError("checkpoint contains non-finite parameters");
  std::copy(values.begin(), values.end(), p.params().begin());
  return p;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  require(ckpt.raw.steps() == ckpt.ema.steps() && ckpt.raw.bins() == ckpt.ema.bins() &&
              ckpt.raw.mode() == ckpt.ema.mode(),
          "checkpoint raw/EMA predictors disagree in shape or mode");
  json j;
  j["format"] = "colddiff-checkpoint";
  j["format_version"] = kCheckpointFormatVersion;
  j["mode"] = to_string(ckpt.raw.mode());
  j["steps"] = ckpt.raw.steps();
  j["bins"] = ckpt.raw.bins();
  j["fft_size"] = ckpt.stft.fft_size;
  j["hop"] = ckpt.stft.hop;
  j["window"] = to_string(ckpt.stft.window);
  j["sample_rate"] = ckpt.stft.sample_rate;
  j["segment_seconds"] = ckpt.stft.segment_seconds;
  j["layout"] = "per step: re_gain[bins], im_gain[bins], re_bias[bins], im_bias[bins]";
  j["metadata"] = ckpt.metadata;
  j["raw"] = params_json(ckpt.raw);
  j["ema"] = params_json(ckpt.ema);
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    if (j.value("format", "") != "colddiff-checkpoint")
      throw DataError("not a colddiff checkpoint");
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw DataError("unsupported checkpoint format_version " + std::to_string(version));
    const ReverseMode mode = reverse_mode_from_string(j.at("mode").get<std::string>());
    const int steps = j.at("steps").get<int>();
    const int bins = j.at("bins").get<int>();
    if (steps < 1 || bins < 1) throw DataError("checkpoint has invalid dimensions");
    StftConfig stft;
    stft.fft_size = j.at("fft_size").get<int>();
    stft.hop = j.at("hop").get<int>();
    stft.window = window_from_string(j.at("window").get<std::string>());
    stft.sample_rate = j.at("sample_rate").get<double>();
    stft.segment_seconds = j.at("segment_seconds").get<double>();
    if (stft.bins() != bins) throw DataError("checkpoint bins do not match its fft_size");
    return Checkpoint{params_from_json(j.at("raw"), steps, bins, mode),
                      params_from_json(j.at("ema"), steps, bins, mode), stft,
                      j.value("metadata", json::object())};
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_string(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_string(read_text_file(path));
}

}  // namespace colddiff
