// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/config.hpp"

#include "colddiff/error.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace {

using nlohmann::json;

std::string segment_mode_name(SegmentMode m) {
  return m == SegmentMode::kDeterministic ? "deterministic" : "random";
}

SegmentMode segment_mode_from(const std::string& s) {
  if (s == "deterministic") return SegmentMode::kDeterministic;
  if (s == "random") return SegmentMode::kRandom;
  throw UsageError("render.segment_mode must be 'deterministic' or 'random', got '" + s + "'");
}

// Rejects keys of `user` that the defaults do not have.
void check_keys(const json& user, const json& defaults, const std::string& prefix) {
  if (!user.is_object()) throw UsageError("config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw UsageError("unknown config key '" + path + "'");
    if (defaults.at(key).is_object()) check_keys(value, defaults.at(key), path);
  }
}

template <class T>
T get(const json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + section + "." + key + "' has the wrong type");
  }
}

template <class T>
T get_top(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::finalize() {
  require(jobs >= 1, "jobs must be >= 1");
  require(steps >= 1, "diffusion.steps must be >= 1");
  train.seed = seed;
  train.jobs = jobs;
  render.stft = stft;
  render.jobs = jobs;
  stft.validate();
  loss.validate();
  train.validate();
  render.validate();
  metrics.validate();
}

json config_to_json(const RunConfig& c) {
  const auto& r = c.render;
  const auto& rooms = r.rooms;
  const auto& t = c.train;
  json m = metric_config_to_json(c.metrics);
  return json{
      {"format_version", kConfigFormatVersion},
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"stft",
       {{"fft_size", c.stft.fft_size},
        {"hop", c.stft.hop},
        {"window", to_string(c.stft.window)},
        {"segment_seconds", c.stft.segment_seconds},
        {"sample_rate", c.stft.sample_rate}}},
      {"diffusion", {{"steps", c.steps}, {"mode", to_string(c.mode)}}},
      {"loss",
       {{"lambda_aud", c.loss.lambda_aud},
        {"delta_weight", c.loss.delta_weight},
        {"state_weight", c.loss.state_weight}}},
      {"train",
       {{"learning_rate", t.learning_rate},
        {"adam_beta1", t.adam_beta1},
        {"adam_beta2", t.adam_beta2},
        {"adam_eps", t.adam_eps},
        {"ema_decay", t.ema_decay},
        {"epochs", t.epochs},
        {"batch_size", t.batch_size}}},
      {"render",
       {{"segment_mode", segment_mode_name(r.segment_mode)},
        {"synthetic_rirs", r.synthetic_rirs},
        {"stereo_rirs", r.stereo_rirs},
        {"wet_gain_db_min", r.wet_gain_db_min},
        {"wet_gain_db_max", r.wet_gain_db_max},
        {"peak_ceiling", r.peak_ceiling},
        {"dry_peak", r.dry_peak},
        {"train_fraction", r.train_fraction},
        {"val_fraction", r.val_fraction}}},
      {"rooms",
       {{"dims_min", rooms.dims_min},
        {"dims_max", rooms.dims_max},
        {"t60_min", rooms.t60_min},
        {"t60_max", rooms.t60_max},
        {"wall_margin", rooms.wall_margin},
        {"source_distance_min", rooms.source_distance_min},
        {"source_distance_max", rooms.source_distance_max},
        {"max_order", rooms.max_order},
        {"calibrate_t60", rooms.calibrate_t60}}},
      {"metrics", m},
      {"evaluate", {{"split", c.eval_split ? to_string(*c.eval_split) : std::string("all")}}}};
}

RunConfig config_from_json(const json& user) {
  const json defaults = config_to_json(RunConfig{});
  check_keys(user, defaults, "");
  if (user.contains("format_version") && user.at("format_version") != kConfigFormatVersion)
    throw UsageError("unsupported config format_version " + user.at("format_version").dump() +
                     " (expected " + std::to_string(kConfigFormatVersion) + ")");
  json j = defaults;
  j.merge_patch(user);

  RunConfig c;
  c.seed = get_top<std::uint64_t>(j, "seed");
  c.jobs = get_top<int>(j, "jobs");
  c.stft.fft_size = get<int>(j, "stft", "fft_size");
  c.stft.hop = get<int>(j, "stft", "hop");
  c.stft.window = window_from_string(get<std::string>(j, "stft", "window"));
  c.stft.segment_seconds = get<double>(j, "stft", "segment_seconds");
  c.stft.sample_rate = get<double>(j, "stft", "sample_rate");
  c.steps = get<int>(j, "diffusion", "steps");
  c.mode = reverse_mode_from_string(get<std::string>(j, "diffusion", "mode"));
  c.loss.lambda_aud = get<double>(j, "loss", "lambda_aud");
  c.loss.delta_weight = get<double>(j, "loss", "delta_weight");
  c.loss.state_weight = get<double>(j, "loss", "state_weight");
  c.train.learning_rate = get<double>(j, "train", "learning_rate");
  c.train.adam_beta1 = get<double>(j, "train", "adam_beta1");
  c.train.adam_beta2 = get<double>(j, "train", "adam_beta2");
  c.train.adam_eps = get<double>(j, "train", "adam_eps");
  c.train.ema_decay = get<double>(j, "train", "ema_decay");
  c.train.epochs = get<int>(j, "train", "epochs");
  c.train.batch_size = get<int>(j, "train", "batch_size");
  auto& r = c.render;
  r.segment_mode = segment_mode_from(get<std::string>(j, "render", "segment_mode"));
  r.synthetic_rirs = get<int>(j, "render", "synthetic_rirs");
  r.stereo_rirs = get<bool>(j, "render", "stereo_rirs");
  r.wet_gain_db_min = get<double>(j, "render", "wet_gain_db_min");
  r.wet_gain_db_max = get<double>(j, "render", "wet_gain_db_max");
  r.peak_ceiling = get<double>(j, "render", "peak_ceiling");
  r.dry_peak = get<double>(j, "render", "dry_peak");
  r.train_fraction = get<double>(j, "render", "train_fraction");
  r.val_fraction = get<double>(j, "render", "val_fraction");
  auto& rooms = r.rooms;
  rooms.dims_min = get<Vec3>(j, "rooms", "dims_min");
  rooms.dims_max = get<Vec3>(j, "rooms", "dims_max");
  rooms.t60_min = get<double>(j, "rooms", "t60_min");
  rooms.t60_max = get<double>(j, "rooms", "t60_max");
  rooms.wall_margin = get<double>(j, "rooms", "wall_margin");
  rooms.source_distance_min = get<double>(j, "rooms", "source_distance_min");
  rooms.source_distance_max = get<double>(j, "rooms", "source_distance_max");
  rooms.max_order = get<int>(j, "rooms", "max_order");
  rooms.calibrate_t60 = get<bool>(j, "rooms", "calibrate_t60");
  auto& m = c.metrics;
  m.mstft_ffts = get<std::vector<int>>(j, "metrics", "mstft_ffts");
  m.mstft_hops = get<std::vector<int>>(j, "metrics", "mstft_hops");
  m.eps = get<double>(j, "metrics", "eps");
  m.nmi_bins = get<int>(j, "metrics", "nmi_bins");
  m.nmi_fft = get<int>(j, "metrics", "nmi_fft");
  m.nmi_hop = get<int>(j, "metrics", "nmi_hop");
  m.env_frame = get<int>(j, "metrics", "env_frame");
  m.env_hop = get<int>(j, "metrics", "env_hop");
  m.msd_subbands = get<int>(j, "metrics", "msd_subbands");
  m.msd_mod_max_hz = get<double>(j, "metrics", "msd_mod_max_hz");
  m.msd_min_hz = get<double>(j, "metrics", "msd_min_hz");
  m.tter_transient_ms = get<double>(j, "metrics", "tter_transient_ms");
  m.tter_tail_ms = get<double>(j, "metrics", "tter_tail_ms");
  m.onset_tolerance_ms = get<double>(j, "metrics", "onset_tolerance_ms");
  m.si_sdr_cap_db = get<double>(j, "metrics", "si_sdr_cap_db");
  m.onsets.fft_size = get<int>(j, "metrics", "onset_fft");
  m.onsets.hop = get<int>(j, "metrics", "onset_hop");
  m.onsets.median_seconds = get<double>(j, "metrics", "onset_median_seconds");
  m.onsets.peak_seconds = get<double>(j, "metrics", "onset_peak_seconds");
  m.onsets.delta = get<double>(j, "metrics", "onset_delta");
  m.onsets.min_gap_seconds = get<double>(j, "metrics", "onset_min_gap_seconds");
  const std::string split = get<std::string>(j, "evaluate", "split");
  c.eval_split = split == "all" ? std::nullopt : std::optional<Split>(split_from_string(split));
  c.finalize();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UsageError("override '" + assignment + "' must look like key=value");
  apply_override(j, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void apply_override(json& j, const std::string& key, const std::string& value) {
  const json defaults = config_to_json(RunConfig{});
  const json* def = &defaults;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty() || !def->is_object() || !def->contains(part))
      throw UsageError("unknown config key '" + key + "'");
    def = &def->at(part);
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::exception&) {
        parsed = value;
      }
      (*node)[part] = parsed;
      return;
    }
    if (def->is_object() && !node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace colddiff
