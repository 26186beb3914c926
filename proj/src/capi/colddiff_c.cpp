// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "colddiff/config.hpp"
#include "colddiff/error.hpp"
#include "colddiff/pipeline.hpp"
#include "colddiff/wav_io.hpp"

struct cd_config {
  nlohmann::json json = nlohmann::json::object();
};

struct cd_checkpoint {
  colddiff::Checkpoint ckpt;
};

namespace {

using namespace colddiff;

thread_local std::string g_last_error;

cd_status fail(cd_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Converts exceptions into status codes.
template <class Fn>
cd_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return CD_OK;
  } catch (const Error& e) {
    return fail(static_cast<cd_status>(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(CD_ERR_DATA, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(CD_ERR_DATA, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CD_ERR_NUMERICAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CD_ERR_DATA, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

RunConfig resolve(const cd_config* cfg) {
  return cfg ? config_from_json(cfg->json) : config_from_json(nlohmann::json::object());
}

ProgressFn progress_of(const cd_run_options* o) {
  if (!o || !o->progress) return {};
  return [fn = o->progress, user = o->user](const nlohmann::json& j) { fn(j.dump().c_str(), user); };
}

void need(const void* p, const char* what) {
  if (!p) throw UsageError(std::string(what) + " must not be NULL");
}

Waveform from_interleaved(const double* data, std::size_t frames, double sample_rate) {
  std::vector<std::vector<double>> ch(2, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    ch[0][i] = data[2 * i];
    ch[1][i] = data[2 * i + 1];
  }
  return Waveform::from_channels(std::move(ch), sample_rate);
}

}  // namespace

extern "C" {

CD_API const char* cd_version(void) { return "0.1.0"; }

CD_API const char* cd_last_error(void) { return g_last_error.c_str(); }

CD_API void cd_string_free(char* s) { std::free(s); }

CD_API cd_status cd_config_new(cd_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new cd_config();
  });
}

CD_API cd_status cd_config_load(const char* path, cd_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config ") + path + ": " + e.what());
    }
    config_from_json(j);  // validate now
    auto* c = new cd_config();
    c->json = std::move(j);
    *out = c;
  });
}

CD_API cd_status cd_config_set(cd_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    nlohmann::json j = cfg->json;
    apply_override(j, key, value);
    config_from_json(j);
    cfg->json = std::move(j);
  });
}

CD_API cd_status cd_config_dump(const cd_config* cfg, char** out_json) {
  return guarded([&] {
    need(out_json, "out_json");
    *out_json = dup_string(config_to_json(resolve(cfg)).dump(2));
  });
}

CD_API void cd_config_free(cd_config* cfg) { delete cfg; }

CD_API cd_status cd_render(const cd_config* cfg, const char* dry_dir, const char* rir_dir,
                           const char* out_dir, const cd_run_options* options) {
  return guarded([&] {
    need(dry_dir, "dry_dir");
    need(out_dir, "out_dir");
    std::optional<std::filesystem::path> rirs;
    if (rir_dir) rirs = rir_dir;
    cmd_render(dry_dir, rirs, out_dir, resolve(cfg), progress_of(options));
  });
}

CD_API cd_status cd_train(const cd_config* cfg, const char* manifest, const char* out_checkpoint,
                          const cd_run_options* options) {
  return guarded([&] {
    need(manifest, "manifest");
    need(out_checkpoint, "out_checkpoint");
    cmd_train(manifest, out_checkpoint, resolve(cfg), progress_of(options));
  });
}

CD_API cd_status cd_dereverb(const cd_config* cfg, const char* input, const char* checkpoint,
                             const char* oracle_reference, const char* mode,
                             const char* out_dir, const cd_run_options* options) {
  return guarded([&] {
    need(input, "input");
    need(out_dir, "out_dir");
    DereverbRequest req;
    req.input = input;
    req.out_dir = out_dir;
    if (checkpoint) req.checkpoint = checkpoint;
    if (oracle_reference) req.oracle_reference = oracle_reference;
    if (mode) req.mode = reverse_mode_from_string(mode);
    cmd_dereverb(req, resolve(cfg), progress_of(options));
  });
}

CD_API cd_status cd_evaluate(const cd_config* cfg, const char* manifest,
                             const char* estimates_dir, const char* out_dir,
                             const cd_run_options* options) {
  return guarded([&] {
    need(manifest, "manifest");
    need(estimates_dir, "estimates_dir");
    need(out_dir, "out_dir");
    cmd_evaluate(manifest, estimates_dir, out_dir, resolve(cfg), progress_of(options));
  });
}

CD_API cd_status cd_checkpoint_load(const char* path, cd_checkpoint** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new cd_checkpoint{load_checkpoint(path)};
  });
}

CD_API cd_status cd_checkpoint_info(const cd_checkpoint* ckpt, char** out_json) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(out_json, "out_json");
    const auto& c = ckpt->ckpt;
    const nlohmann::json j{{"mode", to_string(c.ema.mode())},
                           {"steps", c.ema.steps()},
                           {"bins", c.ema.bins()},
                           {"fft_size", c.stft.fft_size},
                           {"hop", c.stft.hop},
                           {"sample_rate", c.stft.sample_rate},
                           {"segment_seconds", c.stft.segment_seconds},
                           {"metadata", c.metadata}};
    *out_json = dup_string(j.dump());
  });
}

CD_API cd_status cd_checkpoint_dereverb(const cd_checkpoint* ckpt, const double* input,
                                        size_t frames, double sample_rate, double* output) {
  return guarded([&] {
    need(ckpt, "ckpt");
    need(input, "input");
    need(output, "output");
    const Waveform est = dereverb_waveform(from_interleaved(input, frames, sample_rate),
                                           ckpt->ckpt.ema, ckpt->ckpt.stft);
    for (std::size_t i = 0; i < frames; ++i) {
      output[2 * i] = est.channel(0)[i];
      output[2 * i + 1] = est.channel(1)[i];
    }
  });
}

CD_API void cd_checkpoint_free(cd_checkpoint* ckpt) { delete ckpt; }

CD_API cd_status cd_metrics_evaluate(const cd_config* cfg, const double* estimate,
                                     const double* reference, const double* reverberant,
                                     size_t frames, double sample_rate, char** out_json) {
  return guarded([&] {
    need(estimate, "estimate");
    need(reference, "reference");
    need(reverberant, "reverberant");
    need(out_json, "out_json");
    const RunConfig c = resolve(cfg);
    const MetricRow row = evaluate_all(from_interleaved(estimate, frames, sample_rate),
                                       from_interleaved(reference, frames, sample_rate),
                                       from_interleaved(reverberant, frames, sample_rate), c.metrics);
    if (row.failed) throw DataError(row.errors.empty() ? "evaluation failed" : row.errors.front());
    nlohmann::json values = nlohmann::json::object();
    for (int m = 0; m < kMetricCount; ++m)
      values[kMetricNames[m]] = row.values[m] ? nlohmann::json(*row.values[m]) : nlohmann::json(nullptr);
    *out_json = dup_string(nlohmann::json{{"values", values}, {"errors", row.errors}}.dump());
  });
}

}  // extern "C"
