// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "colddiff/error.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace {

using nlohmann::json;

void write_config(const fs::path& path, const RunConfig& cfg) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, config_to_json(cfg).dump(2) + "\n");
}

// Runs `tile_fn(y_tile, index)` over padded tiles and stitches the results.
template <class TileFn>
Waveform tiled(const Waveform& input, const StftConfig& stft, TileFn&& tile_fn) {
  stft.validate();
  const std::size_t n = input.size();
  if (n == 0) throw DataError("empty input");
  const std::size_t tile = std::max<std::size_t>(stft.segment_samples(), stft.fft_size);
  Waveform out = Waveform::zeros(n, input.sample_rate());
  for (std::size_t start = 0, i = 0; start < n; start += tile, ++i) {
    const Waveform y = input.slice(start, tile);
    const Waveform est = tile_fn(y, i);
    const std::size_t len = std::min(tile, n - start);
    for (int c = 0; c < 2; ++c) {
      const auto src = est.channel(c);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(len),
                out.channel(c).begin() + static_cast<std::ptrdiff_t>(start));
    }
  }
  return out;
}

std::vector<fs::path> input_files(const fs::path& input) {
  if (!fs::exists(input)) throw DataError("input does not exist: " + input.string());
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(input)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no WAV files in " + input.string());
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Waveform dereverb_waveform(const Waveform& input, const GainPredictor& p, const StftConfig& stft) {
  if (p.bins() != stft.bins())
    throw UsageError("predictor has " + std::to_string(p.bins()) + " bins but the STFT has " +
                     std::to_string(stft.bins()));
  if (input.sample_rate() != stft.sample_rate)
    throw DataError("input sample rate " + std::to_string(input.sample_rate()) +
                    " Hz does not match the model rate " + std::to_string(stft.sample_rate) + " Hz");
  const Schedule s = make_schedule(p.steps());
  return tiled(input, stft, [&](const Waveform& y, std::size_t) {
    const SpectroTensor x0 = reverse_sample(stft_forward(y, stft), p, s, p.mode());
    return istft_inverse(x0, stft, y.size());
  });
}

Waveform dereverb_oracle(const Waveform& input, const Waveform& reference, const StftConfig& stft,
                         int steps, ReverseMode mode) {
  if (input.size() != reference.size() || input.sample_rate() != reference.sample_rate())
    throw DataError("oracle reference must match the input in length and sample rate");
  const Schedule s = make_schedule(steps);
  const std::size_t tile = std::max<std::size_t>(stft.segment_samples(), stft.fft_size);
  return tiled(input, stft, [&](const Waveform& y, std::size_t i) {
    const Waveform x = reference.slice(i * tile, tile);
    const SpectroTensor ys = stft_forward(y, stft);
    const auto oracle = oracle_predictor(stft_forward(x, stft), ys, s, mode);
    return istft_inverse(reverse_sample(ys, *oracle, s, mode), stft, y.size());
  });
}

RenderOutput cmd_render(const fs::path& dry_dir, const std::optional<fs::path>& rir_dir,
                        const fs::path& out_dir, const RunConfig& cfg, const ProgressFn& progress) {
  RunConfig c = cfg;
  c.finalize();
  if (!fs::is_directory(dry_dir)) throw DataError("dry directory not found: " + dry_dir.string());
  if (rir_dir && !fs::is_directory(*rir_dir))
    throw DataError("RIR directory not found: " + rir_dir->string());
  fs::create_directories(out_dir);
  write_config(out_dir / "config.json", c);
  const auto pool = make_rir_pool(rir_dir, c.render, c.seed, out_dir);
  if (progress) progress(json{{"event", "rir_pool"}, {"size", pool.size()}});
  RenderOutput out;
  out.manifest = build_dataset(dry_dir, pool, out_dir, c.render, c.seed, config_to_json(c),
                               &out.report, progress);
  return out;
}

TrainResult cmd_train(const fs::path& manifest_path, const fs::path& out_checkpoint,
                      const RunConfig& cfg, const ProgressFn& progress) {
  RunConfig c = cfg;
  c.finalize();
  const Manifest m = load_manifest(manifest_path);
  const std::vector<TrainingPair> pairs = load_pairs(m, Split::kTrain, c.stft.sample_rate);
  if (pairs.empty()) throw DataError("manifest " + manifest_path.string() + " has no training entries");
  if (progress) progress(json{{"event", "train_start"}, {"examples", pairs.size()}, {"mode", to_string(c.mode)}});

  fs::path stem = out_checkpoint;
  stem.replace_extension();
  write_config(stem.string() + ".config.json", c);

  const GainPredictor init(c.steps, c.stft.bins(), c.mode);
  TrainResult result = train(init, pairs, make_schedule(c.steps), c.loss, c.stft, c.train,
                             [&](const EpochStats& e) {
                               if (progress)
                                 progress(json{{"event", "epoch"},
                                               {"epoch", e.epoch},
                                               {"loss", e.loss},
                                               {"spec", e.spec},
                                               {"aud", e.aud}});
                             });

  std::string log = "epoch,loss,spec,aud\n";
  json history = json::array();
  for (const auto& e : result.history) {
    log += std::to_string(e.epoch) + "," + format_double(e.loss) + "," + format_double(e.spec) +
           "," + format_double(e.aud) + "\n";
    history.push_back(json{{"epoch", e.epoch}, {"loss", e.loss}});
  }
  write_file_atomic(stem.string() + ".loss.csv", log);

  Checkpoint ckpt{result.trained, result.ema, c.stft,
                  json{{"seed", c.seed},
                       {"epochs", c.train.epochs},
                       {"examples", pairs.size()},
                       {"history", history}}};
  if (out_checkpoint.has_parent_path()) fs::create_directories(out_checkpoint.parent_path());
  save_checkpoint(out_checkpoint, ckpt);
  if (progress) progress(json{{"event", "checkpoint"}, {"path", out_checkpoint.string()}});
  return result;
}

std::vector<fs::path> cmd_dereverb(const DereverbRequest& req, const RunConfig& cfg,
                                   const ProgressFn& progress) {
  RunConfig c = cfg;
  c.finalize();
  if (!req.checkpoint && !req.oracle_reference)
    throw UsageError("dereverb needs a checkpoint (or an oracle reference in test mode)");
  if (req.checkpoint && req.oracle_reference)
    throw UsageError("checkpoint and oracle reference are mutually exclusive");

  std::optional<Checkpoint> ckpt;
  if (req.checkpoint) {
    ckpt = load_checkpoint(*req.checkpoint);
    if (req.mode && *req.mode != ckpt->ema.mode())
      throw UsageError("requested mode '" + to_string(*req.mode) + "' does not match the checkpoint mode '" +
                       to_string(ckpt->ema.mode()) + "'");
    c.stft = ckpt->stft;
    c.steps = ckpt->ema.steps();
    c.mode = ckpt->ema.mode();
  } else if (req.mode) {
    c.mode = *req.mode;
  }
  c.finalize();

  const auto inputs = input_files(req.input);
  const bool input_is_dir = fs::is_directory(req.input);
  fs::create_directories(req.out_dir);
  write_config(req.out_dir / "config.json", c);

  std::vector<fs::path> outputs(inputs.size());
  parallel_for(inputs.size(), c.jobs, [&](std::size_t i) {
    const Waveform y = read_stereo_wav(inputs[i], c.stft.sample_rate);
    Waveform est;
    if (ckpt) {
      est = dereverb_waveform(y, ckpt->ema, c.stft);
    } else {
      const fs::path ref_path = input_is_dir || fs::is_directory(*req.oracle_reference)
                                    ? *req.oracle_reference / inputs[i].filename()
                                    : *req.oracle_reference;
      est = dereverb_oracle(y, read_stereo_wav(ref_path, c.stft.sample_rate), c.stft, c.steps, c.mode);
    }
    outputs[i] = req.out_dir / (inputs[i].stem().string() + ".wav");
    write_stereo_wav(outputs[i], est);
  });
  if (progress)
    for (const auto& o : outputs) progress(json{{"event", "estimate"}, {"path", o.string()}});
  return outputs;
}

MetricReport cmd_evaluate(const fs::path& manifest_path, const fs::path& estimates_dir,
                          const fs::path& out_dir, const RunConfig& cfg, const ProgressFn& progress) {
  RunConfig c = cfg;
  c.finalize();
  if (!fs::is_directory(estimates_dir))
    throw DataError("estimates directory not found: " + estimates_dir.string());
  const Manifest m = load_manifest(manifest_path);
  MetricReport report = evaluate_batch(m, estimates_dir, c.metrics, c.eval_split, c.jobs);
  fs::create_directories(out_dir);
  write_config(out_dir / "config.json", c);
  write_file_atomic(out_dir / "metrics.csv", report_csv(report));
  write_file_atomic(out_dir / "metrics.json", report_json(report).dump(2) + "\n");
  if (progress) {
    json agg = json::object();
    for (int k = 0; k < kMetricCount; ++k)
      if (report.aggregates[k].count) agg[kMetricNames[k]] = report.aggregates[k].mean;
    progress(json{{"event", "evaluated"},
                  {"examples", report.rows.size()},
                  {"failed", report.failed},
                  {"means", agg}});
  }
  return report;
}

}  // namespace colddiff
