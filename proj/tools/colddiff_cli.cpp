// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line driver over the C API.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "colddiff.h"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  std::optional<int> jobs;
  bool json = false;
  bool print_config = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run configuration file")->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "Override a config key, e.g. --set train.epochs=5 (repeatable)");
  app->add_option("--seed", c.seed, "Seed for every random draw (config key 'seed')");
  app->add_option("--jobs", c.jobs, "Worker threads (config key 'jobs')");
  app->add_flag("--json", c.json, "Machine-readable progress on stderr as JSON lines");
  app->add_flag("--print-config", c.print_config, "Print the resolved config to stdout first");
}

void on_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      out += buf;
      continue;
    }
    out += ch;
  }
  return out;
}

int report(cd_status s, const Common& c, const char* done) {
  if (s != CD_OK) {
    if (c.json)
      std::fprintf(stderr, "{\"event\":\"error\",\"status\":%d,\"message\":\"%s\"}\n", s,
                   json_escape(cd_last_error()).c_str());
    else
      std::fprintf(stderr, "colddiff: error: %s\n", cd_last_error());
    return static_cast<int>(s);
  }
  if (!c.json) std::fprintf(stderr, "%s\n", done);
  return 0;
}

// Builds the config handle from --config, --set, --seed and --jobs.
cd_status make_config(const Common& c, cd_config** out, const std::vector<std::pair<std::string, std::string>>& extra) {
  cd_status s = c.config.empty() ? cd_config_new(out) : cd_config_load(c.config.c_str(), out);
  if (s != CD_OK) return s;
  auto set = [&](const std::string& k, const std::string& v) {
    return s == CD_OK ? (s = cd_config_set(*out, k.c_str(), v.c_str())) : s;
  };
  for (const auto& a : c.sets) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      cd_config_set(*out, "", "");  // records a usage error message
      return CD_ERR_USAGE;
    }
    set(a.substr(0, eq), a.substr(eq + 1));
  }
  if (c.seed) set("seed", std::to_string(*c.seed));
  if (c.jobs) set("jobs", std::to_string(*c.jobs));
  for (const auto& [k, v] : extra) set(k, v);
  if (s == CD_OK && c.print_config) {
    char* dump = nullptr;
    s = cd_config_dump(*out, &dump);
    if (s == CD_OK) std::printf("%s\n", dump);
    cd_string_free(dump);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"colddiff: cold-diffusion dereverberation of stereo percussion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cd_version()));

  Common render_c, train_c, derev_c, eval_c;

  auto* render = app.add_subcommand("render", "Render a paired dry/wet dataset and manifest");
  std::string dry_dir, rir_dir, render_out;
  render->add_option("--dry", dry_dir, "Directory of dry stereo WAVs")->required();
  render->add_option("--rirs", rir_dir, "Directory of measured RIR WAVs (optional)");
  render->add_option("--out", render_out, "Output directory")->required();
  add_common(render, render_c);

  auto* train = app.add_subcommand("train", "Train the gain predictor on a manifest's train split");
  std::string manifest, ckpt_out, train_mode;
  train->add_option("--manifest", manifest, "manifest.jsonl written by render")->required();
  train->add_option("--out", ckpt_out, "Checkpoint path")->required();
  train->add_option("--mode", train_mode, "direct or delta (config key diffusion.mode)");
  add_common(train, train_c);

  auto* derev = app.add_subcommand("dereverb", "Dereverberate a WAV file or directory");
  std::string input, derev_out, ckpt_in, oracle_ref, derev_mode;
  derev->add_option("--input", input, "Reverberant WAV or directory")->required();
  derev->add_option("--out", derev_out, "Output directory")->required();
  auto* ck = derev->add_option("--checkpoint", ckpt_in, "Trained checkpoint");
  auto* orc = derev->add_option("--oracle-reference", oracle_ref,
                                "Test mode: clean reference WAV/directory driving an oracle predictor");
  ck->excludes(orc);
  derev->add_option("--mode", derev_mode, "direct or delta; must match the checkpoint");
  add_common(derev, derev_c);

  auto* eval = app.add_subcommand("evaluate", "Score estimates against a manifest");
  std::string eval_manifest, estimates, eval_out, split;
  eval->add_option("--manifest", eval_manifest, "manifest.jsonl")->required();
  eval->add_option("--estimates", estimates, "Directory of <id>.wav estimates")->required();
  eval->add_option("--out", eval_out, "Report directory")->required();
  eval->add_option("--split", split, "train, val, test or all (config key evaluate.split)");
  add_common(eval, eval_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  cd_config* cfg = nullptr;
  cd_run_options opts{nullptr, nullptr};
  int rc = 0;
  if (*render) {
    if (render_c.json) opts.progress = on_progress;
    cd_status s = make_config(render_c, &cfg, {});
    if (s == CD_OK)
      s = cd_render(cfg, dry_dir.c_str(), rir_dir.empty() ? nullptr : rir_dir.c_str(),
                    render_out.c_str(), &opts);
    rc = report(s, render_c, "render: done");
  } else if (*train) {
    if (train_c.json) opts.progress = on_progress;
    std::vector<std::pair<std::string, std::string>> extra;
    if (!train_mode.empty()) extra.emplace_back("diffusion.mode", train_mode);
    cd_status s = make_config(train_c, &cfg, extra);
    if (s == CD_OK) s = cd_train(cfg, manifest.c_str(), ckpt_out.c_str(), &opts);
    rc = report(s, train_c, "train: done");
  } else if (*derev) {
    if (derev_c.json) opts.progress = on_progress;
    cd_status s = make_config(derev_c, &cfg, {});
    if (s == CD_OK)
      s = cd_dereverb(cfg, input.c_str(), ckpt_in.empty() ? nullptr : ckpt_in.c_str(),
                      oracle_ref.empty() ? nullptr : oracle_ref.c_str(),
                      derev_mode.empty() ? nullptr : derev_mode.c_str(), derev_out.c_str(), &opts);
    rc = report(s, derev_c, "dereverb: done");
  } else if (*eval) {
    if (eval_c.json) opts.progress = on_progress;
    std::vector<std::pair<std::string, std::string>> extra;
    if (!split.empty()) extra.emplace_back("evaluate.split", split);
    cd_status s = make_config(eval_c, &cfg, extra);
    if (s == CD_OK) s = cd_evaluate(cfg, eval_manifest.c_str(), estimates.c_str(), eval_out.c_str(), &opts);
    rc = report(s, eval_c, "evaluate: done");
  }
  cd_config_free(cfg);
  return rc;
}
