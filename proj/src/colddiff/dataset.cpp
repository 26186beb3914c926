// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "colddiff/error.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw UsageError("unknown split '" + name + "' (expected train, val or test)");
}

fs::path Manifest::resolve(const std::string& relative) const {
  const fs::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<const PairedExample*> Manifest::entries_in(Split s) const {
  std::vector<const PairedExample*> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(&e);
  return out;
}

json room_to_json(const RoomSpec& room) {
  return json{{"dims", room.dims},
              {"source", room.source},
              {"mic", room.mic},
              {"t60", room.t60},
              {"max_order", room.max_order},
              {"sample_rate", room.sample_rate},
              {"seed", room.seed},
              {"calibrate_t60", room.calibrate_t60}};
}

RoomSpec room_from_json(const json& j) {
  RoomSpec r;
  r.dims = j.at("dims").get<Vec3>();
  r.source = j.at("source").get<Vec3>();
  r.mic = j.at("mic").get<Vec3>();
  r.t60 = j.at("t60").get<double>();
  r.max_order = j.at("max_order").get<int>();
  r.sample_rate = j.at("sample_rate").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.calibrate_t60 = j.at("calibrate_t60").get<bool>();
  return r;
}

namespace {

json rir_ref_to_json(const RirRef& r) {
  switch (r.kind) {
    case RirRef::Kind::kSynthetic:
      return json{{"kind", "synthetic"}, {"room", room_to_json(*r.room)}};
    case RirRef::Kind::kMeasured:
      return json{{"kind", "measured"}, {"path", r.path}, {"stereo", r.stereo}};
    case RirRef::Kind::kInline:
      return json{{"kind", "inline"}, {"taps", r.taps}};
  }
  return json();
}

RirRef rir_ref_from_json(const json& j) {
  RirRef r;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "synthetic") {
    r.kind = RirRef::Kind::kSynthetic;
    r.room = room_from_json(j.at("room"));
  } else if (kind == "measured") {
    r.kind = RirRef::Kind::kMeasured;
    r.path = j.at("path").get<std::string>();
    r.stereo = j.at("stereo").get<bool>();
  } else if (kind == "inline") {
    r.kind = RirRef::Kind::kInline;
    r.taps = j.at("taps").get<std::vector<std::vector<double>>>();
  } else {
    throw DataError("unknown rir_ref kind '" + kind + "'");
  }
  return r;
}

json entry_to_json(const PairedExample& e) {
  return json{{"id", e.id},
              {"source", e.source},
              {"split", to_string(e.split)},
              {"segment_index", e.segment_index},
              {"dry_path", e.dry_path},
              {"wet_path", e.wet_path},
              {"rir_ref", rir_ref_to_json(e.rir_ref)},
              {"wet_gain_db", e.wet_gain_db},
              {"seed", e.seed},
              {"augmentation", nullptr}};
}

PairedExample entry_from_json(const json& j) {
  PairedExample e;
  e.id = j.at("id").get<std::string>();
  e.source = j.at("source").get<std::string>();
  e.split = split_from_string(j.at("split").get<std::string>());
  e.segment_index = j.at("segment_index").get<int>();
  e.dry_path = j.at("dry_path").get<std::string>();
  e.wet_path = j.at("wet_path").get<std::string>();
  e.rir_ref = rir_ref_from_json(j.at("rir_ref"));
  e.wet_gain_db = j.at("wet_gain_db").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("augmentation") && !j.at("augmentation").is_null())
    throw DataError("entry " + e.id + ": augmentation is not supported");
  return e;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  std::error_code ec;
  const fs::path rel = fs::relative(fs::absolute(p), fs::absolute(base), ec);
  if (ec || rel.empty()) return fs::absolute(p).generic_string();
  return rel.generic_string();
}

std::vector<fs::path> list_wavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Round to float so the written dry file is exactly what the wet render saw.
Waveform quantize_to_float(const Waveform& w) {
  std::vector<std::vector<double>> ch(2);
  for (int c = 0; c < 2; ++c) {
    const auto src = w.channel(c);
    ch[c].resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) ch[c][i] = static_cast<float>(src[i]);
  }
  return Waveform::from_channels(std::move(ch), w.sample_rate());
}

}  // namespace

std::string manifest_to_string(const Manifest& m) {
  std::string out = json{{"format", "colddiff-manifest"},
                         {"format_version", m.format_version},
                         {"seed", m.seed},
                         {"entries", m.entries.size()},
                         {"config", m.config}}
                        .dump();
  out += '\n';
  for (const auto& e : m.entries) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

Manifest manifest_from_string(const std::string& text, const fs::path& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!header) {
        if (j.value("format", "") != "colddiff-manifest")
          throw DataError("missing manifest header");
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kManifestFormatVersion)
          throw DataError("unsupported manifest format_version " + std::to_string(m.format_version));
        m.seed = j.at("seed").get<std::uint64_t>();
        m.config = j.at("config");
        expected = j.at("entries").get<std::size_t>();
        header = true;
      } else {
        m.entries.push_back(entry_from_json(j));
      }
    } catch (const json::exception& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    } catch (const UsageError& e) {
      throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw DataError("empty manifest");
  if (m.entries.size() != expected)
    throw DataError("manifest header announces " + std::to_string(expected) + " entries but " +
                    std::to_string(m.entries.size()) + " were found (truncated file?)");
  return m;
}

void save_manifest(const fs::path& path, const Manifest& m) {
  write_file_atomic(path, manifest_to_string(m));
}

Manifest load_manifest(const fs::path& path) {
  return manifest_from_string(read_text_file(path), path.parent_path());
}

void DatasetConfig::validate() const {
  stft.validate();
  rooms.validate();
  require(synthetic_rirs >= 0, "synthetic_rirs must be >= 0");
  require(std::isfinite(wet_gain_db_min) && std::isfinite(wet_gain_db_max) &&
              wet_gain_db_min <= wet_gain_db_max,
          "invalid wet gain range");
  require(peak_ceiling > 0.0 && peak_ceiling <= 1.0, "peak_ceiling must lie in (0, 1]");
  require(dry_peak >= 0.0 && dry_peak <= 1.0, "dry_peak must lie in [0, 1]");
  require(train_fraction >= 0.0 && val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0,
          "split fractions must be non-negative and sum to at most 1");
  require(jobs >= 1, "jobs must be >= 1");
}

std::vector<RirPoolEntry> make_rir_pool(const std::optional<fs::path>& rir_dir,
                                        const DatasetConfig& cfg, std::uint64_t seed,
                                        const fs::path& manifest_dir) {
  cfg.validate();
  std::vector<RirPoolEntry> pool;
  if (rir_dir) {
    for (const auto& path : list_wavs(*rir_dir)) {
      RirPoolEntry e;
      e.rir = load_rir(path, cfg.stft.sample_rate, cfg.stereo_rirs);
      e.ref.kind = RirRef::Kind::kMeasured;
      e.ref.path = relative_to(path, manifest_dir);
      e.ref.stereo = e.rir.channels() == 2;
      pool.push_back(std::move(e));
    }
  }
  const std::size_t first = pool.size();
  pool.resize(first + static_cast<std::size_t>(cfg.synthetic_rirs));
  parallel_for(static_cast<std::size_t>(cfg.synthetic_rirs), cfg.jobs, [&](std::size_t i) {
    RirPoolEntry& e = pool[first + i];
    const RoomSpec room = draw_room(cfg.rooms, mix_seed(seed, 0x524952ull + i), cfg.stft.sample_rate);
    e.rir = synth_rir(room);
    e.ref.kind = RirRef::Kind::kSynthetic;
    e.ref.room = room;
  });
  if (pool.empty()) throw UsageError("RIR pool is empty (no measured RIRs and synthetic_rirs = 0)");
  return pool;
}

RirSample resolve_rir(const RirRef& ref, const Manifest& m, double sample_rate) {
  switch (ref.kind) {
    case RirRef::Kind::kSynthetic:
      if (!ref.room) throw DataError("synthetic rir_ref without room");
      return synth_rir(*ref.room);
    case RirRef::Kind::kMeasured:
      return load_rir(m.resolve(ref.path), sample_rate, ref.stereo);
    case RirRef::Kind::kInline: {
      RirSample r;
      r.taps = ref.taps;
      r.sample_rate = sample_rate;
      r.source = RirSample::Source::kMeasured;
      r.measured_id = "inline";
      r.validate();
      return r;
    }
  }
  throw DataError("invalid rir_ref");
}

Manifest build_dataset(const fs::path& dry_dir, const std::vector<RirPoolEntry>& pool,
                       const fs::path& out_dir, const DatasetConfig& cfg, std::uint64_t seed,
                       const json& config_snapshot, BuildReport* report,
                       const ProgressFn& progress) {
  cfg.validate();
  require(!pool.empty(), "RIR pool is empty");
  if (!fs::exists(dry_dir)) throw DataError("dry directory does not exist: " + dry_dir.string());
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  rep = BuildReport{};

  struct Source {
    std::string rel;
    std::vector<Waveform> segments;
  };
  std::vector<Source> sources;
  for (const auto& path : list_wavs(dry_dir)) {
    Source s;
    s.rel = relative_to(path, dry_dir);
    try {
      const Waveform w = read_stereo_wav(path, cfg.stft.sample_rate);
      if (w.size() < cfg.stft.segment_samples())
        throw DataError("shorter than one " + std::to_string(cfg.stft.segment_seconds) + " s segment");
      s.segments = segment(w, cfg.stft, cfg.segment_mode, mix_seed(seed, sources.size()));
    } catch (const DataError& e) {
      ++rep.files_skipped;
      rep.warnings.push_back("skipped " + path.string() + ": " + e.what());
      if (progress) progress(json{{"event", "warning"}, {"message", rep.warnings.back()}});
      continue;
    }
    ++rep.files_used;
    sources.push_back(std::move(s));
  }
  if (sources.empty())
    throw DataError("no usable stereo WAV files at " + std::to_string(cfg.stft.sample_rate) +
                    " Hz under " + dry_dir.string());

  // Source-level split over a seeded permutation.
  std::vector<std::size_t> order(sources.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(mix_seed(seed, 0x53504c4954ull));
  split_rng.shuffle(order);
  const auto n = static_cast<double>(sources.size());
  const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * n + 0.5));
  const auto n_val = std::min(sources.size() - std::min(n_train, sources.size()),
                              static_cast<std::size_t>(std::floor(cfg.val_fraction * n + 0.5)));
  std::vector<Split> split_of(sources.size(), Split::kTest);
  for (std::size_t r = 0; r < order.size(); ++r)
    split_of[order[r]] = r < n_train ? Split::kTrain : (r < n_train + n_val ? Split::kVal : Split::kTest);

  struct Job {
    PairedExample entry;
    const Waveform* dry;
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < sources.size(); ++si) {
    for (std::size_t k = 0; k < sources[si].segments.size(); ++k) {
      Job j;
      char id[64];
      std::snprintf(id, sizeof id, "%05zu_%04zu", si, k);
      j.entry.id = id;
      j.entry.source = sources[si].rel;
      j.entry.split = split_of[si];
      j.entry.segment_index = static_cast<int>(k);
      j.entry.dry_path = "dry/" + j.entry.id + ".wav";
      j.entry.wet_path = "wet/" + j.entry.id + ".wav";
      j.entry.seed = mix_seed(seed, 0x454e5452ull + jobs.size());
      Rng rng(j.entry.seed);
      const std::size_t pick = rng.index(pool.size());
      j.entry.rir_ref = pool[pick].ref;
      j.entry.wet_gain_db = cfg.wet_gain_db_min == cfg.wet_gain_db_max
                                ? cfg.wet_gain_db_min
                                : rng.uniform(cfg.wet_gain_db_min, cfg.wet_gain_db_max);
      j.dry = &sources[si].segments[k];
      jobs.push_back(std::move(j));
    }
  }

  fs::create_directories(out_dir / "dry");
  fs::create_directories(out_dir / "wet");
  std::vector<char> keep(jobs.size(), 1);
  std::vector<std::string> job_warning(jobs.size());
  std::vector<std::size_t> pool_index(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i)
    for (std::size_t p = 0; p < pool.size(); ++p)
      if (pool[p].ref == jobs[i].entry.rir_ref) {
        pool_index[i] = p;
        break;
      }
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    const Job& j = jobs[i];
    const double pk = peak(*j.dry);
    if (pk == 0.0) {
      keep[i] = 0;
      job_warning[i] = "skipped silent segment " + j.entry.id + " of " + j.entry.source;
      return;
    }
    const Waveform dry = quantize_to_float(cfg.dry_peak > 0.0 ? j.dry->scaled(cfg.dry_peak / pk) : *j.dry);
    const Waveform wet = render_wet(dry, pool[pool_index[i]].rir, j.entry.wet_gain_db, cfg.peak_ceiling);
    write_stereo_wav(out_dir / j.entry.dry_path, dry);
    write_stereo_wav(out_dir / j.entry.wet_path, wet);
  });

  Manifest m;
  m.seed = seed;
  m.config = config_snapshot;
  m.base_dir = out_dir;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!keep[i]) {
      ++rep.segments_skipped;
      rep.warnings.push_back(job_warning[i]);
      if (progress) progress(json{{"event", "warning"}, {"message", job_warning[i]}});
      continue;
    }
    m.entries.push_back(jobs[i].entry);
  }
  if (m.entries.empty()) throw DataError("every dry segment was silent; nothing to render");
  save_manifest(out_dir / kManifestFileName, m);
  if (progress)
    progress(json{{"event", "rendered"},
                  {"entries", m.entries.size()},
                  {"files_used", rep.files_used},
                  {"files_skipped", rep.files_skipped}});
  return m;
}

ManifestReport validate_manifest(const Manifest& m, double sample_rate,
                                 std::size_t segment_samples) {
  ManifestReport rep;
  auto fail = [&](const std::string& entry, const std::string& msg) {
    rep.ok = false;
    rep.issues.push_back({entry, msg});
  };
  if (m.entries.empty()) fail("", "manifest has no entries");
  std::set<std::string> ids;
  std::map<std::string, std::set<Split>> splits_of_source;
  for (const auto& e : m.entries) {
    ++rep.entries_checked;
    if (!ids.insert(e.id).second) fail(e.id, "duplicate entry id");
    splits_of_source[e.source].insert(e.split);
    std::size_t lengths[2] = {0, 0};
    bool readable = true;
    const std::string* paths[2] = {&e.dry_path, &e.wet_path};
    for (int k = 0; k < 2; ++k) {
      const fs::path p = m.resolve(*paths[k]);
      if (!fs::exists(p)) {
        fail(e.id, std::string(k == 0 ? "dry" : "wet") + " file missing: " + p.string());
        readable = false;
        continue;
      }
      try {
        const Waveform w = read_stereo_wav(p, sample_rate);
        lengths[k] = w.size();
      } catch (const Error& err) {
        fail(e.id, err.what());
        readable = false;
      }
    }
    if (!readable) continue;
    if (lengths[0] != lengths[1])
      fail(e.id, "dry/wet length mismatch (" + std::to_string(lengths[0]) + " vs " +
                     std::to_string(lengths[1]) + " samples)");
    if (segment_samples > 0 && lengths[0] != segment_samples)
      fail(e.id, "segment length " + std::to_string(lengths[0]) + " != " +
                     std::to_string(segment_samples) + " samples");
  }
  for (const auto& [source, splits] : splits_of_source) {
    if (splits.size() > 1) {
      std::string names;
      for (Split s : splits) names += (names.empty() ? "" : ", ") + to_string(s);
      fail("", "leakage: source " + source + " appears in splits " + names);
    }
  }
  return rep;
}

std::vector<TrainingPair> load_pairs(const Manifest& m, Split s, double sample_rate) {
  std::vector<TrainingPair> out;
  for (const PairedExample* e : m.entries_in(s)) {
    TrainingPair p;
    p.id = e->id;
    p.dry = read_stereo_wav(m.resolve(e->dry_path), sample_rate);
    p.wet = read_stereo_wav(m.resolve(e->wet_path), sample_rate);
    if (p.dry.size() != p.wet.size())
      throw DataError("entry " + e->id + ": dry/wet length mismatch");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace colddiff
