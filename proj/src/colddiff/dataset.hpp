// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "colddiff/predictor.hpp"
#include "colddiff/rir.hpp"
#include "colddiff/stft.hpp"

namespace colddiff {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kManifestFileName = "manifest.jsonl";

enum class Split { kTrain, kVal, kTest };
std::string to_string(Split s);
Split split_from_string(const std::string& name);

// Where an entry's RIR came from; enough to regenerate it bit-exactly.
struct RirRef {
  enum class Kind { kSynthetic, kMeasured, kInline };

  Kind kind = Kind::kSynthetic;
  std::optional<RoomSpec> room;          // kSynthetic
  std::string path;                      // kMeasured, relative to the manifest when possible
  bool stereo = false;                   // kMeasured: keep both channels
  std::vector<std::vector<double>> taps; // kInline

  bool operator==(const RirRef&) const = default;
};

struct PairedExample {
  std::string id;
  std::string source;  // dry source file, relative to the dry directory
  Split split = Split::kTrain;
  int segment_index = 0;
  std::string dry_path;  // relative to the manifest directory
  std::string wet_path;
  RirRef rir_ref;
  double wet_gain_db = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const PairedExample&) const = default;
};

struct Manifest {
  int format_version = kManifestFormatVersion;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<PairedExample> entries;
  // Directory used to resolve relative paths; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& relative) const;
  std::vector<const PairedExample*> entries_in(Split s) const;
  bool operator==(const Manifest& o) const {
    return format_version == o.format_version && seed == o.seed && config == o.config &&
           entries == o.entries;
  }
};

// One header line, then one line per entry.
std::string manifest_to_string(const Manifest& m);
// Throws DataError on malformed input.
Manifest manifest_from_string(const std::string& text, const std::filesystem::path& base_dir);
void save_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

nlohmann::json room_to_json(const RoomSpec& room);
RoomSpec room_from_json(const nlohmann::json& j);

struct DatasetConfig {
  StftConfig stft;
  SegmentMode segment_mode = SegmentMode::kDeterministic;
  RoomRanges rooms;
  int synthetic_rirs = 32;  // synthetic rooms added to the pool
  bool stereo_rirs = false; // keep two-channel measured RIRs as stereo
  double wet_gain_db_min = 0.0;
  double wet_gain_db_max = 0.0;
  double peak_ceiling = 0.99;
  double dry_peak = 0.9;  // dry segments are peak-normalized to this; 0 keeps input level
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  int jobs = 1;

  void validate() const;
};

struct RirPoolEntry {
  RirRef ref;
  RirSample rir;
};

// Measured RIRs found under rir_dir (sorted by path; may be empty) followed by
// cfg.synthetic_rirs rooms drawn from cfg.rooms. Paths in refs are made
// relative to `manifest_dir`.
std::vector<RirPoolEntry> make_rir_pool(const std::optional<std::filesystem::path>& rir_dir,
                                        const DatasetConfig& cfg, std::uint64_t seed,
                                        const std::filesystem::path& manifest_dir);

// Regenerates the RIR an entry refers to.
RirSample resolve_rir(const RirRef& ref, const Manifest& m, double sample_rate);

struct BuildReport {
  int files_used = 0;
  int files_skipped = 0;
  int segments_skipped = 0;
  std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(const nlohmann::json&)>;

// Segments every WAV under dry_dir, pairs each segment with a seeded RIR
// draw from `pool`, renders the wet signal and writes
// out_dir/{dry,wet}/<id>.wav plus out_dir/manifest.jsonl. Split is by
// source file. Throws DataError when no usable dry audio is found.
Manifest build_dataset(const std::filesystem::path& dry_dir,
                       const std::vector<RirPoolEntry>& pool,
                       const std::filesystem::path& out_dir, const DatasetConfig& cfg,
                       std::uint64_t seed, const nlohmann::json& config_snapshot,
                       BuildReport* report = nullptr, const ProgressFn& progress = {});

struct ManifestIssue {
  std::string entry;  // entry id, or "" for manifest-level issues
  std::string message;
};

struct ManifestReport {
  bool ok = true;
  int entries_checked = 0;
  std::vector<ManifestIssue> issues;
};

// Checks file presence, rates, lengths, duplicate ids and source-level
// split disjointness. Never throws on content problems.
ManifestReport validate_manifest(const Manifest& m, double sample_rate,
                                 std::size_t segment_samples);

// Loads the aligned dry/wet pairs of one split.
std::vector<TrainingPair> load_pairs(const Manifest& m, Split s, double sample_rate);

}  // namespace colddiff
