// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <set>

#include "colddiff/dataset.hpp"
#include "colddiff/error.hpp"
#include "colddiff/wav_io.hpp"
#include "support/oracles.hpp"

using namespace colddiff;
namespace fs = std::filesystem;

namespace {

constexpr double kFs = 44100.0;

// n_files percussive stereo files of `seconds` each.
fs::path make_corpus(const std::string& tag, int n_files, double seconds) {
  const fs::path dir = oracle::temp_dir(tag) / "dry";
  fs::create_directories(dir);
  for (int i = 0; i < n_files; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "src%02d.wav", i);
    write_stereo_wav(dir / name, oracle::random_percussion(static_cast<std::size_t>(seconds * kFs), 50 + i));
  }
  return dir;
}

std::vector<RirPoolEntry> identity_pool() {
  RirRef ref;
  ref.kind = RirRef::Kind::kInline;
  ref.taps = {{1.0}};
  return {RirPoolEntry{ref, RirSample::from_taps({1.0})}};
}

DatasetConfig small_cfg() {
  DatasetConfig c;
  c.synthetic_rirs = 3;
  c.rooms.t60_max = 0.5;
  c.jobs = 2;
  return c;
}

}  // namespace

TEST_CASE("a 6 s file yields three deterministic 2 s entries equal to dry under an identity RIR") {
  const fs::path dry = make_corpus("ds_identity", 1, 6.0);
  const fs::path out = dry.parent_path() / "out";
  const DatasetConfig cfg = small_cfg();
  BuildReport report;
  const Manifest m = build_dataset(dry, identity_pool(), out, cfg, 1, nlohmann::json::object(), &report);
  REQUIRE(m.entries.size() == 3);
  CHECK(report.files_used == 1);
  for (int i = 0; i < 3; ++i) CHECK(m.entries[i].segment_index == i);
  for (const auto& e : m.entries) {
    const Waveform d = read_stereo_wav(m.resolve(e.dry_path)), w = read_stereo_wav(m.resolve(e.wet_path));
    REQUIRE(d.size() == static_cast<std::size_t>(2 * kFs));
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < d.size(); ++i) REQUIRE(std::abs(d.channel(c)[i] - w.channel(c)[i]) < 1e-6);
  }
  const ManifestReport v = validate_manifest(m, kFs, cfg.stft.segment_samples());
  CHECK(v.ok);
  CHECK(v.entries_checked == 3);
}

TEST_CASE("same seed gives byte-identical manifests and wet files") {
  const fs::path dry = make_corpus("ds_determinism", 4, 4.5);
  const DatasetConfig cfg = small_cfg();
  const auto pool_a = make_rir_pool(std::nullopt, cfg, 7, dry.parent_path() / "a");
  const auto pool_b = make_rir_pool(std::nullopt, cfg, 7, dry.parent_path() / "b");
  CHECK(pool_a.size() == 3);
  build_dataset(dry, pool_a, dry.parent_path() / "a", cfg, 7, nlohmann::json{{"k", 1}});
  DatasetConfig serial = cfg;
  serial.jobs = 1;
  build_dataset(dry, pool_b, dry.parent_path() / "b", serial, 7, nlohmann::json{{"k", 1}});
  const std::string ma = read_text_file(dry.parent_path() / "a" / kManifestFileName);
  const std::string mb = read_text_file(dry.parent_path() / "b" / kManifestFileName);
  CHECK(ma == mb);
  const Manifest m = load_manifest(dry.parent_path() / "a" / kManifestFileName);
  for (const auto& e : m.entries)
    CHECK(read_text_file(dry.parent_path() / "a" / e.wet_path) == read_text_file(dry.parent_path() / "b" / e.wet_path));
}

TEST_CASE("manifest round trip, wet reproduction and split disjointness") {
  const fs::path dry = make_corpus("ds_roundtrip", 10, 2.5);
  const fs::path out = dry.parent_path() / "out";
  const DatasetConfig cfg = small_cfg();
  const Manifest m = build_dataset(dry, make_rir_pool(std::nullopt, cfg, 3, out), out, cfg, 3,
                                   nlohmann::json{{"note", "x"}});
  REQUIRE(m.entries.size() == 10);

  const Manifest back = load_manifest(out / kManifestFileName);
  CHECK(back == m);
  CHECK(manifest_from_string(manifest_to_string(m), out) == m);

  // 80/10/10 by source.
  CHECK(m.entries_in(Split::kTrain).size() == 8);
  CHECK(m.entries_in(Split::kVal).size() == 1);
  CHECK(m.entries_in(Split::kTest).size() == 1);
  std::map<std::string, std::set<Split>> splits;
  for (const auto& e : m.entries) splits[e.source].insert(e.split);
  for (const auto& [src, s] : splits) CHECK(s.size() == 1);

  for (const auto& e : m.entries) {
    const Waveform d = read_stereo_wav(m.resolve(e.dry_path));
    const Waveform w = read_stereo_wav(m.resolve(e.wet_path));
    const Waveform again = render_wet(d, resolve_rir(e.rir_ref, m, kFs), e.wet_gain_db, cfg.peak_ceiling);
    for (int c = 0; c < 2; ++c)
      for (std::size_t i = 0; i < w.size(); ++i)
        REQUIRE(static_cast<float>(again.channel(c)[i]) == static_cast<float>(w.channel(c)[i]));
  }

  const auto pairs = load_pairs(m, Split::kTrain, kFs);
  CHECK(pairs.size() == 8);
  CHECK(pairs[0].dry.size() == pairs[0].wet.size());
}

TEST_CASE("validate_manifest reports missing files and leakage") {
  const fs::path dry = make_corpus("ds_validate", 1, 4.0);
  const fs::path out = dry.parent_path() / "out";
  const DatasetConfig cfg = small_cfg();
  Manifest m = build_dataset(dry, identity_pool(), out, cfg, 5, nlohmann::json::object());
  REQUIRE(m.entries.size() == 2);

  Manifest leaky = m;
  leaky.entries[1].split = leaky.entries[0].split == Split::kTrain ? Split::kTest : Split::kTrain;
  const ManifestReport lr = validate_manifest(leaky, kFs, cfg.stft.segment_samples());
  CHECK_FALSE(lr.ok);
  bool leak = false;
  for (const auto& i : lr.issues) leak |= i.message.find("leakage") != std::string::npos;
  CHECK(leak);

  fs::remove(m.resolve(m.entries[1].wet_path));
  const ManifestReport r = validate_manifest(m, kFs, cfg.stft.segment_samples());
  CHECK_FALSE(r.ok);
  REQUIRE(r.issues.size() >= 1);
  CHECK(r.issues[0].entry == m.entries[1].id);
}

TEST_CASE("bad corpora and manifests") {
  const fs::path empty = oracle::temp_dir("ds_empty") / "dry";
  fs::create_directories(empty);
  CHECK_THROWS_AS(build_dataset(empty, identity_pool(), empty.parent_path() / "out", small_cfg(), 1, {}), DataError);

  const fs::path dry = make_corpus("ds_skip", 1, 3.0);
  write_file_atomic(dry / "broken.wav", "not a wav");
  BuildReport report;
  const Manifest m = build_dataset(dry, identity_pool(), dry.parent_path() / "out", small_cfg(), 1, {}, &report);
  CHECK(report.files_skipped == 1);
  CHECK(report.warnings.size() >= 1);
  CHECK(m.entries.size() == 1);

  CHECK_THROWS_AS(manifest_from_string("", "."), DataError);
  CHECK_THROWS_AS(manifest_from_string("{\"format\":\"other\"}\n", "."), DataError);
  std::string text = manifest_to_string(m);
  text = text.substr(0, text.find('\n') + 1);  // header claims one entry, none follow
  CHECK_THROWS_AS(manifest_from_string(text, "."), DataError);
  CHECK_THROWS_AS(split_from_string("holdout"), UsageError);
}
