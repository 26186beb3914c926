// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "colddiff/dataset.hpp"
#include "colddiff/onsets.hpp"
#include "colddiff/waveform.hpp"

namespace colddiff {

struct MetricConfig {
  std::vector<int> mstft_ffts{256, 1024, 4096, 8192};
  std::vector<int> mstft_hops{64, 256, 1024, 2048};
  double eps = 1e-8;
  int nmi_bins = 64;
  int nmi_fft = 1024;
  int nmi_hop = 384;
  int env_frame = 1024;
  int env_hop = 256;
  int msd_subbands = 16;
  double msd_mod_max_hz = 50.0;
  double msd_min_hz = 50.0;  // lower edge of the mel filterbank
  double tter_transient_ms = 20.0;
  double tter_tail_ms = 200.0;
  double onset_tolerance_ms = 50.0;
  double si_sdr_cap_db = 60.0;
  OnsetConfig onsets;

  void validate() const;
};

nlohmann::json metric_config_to_json(const MetricConfig& c);

// All comparisons take the estimate first, then the clean reference; inputs
// must share length and sample rate.
double mstft_mag_mae(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double mstft_phase_mae(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double esr(const Waveform& est, const Waveform& ref, double eps = 1e-8);
// Zero-mean, channel-concatenated SI-SDR in dB, clipped to +-cap.
double si_sdr(const Waveform& est, const Waveform& ref, double cap_db = 60.0);
double si_sdri(const Waveform& est, const Waveform& ref, const Waveform& reverberant,
               double cap_db = 60.0);
double nmi(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double msd(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double env_corr(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double tter_dev(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
// Same, with reference onset times supplied by the caller.
double tter_dev(const Waveform& est, const Waveform& ref, const std::vector<double>& onsets,
                const MetricConfig& cfg);
double onset_f_measure(const Waveform& est, const Waveform& ref, const MetricConfig& cfg = {});
double onset_f_improvement(const Waveform& est, const Waveform& reverberant,
                           const Waveform& ref, const MetricConfig& cfg = {});

// Plug-in normalized mutual information of two equally long samples, each
// binned over its own range into `bins` cells. Zero-entropy input gives 0.
double histogram_nmi(const std::vector<double>& u, const std::vector<double>& v, int bins);

inline constexpr std::array<const char*, 10> kMetricNames = {
    "mstft_mag", "mstft_phase", "esr", "si_sdr", "si_sdri",
    "nmi",       "msd",         "env", "tter",   "onfi"};
inline constexpr int kMetricCount = static_cast<int>(kMetricNames.size());
int metric_index(const std::string& name);

struct MetricRow {
  std::string id;
  std::array<std::optional<double>, kMetricCount> values{};
  std::vector<std::string> errors;  // per-metric or whole-example failures
  bool failed = false;              // the example could not be evaluated at all

  std::optional<double> get(const std::string& name) const { return values[metric_index(name)]; }
};

// Every metric of one (estimate, reference, reverberant) triple. Metric
// failures are recorded in the row instead of thrown; mismatched inputs mark
// the whole row failed.
MetricRow evaluate_all(const Waveform& est, const Waveform& ref, const Waveform& reverberant,
                       const MetricConfig& cfg = {}, const std::string& id = "");

struct MetricAggregate {
  int count = 0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::array<MetricAggregate, kMetricCount> aggregates{};
  int failed = 0;   // rows that could not be evaluated
  int skipped = 0;  // individual metric values missing from otherwise evaluated rows
  MetricConfig config;
};

MetricReport aggregate(std::vector<MetricRow> rows, const MetricConfig& cfg);

// Evaluates `estimates_dir/<id>.wav` against each selected manifest entry
// (reference = dry, reverberant = wet).
MetricReport evaluate_batch(const Manifest& m, const std::filesystem::path& estimates_dir,
                            const MetricConfig& cfg, std::optional<Split> split, int jobs = 1);

std::string report_csv(const MetricReport& r);
nlohmann::json report_json(const MetricReport& r);

}  // namespace colddiff
