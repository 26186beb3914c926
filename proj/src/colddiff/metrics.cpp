// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colddiff/error.hpp"
#include "colddiff/fft.hpp"
#include "colddiff/stft.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace {

void check_pair(const Waveform& a, const Waveform& b) {
  if (a.size() != b.size())
    throw DataError("length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + " samples");
  if (a.sample_rate() != b.sample_rate())
    throw DataError("sample rate mismatch: " + std::to_string(a.sample_rate()) + " vs " +
                    std::to_string(b.sample_rate()) + " Hz");
}

std::vector<double> concatenated(const Waveform& w) {
  std::vector<double> out(w.channel(0).begin(), w.channel(0).end());
  out.insert(out.end(), w.channel(1).begin(), w.channel(1).end());
  return out;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Log-magnitude modulation spectra of mel subband Hilbert envelopes, one
// vector per band (bins 1..n_mod).
std::vector<std::vector<double>> modulation_spectra(std::span<const double> x, double fs,
                                                    const MetricConfig& cfg) {
  const int n = static_cast<int>(x.size());
  const RealFft rfft(n);
  const ComplexFft cfft(n);
  std::vector<Complex> spec(rfft.bins());
  rfft.forward(x, spec);

  const int bands = cfg.msd_subbands;
  const double mel_lo = hz_to_mel(cfg.msd_min_hz);
  const double mel_hi = hz_to_mel(fs / 2.0);
  std::vector<double> edges(bands + 2);
  for (int i = 0; i < bands + 2; ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (bands + 1));

  const int n_mod = static_cast<int>(std::floor(cfg.msd_mod_max_hz * n / fs));
  std::vector<std::vector<double>> out(bands, std::vector<double>(n_mod));
  std::vector<Complex> analytic(n), z(n), mod(rfft.bins());
  std::vector<double> env(n);
  for (int b = 0; b < bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    std::fill(analytic.begin(), analytic.end(), Complex(0.0, 0.0));
    for (int i = 0; i < rfft.bins(); ++i) {
      const double f = i * fs / n;
      double w = 0.0;
      if (f > lo && f < hi) w = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      if (w == 0.0) continue;
      const bool edge = i == 0 || (n % 2 == 0 && i == n / 2);
      analytic[i] = spec[i] * (w * (edge ? 1.0 : 2.0));
    }
    cfft.inverse(analytic, z);
    for (int i = 0; i < n; ++i) env[i] = std::abs(z[i]);
    rfft.forward(env, mod);
    for (int m = 0; m < n_mod; ++m) out[b][m] = std::log(std::abs(mod[m + 1]) + cfg.eps);
  }
  return out;
}

double entropy(const std::vector<double>& counts, double total) {
  double h = 0.0;
  for (double c : counts)
    if (c > 0.0) h -= (c / total) * std::log(c / total);
  return h;
}

std::vector<int> bin_values(const std::vector<double>& v, int bins) {
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<int> idx(v.size(), 0);
  if (!(hi > lo)) return idx;
  const double scale = bins / (hi - lo);
  for (std::size_t i = 0; i < v.size(); ++i)
    idx[i] = std::min(bins - 1, static_cast<int>((v[i] - lo) * scale));
  return idx;
}

std::vector<double> log_magnitudes(std::span<const double> x, int fft, int hop, double eps) {
  const ComplexSpectrogram s = stft_channel(x, fft, hop);
  std::vector<double> out(s.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::abs(s.data[i]) + eps);
  return out;
}

std::vector<double> rms_envelope(const Waveform& w, int frame, int hop) {
  const std::vector<double> mono = w.mono();
  if (mono.size() < static_cast<std::size_t>(frame))
    throw DataError("signal shorter than one envelope frame");
  const std::size_t frames = 1 + (mono.size() - frame) / hop;
  std::vector<double> env(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    double acc = 0.0;
    for (int i = 0; i < frame; ++i) {
      const double v = mono[k * hop + i];
      acc += v * v;
    }
    env[k] = std::sqrt(acc / frame);
  }
  return env;
}

double transient_tail_ratio(const Waveform& s, std::size_t start, std::size_t n_tr,
                            std::size_t n_tail, double eps) {
  double tr = 0.0, tail = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto ch = s.channel(c);
    for (std::size_t i = start; i < start + n_tr; ++i) tr += ch[i] * ch[i];
    for (std::size_t i = start + n_tr; i < start + n_tr + n_tail; ++i) tail += ch[i] * ch[i];
  }
  return 10.0 * std::log10((tr / 2.0 + eps) / (tail / 2.0 + eps));
}

}  // namespace

void MetricConfig::validate() const {
  require(!mstft_ffts.empty() && mstft_ffts.size() == mstft_hops.size(),
          "mstft_ffts and mstft_hops must be non-empty and equally long");
  for (std::size_t i = 0; i < mstft_ffts.size(); ++i)
    require(mstft_ffts[i] >= 2 && mstft_ffts[i] % 2 == 0 && mstft_hops[i] >= 1,
            "mstft resolutions must have even fft sizes and positive hops");
  require(eps > 0.0, "eps must be positive");
  require(nmi_bins >= 2 && nmi_fft >= 2 && nmi_fft % 2 == 0 && nmi_hop >= 1,
          "invalid NMI parameters");
  require(env_frame >= 1 && env_hop >= 1, "invalid envelope framing");
  require(msd_subbands >= 1 && msd_mod_max_hz > 0.0 && msd_min_hz >= 0.0,
          "invalid MSD parameters");
  require(tter_transient_ms > 0.0 && tter_tail_ms > 0.0, "TTER windows must be positive");
  require(onset_tolerance_ms > 0.0, "onset tolerance must be positive");
  require(si_sdr_cap_db > 0.0, "si_sdr cap must be positive");
  onsets.validate();
}

nlohmann::json metric_config_to_json(const MetricConfig& c) {
  return nlohmann::json{{"mstft_ffts", c.mstft_ffts},
                        {"mstft_hops", c.mstft_hops},
                        {"eps", c.eps},
                        {"nmi_bins", c.nmi_bins},
                        {"nmi_fft", c.nmi_fft},
                        {"nmi_hop", c.nmi_hop},
                        {"env_frame", c.env_frame},
                        {"env_hop", c.env_hop},
                        {"msd_subbands", c.msd_subbands},
                        {"msd_mod_max_hz", c.msd_mod_max_hz},
                        {"msd_min_hz", c.msd_min_hz},
                        {"tter_transient_ms", c.tter_transient_ms},
                        {"tter_tail_ms", c.tter_tail_ms},
                        {"onset_tolerance_ms", c.onset_tolerance_ms},
                        {"si_sdr_cap_db", c.si_sdr_cap_db},
                        {"onset_fft", c.onsets.fft_size},
                        {"onset_hop", c.onsets.hop},
                        {"onset_median_seconds", c.onsets.median_seconds},
                        {"onset_peak_seconds", c.onsets.peak_seconds},
                        {"onset_delta", c.onsets.delta},
                        {"onset_min_gap_seconds", c.onsets.min_gap_seconds}};
}

double mstft_mag_mae(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  const int largest = *std::max_element(cfg.mstft_ffts.begin(), cfg.mstft_ffts.end());
  if (ref.size() < static_cast<std::size_t>(largest))
    throw DataError("input shorter than the largest STFT (" + std::to_string(largest) + " samples)");
  double total = 0.0;
  for (std::size_t r = 0; r < cfg.mstft_ffts.size(); ++r) {
    double res = 0.0;
    for (int c = 0; c < 2; ++c) {
      const auto a = log_magnitudes(est.channel(c), cfg.mstft_ffts[r], cfg.mstft_hops[r], cfg.eps);
      const auto b = log_magnitudes(ref.channel(c), cfg.mstft_ffts[r], cfg.mstft_hops[r], cfg.eps);
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      res += acc / static_cast<double>(a.size());
    }
    total += res / 2.0;
  }
  return total / static_cast<double>(cfg.mstft_ffts.size());
}

double mstft_phase_mae(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  const int largest = *std::max_element(cfg.mstft_ffts.begin(), cfg.mstft_ffts.end());
  if (ref.size() < static_cast<std::size_t>(largest))
    throw DataError("input shorter than the largest STFT (" + std::to_string(largest) + " samples)");
  double total = 0.0;
  for (std::size_t r = 0; r < cfg.mstft_ffts.size(); ++r) {
    double res = 0.0;
    for (int c = 0; c < 2; ++c) {
      const auto a = stft_channel(est.channel(c), cfg.mstft_ffts[r], cfg.mstft_hops[r]);
      const auto b = stft_channel(ref.channel(c), cfg.mstft_ffts[r], cfg.mstft_hops[r]);
      double acc = 0.0;
      std::size_t used = 0;
      for (std::size_t i = 0; i < a.data.size(); ++i) {
        if (std::abs(a.data[i]) < cfg.eps && std::abs(b.data[i]) < cfg.eps) continue;
        double d = std::arg(a.data[i] * std::conj(b.data[i]));
        if (d == -kPi) d = kPi;
        acc += std::abs(d);
        ++used;
      }
      res += used ? acc / static_cast<double>(used) : 0.0;
    }
    total += res / 2.0;
  }
  return total / static_cast<double>(cfg.mstft_ffts.size());
}

double esr(const Waveform& est, const Waveform& ref, double eps) {
  check_pair(est, ref);
  double num = 0.0, den = 0.0;
  for (int c = 0; c < 2; ++c) {
    const auto a = est.channel(c);
    const auto b = ref.channel(c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - b[i]) * (a[i] - b[i]);
      den += b[i] * b[i];
    }
  }
  return num / (den + eps);
}

double si_sdr(const Waveform& est, const Waveform& ref, double cap_db) {
  check_pair(est, ref);
  std::vector<double> a = concatenated(est), b = concatenated(ref);
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  double ab = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] -= ma;
    b[i] -= mb;
    ab += a[i] * b[i];
    bb += b[i] * b[i];
  }
  if (!(bb > 0.0)) throw DataError("SI-SDR of a silent reference");
  const double alpha = ab / bb;
  double tt = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = alpha * b[i];
    tt += t * t;
    rr += (a[i] - t) * (a[i] - t);
  }
  if (rr <= 1e-8 * tt || rr == 0.0) return cap_db;
  if (tt == 0.0) return -cap_db;
  return std::clamp(10.0 * std::log10(tt / rr), -cap_db, cap_db);
}

double si_sdri(const Waveform& est, const Waveform& ref, const Waveform& reverberant,
               double cap_db) {
  return si_sdr(est, ref, cap_db) - si_sdr(reverberant, ref, cap_db);
}

double histogram_nmi(const std::vector<double>& u, const std::vector<double>& v, int bins) {
  require(u.size() == v.size() && !u.empty(), "NMI samples must be non-empty and equally long");
  require(bins >= 2, "NMI needs at least two bins");
  const std::vector<int> iu = bin_values(u, bins), iv = bin_values(v, bins);
  std::vector<double> pu(bins, 0.0), pv(bins, 0.0), puv(static_cast<std::size_t>(bins) * bins, 0.0);
  for (std::size_t i = 0; i < iu.size(); ++i) {
    pu[iu[i]] += 1.0;
    pv[iv[i]] += 1.0;
    puv[static_cast<std::size_t>(iu[i]) * bins + iv[i]] += 1.0;
  }
  const double n = static_cast<double>(u.size());
  const double hu = entropy(pu, n), hv = entropy(pv, n), huv = entropy(puv, n);
  if (hu <= 0.0 || hv <= 0.0) return 0.0;
  const double mi = hu + hv - huv;
  return std::clamp(mi / std::sqrt(hu * hv), 0.0, 1.0);
}

double nmi(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  double total = 0.0;
  for (int c = 0; c < 2; ++c) {
    total += histogram_nmi(log_magnitudes(est.channel(c), cfg.nmi_fft, cfg.nmi_hop, cfg.eps),
                           log_magnitudes(ref.channel(c), cfg.nmi_fft, cfg.nmi_hop, cfg.eps),
                           cfg.nmi_bins);
  }
  return total / 2.0;
}

double msd(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  const double fs = ref.sample_rate();
  if (static_cast<double>(ref.size()) < 0.5 * fs)
    throw DataError("input too short for modulation analysis (< 0.5 s)");
  double total = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < 2; ++c) {
    const auto a = modulation_spectra(est.channel(c), fs, cfg);
    const auto b = modulation_spectra(ref.channel(c), fs, cfg);
    for (std::size_t band = 0; band < a.size(); ++band)
      for (std::size_t m = 0; m < a[band].size(); ++m) {
        total += std::abs(a[band][m] - b[band][m]);
        ++count;
      }
  }
  if (count == 0) throw DataError("no modulation bins below msd_mod_max_hz");
  return total / static_cast<double>(count);
}

double env_corr(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  const auto a = rms_envelope(est, cfg.env_frame, cfg.env_hop);
  const auto b = rms_envelope(ref, cfg.env_frame, cfg.env_hop);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0))
    throw NumericalError("envelope correlation undefined for a constant envelope");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double tter_dev(const Waveform& est, const Waveform& ref, const std::vector<double>& onsets,
                const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  if (onsets.empty()) throw DataError("no onsets detected in the reference");
  const double fs = ref.sample_rate();
  const auto n_tr = static_cast<std::size_t>(std::lround(cfg.tter_transient_ms * 1e-3 * fs));
  const auto n_tail = static_cast<std::size_t>(std::lround(cfg.tter_tail_ms * 1e-3 * fs));
  double total = 0.0;
  int used = 0;
  for (double t : onsets) {
    const auto start = static_cast<std::size_t>(std::max(0L, std::lround(t * fs)));
    if (start + n_tr + n_tail > ref.size()) continue;
    total += std::abs(transient_tail_ratio(est, start, n_tr, n_tail, cfg.eps) -
                      transient_tail_ratio(ref, start, n_tr, n_tail, cfg.eps));
    ++used;
  }
  if (used == 0) throw DataError("no reference onset has a complete tail window");
  return total / used;
}

double tter_dev(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  return tter_dev(est, ref, detect_onsets(ref, cfg.onsets), cfg);
}

double onset_f_measure(const Waveform& est, const Waveform& ref, const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  const auto r = detect_onsets(ref, cfg.onsets);
  if (r.empty()) throw DataError("no onsets detected in the reference");
  return match_onsets(detect_onsets(est, cfg.onsets), r, cfg.onset_tolerance_ms * 1e-3).f_measure;
}

double onset_f_improvement(const Waveform& est, const Waveform& reverberant, const Waveform& ref,
                           const MetricConfig& cfg) {
  cfg.validate();
  check_pair(est, ref);
  check_pair(reverberant, ref);
  const auto r = detect_onsets(ref, cfg.onsets);
  if (r.empty()) throw DataError("no onsets detected in the reference");
  const double tol = cfg.onset_tolerance_ms * 1e-3;
  return match_onsets(detect_onsets(est, cfg.onsets), r, tol).f_measure -
         match_onsets(detect_onsets(reverberant, cfg.onsets), r, tol).f_measure;
}

int metric_index(const std::string& name) {
  for (int i = 0; i < kMetricCount; ++i)
    if (name == kMetricNames[i]) return i;
  throw UsageError("unknown metric '" + name + "'");
}

MetricRow evaluate_all(const Waveform& est, const Waveform& ref, const Waveform& reverberant,
                       const MetricConfig& cfg, const std::string& id) {
  cfg.validate();
  MetricRow row;
  row.id = id;
  try {
    check_pair(est, ref);
    check_pair(reverberant, ref);
  } catch (const Error& e) {
    row.failed = true;
    row.errors.push_back(e.what());
    return row;
  }
  auto run = [&](const char* name, auto&& fn) {
    try {
      const double v = fn();
      if (!std::isfinite(v)) throw NumericalError("non-finite value");
      row.values[metric_index(name)] = v;
    } catch (const Error& e) {
      row.errors.push_back(std::string(name) + ": " + e.what());
    }
  };
  run("mstft_mag", [&] { return mstft_mag_mae(est, ref, cfg); });
  run("mstft_phase", [&] { return mstft_phase_mae(est, ref, cfg); });
  run("esr", [&] { return esr(est, ref, cfg.eps); });
  run("si_sdr", [&] { return si_sdr(est, ref, cfg.si_sdr_cap_db); });
  run("si_sdri", [&] { return si_sdri(est, ref, reverberant, cfg.si_sdr_cap_db); });
  run("nmi", [&] { return nmi(est, ref, cfg); });
  run("msd", [&] { return msd(est, ref, cfg); });
  run("env", [&] { return env_corr(est, ref, cfg); });
  // Reference onsets are shared by TTER and ONFi.
  std::vector<double> onsets;
  try {
    onsets = detect_onsets(ref, cfg.onsets);
  } catch (const Error& e) {
    row.errors.push_back(std::string("onsets: ") + e.what());
  }
  run("tter", [&] { return tter_dev(est, ref, onsets, cfg); });
  run("onfi", [&] {
    if (onsets.empty()) throw DataError("no onsets detected in the reference");
    const double tol = cfg.onset_tolerance_ms * 1e-3;
    return match_onsets(detect_onsets(est, cfg.onsets), onsets, tol).f_measure -
           match_onsets(detect_onsets(reverberant, cfg.onsets), onsets, tol).f_measure;
  });
  return row;
}

MetricReport aggregate(std::vector<MetricRow> rows, const MetricConfig& cfg) {
  MetricReport rep;
  rep.config = cfg;
  rep.rows = std::move(rows);
  for (const auto& r : rep.rows) {
    if (r.failed) {
      ++rep.failed;
      continue;
    }
    for (const auto& v : r.values)
      if (!v) ++rep.skipped;
  }
  for (int m = 0; m < kMetricCount; ++m) {
    MetricAggregate& a = rep.aggregates[m];
    double sum = 0.0;
    for (const auto& r : rep.rows)
      if (r.values[m]) {
        sum += *r.values[m];
        ++a.count;
      }
    if (a.count == 0) continue;
    a.mean = sum / a.count;
    double var = 0.0;
    for (const auto& r : rep.rows)
      if (r.values[m]) var += (*r.values[m] - a.mean) * (*r.values[m] - a.mean);
    a.std = std::sqrt(var / a.count);
  }
  return rep;
}

MetricReport evaluate_batch(const Manifest& m, const std::filesystem::path& estimates_dir,
                            const MetricConfig& cfg, std::optional<Split> split, int jobs) {
  cfg.validate();
  std::vector<const PairedExample*> entries;
  for (const auto& e : m.entries)
    if (!split || e.split == *split) entries.push_back(&e);
  if (entries.empty()) throw DataError("no manifest entries selected for evaluation");
  std::vector<MetricRow> rows(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const PairedExample& e = *entries[i];
    try {
      const Waveform ref = read_stereo_wav(m.resolve(e.dry_path));
      const Waveform rev = read_stereo_wav(m.resolve(e.wet_path), ref.sample_rate());
      const Waveform est = read_stereo_wav(estimates_dir / (e.id + ".wav"), ref.sample_rate());
      rows[i] = evaluate_all(est, ref, rev, cfg, e.id);
    } catch (const Error& err) {
      rows[i].id = e.id;
      rows[i].failed = true;
      rows[i].errors.push_back(err.what());
    }
  });
  return aggregate(std::move(rows), cfg);
}

}  // namespace colddiff
