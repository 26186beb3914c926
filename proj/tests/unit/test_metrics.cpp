// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "colddiff/error.hpp"
#include "colddiff/metrics.hpp"
#include "colddiff/rir.hpp"
#include "support/oracles.hpp"

using namespace colddiff;

namespace {

constexpr double kFs = 44100.0;
const std::vector<double> kHits{0.25, 0.6, 1.0, 1.35, 1.8, 2.3};

Waveform clean() { return oracle::click_track(kHits, static_cast<std::size_t>(3.0 * kFs), 11); }

Waveform reverberant(const Waveform& x) {
  RoomSpec room;
  room.t60 = 0.6;
  return render_wet(x, synth_rir(room), 0.0, 0.99);
}

Waveform sine(double hz, std::size_t n) {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 * std::sin(2.0 * std::numbers::pi * hz * i / kFs);
  return Waveform(s, s);
}

Waveform map_samples(const Waveform& w, auto&& fn) {
  std::vector<std::vector<double>> ch(2);
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < w.size(); ++i) ch[c].push_back(fn(w.channel(c)[i], i, c));
  return Waveform::from_channels(std::move(ch), w.sample_rate());
}

}  // namespace

TEST_CASE("multi-resolution magnitude and phase distances") {
  const Waveform x = oracle::white_noise(static_cast<std::size_t>(kFs), 1);
  CHECK(mstft_mag_mae(x, x) == 0.0);
  CHECK(mstft_phase_mae(x, x) == 0.0);
  CHECK(mstft_mag_mae(Waveform::zeros(x.size()), x) > 1.0);
  CHECK(mstft_phase_mae(x.scaled(-1.0), x) == doctest::Approx(std::numbers::pi).epsilon(1e-9));
  const Waveform s = sine(1000.0, static_cast<std::size_t>(kFs));
  const double scaled = mstft_mag_mae(s.scaled(2.0), s);
  CHECK(scaled <= std::log(2.0) + 1e-9);
  CHECK(scaled > 0.5 * std::log(2.0));
  CHECK_THROWS_AS(mstft_mag_mae(x.slice(0, 4000), x.slice(0, 4000)), DataError);
  CHECK_THROWS(mstft_mag_mae(x, x.slice(0, 20000)));
}

TEST_CASE("esr and si_sdr closed forms") {
  const Waveform x = oracle::white_noise(50000, 2);
  CHECK(esr(x, x) == 0.0);
  CHECK(esr(Waveform::zeros(x.size()), x) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(esr(x.scaled(2.0), x) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK(si_sdr(x.scaled(3.7), x) == 60.0);
  // Noise made orthogonal to the zero-mean reference with 1% of its energy.
  const Waveform n = oracle::white_noise(50000, 3);
  std::vector<double> xr, nr;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < x.size(); ++i) {
      xr.push_back(x.channel(c)[i]);
      nr.push_back(n.channel(c)[i]);
    }
  auto demean = [](std::vector<double>& v) {
    double m = 0;
    for (double e : v) m += e;
    m /= static_cast<double>(v.size());
    for (double& e : v) e -= m;
  };
  demean(xr);
  demean(nr);
  double xn = 0, xx = 0, nn = 0;
  for (std::size_t i = 0; i < xr.size(); ++i) xn += xr[i] * nr[i], xx += xr[i] * xr[i];
  for (std::size_t i = 0; i < xr.size(); ++i) nr[i] -= xn / xx * xr[i];
  for (double e : nr) nn += e * e;
  const double g = std::sqrt(xx / 100.0 / nn);
  const std::size_t len = x.size();
  const Waveform est = map_samples(x, [&](double v, std::size_t i, int c) { return v + g * nr[c * len + i]; });
  CHECK(si_sdr(est, x) == doctest::Approx(20.0).epsilon(0.005));

  const Waveform y = reverberant(clean());
  CHECK(si_sdri(y, clean(), y) == 0.0);
  CHECK_THROWS_AS(si_sdr(x, Waveform::zeros(x.size())), DataError);
}

TEST_CASE("histogram NMI against a label-based oracle") {
  Rng rng(4);
  std::vector<double> u(5000), v(5000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.normal();
    v[i] = 0.7 * u[i] + 0.3 * rng.normal();
  }
  auto labels = [](const std::vector<double>& a, int bins) {
    const double lo = *std::min_element(a.begin(), a.end()), hi = *std::max_element(a.begin(), a.end());
    std::vector<int> out;
    for (double e : a) out.push_back(std::min(bins - 1, static_cast<int>(std::floor((e - lo) / (hi - lo) * bins))));
    return out;
  };
  const auto mi = oracle::label_mi(labels(u, 16), labels(v, 16));
  CHECK(histogram_nmi(u, v, 16) == doctest::Approx(mi.mi / std::sqrt(mi.hu * mi.hv)).epsilon(1e-9));
  CHECK(histogram_nmi(u, u, 64) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(histogram_nmi(u, std::vector<double>(u.size(), 2.0), 64) == 0.0);
  // Monotone remap: exact under an affine map, close to 1 under a smooth one.
  std::vector<double> affine, cubic;
  for (double e : u) affine.push_back(3.0 * e - 1.0), cubic.push_back(e + 0.1 * e * e * e);
  CHECK(histogram_nmi(u, affine, 64) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(histogram_nmi(u, cubic, 64) > 0.7);
}

TEST_CASE("NMI on audio") {
  const Waveform a = oracle::white_noise(2 * static_cast<std::size_t>(kFs), 5);
  const Waveform b = oracle::white_noise(2 * static_cast<std::size_t>(kFs), 6);
  CHECK(nmi(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const double indep = nmi(a, b);
  CHECK(indep >= 0.0);
  CHECK(indep < 0.05);
}

TEST_CASE("modulation spectrum distance") {
  const std::size_t n = 2 * static_cast<std::size_t>(kFs);
  const Waveform r8 = oracle::am_noise(8.0, n, 1), e4 = oracle::am_noise(4.0, n, 2), e8 = oracle::am_noise(8.0, n, 3);
  CHECK(msd(r8, r8) == 0.0);
  const double diff = msd(e4, r8), same = msd(e8, r8);
  CHECK(diff > 0.0);
  CHECK(diff > same);
  const std::size_t d = static_cast<std::size_t>(0.001 * kFs);
  const Waveform delayed = map_samples(r8, [&](double, std::size_t i, int c) { return i >= d ? r8.channel(c)[i - d] : 0.0; });
  CHECK(msd(delayed, r8) < 0.25 * same);
  CHECK_THROWS_AS(msd(r8.slice(0, 10000), r8.slice(0, 10000)), DataError);
}

TEST_CASE("envelope correlation") {
  const std::size_t n = 2 * static_cast<std::size_t>(kFs);
  const Waveform x = clean().slice(0, n);
  CHECK(env_corr(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(env_corr(x.scaled(0.3), x) == doctest::Approx(1.0).epsilon(1e-12));
  const Waveform noise = oracle::white_noise(n, 7);
  const Waveform up = map_samples(noise, [&](double v, std::size_t i, int) { return v * (static_cast<double>(i) / n); });
  const Waveform down = map_samples(noise, [&](double v, std::size_t i, int) { return v * (1.0 - static_cast<double>(i) / n); });
  CHECK(env_corr(down, up) < -0.95);
  const Waveform flat = map_samples(noise, [](double, std::size_t i, int) { return i % 2 ? 0.5 : -0.5; });
  CHECK_THROWS_AS(env_corr(x, flat), NumericalError);
}

TEST_CASE("TTER deviation") {
  // Hits with a decay that reaches into the tail window, so both energies
  // stay far above eps.
  const Waveform x = oracle::click_track(kHits, static_cast<std::size_t>(3.0 * kFs), 12, 0.03, 0.3);
  CHECK(tter_dev(x, x) == 0.0);
  CHECK(std::abs(tter_dev(x.scaled(0.25), x)) < 1e-6);

  // Scale every detected hit's tail window by sqrt(10): tail energy x10.
  MetricConfig cfg;
  const auto onsets = detect_onsets(x, cfg.onsets);
  REQUIRE(onsets.size() == kHits.size());
  const auto n_tr = static_cast<std::size_t>(std::lround(0.020 * kFs));
  const auto n_tail = static_cast<std::size_t>(std::lround(0.200 * kFs));
  const Waveform boosted = map_samples(x, [&](double v, std::size_t i, int) {
    for (double t : onsets) {
      const auto s = static_cast<std::size_t>(std::lround(t * kFs));
      if (i >= s + n_tr && i < s + n_tr + n_tail) return v * std::sqrt(10.0);
    }
    return v;
  });
  CHECK(tter_dev(boosted, x, onsets, cfg) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(tter_dev(boosted, x, cfg) == doctest::Approx(10.0).epsilon(1e-6));
  CHECK_THROWS_AS(tter_dev(x, Waveform::zeros(x.size())), DataError);
}

TEST_CASE("onset F improvement") {
  const Waveform x = clean(), y = reverberant(x);
  const double fy = onset_f_measure(y, x);
  CHECK(onset_f_measure(x, x) == 1.0);
  CHECK(onset_f_improvement(x, y, x) == doctest::Approx(1.0 - fy).epsilon(1e-15));
  CHECK(onset_f_improvement(y, y, x) == 0.0);
}

TEST_CASE("identity and reverberant rows") {
  const Waveform x = clean(), y = reverberant(x);
  const MetricRow id = evaluate_all(x, x, y, {}, "id");
  REQUIRE(!id.failed);
  CHECK(id.errors.empty());
  for (const char* zero : {"mstft_mag", "mstft_phase", "esr", "msd", "tter"}) CHECK(std::abs(*id.get(zero)) <= 1e-9);
  CHECK(*id.get("nmi") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(*id.get("env") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(*id.get("si_sdr") == 60.0);
  CHECK(*id.get("si_sdri") == doctest::Approx(60.0 - si_sdr(y, x)).epsilon(1e-12));
  CHECK(*id.get("onfi") == doctest::Approx(1.0 - onset_f_measure(y, x)).epsilon(1e-12));

  const MetricRow rev = evaluate_all(y, x, y);
  CHECK(*rev.get("si_sdri") == 0.0);
  CHECK(*rev.get("onfi") == 0.0);
  CHECK(*rev.get("nmi") >= 0.0);
  CHECK(*rev.get("nmi") <= 1.0);
  CHECK(*rev.get("env") <= 1.0);
  CHECK(*rev.get("esr") >= 0.0);
  CHECK(*rev.get("msd") >= 0.0);

  const MetricRow bad = evaluate_all(x.slice(0, 1000), x, y);
  CHECK(bad.failed);
  CHECK(!bad.errors.empty());
}

TEST_CASE("aggregation arithmetic") {
  MetricRow a, b, c;
  a.id = "a";
  b.id = "b";
  c.id = "c";
  a.values[metric_index("esr")] = 0.2;
  b.values[metric_index("esr")] = 0.6;
  a.values[metric_index("nmi")] = 0.5;
  c.failed = true;
  const MetricReport r = aggregate({a, b, c}, MetricConfig{});
  const auto& esr_agg = r.aggregates[metric_index("esr")];
  CHECK(esr_agg.count == 2);
  CHECK(esr_agg.mean == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(esr_agg.std == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.aggregates[metric_index("nmi")].count == 1);
  CHECK(r.aggregates[metric_index("nmi")].std == 0.0);
  CHECK(r.failed == 1);
  CHECK_THROWS_AS(metric_index("pesq"), UsageError);

  const std::string csv = report_csv(r);
  CHECK(csv.rfind("id,mstft_mag,mstft_phase,esr,si_sdr,si_sdri,nmi,msd,env,tter,onfi,status,errors\n", 0) == 0);
  const auto j = report_json(r);
  CHECK(j.at("rows").size() == 3);
  CHECK(j.at("config").at("nmi_bins") == 64);
}
