// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "colddiff/error.hpp"
#include "colddiff/rir.hpp"
#include "colddiff/wav_io.hpp"
#include "support/oracles.hpp"

using namespace colddiff;

namespace {

// Independent T60 estimate: Schroeder integral computed from the squared
// taps in long double, least-squares line over [-5, -25] dB.
double oracle_t60(const std::vector<double>& h, double fs) {
  std::vector<long double> e(h.size() + 1, 0.0L);
  for (std::size_t i = h.size(); i-- > 0;) e[i] = e[i + 1] + static_cast<long double>(h[i]) * h[i];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double db = 10.0 * std::log10(static_cast<double>(e[i] / e[0]));
    if (db > -5.0 || db < -25.0) continue;
    const double x = i / fs;
    sx += x; sy += db; sxx += x * x; sxy += x * db; ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -60.0 / slope;
}

std::size_t first_nonzero(const std::vector<double>& h) {
  return static_cast<std::size_t>(std::find_if(h.begin(), h.end(), [](double v) { return v != 0.0; }) - h.begin());
}

}  // namespace

TEST_CASE("synthesized T60 follows the requested value") {
  RoomRanges ranges;
  ranges.t60_max = 1.5;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const RoomSpec room = draw_room(ranges, 100 + seed);
    const RirSample r = synth_rir(room);
    const double est = measure_t60(r);
    CAPTURE(room.t60);
    CHECK(std::abs(est / room.t60 - 1.0) < 0.2);
    CHECK(oracle_t60(r.taps[0], r.sample_rate) == doctest::Approx(est).epsilon(1e-6));
  }
}

TEST_CASE("direct path delay and amplitude") {
  RoomSpec room;
  room.t60 = 0.4;
  const RirSample r = synth_rir(room);
  const double d = room.source_mic_distance();
  const double expected = d / kSpeedOfSound * room.sample_rate;
  CHECK(std::abs(static_cast<double>(first_nonzero(r.taps[0])) - expected) <= 1.0);

  room.max_order = 0;
  const RirSample direct = synth_rir(room);
  std::size_t nonzero = 0;
  for (double v : direct.taps[0]) nonzero += v != 0.0;
  CHECK(nonzero == 1);
  CHECK(direct.taps[0][first_nonzero(direct.taps[0])] ==
        doctest::Approx(1.0 / (4.0 * std::numbers::pi * d)).epsilon(1e-12));
}

TEST_CASE("synth_rir is deterministic and its decay curve is non-increasing") {
  RoomSpec room;
  room.t60 = 0.6;
  room.seed = 9;
  const RirSample a = synth_rir(room), b = synth_rir(room);
  CHECK(a.taps == b.taps);
  const auto curve = schroeder_curve_db(a.taps[0]);
  CHECK(curve.front() == doctest::Approx(0.0));
  for (std::size_t i = 1; i < curve.size(); ++i) REQUIRE(curve[i] <= curve[i - 1] + 1e-9);
}

TEST_CASE("infeasible or invalid rooms are rejected") {
  RoomSpec tiny;
  tiny.dims = {3.0, 3.0, 2.5};
  tiny.source = {1.0, 1.0, 1.0};
  tiny.mic = {2.0, 2.0, 1.0};
  tiny.t60 = 0.01;  // needs alpha > 1
  CHECK_THROWS_AS(synth_rir(tiny), DataError);
  RoomSpec outside;
  outside.source = {7.0, 2.0, 1.5};
  CHECK_THROWS_AS(outside.validate(), UsageError);
  RoomSpec same;
  same.mic = same.source;
  CHECK_THROWS_AS(same.validate(), UsageError);
}

TEST_CASE("measure_t60 on closed-form exponential decays") {
  const double fs = 44100.0, t60 = 0.5;
  Rng rng(4);
  std::vector<double> h(static_cast<std::size_t>(1.2 * fs));
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = rng.normal() * std::exp(-6.9078 * (i / fs) / t60);
  const double est = measure_t60(h, fs);
  CHECK(std::abs(est / t60 - 1.0) < 0.1);
  std::vector<double> h2 = h;
  for (double& v : h2) v *= 2.0;
  CHECK(measure_t60(h2, fs) == doctest::Approx(est).epsilon(1e-12));
  CHECK_THROWS_AS(measure_t60(std::vector<double>{1.0}, fs), NumericalError);
  CHECK_THROWS_AS(measure_t60(std::vector<double>{0.0, 1.0, 0.0, 0.0}, fs), NumericalError);
}

TEST_CASE("load_rir") {
  const auto dir = oracle::temp_dir("rir");
  write_wav(dir / "unit.wav", AudioData{{{1.0}}, 44100.0});
  const RirSample unit = load_rir(dir / "unit.wav", 44100.0);
  CHECK(unit.taps == std::vector<std::vector<double>>{{1.0}});
  CHECK(unit.source == RirSample::Source::kMeasured);

  write_wav(dir / "hi.wav", AudioData{{{1.0, 0.5}}, 48000.0});
  CHECK_THROWS_AS(load_rir(dir / "hi.wav", 44100.0), DataError);

  const std::vector<double> h{0.5, -0.25, 0.125, 0.0625};
  std::vector<double> twice = h;
  for (double& v : twice) v *= 2.0;
  write_wav(dir / "st.wav", AudioData{{twice, std::vector<double>(h.size(), 0.0)}, 44100.0});
  const RirSample st = load_rir(dir / "st.wav", 44100.0);
  REQUIRE(st.channels() == 1);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(st.taps[0][i] == doctest::Approx(h[i]).epsilon(1e-7));
  CHECK(load_rir(dir / "st.wav", 44100.0, true).channels() == 2);

  CHECK_THROWS_AS(load_rir(dir / "missing.wav", 44100.0), DataError);
}

TEST_CASE("convolution matches the direct sum") {
  const Waveform dry = oracle::white_noise(3000, 5);
  RoomSpec room;
  room.t60 = 0.2;
  room.max_order = 2;
  RirSample r = synth_rir(room);
  r.taps[0].resize(std::min<std::size_t>(r.length(), 1500));
  const Waveform wet = convolve_rir(dry, r);
  for (int c = 0; c < 2; ++c) {
    const auto d = dry.channel(c);
    const auto ref = oracle::direct_convolution(std::vector<double>(d.begin(), d.end()), r.taps[0]);
    const auto got = wet.channel(c);
    CHECK(oracle::rel_l2(got, ref) < 1e-12);
  }
}

TEST_CASE("render_wet contracts") {
  const Waveform dry = oracle::white_noise(20000, 6);
  const Waveform same = render_wet(dry, RirSample::from_taps({1.0}), 0.0, 1.0);
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < dry.size(); ++i) REQUIRE(std::abs(same.channel(c)[i] - dry.channel(c)[i]) < 1e-9);

  const std::size_t d = 37;
  std::vector<double> delay(d + 1, 0.0);
  delay[d] = 1.0;
  const Waveform shifted = render_wet(dry, RirSample::from_taps(delay), 0.0, 1.0);
  // A truncated shift loses the last d samples, so the RMS match rescales it.
  double sum_dry = 0, sum_kept = 0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < dry.size(); ++i) {
      sum_dry += dry.channel(c)[i] * dry.channel(c)[i];
      if (i + d < dry.size()) sum_kept += dry.channel(c)[i] * dry.channel(c)[i];
    }
  const double scale = std::sqrt(sum_dry / sum_kept);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < d; ++i) REQUIRE(std::abs(shifted.channel(c)[i]) < 1e-12);
    for (std::size_t i = d; i < dry.size(); ++i)
      REQUIRE(shifted.channel(c)[i] == doctest::Approx(scale * dry.channel(c)[i - d]).epsilon(1e-9));
  }

  RoomSpec room;
  room.t60 = 1.0;
  const RirSample r = synth_rir(room);
  // Quiet input so that the peak ceiling does not engage.
  const Waveform quiet = dry.scaled(0.1);
  CHECK(std::abs(rms(render_wet(quiet, r, 0.0, 1.0)) - rms(quiet)) < 1e-6);
  const Waveform wet = render_wet(dry, r, 0.0, 1.0);
  const Waveform louder = render_wet(dry, r, 6.0, 1.0);
  CHECK(peak(louder) <= 1.0);
  const Waveform capped = render_wet(dry.scaled(4.0), r, 12.0, 0.5);
  CHECK(peak(capped) <= 0.5 + 1e-15);
  CHECK(render_wet(dry, r, 0.0, 1.0).channel(0)[1234] == wet.channel(0)[1234]);

  CHECK_THROWS_AS(render_wet(Waveform::zeros(100), r, 0.0, 1.0), DataError);
  CHECK_THROWS_AS(render_wet(dry, r, 0.0, 1.5), UsageError);
}

TEST_CASE("convolution is linear") {
  const Waveform dry = oracle::white_noise(4000, 7);
  RoomSpec room;
  room.t60 = 0.3;
  const RirSample r = synth_rir(room);
  const Waveform a = convolve_rir(dry.scaled(3.0), r), b = convolve_rir(dry, r);
  for (std::size_t i = 0; i < dry.size(); ++i) REQUIRE(a.channel(1)[i] == doctest::Approx(3.0 * b.channel(1)[i]).epsilon(1e-12));
}
