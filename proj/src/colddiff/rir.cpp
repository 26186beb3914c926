// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/rir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "colddiff/error.hpp"
#include "colddiff/fft.hpp"
#include "colddiff/wav_io.hpp"

namespace colddiff {
namespace {

// Image offsets along one axis: coordinate difference (metres) and the
// number of wall reflections it takes.
struct AxisImage {
  double offset;
  int order;
};

std::vector<AxisImage> axis_images(double length, double src, double mic, double reach) {
  std::vector<AxisImage> out;
  const int n_max = static_cast<int>(std::ceil(reach / (2.0 * length))) + 1;
  for (int n = -n_max; n <= n_max; ++n) {
    for (int p = 0; p <= 1; ++p) {
      const double offset = (1 - 2 * p) * src + 2.0 * n * length - mic;
      if (std::abs(offset) > reach) continue;
      out.push_back({offset, std::abs(n - p) + std::abs(n)});
    }
  }
  return out;
}

}  // namespace

void RoomSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    require(dims[a] > 0.0, "room dimensions must be positive");
    require(source[a] > 0.0 && source[a] < dims[a], "source must lie inside the room");
    require(mic[a] > 0.0 && mic[a] < dims[a], "microphone must lie inside the room");
  }
  require(t60 > 0.0, "t60 must be positive");
  require(sample_rate > 0.0, "sample_rate must be positive");
  require(source_mic_distance() > 0.0, "source and microphone must not coincide");
}

double RoomSpec::source_mic_distance() const {
  return std::hypot(source[0] - mic[0], source[1] - mic[1], source[2] - mic[2]);
}

double sabine_absorption(const RoomSpec& room) {
  const auto& d = room.dims;
  const double volume = d[0] * d[1] * d[2];
  const double surface = 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
  return 24.0 * std::log(10.0) * volume / (kSpeedOfSound * surface * room.t60);
}

void RirSample::validate() const {
  if (taps.empty() || taps[0].empty()) throw DataError("RIR is empty");
  if (taps.size() > 2) throw DataError("RIR must be mono or stereo");
  for (const auto& ch : taps) {
    if (ch.size() != taps[0].size()) throw DataError("RIR channels differ in length");
    if (!all_finite(ch)) throw DataError("RIR contains non-finite taps");
  }
  const bool any = std::any_of(taps.begin(), taps.end(), [](const auto& ch) {
    return std::any_of(ch.begin(), ch.end(), [](double v) { return v != 0.0; });
  });
  if (!any) throw DataError("RIR has no non-zero tap");
}

RirSample RirSample::from_taps(std::vector<double> taps, double sample_rate) {
  RirSample r;
  r.taps.push_back(std::move(taps));
  r.sample_rate = sample_rate;
  r.validate();
  return r;
}

namespace {

std::vector<double> image_source_taps(const RoomSpec& room, double beta) {
  const double fs = room.sample_rate;
  const double direct = room.source_mic_distance();
  const double direct_delay = direct / kSpeedOfSound * fs;
  const auto length =
      static_cast<std::size_t>(std::lround(direct_delay) + std::ceil(1.5 * room.t60 * fs)) + 1;
  const double reach = static_cast<double>(length) / fs * kSpeedOfSound;

  std::array<std::vector<AxisImage>, 3> axes;
  for (int a = 0; a < 3; ++a) axes[a] = axis_images(room.dims[a], room.source[a], room.mic[a], reach);

  const int order_cap = room.max_order < 0 ? std::numeric_limits<int>::max() : room.max_order;
  int max_order_seen = 0;
  for (const auto& ax : axes)
    for (const auto& im : ax) max_order_seen = std::max(max_order_seen, im.order);
  std::vector<double> beta_pow(3 * max_order_seen + 1);
  for (std::size_t i = 0; i < beta_pow.size(); ++i) beta_pow[i] = std::pow(beta, i);

  std::vector<double> taps(length, 0.0);
  const double reach2 = reach * reach;
  for (const auto& ix : axes[0]) {
    const double dx2 = ix.offset * ix.offset;
    if (dx2 > reach2 || ix.order > order_cap) continue;
    for (const auto& iy : axes[1]) {
      const double dxy2 = dx2 + iy.offset * iy.offset;
      if (dxy2 > reach2 || ix.order + iy.order > order_cap) continue;
      for (const auto& iz : axes[2]) {
        const int order = ix.order + iy.order + iz.order;
        if (order > order_cap) continue;
        const double d2 = dxy2 + iz.offset * iz.offset;
        if (d2 > reach2) continue;
        const double d = std::sqrt(d2);
        const auto idx = static_cast<std::size_t>(std::lround(d / kSpeedOfSound * fs));
        if (idx >= length) continue;
        taps[idx] += beta_pow[order] / (4.0 * kPi * d);
      }
    }
  }

  const double direct_amp = 1.0 / (4.0 * kPi * direct);
  std::size_t last = 0;
  for (std::size_t i = 0; i < length; ++i)
    if (std::abs(taps[i]) >= direct_amp * 1e-3) last = i;
  taps.resize(last + 1);
  return taps;
}

}  // namespace

RirSample synth_rir(const RoomSpec& room) {
  room.validate();
  const double alpha = sabine_absorption(room);
  if (alpha > 1.0)
    throw DataError("infeasible room: Sabine absorption " + std::to_string(alpha) +
                    " > 1 (room too small for T60 " + std::to_string(room.t60) + " s)");
  double beta = std::clamp(std::sqrt(1.0 - alpha), 1e-6, 1.0 - 1e-9);
  std::vector<double> taps = image_source_taps(room, beta);
  if (room.calibrate_t60) {
    // T60 scales roughly with 1 / -ln(beta), so rescale ln(beta) by the
    // ratio of measured to requested decay time.
    for (int iter = 0; iter < 12; ++iter) {
      double measured = 0.0;
      try {
        measured = measure_t60(taps, room.sample_rate);
      } catch (const NumericalError&) {
        break;
      }
      const double ratio = measured / room.t60;
      if (std::abs(ratio - 1.0) < 0.01) break;
      beta = std::clamp(std::exp(std::log(beta) * ratio), 1e-6, 1.0 - 1e-9);
      taps = image_source_taps(room, beta);
    }
  }

  RirSample r;
  r.taps.push_back(std::move(taps));
  r.sample_rate = room.sample_rate;
  r.source = RirSample::Source::kSynthetic;
  r.room = room;
  return r;
}

RirSample load_rir(const std::filesystem::path& path, double pipeline_rate, bool keep_stereo) {
  AudioData a = read_wav(path);
  if (pipeline_rate > 0.0 && a.sample_rate != pipeline_rate)
    throw DataError(path.string() + ": RIR sample rate " + std::to_string(a.sample_rate) +
                    " Hz does not match pipeline rate " + std::to_string(pipeline_rate) + " Hz");
  RirSample r;
  r.sample_rate = a.sample_rate;
  r.source = RirSample::Source::kMeasured;
  r.measured_id = path.stem().string();
  if (keep_stereo && a.channels.size() == 2) {
    r.taps = std::move(a.channels);
  } else {
    std::vector<double> mono(a.frames(), 0.0);
    for (const auto& ch : a.channels)
      for (std::size_t i = 0; i < mono.size(); ++i) mono[i] += ch[i];
    for (double& v : mono) v /= static_cast<double>(a.channels.size());
    r.taps.push_back(std::move(mono));
  }
  r.validate();
  return r;
}

std::vector<double> schroeder_curve_db(std::span<const double> taps) {
  std::vector<double> edc(taps.size());
  double acc = 0.0;
  for (std::size_t i = taps.size(); i-- > 0;) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  const double total = edc.empty() ? 0.0 : edc[0];
  if (total <= 0.0) throw NumericalError("Schroeder curve of an all-zero response");
  for (double& v : edc) v = v > 0.0 ? 10.0 * std::log10(v / total) : -INFINITY;
  return edc;
}

double measure_t60(std::span<const double> taps, double sample_rate) {
  require(sample_rate > 0.0, "sample_rate must be positive");
  const std::vector<double> edc = schroeder_curve_db(taps);
  std::size_t i5 = edc.size(), i25 = edc.size();
  for (std::size_t i = 0; i < edc.size(); ++i) {
    if (i5 == edc.size() && edc[i] <= -5.0) i5 = i;
    if (edc[i] <= -25.0) {
      i25 = i;
      break;
    }
  }
  if (i25 == edc.size() || i5 >= i25 || i25 - i5 < 3 || !std::isfinite(edc[i25 - 1]))
    throw NumericalError("insufficient decay range for a T60 estimate (need a smooth decay "
                         "through -5..-25 dB)");
  // Least-squares line through EDC(dB) over [i5, i25).
  const double n = static_cast<double>(i25 - i5);
  double st = 0.0, se = 0.0, stt = 0.0, ste = 0.0;
  for (std::size_t i = i5; i < i25; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    st += t;
    se += edc[i];
    stt += t * t;
    ste += t * edc[i];
  }
  const double slope = (n * ste - st * se) / (n * stt - st * st);
  if (!(slope < 0.0)) throw NumericalError("energy decay curve does not decay");
  return -60.0 / slope;
}

double measure_t60(const RirSample& rir) {
  rir.validate();
  return measure_t60(rir.taps[0], rir.sample_rate);
}

Waveform convolve_rir(const Waveform& dry, const RirSample& rir) {
  rir.validate();
  const std::size_t n = dry.size();
  Waveform out = Waveform::zeros(n, dry.sample_rate());
  if (n == 0) return out;
  const std::size_t m = rir.length();
  const int size = fast_fft_size(static_cast<int>(n + m - 1));
  const RealFft fft(size);
  std::vector<double> buf(size);
  std::vector<Complex> sig(fft.bins()), ker(fft.bins());
  for (int c = 0; c < 2; ++c) {
    const auto& taps = rir.taps[rir.channels() == 2 ? c : 0];
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy(taps.begin(), taps.end(), buf.begin());
    fft.forward(buf, ker);
    std::fill(buf.begin(), buf.end(), 0.0);
    const auto src = dry.channel(c);
    std::copy(src.begin(), src.end(), buf.begin());
    fft.forward(buf, sig);
    for (std::size_t f = 0; f < sig.size(); ++f) sig[f] *= ker[f];
    fft.inverse(sig, buf);
    auto dst = out.channel(c);
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n), dst.begin());
  }
  return out;
}

double rms(const Waveform& w) {
  if (w.empty()) return 0.0;
  double acc = 0.0;
  for (int c = 0; c < 2; ++c)
    for (double v : w.channel(c)) acc += v * v;
  return std::sqrt(acc / (2.0 * static_cast<double>(w.size())));
}

double peak(const Waveform& w) {
  double p = 0.0;
  for (int c = 0; c < 2; ++c)
    for (double v : w.channel(c)) p = std::max(p, std::abs(v));
  return p;
}

Waveform render_wet(const Waveform& dry, const RirSample& rir, double wet_gain_db,
                    double peak_ceiling) {
  require(peak_ceiling > 0.0 && peak_ceiling <= 1.0, "peak ceiling must lie in (0, 1]");
  require(std::isfinite(wet_gain_db), "wet gain must be finite");
  const double dry_rms = rms(dry);
  if (dry_rms == 0.0) throw DataError("cannot render a silent dry signal (RMS = 0)");
  Waveform wet = convolve_rir(dry, rir);
  const double wet_rms = rms(wet);
  if (wet_rms == 0.0) throw DataError("rendered wet signal is silent (RIR delay exceeds input)");
  wet = wet.scaled(dry_rms * std::pow(10.0, wet_gain_db / 20.0) / wet_rms);
  const double p = peak(wet);
  if (p > peak_ceiling) {
    double scale = peak_ceiling / p;
    while (p * scale > peak_ceiling) scale = std::nextafter(scale, 0.0);
    wet = wet.scaled(scale);
  }
  return wet;
}

void RoomRanges::validate() const {
  for (int a = 0; a < 3; ++a)
    require(dims_min[a] > 2.0 * wall_margin && dims_max[a] >= dims_min[a],
            "room dimension ranges must exceed twice the wall margin");
  require(t60_min > 0.0 && t60_max >= t60_min, "invalid T60 range");
  require(wall_margin > 0.0, "wall margin must be positive");
  require(source_distance_min > 0.0 && source_distance_max >= source_distance_min,
          "invalid source distance range");
}

RoomSpec draw_room(const RoomRanges& ranges, std::uint64_t seed, double sample_rate) {
  ranges.validate();
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RoomSpec room;
    room.sample_rate = sample_rate;
    room.seed = seed;
    room.max_order = ranges.max_order;
    room.calibrate_t60 = ranges.calibrate_t60;
    for (int a = 0; a < 3; ++a) room.dims[a] = rng.uniform(ranges.dims_min[a], ranges.dims_max[a]);
    room.t60 = rng.uniform(ranges.t60_min, ranges.t60_max);
    if (sabine_absorption(room) > 1.0) continue;
    const double m = ranges.wall_margin;
    for (int a = 0; a < 3; ++a) room.mic[a] = rng.uniform(m, room.dims[a] - m);
    bool placed = false;
    for (int k = 0; k < 100 && !placed; ++k) {
      Vec3 dir{rng.normal(), rng.normal(), rng.normal()};
      const double norm = std::hypot(dir[0], dir[1], dir[2]);
      if (norm == 0.0) continue;
      const double dist = rng.uniform(ranges.source_distance_min, ranges.source_distance_max);
      placed = true;
      for (int a = 0; a < 3; ++a) {
        room.source[a] = room.mic[a] + dist * dir[a] / norm;
        placed = placed && room.source[a] >= m && room.source[a] <= room.dims[a] - m;
      }
    }
    if (placed) return room;
  }
  throw UsageError("could not draw a feasible room from the configured ranges");
}

}  // namespace colddiff
