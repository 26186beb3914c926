// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/stft.hpp"

#include <cmath>

#include "colddiff/error.hpp"
#include "colddiff/util.hpp"

namespace colddiff {
namespace {

// Overlap-add positions whose summed squared window is below this are
// treated as uncovered (output zero).
constexpr double kWindowFloor = 1e-10;

struct OlaGeometry {
  int pad = 0;
  std::size_t length = 0;      // padded signal length covered by frames
  std::vector<double> window;  // analysis = synthesis window
  std::vector<double> wsum;    // summed squared window per padded sample
};

OlaGeometry ola_geometry(const StftConfig& cfg, int frames) {
  OlaGeometry g;
  g.pad = cfg.fft_size / 2;
  g.length = static_cast<std::size_t>(frames - 1) * cfg.hop + cfg.fft_size;
  g.window = make_window(cfg.window, cfg.fft_size);
  g.wsum.assign(g.length, 0.0);
  for (int k = 0; k < frames; ++k)
    for (int n = 0; n < cfg.fft_size; ++n)
      g.wsum[static_cast<std::size_t>(k) * cfg.hop + n] += g.window[n] * g.window[n];
  return g;
}

void require_matches(const SpectroTensor& s, const StftConfig& cfg) {
  require(s.fft_size() == cfg.fft_size && s.hop() == cfg.hop && s.bins() == cfg.bins(),
          "spectrogram shape does not match STFT configuration (fft_size " +
              std::to_string(s.fft_size()) + "/" + std::to_string(cfg.fft_size) + ", hop " +
              std::to_string(s.hop()) + "/" + std::to_string(cfg.hop) + ")");
}

}  // namespace

std::string to_string(WindowKind w) {
  return w == WindowKind::kHann ? "hann" : "rectangular";
}

WindowKind window_from_string(const std::string& name) {
  if (name == "hann") return WindowKind::kHann;
  if (name == "rectangular") return WindowKind::kRectangular;
  throw UsageError("unknown window '" + name + "' (expected hann or rectangular)");
}

std::vector<double> make_window(WindowKind kind, int n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::kHann)
    for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

int StftConfig::frames_for(std::size_t length) const {
  return 1 + static_cast<int>(length / static_cast<std::size_t>(hop));
}

std::size_t StftConfig::segment_samples() const {
  return static_cast<std::size_t>(std::llround(segment_seconds * sample_rate));
}

void StftConfig::validate() const {
  require(fft_size >= 2, "fft_size must be at least 2");
  require(hop >= 1 && hop <= fft_size, "hop must lie in [1, fft_size]");
  require(sample_rate > 0.0, "sample_rate must be positive");
  require(segment_seconds > 0.0, "segment_seconds must be positive");
  const double samples = segment_seconds * sample_rate;
  require(std::abs(samples - std::round(samples)) < 1e-6 && samples >= 1.0,
          "segment length in samples must be a positive integer");
}

SpectroTensor::SpectroTensor(int bins, int frames, int fft_size, int hop, double sample_rate)
    : bins_(bins),
      frames_(frames),
      fft_size_(fft_size),
      hop_(hop),
      sample_rate_(sample_rate),
      data_(static_cast<std::size_t>(kChannels) * bins * frames, 0.0) {
  require(bins > 0 && frames > 0, "spectrogram dimensions must be positive");
}

bool SpectroTensor::all_finite() const { return colddiff::all_finite(data_); }

SpectroTensor& SpectroTensor::operator+=(const SpectroTensor& o) {
  require_same_shape(*this, o, "tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

SpectroTensor& SpectroTensor::operator-=(const SpectroTensor& o) {
  require_same_shape(*this, o, "tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

SpectroTensor& SpectroTensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

SpectroTensor operator+(SpectroTensor a, const SpectroTensor& b) { return a += b; }
SpectroTensor operator-(SpectroTensor a, const SpectroTensor& b) { return a -= b; }
SpectroTensor operator*(double s, SpectroTensor a) { return a *= s; }

void require_same_shape(const SpectroTensor& a, const SpectroTensor& b, const char* what) {
  if (!a.same_shape(b))
    throw UsageError(std::string(what) + ": shape mismatch (4x" + std::to_string(a.bins()) +
                     "x" + std::to_string(a.frames()) + " vs 4x" + std::to_string(b.bins()) +
                     "x" + std::to_string(b.frames()) + ")");
}

ComplexSpectrogram stft_channel(std::span<const double> signal, int fft_size, int hop,
                                WindowKind window) {
  const std::size_t n = signal.size();
  const int pad = fft_size / 2;
  require(n > static_cast<std::size_t>(pad),
          "signal of " + std::to_string(n) + " samples too short for fft_size " +
              std::to_string(fft_size));
  const RealFft fft(fft_size);
  const std::vector<double> w = make_window(window, fft_size);

  ComplexSpectrogram out;
  out.bins = fft.bins();
  out.frames = 1 + static_cast<int>(n / static_cast<std::size_t>(hop));
  out.data.resize(static_cast<std::size_t>(out.frames) * out.bins);

  std::vector<double> frame(fft_size);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  for (int k = 0; k < out.frames; ++k) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(k) * hop - pad;
    for (int i = 0; i < fft_size; ++i) {
      std::ptrdiff_t j = start + i;
      if (j < 0) j = -j;
      if (j > last) j = 2 * last - j;
      frame[i] = signal[static_cast<std::size_t>(j)] * w[i];
    }
    fft.forward(frame, std::span<Complex>(out.data).subspan(
                           static_cast<std::size_t>(k) * out.bins, out.bins));
  }
  return out;
}

SpectroTensor stft_forward(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.empty()) throw UsageError("stft_forward: empty input");
  if (!all_finite(w.channel(0)) || !all_finite(w.channel(1)))
    throw DataError("stft_forward: non-finite samples");
  require(w.size() >= static_cast<std::size_t>(cfg.fft_size),
          "stft_forward: input shorter than fft_size");
  const int frames = cfg.frames_for(w.size());
  SpectroTensor s(cfg.bins(), frames, cfg.fft_size, cfg.hop, w.sample_rate());
  for (int c = 0; c < 2; ++c) {
    const ComplexSpectrogram spec = stft_channel(w.channel(c), cfg.fft_size, cfg.hop, cfg.window);
    for (int f = 0; f < spec.bins; ++f) {
      for (int k = 0; k < frames; ++k) {
        const Complex z = spec.at(f, k);
        s.at(2 * c, f, k) = z.real();
        s.at(2 * c + 1, f, k) = z.imag();
      }
    }
  }
  return s;
}

Waveform istft_inverse(const SpectroTensor& s, const StftConfig& cfg, std::size_t out_len) {
  cfg.validate();
  require_matches(s, cfg);
  const OlaGeometry g = ola_geometry(cfg, s.frames());
  const RealFft fft(cfg.fft_size);
  std::vector<Complex> spec(cfg.bins());
  std::vector<double> frame(cfg.fft_size);

  Waveform out = Waveform::zeros(out_len, s.sample_rate());
  for (int c = 0; c < 2; ++c) {
    std::vector<double> ola(g.length, 0.0);
    for (int k = 0; k < s.frames(); ++k) {
      for (int f = 0; f < cfg.bins(); ++f) spec[f] = {s.at(2 * c, f, k), s.at(2 * c + 1, f, k)};
      fft.inverse(spec, frame);
      const std::size_t base = static_cast<std::size_t>(k) * cfg.hop;
      for (int n = 0; n < cfg.fft_size; ++n) ola[base + n] += frame[n] * g.window[n];
    }
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::size_t j = i + g.pad;
      if (j < g.length && g.wsum[j] > kWindowFloor) dst[i] = ola[j] / g.wsum[j];
    }
  }
  return out;
}

SpectroTensor istft_adjoint(const Waveform& w, const StftConfig& cfg, int frames) {
  cfg.validate();
  require(frames > 0, "istft_adjoint: frames must be positive");
  const OlaGeometry g = ola_geometry(cfg, frames);
  const RealFft fft(cfg.fft_size);
  const int n = cfg.fft_size;
  const int bins = cfg.bins();
  std::vector<double> seg(n);
  std::vector<Complex> spec(bins);

  SpectroTensor out(bins, frames, n, cfg.hop, w.sample_rate());
  for (int c = 0; c < 2; ++c) {
    std::vector<double> back(g.length, 0.0);
    const auto src = w.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const std::size_t j = i + g.pad;
      if (j < g.length && g.wsum[j] > kWindowFloor) back[j] = src[i] / g.wsum[j];
    }
    for (int k = 0; k < frames; ++k) {
      const std::size_t base = static_cast<std::size_t>(k) * cfg.hop;
      for (int i = 0; i < n; ++i) seg[i] = back[base + i] * g.window[i];
      fft.forward(seg, spec);
      for (int f = 0; f < bins; ++f) {
        const bool edge = f == 0 || (n % 2 == 0 && f == n / 2);
        const double scale = (edge ? 1.0 : 2.0) / n;
        out.at(2 * c, f, k) = scale * spec[f].real();
        out.at(2 * c + 1, f, k) = edge ? 0.0 : scale * spec[f].imag();
      }
    }
  }
  return out;
}

std::vector<std::size_t> segment_offsets(std::size_t length, const StftConfig& cfg,
                                         SegmentMode mode, std::uint64_t seed) {
  cfg.validate();
  const std::size_t seg = cfg.segment_samples();
  if (length < seg)
    throw DataError("input of " + std::to_string(length) + " samples is shorter than one " +
                    std::to_string(seg) + "-sample segment");
  const std::size_t count = length / seg;
  std::vector<std::size_t> offsets(count);
  if (mode == SegmentMode::kDeterministic) {
    for (std::size_t i = 0; i < count; ++i) offsets[i] = i * seg;
  } else {
    Rng rng(seed);
    for (auto& o : offsets) o = rng.index(length - seg + 1);
  }
  return offsets;
}

std::vector<Waveform> segment(const Waveform& w, const StftConfig& cfg, SegmentMode mode,
                              std::uint64_t seed) {
  std::vector<Waveform> out;
  for (std::size_t off : segment_offsets(w.size(), cfg, mode, seed))
    out.push_back(w.slice(off, cfg.segment_samples()));
  return out;
}

}  // namespace colddiff
