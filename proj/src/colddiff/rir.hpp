// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colddiff/util.hpp"
#include "colddiff/waveform.hpp"

namespace colddiff {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

using Vec3 = std::array<double, 3>;

// Shoebox room with one omnidirectional source and microphone.
struct RoomSpec {
  Vec3 dims{6.0, 5.0, 3.0};  // metres
  Vec3 source{2.0, 2.0, 1.5};
  Vec3 mic{4.0, 3.0, 1.5};
  double t60 = 0.5;     // seconds
  int max_order = -1;   // reflection order cap; negative = bounded by length only
  double sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;
  // Refine the Sabine reflection coefficient until the Schroeder T60 of the
  // synthesized response matches `t60`. Off gives the plain Sabine model.
  bool calibrate_t60 = true;

  void validate() const;
  double source_mic_distance() const;
  bool operator==(const RoomSpec&) const = default;
};

// Uniform wall absorption from Sabine's formula, alpha = 24 ln10 V / (c S T60).
double sabine_absorption(const RoomSpec& room);

struct RirSample {
  enum class Source { kSynthetic, kMeasured };

  std::vector<std::vector<double>> taps;  // 1 (mono) or 2 (stereo) channels
  double sample_rate = kDefaultSampleRate;
  Source source = Source::kSynthetic;
  std::optional<RoomSpec> room;  // synthetic provenance
  std::string measured_id;       // measured provenance

  std::size_t length() const { return taps.empty() ? 0 : taps[0].size(); }
  int channels() const { return static_cast<int>(taps.size()); }
  // Throws DataError if empty, non-finite or all zero.
  void validate() const;

  static RirSample from_taps(std::vector<double> taps, double sample_rate = kDefaultSampleRate);
};

// Image-source shoebox RIR (frequency-independent walls, reflection
// coefficient sqrt(1 - alpha), nearest-sample arrivals with 1/(4 pi r)
// spreading). The tap array spans the direct path plus 1.5 * t60 and is then
// truncated after the last tap within 60 dB of the direct path.
// Specular shoebox decays run slower than Sabine predicts in low-absorption
// rooms, so with room.calibrate_t60 the coefficient is rescaled in the log
// domain (a few fixed-point steps) until the measured T60 is within 1%.
// Throws DataError when the requested T60 is infeasible (alpha > 1).
RirSample synth_rir(const RoomSpec& room);

// Loads a measured RIR WAV. Multichannel files are averaged to mono unless
// keep_stereo is set and the file has exactly two channels.
RirSample load_rir(const std::filesystem::path& path, double pipeline_rate,
                   bool keep_stereo = false);

// Schroeder energy decay curve in dB (0 dB at index 0).
std::vector<double> schroeder_curve_db(std::span<const double> taps);

// T60 from the -5 to -25 dB span of the Schroeder curve (linear fit,
// extrapolated to 60 dB). Throws NumericalError without enough decay range.
double measure_t60(std::span<const double> taps, double sample_rate);
double measure_t60(const RirSample& rir);

// Per-channel full linear convolution truncated to the dry length. A mono
// RIR is applied to both channels.
Waveform convolve_rir(const Waveform& dry, const RirSample& rir);

// convolve_rir, then scale so the output RMS equals dry RMS * 10^(gain/20),
// then scale down uniformly if the peak exceeds `peak_ceiling`.
// Throws DataError for a silent dry input.
Waveform render_wet(const Waveform& dry, const RirSample& rir, double wet_gain_db,
                    double peak_ceiling);

double rms(const Waveform& w);
double peak(const Waveform& w);

// Ranges for randomized room draws.
struct RoomRanges {
  Vec3 dims_min{3.0, 3.0, 2.5};
  Vec3 dims_max{10.0, 10.0, 4.0};
  double t60_min = 0.2;
  double t60_max = 1.3;
  double wall_margin = 0.5;
  double source_distance_min = 1.0;
  double source_distance_max = 4.0;
  int max_order = -1;
  bool calibrate_t60 = true;

  void validate() const;
};

// Deterministic draw of a feasible RoomSpec from `ranges`.
RoomSpec draw_room(const RoomRanges& ranges, std::uint64_t seed,
                   double sample_rate = kDefaultSampleRate);

}  // namespace colddiff
