// Copyright 2026 The colddiff Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "colddiff/wav_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "colddiff/error.hpp"

namespace colddiff {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AudioData read_wav(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  const std::string where = path.string() + ": ";
  if (n < 12 || std::memcmp(b, "RIFF", 4) != 0 || std::memcmp(b + 8, "WAVE", 4) != 0)
    throw DataError(where + "not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  for (std::size_t pos = 12; pos + 8 <= n;) {
    const std::uint32_t size = le32(b + pos + 4);
    const unsigned char* body = b + pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, n - pos - 8);
    if (std::memcmp(b + pos, "fmt ", 4) == 0) {
      if (avail < 16) throw DataError(where + "truncated fmt chunk");
      format = le16(body);
      channels = le16(body + 2);
      rate = le32(body + 4);
      bits = le16(body + 14);
      if (format == kFormatExtensible) {
        if (avail < 26) throw DataError(where + "truncated extensible fmt chunk");
        format = le16(body + 24);
      }
    } else if (std::memcmp(b + pos, "data", 4) == 0) {
      data = body;
      data_size = avail;
    }
    pos += 8 + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw DataError(where + "missing fmt chunk");
  if (!data) throw DataError(where + "missing data chunk");

  const bool pcm = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool flt = format == kFormatFloat && bits == 32;
  if (!pcm && !flt)
    throw DataError(where + "unsupported sample format (" + std::to_string(format) + ", " +
                    std::to_string(bits) + " bit)");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  AudioData out;
  out.sample_rate = rate;
  out.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (i * channels + c) * width;
      double v = 0.0;
      if (flt) {
        const std::uint32_t u = le32(p);
        float f;
        std::memcpy(&f, &u, 4);
        v = f;
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(le16(p)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 | std::int32_t(p[2]) << 16;
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(le32(p)) / 2147483648.0;
      }
      if (!std::isfinite(v)) throw DataError(where + "non-finite sample");
      out.channels[c][i] = v;
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  std::filesystem::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_wav(const std::filesystem::path& path, const AudioData& audio) {
  const std::size_t channels = audio.channels.size();
  require(channels > 0, "write_wav: no channels");
  const std::size_t frames = audio.frames();
  for (const auto& ch : audio.channels)
    require(ch.size() == frames, "write_wav: ragged channels");
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * channels * 4);

  std::string s;
  s.reserve(44 + data_size);
  s += "RIFF";
  put32(s, 36 + data_size);
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, kFormatFloat);
  put16(s, static_cast<std::uint16_t>(channels));
  put32(s, rate);
  put32(s, rate * static_cast<std::uint32_t>(channels) * 4);
  put16(s, static_cast<std::uint16_t>(channels * 4));
  put16(s, 32);
  s += "data";
  put32(s, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const float f = static_cast<float>(audio.channels[c][i]);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put32(s, u);
    }
  }
  write_file_atomic(path, s);
}

Waveform read_stereo_wav(const std::filesystem::path& path, double expected_rate) {
  AudioData a = read_wav(path);
  if (a.channels.size() != 2)
    throw DataError(path.string() + ": expected stereo, found " +
                    std::to_string(a.channels.size()) + " channel(s)");
  if (expected_rate > 0.0 && a.sample_rate != expected_rate)
    throw DataError(path.string() + ": sample rate " + std::to_string(a.sample_rate) +
                    " Hz does not match pipeline rate " + std::to_string(expected_rate) +
                    " Hz (resampling is not supported)");
  return Waveform::from_channels(std::move(a.channels), a.sample_rate);
}

void write_stereo_wav(const std::filesystem::path& path, const Waveform& w) {
  AudioData a;
  a.sample_rate = w.sample_rate();
  for (int c = 0; c < 2; ++c) a.channels.emplace_back(w.channel(c).begin(), w.channel(c).end());
  write_wav(path, a);
}

}  // namespace colddiff
