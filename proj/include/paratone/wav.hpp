// RIFF/WAVE I/O, PCM 16-bit signed little-endian, mono only.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "paratone/error.hpp"

namespace paratone {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 0;          // Hz

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

inline Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoFailure, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    raise(ErrorCode::MalformedHeader, "not a RIFF/WAVE file: " + path);
  }

  bool have_fmt = false;
  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size()) {
      raise(ErrorCode::MalformedHeader, "no data chunk in " + path);
    }
    char id[4];
    std::memcpy(id, bytes.data() + pos, 4);
    const std::uint32_t size = detail::read_u32le(bytes.data() + pos + 4);
    pos += 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16 || pos + size > bytes.size()) {
        raise(ErrorCode::MalformedHeader, "truncated fmt chunk in " + path);
      }
      audio_format = detail::read_u16le(bytes.data() + pos);
      channels = detail::read_u16le(bytes.data() + pos + 2);
      rate = detail::read_u32le(bytes.data() + pos + 4);
      bits = detail::read_u16le(bytes.data() + pos + 14);
      have_fmt = true;
      pos += size + (size & 1);
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) {
        raise(ErrorCode::MalformedHeader, "data chunk before fmt in " + path);
      }
      if (audio_format != 1) {
        raise(ErrorCode::UnsupportedFormat, "non-PCM wav: " + path);
      }
      if (channels != 1) {
        raise(ErrorCode::UnsupportedFormat, "expected mono: " + path);
      }
      if (bits != 16) {
        raise(ErrorCode::UnsupportedFormat, "expected 16-bit PCM: " + path);
      }
      if (pos + size > bytes.size() || (size & 1) != 0) {
        raise(ErrorCode::MalformedHeader, "truncated data chunk in " + path);
      }
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      const std::size_t n = size / 2;
      w.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t u = detail::read_u16le(bytes.data() + pos + 2 * i);
        const std::int16_t s = static_cast<std::int16_t>(u);
        w.samples[i] = static_cast<double>(s) / 32768.0;
      }
      return w;
    } else {
      if (pos + size > bytes.size()) {
        raise(ErrorCode::MalformedHeader, "truncated chunk in " + path);
      }
      pos += size + (size & 1);
    }
  }
}

// Clamp to [-1, 1], scale by 32768, round half away from zero.
inline std::int16_t quantize_sample(double x) {
  if (x > 1.0) x = 1.0;
  if (x < -1.0) x = -1.0;
  const long long v = std::llround(x * 32768.0);
  if (v > 32767) return 32767;
  if (v < -32768) return -32768;
  return static_cast<std::int16_t>(v);
}

inline void write_wav(const Waveform& w, const std::string& path) {
  const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_size = 2 * n;
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  detail::put_u32le(out, 36 + data_size);
  out += "WAVE";
  out += "fmt ";
  detail::put_u32le(out, 16);
  detail::put_u16le(out, 1);  // PCM
  detail::put_u16le(out, 1);  // mono
  detail::put_u32le(out, static_cast<std::uint32_t>(w.sample_rate));
  detail::put_u32le(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  detail::put_u16le(out, 2);   // block align
  detail::put_u16le(out, 16);  // bits
  out += "data";
  detail::put_u32le(out, data_size);
  for (double x : w.samples) {
    const std::int16_t s = quantize_sample(x);
    detail::put_u16le(out, static_cast<std::uint16_t>(s));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) raise(ErrorCode::IoFailure, "cannot open for write: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) raise(ErrorCode::IoFailure, "write failed: " + path);
}

}  // namespace paratone
