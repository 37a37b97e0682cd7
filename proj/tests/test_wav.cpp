#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "paratone/rng.hpp"
#include "paratone/wav.hpp"

using namespace paratone;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const char* name) {
  return (fs::temp_directory_path() / name).string();
}

void write_raw(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("wav round trip preserves fixed-point scaling") {
  Waveform w;
  w.sample_rate = 22050;
  w.samples = {0.0, 0.5, -0.5, 32767.0 / 32768.0};
  const std::string path = temp_path("paratone_roundtrip.wav");
  write_wav(w, path);
  const Waveform r = read_wav(path);
  REQUIRE(r.sample_rate == 22050);
  REQUIRE(r.samples.size() == 4);
  CHECK(r.samples[0] == 0.0);
  CHECK(r.samples[1] == 0.5);
  CHECK(r.samples[2] == -0.5);
  CHECK(r.samples[3] == Catch::Approx(32767.0 / 32768.0).margin(1e-12));
  fs::remove(path);
}

TEST_CASE("quantization clamps and rounds half away from zero") {
  CHECK(quantize_sample(1.0) == 32767);
  CHECK(quantize_sample(0.25) == 8192);
  CHECK(quantize_sample(-1.0) == -32768);
  CHECK(quantize_sample(2.0) == 32767);
  CHECK(quantize_sample(0.5 / 32768.0) == 1);  // exact half rounds away
}

TEST_CASE("wav round trip of random samples within one quantization step") {
  Rng rng(7);
  Waveform w;
  w.sample_rate = 16000;
  for (int i = 0; i < 1000; ++i) w.samples.push_back(rng.uniform(-1.0, 1.0));
  const std::string path = temp_path("paratone_quant.wav");
  write_wav(w, path);
  const Waveform r = read_wav(path);
  REQUIRE(r.samples.size() == w.samples.size());
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    CHECK(std::abs(r.samples[i] - w.samples[i]) <= 1.0 / 32768.0);
  }
  fs::remove(path);
}

TEST_CASE("empty waveform writes a valid zero-length data chunk") {
  Waveform w;
  w.sample_rate = 8000;
  const std::string path = temp_path("paratone_empty.wav");
  write_wav(w, path);
  CHECK(fs::file_size(path) == 44);
  const Waveform r = read_wav(path);
  CHECK(r.samples.empty());
  CHECK(r.sample_rate == 8000);
  fs::remove(path);
}

TEST_CASE("truncated data chunk raises MalformedHeader") {
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(100, 0.25);
  const std::string path = temp_path("paratone_trunc.wav");
  write_wav(w, path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  write_raw(path, bytes.substr(0, bytes.size() - 50));
  try {
    read_wav(path);
    FAIL("expected MalformedHeader");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedHeader);
  }
  fs::remove(path);
}

TEST_CASE("non-wav and unsupported formats raise typed errors") {
  const std::string path = temp_path("paratone_bad.wav");
  write_raw(path, "definitely not a riff file");
  try {
    read_wav(path);
    FAIL("expected MalformedHeader");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedHeader);
  }

  // Stereo header: patch the channel count of a valid file.
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(10, 0.0);
  write_wav(w, path);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  bytes[22] = 2;  // channels
  write_raw(path, bytes);
  try {
    read_wav(path);
    FAIL("expected UnsupportedFormat");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedFormat);
  }
  fs::remove(path);
}
