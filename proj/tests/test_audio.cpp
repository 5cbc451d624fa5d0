#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "echohide/audio.hpp"
#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

using namespace echohide;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "echohide_test_audio";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void put16(std::vector<unsigned char>& b, unsigned v) {
  b.push_back(v & 0xFF);
  b.push_back((v >> 8) & 0xFF);
}
void put32(std::vector<unsigned char>& b, unsigned v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

// Hand-rolled RIFF writer so reading is checked against an independent encoder.
void write_raw_wav(const fs::path& p, int channels, int bits, int format, const std::vector<int>& data) {
  std::vector<unsigned char> body;
  for (int v : data) {
    if (bits == 16) put16(body, static_cast<unsigned>(v) & 0xFFFF);
    else body.push_back(static_cast<unsigned char>(v));
  }
  std::vector<unsigned char> b{'R', 'I', 'F', 'F'};
  put32(b, static_cast<unsigned>(36 + body.size()));
  for (char c : std::string("WAVEfmt ")) b.push_back(static_cast<unsigned char>(c));
  put32(b, 16);
  put16(b, static_cast<unsigned>(format));
  put16(b, static_cast<unsigned>(channels));
  put32(b, 16000);
  put32(b, static_cast<unsigned>(16000 * channels * bits / 8));
  put16(b, static_cast<unsigned>(channels * bits / 8));
  put16(b, static_cast<unsigned>(bits));
  for (char c : std::string("data")) b.push_back(static_cast<unsigned char>(c));
  put32(b, static_cast<unsigned>(body.size()));
  b.insert(b.end(), body.begin(), body.end());
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::parameter;
}

}  // namespace

TEST_CASE("bit helpers") {
  CHECK(bits_to_string(bits_from_string("0110")) == "0110");
  CHECK(bits_from_bytes("A") == bits_from_string("01000001"));
  CHECK(bytes_from_bits(bits_from_string("0100000101")) == "A");
  CHECK(random_bits(64, 3) == random_bits(64, 3));
  CHECK(random_bits(64, 3) != random_bits(64, 4));
}

TEST_CASE("pcm16 scaling") {
  CHECK(to_pcm16(0.0) == 0);
  CHECK(to_pcm16(1.5) == 32767);
  CHECK(to_pcm16(1.0) == 32767);
  CHECK(to_pcm16(-1.0) == -32768);
  CHECK(to_pcm16(-3.0) == -32768);
  CHECK(from_pcm16(32767) == 32767.0 / 32768.0);
  CHECK(from_pcm16(-32768) == -1.0);
}

TEST_CASE("wav write stores clamped rounded integers") {
  const auto p = temp_path("stored.wav");
  AudioSignal s{{0.0, 1.5, -1.0, 0.5}, 16000};
  write_wav(s, p);
  const auto bytes = read_bytes(p);
  REQUIRE(bytes.size() == 44 + 8);
  auto at = [&](std::size_t i) {
    return static_cast<std::int16_t>(bytes[44 + 2 * i] | (bytes[44 + 2 * i + 1] << 8));
  };
  CHECK(at(0) == 0);
  CHECK(at(1) == 32767);
  CHECK(at(2) == -32768);
  CHECK(at(3) == 16384);
}

TEST_CASE("wav round trip within one quantization step and idempotent") {
  const auto p = temp_path("rt.wav");
  const auto x = synth_speech_like(0.5, 16000, 9);
  write_wav(x, p);
  const auto y = read_wav(p);
  REQUIRE(y.size() == x.size());
  CHECK(y.sample_rate == 16000);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x.samples[i] - y.samples[i]) <= 1.0 / 32768.0);
  write_wav(y, p);
  CHECK(read_wav(p).samples == y.samples);
  CHECK(quantize_pcm16(x).samples == y.samples);
}

TEST_CASE("wav reader scaling, stereo downmix and errors") {
  const auto p = temp_path("raw.wav");
  write_raw_wav(p, 1, 16, 1, {32767, -32768, 0});
  auto s = read_wav(p);
  CHECK(s.samples == std::vector<double>{32767.0 / 32768.0, -1.0, 0.0});

  write_raw_wav(p, 2, 16, 1, {1000, 3000, -200, 200});
  s = read_wav(p);
  REQUIRE(s.size() == 2);
  CHECK(s.samples[0] == doctest::Approx(2000.0 / 32768.0));
  CHECK(s.samples[1] == doctest::Approx(0.0));

  write_raw_wav(p, 1, 8, 1, {1, 2, 3, 4});
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::format);
  write_raw_wav(p, 1, 16, 3, {1, 2});
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::format);

  write_raw_wav(p, 1, 16, 1, {1, 2, 3, 4, 5, 6});
  auto bytes = read_bytes(p);
  bytes.resize(bytes.size() - 5);
  std::ofstream(p, std::ios::binary | std::ios::trunc).write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::io);

  CHECK(kind_of([&] { read_wav(temp_path("missing.wav")); }) == ErrorKind::io);
  CHECK(kind_of([&] { write_wav(AudioSignal{{0.0}, 16000}, temp_path("no/such/dir/x.wav")); }) == ErrorKind::io);
}

TEST_CASE("framing counts and truncation") {
  FrameSpec spec{600};
  AudioSignal a{std::vector<double>(1200, 0.1), 16000};
  CHECK(frame_signal(a, spec).frames.size() == 2);
  AudioSignal b{std::vector<double>(1300, 0.1), 16000};
  const auto fb = frame_signal(b, spec);
  CHECK(fb.frames.size() == 2);
  CHECK(fb.tail.size() == 100);
  AudioSignal big{std::vector<double>(6000000, 0.0), 16000};
  CHECK(frame_signal(big, spec).frames.size() == 10000);
  AudioSignal tiny{std::vector<double>(599, 0.0), 16000};
  CHECK(kind_of([&] { frame_signal(tiny, spec); }) == ErrorKind::capacity);
}

TEST_CASE("assemble inverts framing") {
  const auto x = synth_speech_like(0.2, 16000, 5);
  const auto f = frame_signal(x, FrameSpec{600});
  const auto y = assemble_frames(f.frames, f.tail, f.sample_rate);
  CHECK(y.samples == x.samples);

  const std::vector<double> tail{0.1, 0.2};
  CHECK(assemble_frames({}, tail, 16000).samples == tail);
  std::vector<std::vector<double>> two(2, std::vector<double>(600, 0.0));
  CHECK(assemble_frames(two, std::vector<double>(100, 0.0), 16000).size() == 1300);
  two[1].resize(599);
  CHECK(kind_of([&] { assemble_frames(two, {}, 16000); }) == ErrorKind::shape);
}

TEST_CASE("synthetic speech generator") {
  const auto a = synth_speech_like(1.0, 16000, 42);
  const auto b = synth_speech_like(1.0, 16000, 42);
  CHECK(a.samples == b.samples);
  CHECK(a.size() == 16000);
  double peak = 0;
  for (double v : a.samples) peak = std::max(peak, std::abs(v));
  CHECK(std::abs(peak - 0.9) <= 1e-9);
  CHECK(synth_speech_like(1.0, 16000, 43).samples != a.samples);

  // Band occupancy measured at a rate whose Nyquist lies well above 8 kHz.
  const auto w = synth_speech_like(1.0, 44100, 7);
  const auto X = dsp::fft_real(w.samples);
  double total = 0, band = 0;
  for (std::size_t k = 0; k <= X.size() / 2; ++k) {
    const double f = static_cast<double>(k) * 44100.0 / static_cast<double>(X.size());
    const double p = std::norm(X[k]);
    total += p;
    if (f <= 8000.0) band += p;
  }
  CHECK(band / total > 0.99);
}

TEST_CASE("signal validation") {
  CHECK_THROWS_AS(AudioSignal({{0.0}, 0}).validate(), Error);
  CHECK_THROWS_AS(AudioSignal({{NAN}, 16000}).validate(), Error);
  CHECK_NOTHROW(AudioSignal({{0.5}, 16000}).validate());
}
