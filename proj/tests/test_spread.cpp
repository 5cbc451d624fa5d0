#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "echohide/error.hpp"
#include "echohide/metrics.hpp"
#include "echohide/spread.hpp"

using namespace echohide;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> noise(std::size_t n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

// noise with its component along s removed, then c * s added: s'x = c N
std::vector<double> host_with_projection(const SSKey& s, double c, std::uint64_t seed) {
  auto x = noise(s.size(), seed, 0.2);
  const double n = static_cast<double>(s.size());
  const double p = dot(x, s.chips) / n;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += (c - p) * s.chips[i];
  return x;
}

}  // namespace

TEST_CASE("keys are +-1 with s's = N") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto k = make_ss_key(600, seed);
    REQUIRE(k.size() == 600);
    for (double c : k.chips) CHECK(std::abs(c) == 1.0);
    CHECK(dot(k.chips, k.chips) == 600.0);
  }
  CHECK(frame_key(600, 3, 0).chips != frame_key(600, 3, 1).chips);
  CHECK(frame_key(600, 3, 5).chips == frame_key(600, 3, 5).chips);
}

TEST_CASE("standard embed on a silent frame adds A s") {
  const auto k = make_ss_key(600, 1);
  const std::vector<double> z(600, 0.0);
  const SSParams p{0.01, -1.0, false};
  const auto y1 = ss_embed_frame(z, k, 1, p);
  const auto y0 = ss_embed_frame(z, k, 0, p);
  for (std::size_t i = 0; i < 600; ++i) {
    CHECK(y1[i] == 0.01 * k.chips[i]);
    CHECK(y0[i] == -0.01 * k.chips[i]);
  }
}

TEST_CASE("improved embed cancels the host at k = 1/N") {
  const SSParams p{0.005, -1.0, true};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto k = make_ss_key(600, seed);
    const auto x = noise(600, seed + 1000, 0.5);
    for (std::uint8_t b : {0, 1}) {
      const auto y = ss_embed_frame_unclamped(x, k, b, p);
      const double expect = 0.005 * (b ? 1.0 : -1.0) * 600.0;
      CHECK(std::abs(dot(y, k.chips) - expect) <= 1e-9 * std::abs(expect));
    }
  }
  CHECK(p.gain_for(600) == 1.0 / 600.0);
  CHECK(SSParams{0.003, -1.0, true, 0.5}.gain_for(600) == 0.5 / 600.0);
  CHECK(SSParams{0.003, 0.001, true}.gain_for(600) == 0.001);
}

TEST_CASE("zero strength is the identity") {
  const auto k = make_ss_key(600, 2);
  const auto x = noise(600, 3, 0.5);
  CHECK(ss_embed_frame(x, k, 1, SSParams{0.0, 0.0, false}) == x);
  CHECK(ss_embed_frame(x, k, 0, SSParams{0.0, 0.0, true}) == x);
}

TEST_CASE("detector sign rule") {
  const auto k = make_ss_key(600, 4);
  std::vector<double> y(600);
  for (std::size_t i = 0; i < 600; ++i) y[i] = 0.1 * k.chips[i];
  CHECK(ss_detect_frame(y, k) == 1);
  for (auto& v : y) v = -v;
  CHECK(ss_detect_frame(y, k) == 0);
  CHECK(ss_detect_frame(std::vector<double>(600, 0.0), k) == 1);

  const auto x = host_with_projection(k, 0.0, 5);
  CHECK(std::abs(dot(x, k.chips)) <= 1e-12);
  for (double a : {1e-6, 0.001, 0.05})
    CHECK(ss_detect_frame(ss_embed_frame(x, k, 0, SSParams{a, -1.0, false}), k) == 0);
}

TEST_CASE("detection holds whenever A N exceeds the host projection") {
  const double a = 0.005;
  const SSParams p{a, -1.0, false};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto k = make_ss_key(600, seed);
    for (std::uint8_t b : {0, 1}) {
      const double sign = b ? 1.0 : -1.0;
      // host pushing against the bit, at 99% and 101% of A
      const auto inside = host_with_projection(k, -0.99 * sign * a, seed * 7 + b);
      const auto outside = host_with_projection(k, -1.01 * sign * a, seed * 7 + b);
      CHECK(ss_detect_frame(ss_embed_frame(inside, k, b, p), k) == b);
      CHECK(ss_detect_frame(ss_embed_frame(outside, k, b, p), k) != b);
    }
  }
}

TEST_CASE("detection is invariant to positive scaling") {
  const auto k = make_ss_key(600, 9);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto y = noise(600, seed, 0.3);
    const auto b = ss_detect_frame(y, k);
    for (auto& v : y) v *= 3.7;
    CHECK(ss_detect_frame(y, k) == b);
  }
}

TEST_CASE("signal round trips") {
  const FrameSpec fs{600};
  AudioSignal silent{std::vector<double>(600 * 40 + 11, 0.0), 16000};
  const auto bits = random_bits(40, 1);
  CHECK(recovery_rate(bits, ss_extract(ss_embed(silent, bits, 3, SSParams{0.01, -1.0, false}, fs), 3, fs, 40)) == 100.0);

  const auto speech = synth_speech_like(6.0, 16000, 4);
  const auto n = fs.frame_count(speech.size());
  const auto msg = random_bits(n, 2);
  const auto yi = ss_embed(speech, msg, 5, SSParams{0.005, -1.0, true}, fs);
  CHECK(recovery_rate(msg, ss_extract(yi, 5, fs, n)) == 100.0);

  const auto big = synth_speech_like(30.0, 16000, 6);
  const auto nb = fs.frame_count(big.size());
  const auto mb = random_bits(nb, 7);
  const auto ys = quantize_pcm16(ss_embed(big, mb, 8, SSParams{0.005, -1.0, false}, fs));
  CHECK(recovery_rate(mb, ss_extract(ys, 8, fs, nb)) >= 88.0);

  // frames past the message and the tail are untouched
  const auto part = ss_embed(speech, BitString{1, 0}, 5, SSParams{}, fs);
  for (std::size_t i = 1200; i < speech.size(); ++i) CHECK(part.samples[i] == speech.samples[i]);
}

TEST_CASE("spread spectrum errors") {
  const auto k = make_ss_key(600, 1);
  CHECK_THROWS_AS(ss_embed_frame(std::vector<double>(599, 0.0), k, 1, SSParams{}), Error);
  CHECK_THROWS_AS(ss_detect_frame(std::vector<double>(601, 0.0), k), Error);
  CHECK_THROWS_AS(validate_ss_params(SSParams{-0.1, -1.0, false}, 600), Error);
  CHECK_THROWS_AS(validate_ss_params(SSParams{0.01, 1.0, true}, 600), Error);
  CHECK_NOTHROW(validate_ss_params(SSParams{0.01, 2.0 / 600.0, true}, 600));
  const AudioSignal s{std::vector<double>(1200, 0.0), 16000};
  try {
    ss_embed(s, BitString(3, 1), 1, SSParams{}, FrameSpec{600});
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
  CHECK_THROWS_AS(ss_extract(s, 1, FrameSpec{600}, 3), Error);
}
