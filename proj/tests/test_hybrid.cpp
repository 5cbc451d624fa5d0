#include <doctest.h>

#include <random>

#include "echohide/error.hpp"
#include "echohide/hybrid.hpp"
#include "echohide/metrics.hpp"

using namespace echohide;

namespace {

const PrimaryKey kKey = random_primary_key(100, 11);
const ConstantMatrix kMatrix = random_constant_matrix(100, 12);

std::size_t modified_frames(const AudioSignal& a, const AudioSignal& b, std::size_t frame_len) {
  std::size_t n = 0;
  for (std::size_t f = 0; f * frame_len + frame_len <= a.size(); ++f)
    for (std::size_t i = 0; i < frame_len; ++i)
      if (a.samples[f * frame_len + i] != b.samples[f * frame_len + i]) {
        ++n;
        break;
      }
  return n;
}

}  // namespace

TEST_CASE("plan selection maps subkey bits") {
  SubKeyStream s{{0, 1, 1, 0}, {0}};
  CHECK(plan_selection(s, 4) ==
        std::vector<FrameMethod>{FrameMethod::ss, FrameMethod::echo, FrameMethod::echo, FrameMethod::ss});
  CHECK(plan_selection(s, 0).empty());
  CHECK(plan_selection(s, 4) == plan_selection(s, 4));
  CHECK_THROWS_AS(plan_selection(s, 5), Error);
}

TEST_CASE("header channel overrides only the header frames") {
  SubKeyStream s{{1, 1, 0, 1, 0, 1}, {0}};
  HybridConfig cfg;
  cfg.header_bits = 3;
  CHECK(frame_plan(cfg, s, 6) == std::vector<FrameMethod>{FrameMethod::ss, FrameMethod::ss, FrameMethod::ss,
                                                          FrameMethod::echo, FrameMethod::ss, FrameMethod::echo});
  cfg.header_channel = HeaderChannel::plan;
  CHECK(frame_plan(cfg, s, 6) == plan_selection(s, 6));
}

TEST_CASE("single-branch plans collapse to the component schemes") {
  const auto x = synth_speech_like(3.0, 16000, 2);
  HybridConfig cfg;
  const auto payload = hybrid_payload(random_bits(40, 3), cfg);
  const std::uint64_t seed = 77;
  const std::vector<FrameMethod> all_ss(payload.size(), FrameMethod::ss);
  const std::vector<FrameMethod> all_echo(payload.size(), FrameMethod::echo);
  CHECK(hybrid_embed_planned(x, payload, all_ss, cfg, seed).samples ==
        ss_embed(x, payload, seed, cfg.ss, cfg.frame).samples);
  CHECK(hybrid_embed_planned(x, payload, all_echo, cfg, seed).samples ==
        embed_echo(x, payload, BasicKernel{cfg.echo_alpha, cfg.delays.d0}, cfg.delays, cfg.frame).samples);
}

TEST_CASE("payload layout") {
  HybridConfig cfg;
  const BitString m{1, 0, 1};
  const auto p = hybrid_payload(m, cfg);
  REQUIRE(p.size() == 35);
  for (std::size_t i = 0; i < 30; ++i) CHECK(p[i] == 0);
  CHECK(p[30] == 1);
  CHECK(p[31] == 1);
  CHECK(p[32] == (1 ^ lfsr_stream(cfg.lfsr, 3)[0]));
  CHECK(hybrid_payload({}, cfg) == BitString(32, 0));
}

TEST_CASE("empty message embeds only the header") {
  const auto x = synth_speech_like(3.0, 16000, 4);
  HybridConfig cfg;
  const auto y = hybrid_embed(x, {}, cfg, kKey, kMatrix);
  CHECK(modified_frames(x, y, cfg.frame.frame_len) == 32);
  for (std::size_t i = 32 * 600; i < x.size(); ++i) CHECK(y.samples[i] == x.samples[i]);
  CHECK(hybrid_extract(y, cfg, kKey, kMatrix).empty());

  HybridConfig bare = cfg;
  bare.header_bits = 0;
  CHECK(hybrid_embed(x, {}, bare, kKey, kMatrix).samples == x.samples);
}

TEST_CASE("round trip recovery and untouched tail") {
  const auto x = synth_speech_like(20.0, 16000, 5);
  HybridConfig cfg;
  const std::size_t n = cfg.frame.frame_count(x.size()) - cfg.header_bits;
  const auto m = random_bits(n - 10, 6);
  const auto y = quantize_pcm16(hybrid_embed(x, m, cfg, kKey, kMatrix));
  const auto got = hybrid_extract(y, cfg, kKey, kMatrix);
  REQUIRE(got.size() == m.size());
  CHECK(recovery_rate(m, got) >= 85.0);
  const auto raw = hybrid_embed(x, m, cfg, kKey, kMatrix);
  for (std::size_t i = (cfg.header_bits + m.size()) * 600; i < x.size(); ++i) CHECK(raw.samples[i] == x.samples[i]);
}

TEST_CASE("sender and receiver derive the same plan") {
  const auto x = synth_speech_like(4.0, 16000, 6);
  HybridConfig cfg;
  const auto m = random_bits(60, 7);
  const auto payload = hybrid_payload(m, cfg);
  const auto plan = frame_plan(cfg, generate_subkeys(kKey, kMatrix, payload.size()), payload.size());
  const auto y = hybrid_embed(x, m, cfg, kKey, kMatrix);
  CHECK(y.samples == hybrid_embed_planned(x, payload, plan, cfg, hybrid_ss_seed(cfg, kKey)).samples);
  const auto dec = hybrid_extract_planned(y, plan, cfg, hybrid_ss_seed(cfg, kKey));
  for (std::size_t t = 0; t < plan.size(); ++t)
    if (plan[t] == FrameMethod::ss) CHECK(dec[t] == payload[t]);
}

TEST_CASE("header round trip over seeded trials") {
  HybridConfig cfg;
  std::mt19937_64 rng(41);
  int exact_length = 0;
  for (int t = 0; t < 50; ++t) {
    const auto x = synth_speech_like(3.0, 16000, 1000 + static_cast<std::uint64_t>(t));
    const std::size_t cap = cfg.frame.frame_count(x.size()) - cfg.header_bits;
    const auto m = random_bits(1 + rng() % cap, rng());
    const auto y = quantize_pcm16(hybrid_embed(x, m, cfg, kKey, kMatrix));
    exact_length += hybrid_extract(y, cfg, kKey, kMatrix).size() == m.size();
  }
  CHECK(exact_length == 50);
}

TEST_CASE("wrong primary key fails") {
  const auto x = synth_speech_like(8.0, 16000, 8);
  HybridConfig cfg;
  const auto m = random_bits(150, 9);
  const auto y = hybrid_embed(x, m, cfg, kKey, kMatrix);
  int failed = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto wrong = random_primary_key(100, 5000 + t);
    try {
      const auto got = hybrid_extract(y, cfg, wrong, kMatrix);
      if (got.size() != m.size()) ++failed;
      else {
        const double r = recovery_rate(m, got);
        failed += r >= 40.0 && r <= 60.0;
      }
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::corrupt_header);
      ++failed;
    }
  }
  CHECK(failed >= 95);
}

TEST_CASE("configuration checks") {
  HybridConfig cfg;
  CHECK_NOTHROW(validate_hybrid(cfg, 16000));
  cfg.frame.frame_len = 800;
  CHECK_NOTHROW(validate_hybrid(cfg, 16000));
  cfg.frame.frame_len = 801;
  CHECK_THROWS_AS(validate_hybrid(cfg, 16000), Error);

  const auto x = synth_speech_like(1.0, 16000, 1);
  HybridConfig def;
  try {
    hybrid_embed(x, random_bits(10, 1), def, kKey, kMatrix);
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
  CHECK_THROWS_AS(hybrid_embed(synth_speech_like(3.0, 16000, 1), {}, def, PrimaryKey::parse(std::string(100, '0')), kMatrix), Error);
}

TEST_CASE("ss seed depends on the primary key") {
  HybridConfig cfg;
  CHECK(hybrid_ss_seed(cfg, kKey) == hybrid_ss_seed(cfg, kKey));
  CHECK(hybrid_ss_seed(cfg, kKey) != hybrid_ss_seed(cfg, random_primary_key(100, 99)));
}
