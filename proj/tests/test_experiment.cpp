#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "echohide/error.hpp"
#include "echohide/experiment.hpp"
#include "echohide/metrics.hpp"

using namespace echohide;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.corpus.synthetic = SyntheticCorpus{2, 3.0, 16000, 5};
  cfg.methods = {Method::echo_proposed_extract, Method::ss, Method::hybrid};
  cfg.alphas = {0.2, 0.4};
  cfg.attacks = {NoAttack{}, Awgn{30, 1}};
  cfg.codec = CodecHook{};
  return cfg;
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

TEST_CASE("recovery rate arithmetic") {
  const auto a = random_bits(100, 1);
  CHECK(recovery_rate(a, a) == 100.0);
  BitString inv(a);
  for (auto& b : inv) b ^= 1;
  CHECK(recovery_rate(a, inv) == 0.0);
  BitString half(a);
  for (std::size_t i = 0; i < 50; ++i) half[i] ^= 1;
  CHECK(recovery_rate(a, half) == 50.0);
  BitString nc(10000, 0), got(10000, 0);
  for (std::size_t i = 8791; i < 10000; ++i) got[i] = 1;
  CHECK(recovery_rate(nc, got) == doctest::Approx(87.91).epsilon(1e-12));
  const auto b = random_bits(100, 2);
  CHECK(recovery_rate(a, b) == recovery_rate(b, a));
  CHECK(kind_of([&] { recovery_rate(a, BitString(99, 0)); }) == ErrorKind::shape);
  CHECK(kind_of([&] { recovery_rate({}, {}); }) == ErrorKind::shape);
}

TEST_CASE("snr arithmetic") {
  const AudioSignal c{{1.0, -1.0, 1.0, -1.0}, 16000};
  CHECK(snr_db(c, AudioSignal{{2.0, -2.0, 2.0, -2.0}, 16000}) == doctest::Approx(0.0));
  CHECK(snr_db(c, AudioSignal{{1.1, -0.9, 1.1, -0.9}, 16000}) == doctest::Approx(20.0));
  CHECK(kind_of([&] { snr_db(c, c); }) == ErrorKind::infinite_snr);
  double prev = -INFINITY;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    AudioSignal s = c;
    s.samples[0] += eps;
    const double v = snr_db(c, s);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("method names round trip") {
  for (auto m : all_methods()) CHECK(method_from_string(to_string(m)) == m);
  CHECK(all_methods().size() == 9);
  CHECK(kind_of([] { method_from_string("nope"); }) == ErrorKind::config);
}

TEST_CASE("scheme json round trip and strict keys") {
  SchemeConfig s;
  s.echo_alpha = 0.25;
  s.np.alpha_nb = 0.2;
  s.ss_improved.rejection = 0.7;
  const auto doc = scheme_to_json(s);
  const auto back = scheme_from_json(doc);
  CHECK(scheme_to_json(back) == doc);
  auto bad = doc;
  bad["bogus"] = 1;
  CHECK(kind_of([&] { scheme_from_json(bad); }) == ErrorKind::config);
  CHECK(kind_of([&] { scheme_from_json(nlohmann::json{{"np", {{"spacing", 9}}}}); }) == ErrorKind::config);
}

TEST_CASE("experiment config parsing") {
  const auto cfg = experiment_from_json(nlohmann::json::parse(R"({
    "corpus": {"synthetic": {"files": 2, "duration_s": 2.0, "seed": 3}},
    "methods": ["echo_original_extract", "hybrid"],
    "alphas": [0.1, 0.3],
    "attacks": ["none", "lowpass:4000", "mp3:128"],
    "message": {"length": 10, "seed": 4}
  })"));
  CHECK(cfg.methods.size() == 2);
  CHECK(cfg.attacks.size() == 3);
  CHECK(cfg.message_length == 10);
  CHECK(kind_of([] { experiment_from_json(nlohmann::json::parse(R"({"methods": []})")); }) == ErrorKind::config);
  CHECK(kind_of([] { experiment_from_json(nlohmann::json::parse(R"({"methods": ["ss"], "alphas": [1.0]})")); }) == ErrorKind::config);
  CHECK(kind_of([] { experiment_from_json(nlohmann::json::parse(R"({"methods": ["ss"], "extra": 1})")); }) == ErrorKind::config);
  CHECK(kind_of([] { experiment_from_json(nlohmann::json::parse(R"({"methods": ["ss"], "attacks": ["awgn:x"]})")); }) == ErrorKind::config);
}

TEST_CASE("every method round trips on a clean signal") {
  const SchemeConfig s;
  const auto x = quantize_pcm16(synth_speech_like(6.0, 16000, 21));
  for (auto m : all_methods()) {
    const auto cap = message_capacity(m, s, x.size());
    REQUIRE(cap > 0);
    const auto bits = random_bits(cap, 3);
    const auto y = quantize_pcm16(embed_method(m, x, bits, s, 0.3));
    CHECK(y.size() == x.size());
    const double r = recovery_rate(bits, extract_method(m, y, cap, s, 0.3));
    INFO(to_string(m), " ", r);
    CHECK(r >= 60.0);
  }
  CHECK(message_capacity(Method::hybrid, s, x.size()) == s.frame.frame_count(x.size()) - 32);
  CHECK(message_capacity(Method::ss, s, x.size()) == s.frame.frame_count(x.size()));
}

TEST_CASE("zero strength embeddings are identities") {
  SchemeConfig s;
  s.ss.strength_a = 0.0;
  const auto x = synth_speech_like(2.0, 16000, 2);
  const auto bits = random_bits(message_capacity(Method::ss, s, x.size()), 1);
  CHECK(embed_method(Method::ss, x, bits, s, 0.3).samples == x.samples);
  for (auto m : {Method::echo_original_extract, Method::echo_proposed_extract})
    CHECK(embed_method(m, x, bits, s, 0.0).samples == x.samples);
}

TEST_CASE("run experiment is deterministic and complete") {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(a.to_json().dump() == b.to_json().dump());
  // echo and hybrid follow the alpha grid, ss does not
  CHECK(a.cells.size() == 2 * (2 + 1 + 2) * 2);
  for (const auto& c : a.cells) {
    CHECK_FALSE(c.skipped);
    CHECK(c.recovery_rate >= 0.0);
    CHECK(c.recovery_rate <= 100.0);
    if (c.method == Method::ss) CHECK(c.alpha == 0.0);
  }
  CHECK(a.mean_recovery(Method::echo_proposed_extract, 0.4, "none").has_value());
  CHECK(a.mean_snr(Method::ss, 0.0, "none").value() > 20.0);

  const auto dir = fs::temp_directory_path() / "echohide_test_tables";
  fs::remove_all(dir);
  a.write_tables(dir);
  for (const char* f : {"cells.tsv", "recovery.tsv", "snr.tsv"}) CHECK(fs::exists(dir / f));
  CHECK_FALSE(fs::exists(dir / "pe.tsv"));
  std::ifstream in(dir / "cells.tsv");
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == a.cells.size() + 1);
}

TEST_CASE("mp3 cells are skipped without a codec") {
  auto cfg = small_config();
  cfg.methods = {Method::ss};
  cfg.attacks = {Mp3{128}};
  const auto r = run_experiment(cfg);
  CHECK(r.all_skipped());
  const auto doc = r.to_json();
  for (const auto& c : doc["cells"]) {
    CHECK(c["status"] == "skipped");
    CHECK(c["recovery_rate"].is_null());
  }
}

TEST_CASE("corpus loading") {
  CHECK(kind_of([] { load_corpus(CorpusSpec{fs::path("/nonexistent/dir"), {}}); }) == ErrorKind::config);
  const auto dir = fs::temp_directory_path() / "echohide_test_corpus";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(kind_of([&] { load_corpus(CorpusSpec{dir, {}}); }) == ErrorKind::config);
  write_wav(synth_speech_like(0.5, 16000, 2), dir / "b.wav");
  write_wav(synth_speech_like(0.5, 16000, 1), dir / "a.wav");
  const auto c = load_corpus(CorpusSpec{dir, {}});
  REQUIRE(c.size() == 2);
  CHECK(c[0].name == "a");
  const auto s = load_corpus(CorpusSpec{std::nullopt, SyntheticCorpus{3, 0.5, 16000, 9}});
  CHECK(s.size() == 3);
  CHECK(s[2].name == "synth_02");
}

TEST_CASE("cepstral series export") {
  const auto x = synth_speech_like(2.0, 16000, 3);
  const FrameSpec fs{600};
  const auto self = export_cepstral_series(x, x, fs, 2, 1, 301);
  CHECK(self.cover == self.stego);
  CHECK(self.lags.size() == 300);
  CHECK(export_cepstral_series(x, x, fs, 0, 50, 51).cover.size() == 1);
  CHECK(kind_of([&] { export_cepstral_series(x, x, fs, 1000, 1, 10); }) == ErrorKind::parameter);
  CHECK(kind_of([&] { export_cepstral_series(x, x, fs, 0, 10, 700); }) == ErrorKind::parameter);
  CHECK(kind_of([&] { export_cepstral_series(x, x, fs, 0, 10, 10); }) == ErrorKind::parameter);
}

TEST_CASE("echo hiding disturbs the cepstrum more than the hybrid") {
  const SchemeConfig s;
  const auto corpus = load_corpus(CorpusSpec{std::nullopt, SyntheticCorpus{10, 10.0, 16000, 1}});
  int echo_larger = 0;
  for (const auto& [name, x] : corpus) {
    const auto cap_e = message_capacity(Method::echo_proposed_extract, s, x.size());
    const auto cap_h = message_capacity(Method::hybrid, s, x.size());
    const auto ye = embed_method(Method::echo_proposed_extract, x, random_bits(cap_e, 1), s, 0.3);
    const auto yh = embed_method(Method::hybrid, x, random_bits(cap_h, 1), s, 0.3);
    const double de = mean_cepstral_deviation(x, ye, s.frame, 1, 301, s.cepstral);
    const double dh = mean_cepstral_deviation(x, yh, s.frame, 1, 301, s.cepstral);
    echo_larger += de > dh;
  }
  CHECK(echo_larger >= 8);
}
