#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "echohide/attacks.hpp"
#include "echohide/dsp.hpp"
#include "echohide/error.hpp"
#include "echohide/experiment.hpp"
#include "echohide/hybrid.hpp"
#include "echohide/metrics.hpp"

using namespace echohide;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitSkipped = 4;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::config, "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path);
  out << text;
}

// A config file for embed/extract is either a bare scheme document or an
// experiment document with a "scheme" member.
SchemeConfig load_scheme(const std::string& path) {
  if (path.empty()) return SchemeConfig{};
  const json doc = read_json_file(path);
  if (doc.is_object() && doc.contains("scheme")) return scheme_from_json(doc.at("scheme"));
  return scheme_from_json(doc);
}

struct MessageArgs {
  std::string text;
  std::string bits;
  std::size_t random = 0;
};

BitString message_from(const MessageArgs& m, std::uint64_t seed) {
  const int given = !m.text.empty() + !m.bits.empty() + (m.random > 0);
  require(given <= 1, ErrorKind::config, "use only one of --message, --bits, --random");
  if (!m.text.empty()) return bits_from_bytes(m.text);
  if (!m.bits.empty()) return bits_from_string(m.bits);
  if (m.random > 0) return random_bits(m.random, seed);
  return {};
}

double alpha_for(Method method, const SchemeConfig& scheme, std::optional<double> alpha) {
  if (alpha) return *alpha;
  return method == Method::hybrid ? scheme.hybrid.echo_alpha : scheme.echo_alpha;
}

int run_embed(const std::string& in, const std::string& out, const std::string& method_name, const MessageArgs& msg,
              std::optional<double> alpha, const std::string& config, std::uint64_t seed) {
  const SchemeConfig scheme = load_scheme(config);
  const Method method = method_from_string(method_name);
  const AudioSignal cover = read_wav(in);
  BitString message = message_from(msg, seed);
  if (message.empty() && msg.text.empty() && msg.bits.empty())
    message = random_bits(message_capacity(method, scheme, cover.size()), seed);
  const std::size_t cap = message_capacity(method, scheme, cover.size());
  require(message.size() <= cap, ErrorKind::capacity,
          "message has " + std::to_string(message.size()) + " bits, " + method_name + " carries " +
              std::to_string(cap) + " in this signal");
  const AudioSignal stego = embed_method(method, cover, message, scheme, alpha_for(method, scheme, alpha));
  write_wav(stego, out);
  double snr = std::numeric_limits<double>::infinity();
  try {
    snr = snr_db(cover, quantize_pcm16(stego));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infinite_snr) throw;
  }
  json summary{{"method", method_name}, {"bits", message.size()}, {"capacity", cap}, {"out", out},
               {"snr_db", std::isfinite(snr) ? json(snr) : json(nullptr)}, {"message", bits_to_string(message)}};
  std::cout << summary.dump() << '\n';
  return kExitOk;
}

int run_extract(const std::string& in, const std::string& out, const std::string& method_name, std::size_t count,
                bool as_text, std::optional<double> alpha, const std::string& config) {
  const SchemeConfig scheme = load_scheme(config);
  const Method method = method_from_string(method_name);
  const AudioSignal stego = read_wav(in);
  BitString bits;
  if (method == Method::hybrid && count == 0) {
    bits = hybrid_extract(stego, scheme.hybrid_for(alpha_for(method, scheme, alpha)), scheme.primary_key,
                          scheme.constant_matrix);
  } else {
    const std::size_t n = count > 0 ? count : message_capacity(method, scheme, stego.size());
    bits = extract_method(method, stego, n, scheme, alpha_for(method, scheme, alpha));
  }
  write_text(out, (as_text ? bytes_from_bits(bits) : bits_to_string(bits)) + "\n");
  return kExitOk;
}

int run_attack(const std::string& in, const std::string& out, const std::string& spec_text,
               std::optional<std::uint64_t> seed, const std::string& config) {
  AttackSpec spec = parse_attack(spec_text);
  if (seed)
    if (auto* a = std::get_if<Awgn>(&spec)) a->seed = *seed;
  CodecHook hook = CodecHook::from_env();
  if (!config.empty()) {
    const json doc = read_json_file(config);
    if (doc.contains("codec")) {
      const auto& c = doc.at("codec");
      hook.encode = c.value("encode", hook.encode);
      hook.decode = c.value("decode", hook.decode);
      hook.max_align_lag = c.value("max_align_lag", hook.max_align_lag);
    }
  }
  const auto outcome = apply_attack(read_wav(in), spec, hook);
  if (outcome.skipped) {
    std::cerr << "skipped: " << outcome.reason << '\n';
    return kExitSkipped;
  }
  write_wav(outcome.signal, out);
  return kExitOk;
}

int run_eval(const std::string& config, const std::string& out, const std::string& tables,
             std::optional<std::uint64_t> seed) {
  require(!config.empty(), ErrorKind::config, "eval needs --config");
  json doc = read_json_file(config);
  ExperimentConfig cfg = experiment_from_json(doc);
  if (seed) {
    cfg.message_seed = *seed;
    cfg.corpus.synthetic.seed = *seed;
  }
  const auto report = run_experiment(cfg);
  write_text(out, report.to_json().dump(2) + "\n");
  if (!tables.empty()) report.write_tables(tables);
  for (const auto& c : report.cells)
    if (c.skipped) std::cerr << "skipped: " << c.file << ' ' << to_string(c.method) << ' ' << c.attack << ": "
                             << c.reason << '\n';
  return report.all_skipped() ? kExitSkipped : kExitOk;
}

int run_steganalyze(const std::string& train, const std::string& test, const std::string& config,
                    const std::string& out, std::optional<std::uint64_t> seed) {
  SteganalysisResult result;
  if (!train.empty() || !test.empty()) {
    require(!train.empty() && !test.empty(), ErrorKind::config, "steganalyze needs both --train and --test");
    MfccConfig mfcc;
    GmmFitOptions gmm;
    if (!config.empty()) {
      const json doc = read_json_file(config);
      ExperimentConfig probe = experiment_from_json(json{{"steganalysis", doc.value("steganalysis", json::object())}});
      mfcc = probe.steganalysis->mfcc;
      gmm = probe.steganalysis->gmm;
    }
    if (seed) gmm.seed = *seed;
    result = run_steganalysis_dirs(train, test, mfcc, gmm);
  } else {
    require(!config.empty(), ErrorKind::config, "steganalyze needs --train/--test directories or --config");
    const ExperimentConfig cfg = experiment_from_json(read_json_file(config));
    require(cfg.steganalysis.has_value(), ErrorKind::config, "config has no steganalysis section");
    SteganalysisSpec spec = *cfg.steganalysis;
    if (seed) spec.seed = *seed;
    result = run_steganalysis(spec, cfg.scheme, cfg.corpus.synthetic.sample_rate);
  }
  json doc{{"pe", result.pe}, {"degenerate_fit", result.degenerate_fit}};
  write_text(out, doc.dump(2) + "\n");
  for (const auto& [name, degenerate] : result.degenerate_fit)
    if (degenerate) std::cerr << "warning: degenerate features for " << name << '\n';
  return kExitOk;
}

int run_keygen(std::size_t length, std::uint64_t seed, const std::string& out) {
  const auto key = random_primary_key(length, seed);
  const auto matrix = random_constant_matrix(length, dsp::mix_seed(seed, 1));
  validate_key_material(key, matrix);
  json doc{{"primary_key", key.str()}, {"constant_matrix", matrix.str()}};
  write_text(out, doc.dump(2) + "\n");
  return kExitOk;
}

int run_synth(double duration, int rate, std::uint64_t seed, const std::string& out) {
  write_wav(synth_speech_like(duration, rate, seed), out);
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return kExitConfig;
    case ErrorKind::capacity:
      return kExitCapacity;
    default:
      return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"echohide: echo hiding, spread spectrum and hybrid audio steganography"};
  app.require_subcommand(1);

  std::string in, out, config, method = "hybrid", attack_spec, train, test, tables;
  std::uint64_t seed = 1;
  std::optional<double> alpha;
  std::size_t count = 0, key_length = 100;
  bool as_text = false;
  MessageArgs msg;
  double duration = 60.0;
  int rate = 16000;

  auto common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config, "JSON configuration file");
    sub->add_option("--seed", seed, "seed");
    auto* o = sub->add_option("--out", out, "output path");
    if (needs_out) o->required();
  };

  auto* embed = app.add_subcommand("embed", "hide a message in a WAV file");
  embed->add_option("--in", in, "cover WAV")->required();
  embed->add_option("--method", method, "method name")->capture_default_str();
  embed->add_option("--message", msg.text, "message text (8 bits per byte)");
  embed->add_option("--bits", msg.bits, "message as a 0/1 string");
  embed->add_option("--random", msg.random, "random message of N bits (default: fill capacity)");
  embed->add_option("--alpha", alpha, "echo coefficient");
  common(embed, true);

  auto* extract = app.add_subcommand("extract", "recover a message from a WAV file");
  extract->add_option("--in", in, "stego WAV")->required();
  extract->add_option("--method", method, "method name")->capture_default_str();
  extract->add_option("--count", count, "message bits (hybrid reads its header when omitted)");
  extract->add_flag("--text", as_text, "print bytes instead of bits");
  extract->add_option("--alpha", alpha, "echo coefficient");
  common(extract, false);

  auto* attack = app.add_subcommand("attack", "apply a channel attack");
  attack->add_option("--in", in, "input WAV")->required();
  attack->add_option("--attack", attack_spec, "none, awgn:SNR[:SEED], mp3:KBPS, lowpass:HZ, resample:DIV, requantize:BITS")
      ->required();
  auto* attack_seed = attack->add_option("--seed", seed, "AWGN seed");
  attack->add_option("--config", config, "JSON configuration with a codec section");
  attack->add_option("--out", out, "output WAV")->required();

  auto* eval = app.add_subcommand("eval", "run an experiment and write the report");
  auto* eval_seed = eval->add_option("--seed", seed, "overrides the message and corpus seeds");
  eval->add_option("--config", config, "experiment configuration")->required();
  eval->add_option("--out", out, "report JSON (default stdout)");
  eval->add_option("--tables", tables, "directory for flat TSV tables");

  auto* stegan = app.add_subcommand("steganalyze", "GMM steganalysis, per-method P_E");
  stegan->add_option("--train", train, "training tree: cover/ and one directory per method");
  stegan->add_option("--test", test, "test tree with the same layout");
  auto* stegan_seed = stegan->add_option("--seed", seed, "GMM or bench seed");
  stegan->add_option("--config", config, "configuration with a steganalysis section");
  stegan->add_option("--out", out, "result JSON (default stdout)");

  auto* keygen = app.add_subcommand("keygen", "random primary key and constant matrix");
  keygen->add_option("--length", key_length, "key digits")->capture_default_str();
  common(keygen, false);

  auto* synth = app.add_subcommand("synth", "synthetic speech-like WAV");
  synth->add_option("--duration", duration, "seconds")->capture_default_str();
  synth->add_option("--rate", rate, "sample rate")->capture_default_str();
  common(synth, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  auto opt_seed = [&](CLI::Option* o) { return o->count() ? std::optional<std::uint64_t>(seed) : std::nullopt; };
  try {
    if (*embed) return run_embed(in, out, method, msg, alpha, config, seed);
    if (*extract) return run_extract(in, out, method, count, as_text, alpha, config);
    if (*attack) return run_attack(in, out, attack_spec, opt_seed(attack_seed), config);
    if (*eval) return run_eval(config, out, tables, opt_seed(eval_seed));
    if (*stegan) return run_steganalyze(train, test, config, out, opt_seed(stegan_seed));
    if (*keygen) return run_keygen(key_length, seed, out);
    if (*synth) return run_synth(duration, rate, seed, out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
