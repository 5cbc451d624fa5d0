#include "echohide/attacks.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::parameter, "attack '" + context + "': bad number '" + s + "'");
}

int parse_int(const std::string& s, const std::string& context) {
  const double v = parse_number(s, context);
  require(v == std::floor(v) && std::abs(v) < 1e9, ErrorKind::parameter,
          "attack '" + context + "': expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_kbps(int kbps) {
  require(kbps == 64 || kbps == 96 || kbps == 128, ErrorKind::parameter, "mp3: kbps must be 64, 96 or 128");
}
void check_divisor(int divisor) {
  require(divisor == 2 || divisor == 4, ErrorKind::parameter, "resample: divisor must be 2 or 4");
}
void check_bits(int bits) {
  require(bits >= 2 && bits <= 16, ErrorKind::parameter, "requantize: bits must be in 2..16");
}
}  // namespace

AttackSpec parse_attack(const std::string& text) {
  const auto parts = split(text, ':');
  require(!parts.empty(), ErrorKind::parameter, "empty attack string");
  const std::string& name = parts[0];
  auto arg = [&](std::size_t i, const char* fallback) { return parts.size() > i ? parts[i] : std::string(fallback); };
  if (name == "none" || name == "identity") {
    require(parts.size() == 1, ErrorKind::parameter, "attack 'none' takes no arguments");
    return NoAttack{};
  }
  if (name == "awgn") {
    require(parts.size() <= 3, ErrorKind::parameter, "awgn: expected awgn:SNR[:SEED]");
    const double snr = parse_number(arg(1, "30"), text);
    require(std::isfinite(snr), ErrorKind::parameter, "awgn: SNR must be finite; use 'none' for no noise");
    const double seed = parse_number(arg(2, "1"), text);
    require(seed >= 0 && seed == std::floor(seed), ErrorKind::parameter, "awgn: seed must be a non-negative integer");
    return Awgn{snr, static_cast<std::uint64_t>(seed)};
  }
  require(parts.size() <= 2, ErrorKind::parameter, "attack '" + text + "': too many arguments");
  if (name == "mp3") {
    const int kbps = parse_int(arg(1, "128"), text);
    check_kbps(kbps);
    return Mp3{kbps};
  }
  if (name == "lowpass") {
    const double cutoff = parse_number(arg(1, "4000"), text);
    require(cutoff > 0.0 && std::isfinite(cutoff), ErrorKind::parameter, "lowpass: cutoff must be positive");
    return LowPass{cutoff};
  }
  if (name == "resample") {
    const int div = parse_int(arg(1, "2"), text);
    check_divisor(div);
    return Resample{div};
  }
  if (name == "requantize") {
    const int bits = parse_int(arg(1, "8"), text);
    check_bits(bits);
    return Requantize{bits};
  }
  fail(ErrorKind::parameter, "unknown attack '" + name + "'");
}

std::string attack_label(const AttackSpec& spec) {
  return std::visit(overloaded{
                        [](const NoAttack&) { return std::string("none"); },
                        [](const Awgn& a) { return "awgn:" + fmt_number(a.snr_db); },
                        [](const Mp3& a) { return "mp3:" + std::to_string(a.kbps); },
                        [](const LowPass& a) { return "lowpass:" + fmt_number(a.cutoff_hz); },
                        [](const Resample& a) { return "resample:" + std::to_string(a.divisor); },
                        [](const Requantize& a) { return "requantize:" + std::to_string(a.bits); },
                    },
                    spec);
}

AudioSignal attack_awgn(const AudioSignal& signal, double snr_db, std::uint64_t seed) {
  require(std::isfinite(snr_db), ErrorKind::parameter, "awgn: SNR must be finite");
  const double p_signal = dsp::energy(signal.samples);
  require(p_signal > 0.0, ErrorKind::degenerate, "awgn: silent signal");
  std::mt19937_64 rng(dsp::mix_seed(seed, 0xA3C9));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(signal.size());
  for (auto& v : noise) v = normal(rng);
  const double p_noise = dsp::energy(noise);
  const double scale = p_noise > 0.0 ? std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0))) : 0.0;
  AudioSignal out = signal;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += scale * noise[i];
  return out;
}

AudioSignal attack_lowpass(const AudioSignal& signal, double cutoff_hz, Exec exec) {
  require(cutoff_hz > 0.0 && cutoff_hz < signal.sample_rate / 2.0, ErrorKind::parameter,
          "lowpass: cutoff must lie in (0, fs/2)");
  const auto taps = dsp::design_lowpass(cutoff_hz, signal.sample_rate, kFilterTaps);
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples = dsp::filter_zero_phase(signal.samples, taps, exec);
  return out;
}

AudioSignal attack_resample(const AudioSignal& signal, int divisor) {
  check_divisor(divisor);
  const double cutoff = 0.45 * signal.sample_rate / divisor;
  const auto taps = dsp::design_lowpass(cutoff, signal.sample_rate, kFilterTaps);
  const auto smooth = dsp::filter_zero_phase(signal.samples, taps);
  const auto div = static_cast<std::size_t>(divisor);
  std::vector<double> stuffed(signal.size(), 0.0);
  for (std::size_t i = 0; i < signal.size(); i += div) stuffed[i] = smooth[i] * divisor;
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples = dsp::filter_zero_phase(stuffed, taps);
  return out;
}

AudioSignal attack_requantize(const AudioSignal& signal, int bits) {
  check_bits(bits);
  const double levels = std::ldexp(1.0, bits - 1);
  const double q = 1.0 / levels;
  AudioSignal out = signal;
  for (auto& v : out.samples) {
    const double k = std::clamp(std::round(v / q), -levels, levels - 1.0);
    v = k * q;
  }
  return out;
}

CodecHook CodecHook::from_env() {
  CodecHook hook;
  if (const char* e = std::getenv("ECHOHIDE_MP3_ENCODE")) hook.encode = e;
  if (const char* d = std::getenv("ECHOHIDE_MP3_DECODE")) hook.decode = d;
  return hook;
}

namespace {
std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string substitute(std::string tmpl, const std::string& in, const std::string& out, int kbps) {
  auto replace_all = [&](const std::string& key, const std::string& value) {
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size()))
      tmpl.replace(pos, key.size(), value);
  };
  replace_all("{in}", shell_quote(in));
  replace_all("{out}", shell_quote(out));
  replace_all("{kbps}", std::to_string(kbps));
  return tmpl;
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "echohide-XXXXXX").string();
    require(::mkdtemp(pattern.data()) != nullptr, ErrorKind::io, "mp3: cannot create a temporary directory");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

int run_shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
}
}  // namespace

int best_alignment_lag(std::span<const double> reference, std::span<const double> delayed, int max_lag) {
  require(max_lag >= 0, ErrorKind::parameter, "alignment: negative max lag");
  if (reference.empty() || delayed.empty()) return 0;
  std::size_t n = 1;
  while (n < reference.size() + delayed.size()) n <<= 1;
  std::vector<dsp::Complex> r(n), x(n);
  std::copy(reference.begin(), reference.end(), r.begin());
  std::copy(delayed.begin(), delayed.end(), x.begin());
  auto R = dsp::fft(r);
  auto X = dsp::fft(x);
  for (std::size_t k = 0; k < n; ++k) X[k] *= std::conj(R[k]);
  const auto corr = dsp::ifft(X);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  const int hi = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_lag), delayed.size() - 1));
  const int lo = -static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_lag), reference.size() - 1));
  for (int lag = lo; lag <= hi; ++lag) {
    const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag) : n - static_cast<std::size_t>(-lag);
    const double v = corr[idx].real();
    if (v > best_val || (v == best_val && std::abs(lag) < std::abs(best))) {
      best_val = v;
      best = lag;
    }
  }
  return best;
}

AttackOutcome attack_mp3(const AudioSignal& signal, int kbps, const CodecHook& hook) {
  check_kbps(kbps);
  AttackOutcome outcome;
  if (!hook.configured()) {
    outcome.skipped = true;
    outcome.reason = "mp3 codec not configured (set ECHOHIDE_MP3_ENCODE and ECHOHIDE_MP3_DECODE)";
    return outcome;
  }
  TempDir dir;
  const auto wav_in = (dir.path() / "in.wav").string();
  const auto mp3 = (dir.path() / "coded.mp3").string();
  const auto wav_out = (dir.path() / "out.wav").string();
  write_wav(signal, wav_in);
  if (int rc = run_shell(substitute(hook.encode, wav_in, mp3, kbps)); rc != 0) {
    outcome.skipped = true;
    outcome.reason = "mp3 encoder failed with status " + std::to_string(rc);
    return outcome;
  }
  if (int rc = run_shell(substitute(hook.decode, mp3, wav_out, kbps)); rc != 0) {
    outcome.skipped = true;
    outcome.reason = "mp3 decoder failed with status " + std::to_string(rc);
    return outcome;
  }
  const AudioSignal decoded = read_wav(wav_out);
  require(decoded.sample_rate == signal.sample_rate, ErrorKind::format,
          "mp3: decoder changed the sample rate to " + std::to_string(decoded.sample_rate));
  const int lag = best_alignment_lag(signal.samples, decoded.samples, hook.max_align_lag);
  outcome.signal.sample_rate = signal.sample_rate;
  outcome.signal.samples.assign(signal.size(), 0.0);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const auto j = static_cast<std::ptrdiff_t>(i) + lag;
    if (j >= 0 && j < static_cast<std::ptrdiff_t>(decoded.size()))
      outcome.signal.samples[i] = decoded.samples[static_cast<std::size_t>(j)];
  }
  return outcome;
}

AttackOutcome apply_attack(const AudioSignal& signal, const AttackSpec& spec, const CodecHook& hook) {
  return std::visit(overloaded{
                        [&](const NoAttack&) { return AttackOutcome{false, {}, signal}; },
                        [&](const Awgn& a) { return AttackOutcome{false, {}, attack_awgn(signal, a.snr_db, a.seed)}; },
                        [&](const Mp3& a) { return attack_mp3(signal, a.kbps, hook); },
                        [&](const LowPass& a) { return AttackOutcome{false, {}, attack_lowpass(signal, a.cutoff_hz)}; },
                        [&](const Resample& a) { return AttackOutcome{false, {}, attack_resample(signal, a.divisor)}; },
                        [&](const Requantize& a) { return AttackOutcome{false, {}, attack_requantize(signal, a.bits)}; },
                    },
                    spec);
}

}  // namespace echohide
