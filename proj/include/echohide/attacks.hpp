#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "echohide/audio.hpp"
#include "echohide/parallel.hpp"

namespace echohide {

struct NoAttack {};
struct Awgn {
  double snr_db = 30.0;
  std::uint64_t seed = 1;
};
struct Mp3 {
  int kbps = 128;
};
struct LowPass {
  double cutoff_hz = 4000.0;
};
struct Resample {
  int divisor = 2;
};
struct Requantize {
  int bits = 8;
};

using AttackSpec = std::variant<NoAttack, Awgn, Mp3, LowPass, Resample, Requantize>;

/// "none", "awgn:30[:seed]", "mp3:128", "lowpass:4000", "resample:2",
/// "requantize:8".
AttackSpec parse_attack(const std::string& text);
std::string attack_label(const AttackSpec& spec);

inline constexpr std::size_t kFilterTaps = 255;

AudioSignal attack_awgn(const AudioSignal& signal, double snr_db, std::uint64_t seed);
AudioSignal attack_lowpass(const AudioSignal& signal, double cutoff_hz, Exec exec = Exec::parallel);
AudioSignal attack_resample(const AudioSignal& signal, int divisor);
AudioSignal attack_requantize(const AudioSignal& signal, int bits);

/// External codec commands. Placeholders {in}, {out} and {kbps} are
/// substituted with shell-quoted values.
struct CodecHook {
  std::string encode;  // e.g. "lame --quiet -b {kbps} {in} {out}"
  std::string decode;  // e.g. "lame --quiet --decode {in} {out}"
  int max_align_lag = 4096;

  bool configured() const { return !encode.empty() && !decode.empty(); }
  /// Reads ECHOHIDE_MP3_ENCODE / ECHOHIDE_MP3_DECODE.
  static CodecHook from_env();
};

struct AttackOutcome {
  bool skipped = false;
  std::string reason;
  AudioSignal signal;
};

AttackOutcome attack_mp3(const AudioSignal& signal, int kbps, const CodecHook& hook);

/// Lag in [-max_lag, max_lag] maximizing sum_n ref[n] * x[n + lag].
int best_alignment_lag(std::span<const double> reference, std::span<const double> delayed, int max_lag);

AttackOutcome apply_attack(const AudioSignal& signal, const AttackSpec& spec,
                           const CodecHook& hook = CodecHook::from_env());

}  // namespace echohide
