#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace echohide {

/// Mono PCM carrier. Samples are nominally in [-1, +1]; clamping happens on
/// write and after every embedding step.
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate; }

  /// Throws parameter error on a non-positive rate or non-finite samples.
  void validate() const;
};

struct FrameSpec {
  std::size_t frame_len = 600;

  std::size_t frame_count(std::size_t n_samples) const { return n_samples / frame_len; }
};

/// Sequence over {0, 1}.
using BitString = std::vector<std::uint8_t>;

BitString bits_from_string(std::string_view text);  // "0110" -> {0,1,1,0}
std::string bits_to_string(const BitString& bits);
BitString bits_from_bytes(std::string_view bytes);  // MSB first per byte
std::string bytes_from_bits(const BitString& bits);  // trailing partial byte dropped
BitString random_bits(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// WAV I/O: RIFF/WAVE PCM 16-bit little-endian.

AudioSignal read_wav(const std::filesystem::path& path);
void write_wav(const AudioSignal& signal, const std::filesystem::path& path);

std::int16_t to_pcm16(double amplitude);
inline double from_pcm16(std::int16_t v) { return v / 32768.0; }

/// Rounds every sample to the 16-bit grid, i.e. what survives write_wav/read_wav.
AudioSignal quantize_pcm16(const AudioSignal& signal);

// ---------------------------------------------------------------------------
// Framing

struct FramedSignal {
  std::vector<std::vector<double>> frames;
  std::vector<double> tail;  // trailing partial frame, never embedded into
  int sample_rate = 16000;
};

FramedSignal frame_signal(const AudioSignal& signal, const FrameSpec& spec);
AudioSignal assemble_frames(const std::vector<std::vector<double>>& frames,
                            std::span<const double> tail, int sample_rate);

inline std::span<const double> frame_view(const AudioSignal& signal, const FrameSpec& spec,
                                          std::size_t index) {
  return std::span<const double>(signal.samples).subspan(index * spec.frame_len, spec.frame_len);
}

// ---------------------------------------------------------------------------
// Synthetic speech-like corpus

/// Deterministic speech-like test signal: a slowly amplitude-modulated
/// harmonic series (fundamental drifting within 100-300 Hz) gated by a
/// syllabic envelope with pauses, plus band-limited noise below 7 kHz and a
/// low recording-noise floor. Peak-normalized to 0.9. Per-seed variation of
/// the voice parameters gives a multi-"speaker" corpus.
AudioSignal synth_speech_like(double duration_s, int sample_rate, std::uint64_t seed);

}  // namespace echohide
