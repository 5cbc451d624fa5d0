#include "echohide/spread.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

void validate_ss_params(const SSParams& params, std::size_t frame_len) {
  require(frame_len > 0, ErrorKind::parameter, "spread spectrum: frame_len must be positive");
  require(std::isfinite(params.strength_a) && params.strength_a >= 0.0, ErrorKind::parameter,
          "spread spectrum: strength A must be finite and >= 0");
  require(std::isfinite(params.k) && std::isfinite(params.rejection), ErrorKind::parameter,
          "spread spectrum: k must be finite");
  const double k = params.gain_for(frame_len);
  require(!params.improved || (k >= 0.0 && k <= 2.0 / static_cast<double>(frame_len)), ErrorKind::parameter,
          "spread spectrum: improved gain k must lie in [0, 2/N]");
}

SSKey make_ss_key(std::size_t length, std::uint64_t seed) {
  require(length > 0, ErrorKind::parameter, "spread spectrum: key length must be positive");
  std::mt19937_64 rng(dsp::mix_seed(seed, 0x55AA));
  SSKey key;
  key.seed = seed;
  key.chips.resize(length);
  for (auto& c : key.chips) c = (rng() >> 63) ? 1.0 : -1.0;
  return key;
}

SSKey frame_key(std::size_t length, std::uint64_t seed, std::size_t index) {
  return make_ss_key(length, dsp::mix_seed(seed, index));
}

double ss_correlation(std::span<const double> frame, const SSKey& key) {
  require(frame.size() == key.size(), ErrorKind::shape, "spread spectrum: key and frame lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) acc += frame[i] * key.chips[i];
  return acc;
}

std::vector<double> ss_embed_frame_unclamped(std::span<const double> frame, const SSKey& key,
                                             std::uint8_t bit, const SSParams& params) {
  validate_ss_params(params, frame.size());
  const double b = bit ? 1.0 : -1.0;
  double coeff = params.strength_a * b;
  if (params.improved) coeff -= params.gain_for(frame.size()) * ss_correlation(frame, key);
  else require(frame.size() == key.size(), ErrorKind::shape, "spread spectrum: key and frame lengths differ");
  std::vector<double> out(frame.begin(), frame.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeff * key.chips[i];
  return out;
}

std::vector<double> ss_embed_frame(std::span<const double> frame, const SSKey& key, std::uint8_t bit,
                                   const SSParams& params) {
  auto out = ss_embed_frame_unclamped(frame, key, bit, params);
  for (auto& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

std::uint8_t ss_detect_frame(std::span<const double> frame, const SSKey& key) {
  return ss_correlation(frame, key) < 0.0 ? 0 : 1;
}

AudioSignal ss_embed(const AudioSignal& signal, const BitString& bits, std::uint64_t key_seed,
                     const SSParams& params, const FrameSpec& spec) {
  signal.validate();
  validate_ss_params(params, spec.frame_len);
  require(bits.size() <= spec.frame_count(signal.size()), ErrorKind::capacity,
          "ss_embed: message needs " + std::to_string(bits.size()) + " frames, signal has " +
              std::to_string(spec.frame_count(signal.size())));
  AudioSignal out = signal;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto key = frame_key(spec.frame_len, key_seed, i);
    const auto y = ss_embed_frame(frame_view(signal, spec, i), key, bits[i], params);
    std::copy(y.begin(), y.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(i * spec.frame_len));
  }
  return out;
}

BitString ss_extract(const AudioSignal& signal, std::uint64_t key_seed, const FrameSpec& spec,
                     std::size_t n_bits) {
  require(spec.frame_len > 0, ErrorKind::parameter, "ss_extract: frame_len must be positive");
  require(n_bits <= spec.frame_count(signal.size()), ErrorKind::capacity,
          "ss_extract: signal holds fewer than " + std::to_string(n_bits) + " frames");
  BitString bits(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i)
    bits[i] = ss_detect_frame(frame_view(signal, spec, i), frame_key(spec.frame_len, key_seed, i));
  return bits;
}

}  // namespace echohide
