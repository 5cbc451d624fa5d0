#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "echohide/audio.hpp"

namespace echohide {

/// +-1 chip vector, one per frame.
struct SSKey {
  std::vector<double> chips;
  std::uint64_t seed = 0;

  std::size_t size() const { return chips.size(); }
};

struct SSParams {
  double strength_a = 0.005;
  double k = -1.0;  // host-rejection gain; negative selects rejection / N
  bool improved = false;
  double rejection = 1.0;

  double gain_for(std::size_t n) const { return k < 0.0 ? rejection / static_cast<double>(n) : k; }
};

void validate_ss_params(const SSParams& params, std::size_t frame_len);

SSKey make_ss_key(std::size_t length, std::uint64_t seed);
/// Fresh key for frame `index`, derived from (seed, index).
SSKey frame_key(std::size_t length, std::uint64_t seed, std::size_t index);

/// Standard: y = x + A b s.  Improved: y = x + (A b - k s'x) s.
/// b = +1 for bit 1 and -1 for bit 0; output clamped to [-1, +1].
std::vector<double> ss_embed_frame(std::span<const double> frame, const SSKey& key, std::uint8_t bit,
                                   const SSParams& params);
std::vector<double> ss_embed_frame_unclamped(std::span<const double> frame, const SSKey& key,
                                             std::uint8_t bit, const SSParams& params);

double ss_correlation(std::span<const double> frame, const SSKey& key);
/// sign(y's); zero maps to 1.
std::uint8_t ss_detect_frame(std::span<const double> frame, const SSKey& key);

AudioSignal ss_embed(const AudioSignal& signal, const BitString& bits, std::uint64_t key_seed,
                     const SSParams& params, const FrameSpec& spec);
BitString ss_extract(const AudioSignal& signal, std::uint64_t key_seed, const FrameSpec& spec,
                     std::size_t n_bits);

}  // namespace echohide
