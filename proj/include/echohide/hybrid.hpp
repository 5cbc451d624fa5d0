#pragma once

#include <cstdint>
#include <vector>

#include "echohide/audio.hpp"
#include "echohide/cepstrum.hpp"
#include "echohide/echo.hpp"
#include "echohide/keysched.hpp"
#include "echohide/spread.hpp"

namespace echohide {

enum class FrameMethod : std::uint8_t { ss, echo };

/// Where the length header travels.
enum class HeaderChannel {
  ss,    // header frames always use spread spectrum
  plan,  // header frames follow the subkey plan like payload frames
};

struct HybridConfig {
  double echo_alpha = 0.3;
  BitDelays delays{};
  SSParams ss{0.005, -1.0, true};
  std::uint64_t ss_seed = 1;
  FrameSpec frame{};
  LfsrSpec lfsr{};
  std::size_t header_bits = 32;
  HeaderChannel header_channel = HeaderChannel::ss;
  CepstralMethod echo_extractor = CepstralMethod::proposed;
  CepstralOptions cepstral{};
};

void validate_hybrid(const HybridConfig& cfg, int sample_rate);

/// SS branch seed: the configured seed mixed with the primary key digits, so a
/// wrong primary key also scrambles the spread-spectrum frames.
std::uint64_t hybrid_ss_seed(const HybridConfig& cfg, const PrimaryKey& key);

/// Subkey bit 0 -> SS, 1 -> echo.
std::vector<FrameMethod> plan_selection(const SubKeyStream& subkeys, std::size_t payload_len);

/// Per-frame method for header + payload, honoring the header channel.
std::vector<FrameMethod> frame_plan(const HybridConfig& cfg, const SubKeyStream& subkeys,
                                    std::size_t payload_len);

/// header (message length, big-endian) ++ xor_cipher(message, lfsr).
BitString hybrid_payload(const BitString& message, const HybridConfig& cfg);

AudioSignal hybrid_embed(const AudioSignal& signal, const BitString& message,
                         const HybridConfig& cfg, const PrimaryKey& key,
                         const ConstantMatrix& matrix);

/// Embeds an already assembled payload with an explicit per-frame plan.
AudioSignal hybrid_embed_planned(const AudioSignal& signal, const BitString& payload,
                                 const std::vector<FrameMethod>& plan, const HybridConfig& cfg,
                                 std::uint64_t ss_seed);

BitString hybrid_extract(const AudioSignal& signal, const HybridConfig& cfg, const PrimaryKey& key,
                         const ConstantMatrix& matrix);

/// Decodes frames with a known plan (no header handling or decryption).
BitString hybrid_extract_planned(const AudioSignal& signal, const std::vector<FrameMethod>& plan,
                                 const HybridConfig& cfg, std::uint64_t ss_seed,
                                 std::size_t first_frame = 0);

}  // namespace echohide
