#include "echohide/hybrid.hpp"

#include <algorithm>
#include <string>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

void validate_hybrid(const HybridConfig& cfg, int sample_rate) {
  require(sample_rate > 0, ErrorKind::parameter, "hybrid: sample rate must be positive");
  require(cfg.frame.frame_len > 0, ErrorKind::parameter, "hybrid: frame_len must be positive");
  require(static_cast<double>(sample_rate) / static_cast<double>(cfg.frame.frame_len) >= 20.0,
          ErrorKind::parameter, "hybrid: frame_len gives fewer than 20 frames per second");
  validate_kernel(BasicKernel{cfg.echo_alpha, cfg.delays.d0});
  validate_delays(cfg.delays, cfg.frame);
  validate_ss_params(cfg.ss, cfg.frame.frame_len);
  validate_lfsr(cfg.lfsr);
  require(cfg.header_bits <= 63, ErrorKind::parameter, "hybrid: header_bits must be <= 63");
}

std::uint64_t hybrid_ss_seed(const HybridConfig& cfg, const PrimaryKey& key) {
  std::uint64_t h = dsp::mix_seed(cfg.ss_seed, key.size());
  for (auto d : key.digits) h = dsp::mix_seed(h, d + 1u);
  return h;
}

std::vector<FrameMethod> plan_selection(const SubKeyStream& subkeys, std::size_t payload_len) {
  require(subkeys.bits.size() >= payload_len, ErrorKind::shape, "plan_selection: subkey stream too short");
  std::vector<FrameMethod> plan(payload_len);
  for (std::size_t t = 0; t < payload_len; ++t) plan[t] = subkeys.bits[t] ? FrameMethod::echo : FrameMethod::ss;
  return plan;
}

std::vector<FrameMethod> frame_plan(const HybridConfig& cfg, const SubKeyStream& subkeys,
                                    std::size_t payload_len) {
  auto plan = plan_selection(subkeys, payload_len);
  if (cfg.header_channel == HeaderChannel::ss)
    std::fill(plan.begin(), plan.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.header_bits, payload_len)),
              FrameMethod::ss);
  return plan;
}

BitString hybrid_payload(const BitString& message, const HybridConfig& cfg) {
  const std::uint64_t len = message.size();
  require(cfg.header_bits == 0 || (len >> cfg.header_bits) == 0, ErrorKind::capacity,
          "hybrid: message length does not fit the header");
  BitString payload;
  payload.reserve(cfg.header_bits + message.size());
  for (std::size_t i = cfg.header_bits; i-- > 0;) payload.push_back(static_cast<std::uint8_t>((len >> i) & 1u));
  const auto cipher = xor_cipher(message, lfsr_stream(cfg.lfsr, message.size()));
  payload.insert(payload.end(), cipher.begin(), cipher.end());
  return payload;
}

AudioSignal hybrid_embed_planned(const AudioSignal& signal, const BitString& payload,
                                 const std::vector<FrameMethod>& plan, const HybridConfig& cfg,
                                 std::uint64_t ss_seed) {
  signal.validate();
  require(plan.size() == payload.size(), ErrorKind::shape, "hybrid: plan and payload lengths differ");
  require(payload.size() <= cfg.frame.frame_count(signal.size()), ErrorKind::capacity,
          "hybrid: payload needs " + std::to_string(payload.size()) + " frames, signal has " +
              std::to_string(cfg.frame.frame_count(signal.size())));
  AudioSignal out = signal;
  const std::size_t len = cfg.frame.frame_len;
  for (std::size_t t = 0; t < payload.size(); ++t) {
    const auto frame = frame_view(signal, cfg.frame, t);
    std::vector<double> y;
    if (plan[t] == FrameMethod::ss)
      y = ss_embed_frame(frame, frame_key(len, ss_seed, t), payload[t], cfg.ss);
    else
      y = apply_kernel(frame, BasicKernel{cfg.echo_alpha, cfg.delays.for_bit(payload[t])});
    std::copy(y.begin(), y.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(t * len));
  }
  return out;
}

AudioSignal hybrid_embed(const AudioSignal& signal, const BitString& message, const HybridConfig& cfg,
                         const PrimaryKey& key, const ConstantMatrix& matrix) {
  validate_hybrid(cfg, signal.sample_rate);
  validate_key_material(key, matrix);
  const auto payload = hybrid_payload(message, cfg);
  require(payload.size() <= cfg.frame.frame_count(signal.size()), ErrorKind::capacity,
          "hybrid: payload needs " + std::to_string(payload.size()) + " frames, signal has " +
              std::to_string(cfg.frame.frame_count(signal.size())));
  if (payload.empty()) return signal;
  const auto subkeys = generate_subkeys(key, matrix, payload.size());
  return hybrid_embed_planned(signal, payload, frame_plan(cfg, subkeys, payload.size()), cfg,
                              hybrid_ss_seed(cfg, key));
}

BitString hybrid_extract_planned(const AudioSignal& signal, const std::vector<FrameMethod>& plan,
                                 const HybridConfig& cfg, std::uint64_t ss_seed, std::size_t first_frame) {
  require(first_frame + plan.size() <= cfg.frame.frame_count(signal.size()), ErrorKind::capacity,
          "hybrid: signal holds fewer frames than the plan");
  const std::size_t len = cfg.frame.frame_len;
  BitString bits(plan.size());
  for (std::size_t j = 0; j < plan.size(); ++j) {
    const std::size_t t = first_frame + j;
    const auto frame = frame_view(signal, cfg.frame, t);
    if (plan[j] == FrameMethod::ss)
      bits[j] = ss_detect_frame(frame, frame_key(len, ss_seed, t));
    else
      bits[j] = detect_frame(frame, cfg.delays, cfg.echo_extractor, cfg.cepstral);
  }
  return bits;
}

BitString hybrid_extract(const AudioSignal& signal, const HybridConfig& cfg, const PrimaryKey& key,
                         const ConstantMatrix& matrix) {
  validate_hybrid(cfg, signal.sample_rate);
  validate_key_material(key, matrix);
  const std::size_t frames = cfg.frame.frame_count(signal.size());
  require(frames >= cfg.header_bits, ErrorKind::capacity, "hybrid: signal shorter than the length header");
  const std::uint64_t ss_seed = hybrid_ss_seed(cfg, key);

  std::uint64_t len = 0;
  if (cfg.header_bits > 0) {
    const auto head_keys = generate_subkeys(key, matrix, cfg.header_bits);
    const auto header = hybrid_extract_planned(signal, frame_plan(cfg, head_keys, cfg.header_bits), cfg, ss_seed);
    for (auto b : header) len = (len << 1) | b;
  }
  require(len <= frames - cfg.header_bits, ErrorKind::corrupt_header,
          "hybrid: decoded length " + std::to_string(len) + " exceeds the remaining " +
              std::to_string(frames - cfg.header_bits) + " frames");
  if (len == 0) return {};

  const std::size_t total = cfg.header_bits + static_cast<std::size_t>(len);
  const auto plan = frame_plan(cfg, generate_subkeys(key, matrix, total), total);
  const std::vector<FrameMethod> body(plan.begin() + static_cast<std::ptrdiff_t>(cfg.header_bits), plan.end());
  const auto cipher = hybrid_extract_planned(signal, body, cfg, ss_seed, cfg.header_bits);
  return xor_cipher(cipher, lfsr_stream(cfg.lfsr, cipher.size()));
}

}  // namespace echohide
