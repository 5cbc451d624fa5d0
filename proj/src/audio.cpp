#include "echohide/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

void AudioSignal::validate() const {
  require(sample_rate > 0, ErrorKind::parameter, "audio: sample rate must be positive");
  for (double v : samples)
    require(std::isfinite(v), ErrorKind::parameter, "audio: non-finite sample");
}

BitString bits_from_string(std::string_view text) {
  BitString bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ' ' && c != '_')
      fail(ErrorKind::parameter, std::string("bit string: unexpected character '") + c + "'");
  }
  return bits;
}

std::string bits_to_string(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

BitString bits_from_bytes(std::string_view bytes) {
  BitString bits;
  bits.reserve(bytes.size() * 8);
  for (unsigned char c : bytes)
    for (int i = 7; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((c >> i) & 1u));
  return bits;
}

std::string bytes_from_bits(const BitString& bits) {
  std::string out;
  for (std::size_t i = 0; i + 8 <= bits.size(); i += 8) {
    unsigned char c = 0;
    for (std::size_t j = 0; j < 8; ++j) c = static_cast<unsigned char>((c << 1) | (bits[i + j] & 1u));
    out.push_back(static_cast<char>(c));
  }
  return out;
}

BitString random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(dsp::mix_seed(seed, 0xB175));
  BitString bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return bits;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

std::uint16_t le16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }
std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
void put16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}
void put32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "read_wav: cannot open " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  require(data.size() >= 12, ErrorKind::io, "read_wav: truncated header in " + path.string());
  require(std::memcmp(data.data(), "RIFF", 4) == 0 && std::memcmp(data.data() + 8, "WAVE", 4) == 0,
          ErrorKind::format, "read_wav: not a RIFF/WAVE file: " + path.string());

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (true) {
    require(pos + 8 <= data.size(), ErrorKind::io,
            "read_wav: truncated before data chunk in " + path.string());
    const unsigned char* chunk = data.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      require(size >= 16 && body + size <= data.size(), ErrorKind::io, "read_wav: truncated fmt chunk");
      std::uint16_t format = le16(data.data() + body);
      channels = le16(data.data() + body + 2);
      rate = le32(data.data() + body + 4);
      bits = le16(data.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) format = le16(data.data() + body + 24);
      require(format == kFormatPcm, ErrorKind::format, "read_wav: only integer PCM is supported");
      require(bits == 16, ErrorKind::format, "read_wav: only 16-bit samples are supported");
      require(channels == 1 || channels == 2, ErrorKind::format, "read_wav: mono or stereo only");
      require(rate > 0, ErrorKind::format, "read_wav: zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      require(have_fmt, ErrorKind::format, "read_wav: data chunk before fmt chunk");
      require(body + size <= data.size(), ErrorKind::io, "read_wav: truncated data chunk in " + path.string());
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t n = size / frame_bytes;
      AudioSignal sig;
      sig.sample_rate = static_cast<int>(rate);
      sig.samples.resize(n);
      const unsigned char* p = data.data() + body;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
          acc += from_pcm16(static_cast<std::int16_t>(le16(p + i * frame_bytes + 2 * c)));
        sig.samples[i] = acc / channels;
      }
      return sig;
    }
    pos = body + size + (size & 1u);
  }
}

std::int16_t to_pcm16(double amplitude) {
  const double clamped = std::clamp(amplitude, -1.0, 1.0);
  const double scaled = std::round(clamped * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

AudioSignal quantize_pcm16(const AudioSignal& signal) {
  AudioSignal out = signal;
  for (auto& v : out.samples) v = from_pcm16(to_pcm16(v));
  return out;
}

void write_wav(const AudioSignal& signal, const std::filesystem::path& path) {
  signal.validate();
  const auto n = static_cast<std::uint32_t>(signal.samples.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(signal.sample_rate));
  put32(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, 2 * n);
  for (double v : signal.samples) put16(out, static_cast<std::uint16_t>(to_pcm16(v)));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorKind::io, "write_wav: cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  require(static_cast<bool>(f), ErrorKind::io, "write_wav: write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Framing

FramedSignal frame_signal(const AudioSignal& signal, const FrameSpec& spec) {
  require(spec.frame_len > 0, ErrorKind::parameter, "frame_signal: frame_len must be positive");
  require(spec.frame_len <= signal.size(), ErrorKind::capacity,
          "frame_signal: frame longer than the signal");
  FramedSignal out;
  out.sample_rate = signal.sample_rate;
  const std::size_t count = spec.frame_count(signal.size());
  out.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto first = signal.samples.begin() + static_cast<std::ptrdiff_t>(i * spec.frame_len);
    out.frames.emplace_back(first, first + static_cast<std::ptrdiff_t>(spec.frame_len));
  }
  out.tail.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(count * spec.frame_len),
                  signal.samples.end());
  return out;
}

AudioSignal assemble_frames(const std::vector<std::vector<double>>& frames,
                            std::span<const double> tail, int sample_rate) {
  AudioSignal out;
  out.sample_rate = sample_rate;
  if (!frames.empty()) {
    const std::size_t len = frames.front().size();
    for (const auto& f : frames)
      require(f.size() == len, ErrorKind::shape, "assemble_frames: frames differ in length");
    out.samples.reserve(frames.size() * len + tail.size());
  }
  for (const auto& f : frames) out.samples.insert(out.samples.end(), f.begin(), f.end());
  out.samples.insert(out.samples.end(), tail.begin(), tail.end());
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic speech-like signal

namespace {

std::vector<double> syllabic_envelope(std::size_t n, int rate, double pause_prob, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> syl_len(0.12, 0.30), gain(0.3, 1.0), pause_len(0.05, 0.35),
      coin(0.0, 1.0);
  std::vector<double> env(n, 0.0);
  std::size_t pos = 0;
  while (pos < n) {
    const auto len = static_cast<std::size_t>(syl_len(rng) * rate);
    const double g = gain(rng);
    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
      env[pos + i] = g * s * s;
    }
    pos += len;
    if (coin(rng) < pause_prob) pos += static_cast<std::size_t>(pause_len(rng) * rate);
  }
  return env;
}

std::vector<double> unit_noise(std::size_t n, double cutoff_hz, int rate, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& v : w) v = normal(rng);
  auto lp = dsp::filter_zero_phase(w, dsp::design_lowpass(cutoff_hz, rate, 255));
  const double rms = std::sqrt(dsp::mean_power(lp));
  if (rms > 0.0)
    for (auto& v : lp) v /= rms;
  return lp;
}

}  // namespace

AudioSignal synth_speech_like(double duration_s, int sample_rate, std::uint64_t seed) {
  require(duration_s > 0.0, ErrorKind::parameter, "synth_speech_like: duration must be positive");
  require(sample_rate > 0, ErrorKind::parameter, "synth_speech_like: sample rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  const double fs = sample_rate;
  std::mt19937_64 rng(dsp::mix_seed(seed, 0x5EEDu));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

  // voice parameters for this seed
  const double f0_center = uniform(130.0, 230.0);
  struct Drift { double amp, freq, phase; };
  std::array<Drift, 3> drift{};
  for (auto& d : drift) d = {uniform(10.0, 40.0), uniform(0.1, 0.6), uniform(0.0, 2.0 * std::numbers::pi)};
  const double tilt = uniform(0.8, 1.3);
  const double noise_frac = uniform(0.2, 1.0);
  const double pause_prob = uniform(0.1, 0.45);
  const double floor_db = uniform(-55.0, -40.0);
  const double band_top = std::min(7000.0, 0.45 * fs);

  constexpr int kMaxHarmonics = 70;
  std::array<double, kMaxHarmonics + 1> cos_ph{}, sin_ph{};
  for (int k = 1; k <= kMaxHarmonics; ++k) {
    const double th = uniform(0.0, 2.0 * std::numbers::pi);
    cos_ph[k] = std::cos(th);
    sin_ph[k] = std::sin(th);
  }

  std::vector<double> harm(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double f0 = f0_center;
    for (const auto& d : drift) f0 += d.amp * std::sin(2.0 * std::numbers::pi * d.freq * t + d.phase);
    f0 = std::clamp(f0, 100.0, 300.0);
    phase = std::fmod(phase + 2.0 * std::numbers::pi * f0 / fs, 2.0 * std::numbers::pi);
    const double s1 = std::sin(phase), c1 = std::cos(phase);
    double sk = s1, ck = c1, acc = 0.0;
    for (int k = 1; k <= kMaxHarmonics; ++k) {
      const double fk = k * f0;
      if (fk >= band_top) break;
      const double taper = std::min(1.0, (band_top - fk) / 200.0);
      acc += taper * std::pow(static_cast<double>(k), -tilt) * (sk * cos_ph[k] + ck * sin_ph[k]);
      const double s_next = sk * c1 + ck * s1;
      ck = ck * c1 - sk * s1;
      sk = s_next;
    }
    harm[i] = acc;
  }
  const double harm_rms = std::sqrt(dsp::mean_power(harm));
  if (harm_rms > 0.0)
    for (auto& v : harm) v /= harm_rms;

  const auto env = syllabic_envelope(n, sample_rate, pause_prob, rng);
  const auto voice_noise = unit_noise(n, band_top, sample_rate, rng);
  const auto floor_noise = unit_noise(n, std::min(7900.0, 0.495 * fs), sample_rate, rng);

  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = env[i] * (harm[i] + noise_frac * voice_noise[i]);
    peak = std::max(peak, std::abs(out.samples[i]));
  }
  const double voiced_gain = peak > 0.0 ? 0.9 / peak : 1.0;
  const double floor_amp = 0.9 * std::pow(10.0, floor_db / 20.0);
  peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = out.samples[i] * voiced_gain + floor_amp * floor_noise[i];
    peak = std::max(peak, std::abs(out.samples[i]));
  }
  if (peak > 0.0)
    for (auto& v : out.samples) v *= 0.9 / peak;
  return out;
}

}  // namespace echohide
