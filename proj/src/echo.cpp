#include "echohide/echo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

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

void check_alpha(double a, const char* what) {
  require(std::isfinite(a) && std::abs(a) < 1.0, ErrorKind::parameter,
          std::string("echo kernel: |") + what + "| must be < 1");
}
void check_delay(int d, const char* what) {
  require(d >= 1, ErrorKind::parameter, std::string("echo kernel: ") + what + " must be >= 1");
}
void check_spacing(int d_pb, int d_nb) {
  const int gap = d_nb - d_pb;
  require(gap >= 1 && gap <= 5, ErrorKind::parameter, "echo kernel: d_nb - d_pb must be in 1..5");
}
}  // namespace

std::vector<double> make_ts_chips(std::size_t length, std::uint64_t seed) {
  require(length > 0, ErrorKind::parameter, "time-spread: chip sequence must be non-empty");
  std::mt19937_64 rng(dsp::mix_seed(seed, 0x75C4));
  std::vector<double> p(length);
  for (auto& c : p) c = (rng() >> 63) ? 1.0 : -1.0;
  return p;
}

TimeSpreadKernel make_time_spread(double alpha, int d, std::size_t chips, std::uint64_t seed) {
  return TimeSpreadKernel{alpha, d, make_ts_chips(chips, seed), seed};
}

std::vector<Tap> kernel_taps(const EchoKernel& kernel) {
  return std::visit(
      overloaded{
          [](const BasicKernel& k) { return std::vector<Tap>{{k.d, k.alpha}}; },
          [](const NegPosKernel& k) {
            return std::vector<Tap>{{k.d_pb, k.alpha_pb}, {k.d_nb, -k.alpha_nb}};
          },
          [](const BackwardForwardKernel& k) {
            return std::vector<Tap>{{k.d, k.alpha}, {-k.d, k.alpha}};
          },
          [](const MirroredKernel& k) {
            return std::vector<Tap>{
                {k.d_pb, k.alpha_pb}, {-k.d_pb, k.alpha_pb}, {k.d_nb, -k.alpha_nb}, {-k.d_nb, -k.alpha_nb}};
          },
          [](const TimeSpreadKernel& k) {
            std::vector<Tap> taps;
            taps.reserve(k.p.size());
            for (std::size_t i = 0; i < k.p.size(); ++i)
              taps.push_back({k.d + static_cast<int>(i) + 1, k.alpha * k.p[i]});
            return taps;
          },
      },
      kernel);
}

int max_delay(const EchoKernel& kernel) {
  return std::visit(overloaded{
                        [](const BasicKernel& k) { return k.d; },
                        [](const NegPosKernel& k) { return std::max(k.d_pb, k.d_nb); },
                        [](const BackwardForwardKernel& k) { return k.d; },
                        [](const MirroredKernel& k) { return std::max(k.d_pb, k.d_nb); },
                        [](const TimeSpreadKernel& k) { return k.d; },
                    },
                    kernel);
}

const char* kernel_name(const EchoKernel& kernel) {
  return std::visit(overloaded{
                        [](const BasicKernel&) { return "basic"; },
                        [](const NegPosKernel&) { return "negpos"; },
                        [](const BackwardForwardKernel&) { return "backward_forward"; },
                        [](const MirroredKernel&) { return "mirrored"; },
                        [](const TimeSpreadKernel&) { return "time_spread"; },
                    },
                    kernel);
}

void validate_kernel(const EchoKernel& kernel) {
  std::visit(overloaded{
                 [](const BasicKernel& k) {
                   check_alpha(k.alpha, "alpha");
                   check_delay(k.d, "d");
                 },
                 [](const NegPosKernel& k) {
                   check_alpha(k.alpha_pb, "alpha_pb");
                   check_alpha(k.alpha_nb, "alpha_nb");
                   check_delay(k.d_pb, "d_pb");
                   check_spacing(k.d_pb, k.d_nb);
                 },
                 [](const BackwardForwardKernel& k) {
                   check_alpha(k.alpha, "alpha");
                   check_delay(k.d, "d");
                 },
                 [](const MirroredKernel& k) {
                   check_alpha(k.alpha_pb, "alpha_pb");
                   check_alpha(k.alpha_nb, "alpha_nb");
                   check_delay(k.d_pb, "d_pb");
                   check_spacing(k.d_pb, k.d_nb);
                 },
                 [](const TimeSpreadKernel& k) {
                   check_alpha(k.alpha, "alpha");
                   check_delay(k.d, "d");
                   require(!k.p.empty(), ErrorKind::parameter, "time-spread: empty chip sequence");
                   for (double c : k.p)
                     require(c == 1.0 || c == -1.0, ErrorKind::parameter, "time-spread: chips must be +-1");
                 },
             },
             kernel);
}

void validate_delays(const BitDelays& delays, const FrameSpec& spec) {
  require(delays.d0 >= 1 && delays.d1 >= 1, ErrorKind::parameter, "delays must be >= 1");
  require(std::abs(delays.d0 - delays.d1) >= 8, ErrorKind::parameter, "d0 and d1 must be at least 8 samples apart");
  require(2 * static_cast<std::size_t>(std::max(delays.d0, delays.d1)) <= spec.frame_len, ErrorKind::parameter,
          "frame_len must be at least twice the largest delay");
}

EchoKernel with_delay(const EchoKernel& kernel, int d) {
  return std::visit(overloaded{
                        [d](BasicKernel k) -> EchoKernel { k.d = d; return k; },
                        [d](NegPosKernel k) -> EchoKernel {
                          k.d_nb = d + (k.d_nb - k.d_pb);
                          k.d_pb = d;
                          return k;
                        },
                        [d](BackwardForwardKernel k) -> EchoKernel { k.d = d; return k; },
                        [d](MirroredKernel k) -> EchoKernel {
                          k.d_nb = d + (k.d_nb - k.d_pb);
                          k.d_pb = d;
                          return k;
                        },
                        [d](TimeSpreadKernel k) -> EchoKernel { k.d = d; return k; },
                    },
                    kernel);
}

std::vector<double> apply_kernel_unclamped(std::span<const double> frame, const EchoKernel& kernel) {
  validate_kernel(kernel);
  require(static_cast<std::size_t>(max_delay(kernel)) < frame.size(), ErrorKind::parameter,
          "echo kernel: delay not shorter than the frame");
  const auto taps = kernel_taps(kernel);
  const auto len = static_cast<std::ptrdiff_t>(frame.size());
  std::vector<double> out(frame.begin(), frame.end());
  for (const Tap& t : taps) {
    // out[n] += c * x[n - offset] for in-frame source indices
    const std::ptrdiff_t off = t.offset;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, off);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len, len + off);
    for (std::ptrdiff_t n = lo; n < hi; ++n) out[n] += t.coeff * frame[n - off];
  }
  return out;
}

std::vector<double> apply_kernel(std::span<const double> frame, const EchoKernel& kernel) {
  auto out = apply_kernel_unclamped(frame, kernel);
  for (auto& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

AudioSignal embed_echo(const AudioSignal& signal, const BitString& bits, const EchoKernel& kernel,
                       const BitDelays& delays, const FrameSpec& spec) {
  signal.validate();
  validate_kernel(kernel);
  validate_delays(delays, spec);
  require(spec.frame_len > 0, ErrorKind::parameter, "frame_len must be positive");
  require(bits.size() <= spec.frame_count(signal.size()), ErrorKind::capacity,
          "embed_echo: message needs " + std::to_string(bits.size()) + " frames, signal has " +
              std::to_string(spec.frame_count(signal.size())));
  const EchoKernel k0 = with_delay(kernel, delays.d0);
  const EchoKernel k1 = with_delay(kernel, delays.d1);
  AudioSignal out = signal;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const auto frame = frame_view(signal, spec, i);
    const auto stego = apply_kernel(frame, bits[i] ? k1 : k0);
    std::copy(stego.begin(), stego.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(i * spec.frame_len));
  }
  return out;
}

}  // namespace echohide
