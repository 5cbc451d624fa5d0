#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "echohide/audio.hpp"

namespace echohide {

// h(n) = d(n) + alpha d(n - d)
struct BasicKernel {
  double alpha = 0.3;
  int d = 50;
};

// h(n) = d(n) + a_pb d(n - d_pb) - a_nb d(n - d_nb), 1 <= d_nb - d_pb <= 5
struct NegPosKernel {
  double alpha_pb = 0.5;
  double alpha_nb = 0.25;
  int d_pb = 50;
  int d_nb = 53;
};

// h(n) = d(n) + alpha d(n - d) + alpha d(n + d)
struct BackwardForwardKernel {
  double alpha = 0.25;
  int d = 50;
};

// positive pair at +-d_pb, negative pair at +-d_nb
struct MirroredKernel {
  double alpha_pb = 0.3;
  double alpha_nb = 0.1;
  int d_pb = 50;
  int d_nb = 53;
};

// s(n) = x(n) + alpha sum_{i=1..len(p)} p(i) x(n - d - i)
struct TimeSpreadKernel {
  double alpha = 0.035;
  int d = 50;
  std::vector<double> p;  // +-1 chips
  std::uint64_t seed = 0;
};

using EchoKernel =
    std::variant<BasicKernel, NegPosKernel, BackwardForwardKernel, MirroredKernel, TimeSpreadKernel>;

struct BitDelays {
  int d0 = 50;
  int d1 = 100;

  int for_bit(std::uint8_t bit) const { return bit ? d1 : d0; }
};

/// One term of the kernel: offset > 0 reads x(n - offset), offset < 0 reads
/// x(n + |offset|).
struct Tap {
  int offset;
  double coeff;
};

std::vector<double> make_ts_chips(std::size_t length, std::uint64_t seed);
TimeSpreadKernel make_time_spread(double alpha, int d, std::size_t chips, std::uint64_t seed);

std::vector<Tap> kernel_taps(const EchoKernel& kernel);
int max_delay(const EchoKernel& kernel);  // largest delay parameter, not TS chip extent
const char* kernel_name(const EchoKernel& kernel);

/// Parameter error on |alpha| >= 1, delays < 1, or a NegPos/Mirrored spacing
/// outside 1..5.
void validate_kernel(const EchoKernel& kernel);
void validate_delays(const BitDelays& delays, const FrameSpec& spec);

/// Copy of the kernel moved to primary delay d. NegPos/Mirrored keep their
/// d_nb - d_pb spacing.
EchoKernel with_delay(const EchoKernel& kernel, int d);

/// Frame-confined echo: out-of-frame terms are zero, output is clamped.
std::vector<double> apply_kernel(std::span<const double> frame, const EchoKernel& kernel);

/// Same as apply_kernel without the clamp; linear in the frame.
std::vector<double> apply_kernel_unclamped(std::span<const double> frame, const EchoKernel& kernel);

/// Frame i carries bits[i] via with_delay(kernel, delays.for_bit(bits[i])).
/// Frames past the message and the tail are untouched.
AudioSignal embed_echo(const AudioSignal& signal, const BitString& bits, const EchoKernel& kernel,
                       const BitDelays& delays, const FrameSpec& spec);

}  // namespace echohide
