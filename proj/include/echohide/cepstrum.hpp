#pragma once

#include <span>
#include <string>
#include <vector>

#include "echohide/audio.hpp"
#include "echohide/dsp.hpp"
#include "echohide/echo.hpp"
#include "echohide/parallel.hpp"

namespace echohide {

enum class CepstralMethod {
  original,  // IDFT[ (ln X)^2 ]
  proposed,  // IDFT[ |ln X|^2 ]
};

const char* to_string(CepstralMethod method);
CepstralMethod cepstral_method_from_string(const std::string& name);

struct CepstralOptions {
  // Frames are analysed in 16-bit PCM units. The detection statistic at the
  // echo lag is proportional to the mean log-magnitude of the frame, which
  // must be positive for the echo to show up as a positive peak.
  double analysis_gain = 32768.0;
  double log_floor = 1e-12;  // |X| floor before the logarithm
  int peak_window = 0;       // compare max over [d - w, d + w]
};

struct CepstralProfile {
  std::vector<double> values;  // indexed by lag in samples
  CepstralMethod method = CepstralMethod::proposed;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t lag) const { return values[lag]; }
};

/// Principal-branch complex log of the spectrum with the magnitude floored.
/// Degenerate error on an all-zero frame.
std::vector<dsp::Complex> log_spectrum(std::span<const double> frame, const CepstralOptions& opts);

CepstralProfile cepstrum_autocorr_original(std::span<const double> frame,
                                           const CepstralOptions& opts = {});
CepstralProfile cepstrum_autocorr_proposed(std::span<const double> frame,
                                           const CepstralOptions& opts = {});
CepstralProfile cepstrum_autocorr(std::span<const double> frame, CepstralMethod method,
                                  const CepstralOptions& opts = {});

/// 1 if profile[d1] > profile[d0], 0 if smaller, 1 on a tie.
std::uint8_t detect_bit(const CepstralProfile& profile, const BitDelays& delays, int peak_window = 0);

/// detect_bit on one frame; an all-zero frame decodes as 1.
std::uint8_t detect_frame(std::span<const double> frame, const BitDelays& delays, CepstralMethod method,
                          const CepstralOptions& opts = {});

BitString extract_echo(const AudioSignal& signal, const BitDelays& delays, const FrameSpec& spec,
                       std::size_t n_bits, CepstralMethod method, const CepstralOptions& opts = {},
                       Exec exec = Exec::parallel);

}  // namespace echohide
