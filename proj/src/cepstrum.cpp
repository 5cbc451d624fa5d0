#include "echohide/cepstrum.hpp"

#include <algorithm>
#include <cmath>

#include "echohide/error.hpp"

namespace echohide {

const char* to_string(CepstralMethod method) {
  return method == CepstralMethod::original ? "original" : "proposed";
}

CepstralMethod cepstral_method_from_string(const std::string& name) {
  if (name == "original") return CepstralMethod::original;
  if (name == "proposed") return CepstralMethod::proposed;
  fail(ErrorKind::parameter, "unknown cepstral method '" + name + "'");
}

std::vector<dsp::Complex> log_spectrum(std::span<const double> frame, const CepstralOptions& opts) {
  require(frame.size() >= 2, ErrorKind::shape, "cepstrum: frame shorter than 2 samples");
  require(std::any_of(frame.begin(), frame.end(), [](double v) { return v != 0.0; }), ErrorKind::degenerate,
          "cepstrum: all-zero frame");
  require(opts.analysis_gain > 0.0 && opts.log_floor > 0.0, ErrorKind::parameter,
          "cepstrum: gain and log floor must be positive");
  std::vector<double> scaled(frame.begin(), frame.end());
  for (auto& v : scaled) v *= opts.analysis_gain;
  auto spec = dsp::fft_real(scaled);
  for (auto& X : spec) {
    const double mag = std::max(std::abs(X), opts.log_floor);
    X = dsp::Complex(std::log(mag), std::arg(X));
  }
  return spec;
}

namespace {
CepstralProfile real_part_ifft(std::vector<dsp::Complex>&& spectrum, CepstralMethod method) {
  const auto time = dsp::ifft(spectrum);
  CepstralProfile p;
  p.method = method;
  p.values.resize(time.size());
  for (std::size_t i = 0; i < time.size(); ++i) p.values[i] = time[i].real();
  return p;
}
}  // namespace

CepstralProfile cepstrum_autocorr_original(std::span<const double> frame, const CepstralOptions& opts) {
  auto L = log_spectrum(frame, opts);
  for (auto& v : L) v = v * v;
  return real_part_ifft(std::move(L), CepstralMethod::original);
}

CepstralProfile cepstrum_autocorr_proposed(std::span<const double> frame, const CepstralOptions& opts) {
  auto L = log_spectrum(frame, opts);
  for (auto& v : L) v = dsp::Complex(std::norm(v), 0.0);
  return real_part_ifft(std::move(L), CepstralMethod::proposed);
}

CepstralProfile cepstrum_autocorr(std::span<const double> frame, CepstralMethod method,
                                  const CepstralOptions& opts) {
  return method == CepstralMethod::original ? cepstrum_autocorr_original(frame, opts)
                                            : cepstrum_autocorr_proposed(frame, opts);
}

namespace {
double peak_near(const CepstralProfile& p, int d, int w) {
  const int lo = std::max(1, d - w);
  const int hi = std::min(static_cast<int>(p.size()) - 1, d + w);
  double best = p[static_cast<std::size_t>(lo)];
  for (int i = lo + 1; i <= hi; ++i) best = std::max(best, p[static_cast<std::size_t>(i)]);
  return best;
}
}  // namespace

std::uint8_t detect_bit(const CepstralProfile& profile, const BitDelays& delays, int peak_window) {
  require(peak_window >= 0, ErrorKind::parameter, "detect_bit: negative peak window");
  require(delays.d0 >= 1 && delays.d1 >= 1 &&
              static_cast<std::size_t>(std::max(delays.d0, delays.d1)) < profile.size(),
          ErrorKind::parameter, "detect_bit: delay outside the profile");
  const double c0 = peak_near(profile, delays.d0, peak_window);
  const double c1 = peak_near(profile, delays.d1, peak_window);
  return c0 > c1 ? 0 : 1;
}

std::uint8_t detect_frame(std::span<const double> frame, const BitDelays& delays, CepstralMethod method,
                          const CepstralOptions& opts) {
  // a silent frame has a flat profile, which the tie rule reads as 1
  if (std::all_of(frame.begin(), frame.end(), [](double v) { return v == 0.0; })) return 1;
  return detect_bit(cepstrum_autocorr(frame, method, opts), delays, opts.peak_window);
}

BitString extract_echo(const AudioSignal& signal, const BitDelays& delays, const FrameSpec& spec,
                       std::size_t n_bits, CepstralMethod method, const CepstralOptions& opts,
                       Exec exec) {
  validate_delays(delays, spec);
  require(n_bits <= spec.frame_count(signal.size()), ErrorKind::capacity,
          "extract_echo: signal holds fewer than " + std::to_string(n_bits) + " frames");
  BitString bits(n_bits);
  const auto n = static_cast<std::ptrdiff_t>(n_bits);
  auto one = [&](std::ptrdiff_t i) {
    bits[static_cast<std::size_t>(i)] =
        detect_frame(frame_view(signal, spec, static_cast<std::size_t>(i)), delays, method, opts);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return bits;
}

}  // namespace echohide
