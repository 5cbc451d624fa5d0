#include "echohide/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "echohide/error.hpp"

namespace echohide::dsp {
namespace {

// FFTW planning is not thread-safe, execution with the new-array interface
// is. Plans are created once per (size, direction) and kept for the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(plan != nullptr, ErrorKind::parameter, "fft: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

std::vector<Complex> transform(std::span<const Complex> x, int sign) {
  std::vector<Complex> out(x.size());
  if (x.empty()) return out;
  std::vector<Complex> in(x.begin(), x.end());
  fftw_plan plan = PlanCache::instance().get(x.size(), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<Complex> fft(std::span<const Complex> x) { return transform(x, FFTW_FORWARD); }

std::vector<Complex> fft_real(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return transform(c, FFTW_FORWARD);
}

std::vector<Complex> ifft(std::span<const Complex> X) {
  auto out = transform(X, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps) {
  require(taps % 2 == 1, ErrorKind::parameter, "design_lowpass: tap count must be odd");
  require(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0, ErrorKind::parameter,
          "design_lowpass: cutoff must lie in (0, Nyquist)");
  const double fc = cutoff_hz / sample_rate;  // cycles per sample
  const double mid = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
    const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(taps - 1));
    h[i] = sinc * window;
  }
  const double gain = std::accumulate(h.begin(), h.end(), 0.0);
  for (auto& v : h) v /= gain;
  return h;
}

std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps,
                                      Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto m = static_cast<std::ptrdiff_t>(taps.size());
  const std::ptrdiff_t delay = (m - 1) / 2;
  std::vector<double> y(x.size(), 0.0);
  auto one = [&](std::ptrdiff_t i) {
    // y[i] = sum_k h[k] x[i + delay - k]
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, i + delay - (n - 1));
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(m - 1, i + delay);
    double acc = 0.0;
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) acc += taps[k] * x[i + delay - k];
    y[i] = acc;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return y;
}

double energy(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double mean_power(std::span<const double> x) {
  return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size());
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace echohide::dsp
