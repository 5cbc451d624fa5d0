#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "echohide/parallel.hpp"

namespace echohide::dsp {

using Complex = std::complex<double>;

/// Forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N). Any length.
std::vector<Complex> fft(std::span<const Complex> x);
std::vector<Complex> fft_real(std::span<const double> x);

/// Inverse DFT including the 1/N factor.
std::vector<Complex> ifft(std::span<const Complex> X);

/// Odd-length linear-phase low-pass, windowed sinc with a Hamming window,
/// normalized to unit DC gain.
std::vector<double> design_lowpass(double cutoff_hz, double sample_rate, std::size_t taps);

/// FIR filtering with the (taps-1)/2 group delay removed; output has the
/// input's length. Samples outside the input are zero.
std::vector<double> filter_zero_phase(std::span<const double> x, std::span<const double> taps,
                                      Exec exec = Exec::parallel);

double energy(std::span<const double> x);
double mean_power(std::span<const double> x);

/// Deterministic 64-bit mixer used to derive per-frame seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace echohide::dsp
