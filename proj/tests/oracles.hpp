#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::vector<cplx> dft(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * cplx(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// real part of IDFT[ L * conj(L) ], L = ln of the DFT of gain * frame
inline std::vector<double> proposed_profile(const std::vector<double>& frame, double gain, double floor_mag = 1e-12) {
  std::vector<cplx> x(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = gain * frame[i];
  auto X = dft(x, -1);
  for (auto& v : X) {
    const cplx L(std::log(std::max(std::abs(v), floor_mag)), std::arg(v));
    v = L * std::conj(L);
  }
  const auto t = dft(X, +1);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].real() / static_cast<double>(t.size());
  return out;
}

inline std::vector<double> original_profile(const std::vector<double>& frame, double gain, double floor_mag = 1e-12) {
  std::vector<cplx> x(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = gain * frame[i];
  auto X = dft(x, -1);
  for (auto& v : X) {
    const cplx L(std::log(std::max(std::abs(v), floor_mag)), std::arg(v));
    v = L * L;
  }
  const auto t = dft(X, +1);
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].real() / static_cast<double>(t.size());
  return out;
}

// Schoolbook decimal arithmetic on digit strings.
inline std::string strip(std::string s) {
  const auto p = s.find_first_not_of('0');
  return p == std::string::npos ? "0" : s.substr(p);
}

inline std::string dec_add(const std::string& a, const std::string& b) {
  std::string out;
  int carry = 0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()) || carry; ++i) {
    int s = carry;
    if (i < a.size()) s += a[a.size() - 1 - i] - '0';
    if (i < b.size()) s += b[b.size() - 1 - i] - '0';
    out.push_back(static_cast<char>('0' + s % 10));
    carry = s / 10;
  }
  std::reverse(out.begin(), out.end());
  return strip(out);
}

inline std::string dec_mul(const std::string& a, const std::string& b) {
  std::vector<int> acc(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      acc[a.size() - 1 - i + b.size() - 1 - j] += (a[i] - '0') * (b[j] - '0');
  for (std::size_t i = 0; i + 1 < acc.size(); ++i) {
    acc[i + 1] += acc[i] / 10;
    acc[i] %= 10;
  }
  std::string out;
  for (std::size_t i = acc.size(); i-- > 0;) out.push_back(static_cast<char>('0' + acc[i]));
  return strip(out);
}

// key * column_0 + key * column_1 + ... with columns read top to bottom
inline std::string column_product_sum(const std::string& key, const std::vector<std::string>& rows) {
  std::string total = "0";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::string col;
    for (const auto& r : rows) col.push_back(r[j]);
    total = dec_add(total, dec_mul(key, strip(col)));
  }
  return total;
}

// decimal string to binary string by repeated halving
inline std::string dec_to_bin(std::string d) {
  d = strip(d);
  if (d == "0") return "0";
  std::string bits;
  while (d != "0") {
    std::string q;
    int rem = 0;
    for (char c : d) {
      const int cur = rem * 10 + (c - '0');
      q.push_back(static_cast<char>('0' + cur / 2));
      rem = cur % 2;
    }
    bits.push_back(static_cast<char>('0' + rem));
    d = strip(q);
  }
  std::reverse(bits.begin(), bits.end());
  return bits;
}

// Tries every threshold drawn from the scores themselves and +inf, with
// both decision polarities.
inline double brute_force_pe(const std::vector<double>& cover, const std::vector<double>& stego) {
  std::vector<double> cands(cover);
  cands.insert(cands.end(), stego.begin(), stego.end());
  cands.push_back(std::numeric_limits<double>::infinity());
  double best = 1.0;
  for (double t : cands) {
    double fa = 0, md = 0;
    for (double c : cover) fa += (c >= t);
    for (double s : stego) md += (s < t);
    fa /= static_cast<double>(cover.size());
    md /= static_cast<double>(stego.size());
    best = std::min(best, 0.5 * (fa + md));
    best = std::min(best, 0.5 * ((1 - fa) + (1 - md)));
  }
  return std::min(best, 0.5);
}

// Steps a register held as a bit vector until it revisits its start.
inline std::uint64_t lfsr_cycle_length(const std::vector<int>& taps, int width, std::uint64_t seed) {
  std::vector<int> reg(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) reg[static_cast<std::size_t>(i)] = static_cast<int>((seed >> i) & 1u);
  const auto start = reg;
  std::uint64_t steps = 0;
  do {
    int fb = 0;
    for (int t : taps) fb ^= reg[static_cast<std::size_t>(width - t)];
    reg.erase(reg.begin());
    reg.push_back(fb);
    ++steps;
  } while (reg != start && steps < (std::uint64_t{1} << width) + 1);
  return steps;
}

}  // namespace oracle
