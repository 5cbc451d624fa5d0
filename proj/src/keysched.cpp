#include "echohide/keysched.hpp"

#include <algorithm>
#include <random>

#include "echohide/dsp.hpp"
#include "echohide/error.hpp"

namespace echohide {

namespace {
Digits parse_digits(std::string_view text, const char* what) {
  require(!text.empty(), ErrorKind::parameter, std::string(what) + ": empty digit string");
  Digits d;
  d.reserve(text.size());
  for (char c : text) {
    require(c >= '0' && c <= '9', ErrorKind::parameter,
            std::string(what) + ": non-digit character '" + c + "'");
    d.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return d;
}

std::string digits_str(const Digits& d) {
  std::string s;
  for (auto v : d) s.push_back(static_cast<char>('0' + v));
  return s;
}

bool all_zero(const Digits& d) {
  return std::all_of(d.begin(), d.end(), [](std::uint8_t v) { return v == 0; });
}

Digits random_digits(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> digit(0, 9);
  Digits d(n);
  for (auto& v : d) v = static_cast<std::uint8_t>(digit(rng));
  return d;
}
}  // namespace

PrimaryKey PrimaryKey::parse(std::string_view text) { return PrimaryKey{parse_digits(text, "primary key")}; }

std::string PrimaryKey::str() const { return digits_str(digits); }

ConstantMatrix ConstantMatrix::parse(const std::vector<std::string>& rows) {
  ConstantMatrix m;
  for (const auto& r : rows) {
    m.rows.push_back(parse_digits(r, "constant matrix"));
    require(m.rows.back().size() == rows.size(), ErrorKind::shape, "constant matrix must be square");
  }
  return m;
}

std::vector<std::string> ConstantMatrix::str() const {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(digits_str(r));
  return out;
}

PrimaryKey random_primary_key(std::size_t length, std::uint64_t seed) {
  require(length >= 1, ErrorKind::parameter, "random_primary_key: length must be >= 1");
  std::mt19937_64 rng(dsp::mix_seed(seed, 0x4B45));
  PrimaryKey k{random_digits(length, rng)};
  if (all_zero(k.digits)) k.digits.back() = 1;
  return k;
}

ConstantMatrix random_constant_matrix(std::size_t length, std::uint64_t seed) {
  require(length >= 1, ErrorKind::parameter, "random_constant_matrix: length must be >= 1");
  std::mt19937_64 rng(dsp::mix_seed(seed, 0x4D54));
  ConstantMatrix m;
  for (std::size_t i = 0; i < length; ++i) m.rows.push_back(random_digits(length, rng));
  if (std::all_of(m.rows.begin(), m.rows.end(), all_zero)) m.rows.back().back() = 1;
  return m;
}

namespace {
void check_shape(const PrimaryKey& key, const ConstantMatrix& matrix) {
  const std::size_t n = key.size();
  require(n >= 1, ErrorKind::shape, "key schedule: empty primary key");
  require(matrix.size() == n, ErrorKind::shape, "key schedule: matrix must be L x L for a key of length L");
  for (const auto& row : matrix.rows)
    require(row.size() == n, ErrorKind::shape, "key schedule: matrix must be L x L for a key of length L");
}
}  // namespace

void validate_key_material(const PrimaryKey& key, const ConstantMatrix& matrix) {
  require(key.size() >= 2, ErrorKind::shape, "key schedule: primary key needs at least 2 digits");
  check_shape(key, matrix);
  require(!all_zero(key.digits), ErrorKind::weak_key, "key schedule: all-zero primary key");
  require(!std::all_of(matrix.rows.begin(), matrix.rows.end(), all_zero), ErrorKind::weak_key,
          "key schedule: all-zero constant matrix");
}

Digits rotate_right(const Digits& digits) {
  if (digits.empty()) return digits;
  Digits out;
  out.reserve(digits.size());
  out.push_back(digits.back());
  out.insert(out.end(), digits.begin(), digits.end() - 1);
  return out;
}

BigInt digits_to_int(const Digits& digits) {
  BigInt v = 0;
  for (auto d : digits) v = v * 10 + d;
  return v;
}

BigInt subkey_step(const PrimaryKey& key, const ConstantMatrix& matrix) {
  check_shape(key, matrix);
  const std::size_t n = key.size();
  BigInt column_sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    BigInt col = 0;
    for (std::size_t i = 0; i < n; ++i) col = col * 10 + matrix.rows[i][j];
    column_sum += col;
  }
  return digits_to_int(key.digits) * column_sum;
}

BitString to_binary(const BigInt& value) {
  require(value >= 0, ErrorKind::parameter, "to_binary: negative value");
  if (value == 0) return BitString{0};
  BitString bits;
  const std::size_t top = boost::multiprecision::msb(value);
  bits.reserve(top + 1);
  for (std::size_t i = top + 1; i-- > 0;) bits.push_back(boost::multiprecision::bit_test(value, i) ? 1 : 0);
  return bits;
}

SubKeyStream generate_subkeys(const PrimaryKey& key, const ConstantMatrix& matrix, std::size_t total_bits) {
  require(total_bits >= 1, ErrorKind::parameter, "generate_subkeys: total_bits must be >= 1");
  validate_key_material(key, matrix);
  SubKeyStream out;
  PrimaryKey k = key;
  ConstantMatrix m = matrix;
  while (out.bits.size() < total_bits) {
    out.step_boundaries.push_back(out.bits.size());
    const auto step = to_binary(subkey_step(k, m));
    out.bits.insert(out.bits.end(), step.begin(), step.end());
    k.digits = rotate_right(k.digits);
    for (auto& row : m.rows) row = rotate_right(row);
  }
  out.bits.resize(total_bits);
  return out;
}

void validate_lfsr(const LfsrSpec& spec) {
  require(spec.width >= 2 && spec.width <= 63, ErrorKind::parameter, "lfsr: width must be in 2..63");
  const std::uint64_t mask = (std::uint64_t{1} << spec.width) - 1;
  require(spec.seed != 0 && (spec.seed & mask) == spec.seed, ErrorKind::parameter,
          "lfsr: seed must be a nonzero state of the register width");
  require(!spec.taps.empty(), ErrorKind::parameter, "lfsr: no taps");
  for (int t : spec.taps)
    require(t >= 1 && t <= spec.width, ErrorKind::parameter, "lfsr: tap outside 1..width");
}

namespace {
struct Lfsr {
  std::uint64_t state;
  int width;
  std::vector<int> shifts;

  explicit Lfsr(const LfsrSpec& spec) : state(spec.seed), width(spec.width) {
    for (int t : spec.taps) shifts.push_back(spec.width - t);
  }

  std::uint8_t step() {
    const auto out = static_cast<std::uint8_t>(state & 1u);
    std::uint64_t fb = 0;
    for (int s : shifts) fb ^= state >> s;
    state = (state >> 1) | ((fb & 1u) << (width - 1));
    return out;
  }
};
}  // namespace

BitString lfsr_stream(const LfsrSpec& spec, std::size_t n_bits) {
  validate_lfsr(spec);
  Lfsr reg(spec);
  BitString bits(n_bits);
  for (auto& b : bits) b = reg.step();
  return bits;
}

std::uint64_t lfsr_period(const LfsrSpec& spec, std::uint64_t limit) {
  validate_lfsr(spec);
  Lfsr reg(spec);
  for (std::uint64_t i = 1; i <= limit; ++i) {
    reg.step();
    if (reg.state == spec.seed) return i;
  }
  return 0;
}

BitString xor_cipher(const BitString& message, const BitString& keystream) {
  require(keystream.size() >= message.size(), ErrorKind::shape, "xor_cipher: keystream shorter than message");
  BitString out(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) out[i] = static_cast<std::uint8_t>((message[i] ^ keystream[i]) & 1u);
  return out;
}

}  // namespace echohide
