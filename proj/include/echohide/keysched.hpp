#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "echohide/audio.hpp"

namespace echohide {

using BigInt = boost::multiprecision::cpp_int;
using Digits = std::vector<std::uint8_t>;  // decimal digits, most significant first

struct PrimaryKey {
  Digits digits;

  static PrimaryKey parse(std::string_view text);
  std::string str() const;
  std::size_t size() const { return digits.size(); }
};

/// L x L digit grid, L = primary key length.
struct ConstantMatrix {
  std::vector<Digits> rows;

  static ConstantMatrix parse(const std::vector<std::string>& rows);
  std::vector<std::string> str() const;
  std::size_t size() const { return rows.size(); }
};

PrimaryKey random_primary_key(std::size_t length, std::uint64_t seed);
ConstantMatrix random_constant_matrix(std::size_t length, std::uint64_t seed);

/// Weak-key error on an all-zero key or matrix; shape error on size mismatch
/// or L < 2.
void validate_key_material(const PrimaryKey& key, const ConstantMatrix& matrix);

/// Circular rotation by one: the last digit moves to the front.
Digits rotate_right(const Digits& digits);

BigInt digits_to_int(const Digits& digits);

/// Sum over columns j of key * column_j, with column_j read top to bottom as
/// one decimal number.
BigInt subkey_step(const PrimaryKey& key, const ConstantMatrix& matrix);

/// Minimal big-endian binary expansion; 0 -> "0".
BitString to_binary(const BigInt& value);

struct SubKeyStream {
  BitString bits;
  std::vector<std::size_t> step_boundaries;  // start index of each subkey
};

/// Concatenates to_binary(subkey_step) over successive rotations of both the
/// key and every matrix row until total_bits are available, then truncates.
/// The stream is prefix-stable: a shorter request is a prefix of a longer one.
SubKeyStream generate_subkeys(const PrimaryKey& key, const ConstantMatrix& matrix,
                              std::size_t total_bits);

/// Fibonacci LFSR. Taps are polynomial exponents in 1..width, so the default
/// {16, 14, 13, 11} is x^16 + x^14 + x^13 + x^11 + 1.
struct LfsrSpec {
  std::vector<int> taps{16, 14, 13, 11};
  std::uint64_t seed = 0xACE1u;
  int width = 16;
};

void validate_lfsr(const LfsrSpec& spec);
BitString lfsr_stream(const LfsrSpec& spec, std::size_t n_bits);
/// Number of steps until the register returns to its seed state.
std::uint64_t lfsr_period(const LfsrSpec& spec, std::uint64_t limit);

/// message XOR keystream[0 .. message.size()); an involution.
BitString xor_cipher(const BitString& message, const BitString& keystream);

}  // namespace echohide
