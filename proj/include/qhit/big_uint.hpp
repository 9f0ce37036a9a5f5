#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "qhit/rng.hpp"

namespace qhit {

/// Minimal arbitrary-width unsigned integer: exactly the operations the
/// circle maps need (multiply by a word, subtract, truncate to a bit width).
/// Little-endian 64-bit limbs, no leading zero limbs.
class BigUint {
 public:
  BigUint() = default;
  explicit BigUint(std::uint64_t v);

  /// Uniform in [0, 2^bits).
  static BigUint random(unsigned bits, Rng& rng);
  static BigUint power_of_two(unsigned exponent);

  bool is_zero() const { return limbs_.empty(); }
  unsigned bit_length() const;
  const std::vector<std::uint64_t>& limbs() const { return limbs_; }
  /// Value if it fits in one word (callers check bit_length()).
  std::uint64_t low_word() const { return limbs_.empty() ? 0 : limbs_[0]; }

  void mul_small(std::uint64_t m);
  /// *this -= other; requires *this >= other.
  void sub(const BigUint& other);
  /// Keeps the low `bits` bits (reduction mod 2^bits).
  void truncate(unsigned bits);
  /// Bits [bits - 64, bits) as a word, zero-padded below when bits < 64.
  std::uint64_t leading_word(unsigned bits) const;

  std::strong_ordering operator<=>(const BigUint& other) const;
  bool operator==(const BigUint& other) const = default;

 private:
  void normalize();
  std::uint64_t limb(std::size_t i) const { return i < limbs_.size() ? limbs_[i] : 0; }

  std::vector<std::uint64_t> limbs_;
};

}  // namespace qhit
