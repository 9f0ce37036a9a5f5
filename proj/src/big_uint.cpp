#include "qhit/big_uint.hpp"

#include <bit>

#include "qhit/error.hpp"

namespace qhit {

BigUint::BigUint(std::uint64_t v) {
  if (v != 0) limbs_.push_back(v);
}

BigUint BigUint::random(unsigned bits, Rng& rng) {
  BigUint x;
  x.limbs_.resize((bits + 63) / 64);
  for (auto& l : x.limbs_) l = rng();
  x.truncate(bits);
  return x;
}

BigUint BigUint::power_of_two(unsigned exponent) {
  BigUint x;
  x.limbs_.assign(exponent / 64 + 1, 0);
  x.limbs_.back() = std::uint64_t{1} << (exponent % 64);
  return x;
}

unsigned BigUint::bit_length() const {
  if (limbs_.empty()) return 0;
  return static_cast<unsigned>(64 * (limbs_.size() - 1)) + static_cast<unsigned>(std::bit_width(limbs_.back()));
}

void BigUint::mul_small(std::uint64_t m) {
  unsigned __int128 carry = 0;
  for (auto& l : limbs_) {
    const unsigned __int128 p = static_cast<unsigned __int128>(l) * m + carry;
    l = static_cast<std::uint64_t>(p);
    carry = p >> 64;
  }
  if (carry != 0) limbs_.push_back(static_cast<std::uint64_t>(carry));
  normalize();
}

void BigUint::sub(const BigUint& other) {
  if (*this < other) throw InvalidArgument("BigUint::sub would underflow");
  std::uint64_t borrow = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    const std::uint64_t o = other.limb(i);
    const std::uint64_t d = limbs_[i] - o - borrow;
    borrow = (limbs_[i] < o || (limbs_[i] == o && borrow)) ? 1 : 0;
    limbs_[i] = d;
  }
  normalize();
}

void BigUint::truncate(unsigned bits) {
  const std::size_t keep = (bits + 63) / 64;
  if (limbs_.size() > keep) limbs_.resize(keep);
  if (bits % 64 != 0 && limbs_.size() == keep) limbs_.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  normalize();
}

std::uint64_t BigUint::leading_word(unsigned bits) const {
  if (bits <= 64) return bits == 64 ? limb(0) : limb(0) << (64 - bits);
  const unsigned lo = bits - 64;
  const std::size_t idx = lo / 64;
  const unsigned shift = lo % 64;
  if (shift == 0) return limb(idx);
  return (limb(idx) >> shift) | (limb(idx + 1) << (64 - shift));
}

std::strong_ordering BigUint::operator<=>(const BigUint& other) const {
  if (limbs_.size() != other.limbs_.size()) return limbs_.size() <=> other.limbs_.size();
  for (std::size_t i = limbs_.size(); i-- > 0;)
    if (limbs_[i] != other.limbs_[i]) return limbs_[i] <=> other.limbs_[i];
  return std::strong_ordering::equal;
}

void BigUint::normalize() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

}  // namespace qhit
