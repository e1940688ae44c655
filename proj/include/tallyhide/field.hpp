#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <span>

namespace tallyhide {

using Rng = std::mt19937_64;

/// Canonical representative of an element of Z_p; always `value < p`.
struct FieldElement {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(FieldElement, FieldElement) = default;
};

/// Exact arithmetic in Z_p for a prime p < 2^32 chosen at runtime.
///
/// Products of two canonical elements fit in 64 bits, so multiplication is a
/// single 64-bit product followed by `reduce`. When p is a Mersenne prime
/// 2^t - 1 the reduction folds the high bits onto the low bits instead of
/// dividing.
class PrimeField {
 public:
  /// Throws Error{invalid_prime} unless p is an odd prime below 2^32.
  explicit PrimeField(std::uint64_t p);

  static PrimeField mersenne31() { return PrimeField((std::uint64_t{1} << 31) - 1); }

  std::uint64_t modulus() const noexcept { return p_; }
  /// ell = ceil(log2 p): number of bits in the binary form of p.
  unsigned bit_length() const noexcept { return ell_; }
  bool is_mersenne() const noexcept { return mersenne_exponent_ != 0; }

  /// x mod p for 0 <= x <= (p-1)^2.
  FieldElement reduce(std::uint64_t x) const noexcept;
  /// Same result as `reduce`, always via the `%` operator.
  FieldElement reduce_by_division(std::uint64_t x) const noexcept { return {x % p_}; }

  /// Any 64-bit integer mod p.
  FieldElement element(std::uint64_t v) const noexcept { return {v % p_}; }
  /// Signed integers are embedded as v mod p, so -1 becomes p - 1.
  FieldElement from_signed(std::int64_t v) const noexcept;
  /// Inverse of `from_signed` on the centred range (-p/2, p/2).
  std::int64_t to_signed(FieldElement x) const noexcept;

  FieldElement zero() const noexcept { return {0}; }
  FieldElement one() const noexcept { return {1}; }

  FieldElement add(FieldElement a, FieldElement b) const noexcept {
    std::uint64_t s = a.value + b.value;
    return {s >= p_ ? s - p_ : s};
  }
  FieldElement sub(FieldElement a, FieldElement b) const noexcept {
    return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
  }
  FieldElement neg(FieldElement a) const noexcept { return {a.value == 0 ? 0 : p_ - a.value}; }
  FieldElement mul(FieldElement a, FieldElement b) const noexcept { return reduce(a.value * b.value); }

  /// Right-to-left square-and-multiply; at most 2*ell multiplications for
  /// exponents below p.
  FieldElement pow(FieldElement base, std::uint64_t exponent) const noexcept;
  /// x^(p-2). Throws Error{zero_inverse} for x = 0.
  FieldElement inv(FieldElement x) const;
  /// A square root of a quadratic residue; returns the smaller of the two
  /// roots so the choice is deterministic. Throws if x is a non-residue.
  FieldElement sqrt(FieldElement x) const;
  bool is_square(FieldElement x) const noexcept;

  FieldElement random(Rng& rng) const;

  bool operator==(const PrimeField& other) const noexcept { return p_ == other.p_; }

 private:
  std::uint64_t p_;
  unsigned ell_;
  unsigned mersenne_exponent_;  // t when p = 2^t - 1, else 0
};

bool is_prime(std::uint64_t n) noexcept;

/// Wire form of a field element: 8 bytes little-endian.
std::array<std::uint8_t, 8> encode_element(FieldElement x) noexcept;
/// Throws Error{malformed_message} when the decoded value is not below p.
FieldElement decode_element(std::span<const std::uint8_t, 8> bytes, std::uint64_t modulus);

}  // namespace tallyhide
