#include "tallyhide/field.hpp"

#include <bit>
#include <string>

#include "tallyhide/errors.hpp"

namespace tallyhide {

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p), ell_(0), mersenne_exponent_(0) {
  if (p < 3 || p >= (std::uint64_t{1} << 32) || !is_prime(p)) {
    throw Error(Errc::invalid_prime,
                "modulus " + std::to_string(p) + " is not an odd prime below 2^32");
  }
  ell_ = static_cast<unsigned>(std::bit_width(p));
  if (std::has_single_bit(p + 1)) mersenne_exponent_ = ell_;
}

FieldElement PrimeField::reduce(std::uint64_t x) const noexcept {
  if (mersenne_exponent_ == 0) return {x % p_};
  // x < 2^(2t): two folds bring it below 2^t + 2, one subtraction finishes.
  const unsigned t = mersenne_exponent_;
  x = (x & p_) + (x >> t);
  x = (x & p_) + (x >> t);
  if (x >= p_) x -= p_;
  return {x};
}

FieldElement PrimeField::from_signed(std::int64_t v) const noexcept {
  const auto p = static_cast<std::int64_t>(p_);
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return {static_cast<std::uint64_t>(r)};
}

std::int64_t PrimeField::to_signed(FieldElement x) const noexcept {
  if (x.value > p_ / 2) return static_cast<std::int64_t>(x.value) - static_cast<std::int64_t>(p_);
  return static_cast<std::int64_t>(x.value);
}

FieldElement PrimeField::pow(FieldElement base, std::uint64_t exponent) const noexcept {
  FieldElement result = one();
  FieldElement power = base;
  while (exponent != 0) {
    if (exponent & 1) result = mul(result, power);
    exponent >>= 1;
    if (exponent != 0) power = mul(power, power);
  }
  return result;
}

FieldElement PrimeField::inv(FieldElement x) const {
  if (x.value == 0) throw Error(Errc::zero_inverse, "0 has no multiplicative inverse");
  return pow(x, p_ - 2);
}

bool PrimeField::is_square(FieldElement x) const noexcept {
  return x.value == 0 || pow(x, (p_ - 1) / 2) == one();
}

FieldElement PrimeField::sqrt(FieldElement x) const {
  if (x.value == 0) return zero();
  if (!is_square(x)) {
    throw Error(Errc::invalid_prime, std::to_string(x.value) + " is not a square mod " +
                                         std::to_string(p_));
  }
  FieldElement root;
  if (p_ % 4 == 3) {
    root = pow(x, (p_ + 1) / 4);
  } else {
    // Tonelli-Shanks.
    std::uint64_t q = p_ - 1;
    unsigned s = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++s;
    }
    FieldElement z{2};
    while (is_square(z)) z = add(z, one());
    unsigned m = s;
    FieldElement c = pow(z, q);
    FieldElement t = pow(x, q);
    root = pow(x, (q + 1) / 2);
    while (t != one()) {
      unsigned i = 0;
      FieldElement t2 = t;
      while (t2 != one()) {
        t2 = mul(t2, t2);
        ++i;
      }
      FieldElement b = c;
      for (unsigned j = 0; j + i + 1 < m; ++j) b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      root = mul(root, b);
    }
  }
  const FieldElement other = neg(root);
  return other.value < root.value ? other : root;
}

FieldElement PrimeField::random(Rng& rng) const {
  std::uniform_int_distribution<std::uint64_t> dist(0, p_ - 1);
  return {dist(rng)};
}

std::array<std::uint8_t, 8> encode_element(FieldElement x) noexcept {
  std::array<std::uint8_t, 8> out{};
  for (unsigned i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(x.value >> (8 * i));
  return out;
}

FieldElement decode_element(std::span<const std::uint8_t, 8> bytes, std::uint64_t modulus) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < 8; ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  if (v >= modulus) {
    throw Error(Errc::malformed_message,
                "field element " + std::to_string(v) + " not below " + std::to_string(modulus));
  }
  return {v};
}

}  // namespace tallyhide
