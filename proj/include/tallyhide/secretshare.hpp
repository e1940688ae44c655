#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tallyhide/field.hpp"

namespace tallyhide {

/// Party index d in [1, D]; party d holds the evaluation at x = d.
using PartyIndex = std::uint16_t;

struct Share {
  PartyIndex party = 0;
  FieldElement value;

  friend constexpr bool operator==(const Share&, const Share&) = default;
};

/// One party's view of a shared secret: its single share plus the threshold
/// (polynomial degree + 1) of the sharing it belongs to.
struct SharedValue {
  Share share;
  unsigned threshold = 1;

  FieldElement value() const noexcept { return share.value; }
  PartyIndex party() const noexcept { return share.party; }
};

/// All D shares of one secret, as produced by a dealer. Entry d-1 is g(d).
struct ShareVector {
  unsigned threshold = 1;
  std::vector<FieldElement> shares;

  unsigned party_count() const noexcept { return static_cast<unsigned>(shares.size()); }
  Share at(PartyIndex d) const { return {d, shares.at(d - 1)}; }
  SharedValue shared_value(PartyIndex d) const { return {at(d), threshold}; }
  std::vector<Share> points() const;
};

/// Coefficients, constant term first. Trailing zeros are stripped on
/// construction so `degree()` is the true degree.
class Polynomial {
 public:
  static constexpr int kZeroDegree = -1;

  Polynomial() = default;
  explicit Polynomial(std::vector<FieldElement> coefficients);

  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
  bool is_zero() const noexcept { return coefficients_.empty(); }
  const std::vector<FieldElement>& coefficients() const noexcept { return coefficients_; }
  FieldElement evaluate(const PrimeField& field, FieldElement x) const noexcept;

 private:
  std::vector<FieldElement> coefficients_;
};

/// Shamir sharing of `secret` with a uniformly random polynomial of degree at
/// most threshold-1. Throws Error{invalid_threshold} unless
/// 1 <= threshold <= parties < p.
ShareVector share(const PrimeField& field, FieldElement secret, unsigned threshold,
                  unsigned parties, Rng& rng);

/// Sharing with caller-chosen coefficients a_1..a_k (k = threshold-1).
ShareVector share_with_coefficients(const PrimeField& field, FieldElement secret,
                                    std::span<const FieldElement> coefficients,
                                    unsigned parties);

/// Lagrange coefficients lambda_i with sum lambda_i * g(x_i) = g(0).
std::vector<FieldElement> lagrange_at_zero(const PrimeField& field,
                                           std::span<const PartyIndex> xs);

/// Coefficients mu_i with sum mu_i * g(x_i) = g(target).
std::vector<FieldElement> lagrange_at(const PrimeField& field, std::span<const PartyIndex> xs,
                                      FieldElement target);

/// g(0) for the degree <= threshold-1 interpolant through the first
/// `threshold` points. Throws insufficient_shares / duplicate_index.
FieldElement reconstruct(const PrimeField& field, std::span<const Share> points,
                         unsigned threshold);

/// The unique interpolant of degree <= points.size()-1 (Newton form,
/// expanded to coefficients). Throws duplicate_index.
Polynomial interpolate_full(const PrimeField& field, std::span<const Share> points);

/// sum coeffs_i * share_i + offset. All shares must belong to the same
/// party (Error{mixed_indices} otherwise).
Share local_lincomb(const PrimeField& field, std::span<const FieldElement> coeffs,
                    std::span<const Share> shares, FieldElement offset);

/// Reconstruction with Lagrange coefficients cached per evaluation subset.
class Reconstructor {
 public:
  explicit Reconstructor(const PrimeField& field) : field_(field) {}

  FieldElement reconstruct(std::span<const Share> points, unsigned threshold);

 private:
  const std::vector<FieldElement>& coefficients_for(std::span<const Share> points);

  PrimeField field_;
  std::map<std::vector<PartyIndex>, std::vector<FieldElement>> cache_;
};

// Local (communication-free) arithmetic on one party's shares. Thresholds of
// the result are the maximum of the operands'.
SharedValue add(const PrimeField& field, const SharedValue& a, const SharedValue& b);
SharedValue sub(const PrimeField& field, const SharedValue& a, const SharedValue& b);
SharedValue scale(const PrimeField& field, const SharedValue& a, FieldElement c);
SharedValue add_constant(const PrimeField& field, const SharedValue& a, FieldElement c);
/// c - a for public c.
SharedValue constant_minus(const PrimeField& field, FieldElement c, const SharedValue& a);
/// A public constant viewed as a (degree-0) sharing held by `party`.
SharedValue public_constant(PartyIndex party, FieldElement c);

}  // namespace tallyhide
