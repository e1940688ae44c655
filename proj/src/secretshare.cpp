#include "tallyhide/secretshare.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "tallyhide/errors.hpp"

namespace tallyhide {

namespace {

void check_distinct(std::span<const Share> points) {
  std::set<PartyIndex> seen;
  for (const Share& s : points) {
    if (s.party == 0) throw Error(Errc::duplicate_index, "evaluation point 0 is reserved");
    if (!seen.insert(s.party).second) {
      throw Error(Errc::duplicate_index, "evaluation point " + std::to_string(s.party) +
                                             " supplied twice");
    }
  }
}

void check_same_party(const SharedValue& a, const SharedValue& b) {
  if (a.party() != b.party()) {
    throw Error(Errc::mixed_indices, "shares of parties " + std::to_string(a.party()) + " and " +
                                         std::to_string(b.party()) + " combined");
  }
}

}  // namespace

std::vector<Share> ShareVector::points() const {
  std::vector<Share> out;
  out.reserve(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    out.push_back({static_cast<PartyIndex>(i + 1), shares[i]});
  }
  return out;
}

Polynomial::Polynomial(std::vector<FieldElement> coefficients)
    : coefficients_(std::move(coefficients)) {
  while (!coefficients_.empty() && coefficients_.back().value == 0) coefficients_.pop_back();
}

FieldElement Polynomial::evaluate(const PrimeField& field, FieldElement x) const noexcept {
  FieldElement acc = field.zero();
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc = field.add(field.mul(acc, x), *it);
  }
  return acc;
}

ShareVector share_with_coefficients(const PrimeField& field, FieldElement secret,
                                    std::span<const FieldElement> coefficients,
                                    unsigned parties) {
  const unsigned threshold = static_cast<unsigned>(coefficients.size()) + 1;
  if (threshold > parties || parties >= field.modulus()) {
    throw Error(Errc::invalid_threshold, "threshold " + std::to_string(threshold) + " with " +
                                             std::to_string(parties) + " parties over p = " +
                                             std::to_string(field.modulus()));
  }
  std::vector<FieldElement> all{secret};
  all.insert(all.end(), coefficients.begin(), coefficients.end());
  // Evaluate without stripping: the declared threshold is what matters.
  ShareVector out{threshold, {}};
  out.shares.reserve(parties);
  for (unsigned d = 1; d <= parties; ++d) {
    FieldElement acc = field.zero();
    const FieldElement x{d};
    for (auto it = all.rbegin(); it != all.rend(); ++it) acc = field.add(field.mul(acc, x), *it);
    out.shares.push_back(acc);
  }
  return out;
}

ShareVector share(const PrimeField& field, FieldElement secret, unsigned threshold,
                  unsigned parties, Rng& rng) {
  if (threshold == 0 || threshold > parties || parties >= field.modulus()) {
    throw Error(Errc::invalid_threshold, "threshold " + std::to_string(threshold) + " with " +
                                             std::to_string(parties) + " parties over p = " +
                                             std::to_string(field.modulus()));
  }
  std::vector<FieldElement> coefficients(threshold - 1);
  for (auto& c : coefficients) c = field.random(rng);
  return share_with_coefficients(field, secret, coefficients, parties);
}

std::vector<FieldElement> lagrange_at(const PrimeField& field, std::span<const PartyIndex> xs,
                                      FieldElement target) {
  std::vector<FieldElement> lambdas;
  lambdas.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    FieldElement num = field.one();
    FieldElement den = field.one();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      num = field.mul(num, field.sub(target, field.element(xs[j])));
      den = field.mul(den, field.sub(field.element(xs[i]), field.element(xs[j])));
    }
    lambdas.push_back(field.mul(num, field.inv(den)));
  }
  return lambdas;
}

std::vector<FieldElement> lagrange_at_zero(const PrimeField& field,
                                           std::span<const PartyIndex> xs) {
  return lagrange_at(field, xs, field.zero());
}

FieldElement reconstruct(const PrimeField& field, std::span<const Share> points,
                         unsigned threshold) {
  Reconstructor r(field);
  return r.reconstruct(points, threshold);
}

const std::vector<FieldElement>& Reconstructor::coefficients_for(std::span<const Share> points) {
  std::vector<PartyIndex> xs;
  xs.reserve(points.size());
  for (const Share& s : points) xs.push_back(s.party);
  auto it = cache_.find(xs);
  if (it == cache_.end()) {
    auto lambdas = lagrange_at_zero(field_, xs);
    it = cache_.emplace(std::move(xs), std::move(lambdas)).first;
  }
  return it->second;
}

FieldElement Reconstructor::reconstruct(std::span<const Share> points, unsigned threshold) {
  if (threshold == 0 || points.size() < threshold) {
    throw Error(Errc::insufficient_shares, std::to_string(points.size()) +
                                               " shares supplied, threshold is " +
                                               std::to_string(threshold));
  }
  check_distinct(points);
  const auto used = points.first(threshold);
  const auto& lambdas = coefficients_for(used);
  FieldElement acc = field_.zero();
  for (std::size_t i = 0; i < used.size(); ++i) {
    acc = field_.add(acc, field_.mul(lambdas[i], used[i].value));
  }
  return acc;
}

Polynomial interpolate_full(const PrimeField& field, std::span<const Share> points) {
  check_distinct(points);
  const std::size_t n = points.size();
  // Divided differences in place.
  std::vector<FieldElement> coef(n);
  for (std::size_t i = 0; i < n; ++i) coef[i] = points[i].value;
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      const FieldElement dx = field.sub(field.element(points[i].party),
                                        field.element(points[i - level].party));
      coef[i] = field.mul(field.sub(coef[i], coef[i - 1]), field.inv(dx));
    }
  }
  // Horner expansion of the Newton form into the monomial basis.
  std::vector<FieldElement> mono(n, field.zero());
  for (std::size_t k = n; k-- > 0;) {
    // mono <- mono * (x - x_k) + coef[k]
    const FieldElement xk = field.element(points[k].party);
    std::vector<FieldElement> next(n, field.zero());
    for (std::size_t j = 0; j < n; ++j) {
      if (mono[j].value == 0) continue;
      if (j + 1 < n) next[j + 1] = field.add(next[j + 1], mono[j]);
      next[j] = field.sub(next[j], field.mul(mono[j], xk));
    }
    next[0] = field.add(next[0], coef[k]);
    mono = std::move(next);
  }
  return Polynomial(std::move(mono));
}

Share local_lincomb(const PrimeField& field, std::span<const FieldElement> coeffs,
                    std::span<const Share> shares, FieldElement offset) {
  if (coeffs.size() != shares.size()) {
    throw Error(Errc::insufficient_shares, "coefficient and share counts differ");
  }
  if (shares.empty()) return {0, offset};
  const PartyIndex party = shares.front().party;
  FieldElement acc = offset;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (shares[i].party != party) {
      throw Error(Errc::mixed_indices, "shares of parties " + std::to_string(party) + " and " +
                                           std::to_string(shares[i].party) + " combined");
    }
    acc = field.add(acc, field.mul(coeffs[i], shares[i].value));
  }
  return {party, acc};
}

SharedValue add(const PrimeField& field, const SharedValue& a, const SharedValue& b) {
  check_same_party(a, b);
  return {{a.party(), field.add(a.value(), b.value())}, std::max(a.threshold, b.threshold)};
}

SharedValue sub(const PrimeField& field, const SharedValue& a, const SharedValue& b) {
  check_same_party(a, b);
  return {{a.party(), field.sub(a.value(), b.value())}, std::max(a.threshold, b.threshold)};
}

SharedValue scale(const PrimeField& field, const SharedValue& a, FieldElement c) {
  return {{a.party(), field.mul(a.value(), c)}, a.threshold};
}

SharedValue add_constant(const PrimeField& field, const SharedValue& a, FieldElement c) {
  return {{a.party(), field.add(a.value(), c)}, a.threshold};
}

SharedValue constant_minus(const PrimeField& field, FieldElement c, const SharedValue& a) {
  return {{a.party(), field.sub(c, a.value())}, a.threshold};
}

SharedValue public_constant(PartyIndex party, FieldElement c) { return {{party, c}, 1}; }

}  // namespace tallyhide
