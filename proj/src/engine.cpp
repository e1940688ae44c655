#include "tallyhide/engine.hpp"

#include <bit>
#include <numeric>
#include <string>

#include "tallyhide/errors.hpp"

namespace tallyhide {

namespace {

constexpr unsigned kMaxLsbAttempts = 32;

std::vector<std::uint64_t> raw(const Shares& s) {
  std::vector<std::uint64_t> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i].value;
  return out;
}

void check_sizes(const Shares& a, const Shares& b) {
  if (a.size() != b.size()) {
    throw Error(Errc::insufficient_shares, "batch sizes " + std::to_string(a.size()) + " and " +
                                               std::to_string(b.size()) + " differ");
  }
}

}  // namespace

Counters Counters::since(const Counters& e) const {
  Counters d;
  d.mul_gates = mul_gates - e.mul_gates;
  d.mul_layers = mul_layers - e.mul_layers;
  d.rounds = rounds - e.rounds;
  d.opens = opens - e.opens;
  d.opened_values = opened_values - e.opened_values;
  d.random_sharings = random_sharings - e.random_sharings;
  d.double_sharings = double_sharings - e.double_sharings;
  d.random_bits = random_bits - e.random_bits;
  d.lsb_extractions = lsb_extractions - e.lsb_extractions;
  d.lsb_mul_gates = lsb_mul_gates - e.lsb_mul_gates;
  d.comparisons = comparisons - e.comparisons;
  d.positivity_tests = positivity_tests - e.positivity_tests;
  d.zero_tests = zero_tests - e.zero_tests;
  d.layer_sizes.assign(layer_sizes.begin() + static_cast<std::ptrdiff_t>(e.layer_sizes.size()),
                       layer_sizes.end());
  return d;
}

PartyContext::PartyContext(const ProtocolParams& params, Endpoint& endpoint, Rng rng)
    : params_(params), endpoint_(endpoint), party_(endpoint.self()), rng_(std::move(rng)) {
  const unsigned D = params_.talliers;
  const unsigned t = params_.threshold();
  if (D == 0 || D >= params_.field.modulus()) {
    throw Error(Errc::invalid_threshold, std::to_string(D) + " talliers over p = " +
                                             std::to_string(params_.field.modulus()));
  }
  if (2 * t - 1 > D) {
    throw Error(Errc::degree_overflow, "2D'-1 = " + std::to_string(2 * t - 1) + " exceeds D = " +
                                           std::to_string(D));
  }
  if (party_ < 1 || party_ > D) {
    throw Error(Errc::invalid_threshold, "party index " + std::to_string(party_) +
                                             " outside 1.." + std::to_string(D));
  }
  everyone_.resize(D);
  std::iota(everyone_.begin(), everyone_.end(), PartyIndex{1});
  const auto& f = params_.field;
  king_lambdas_ = lagrange_at_zero(f, std::span(everyone_).first(2 * t - 1));
  open_lambdas_ = lagrange_at_zero(f, std::span(everyone_).first(t));
  for (unsigned j = t + 1; j <= D; ++j) {
    check_lambdas_.push_back(lagrange_at(f, std::span(everyone_).first(t), f.element(j)));
  }
}

void PartyContext::trace(const Shares& shares) {
  if (tracing_) traced_.push_back(shares);
}

std::uint32_t PartyContext::next_round() {
  ++round_;
  counters_.rounds = round_;
  return round_;
}

Shares PartyContext::to_shares(const ProtocolMessage& msg, std::size_t expected) const {
  if (msg.payload.size() != expected) {
    throw Error(Errc::malformed_message, "party " + std::to_string(msg.sender) + " sent " +
                                             std::to_string(msg.payload.size()) +
                                             " values in round " + std::to_string(msg.round) +
                                             ", expected " + std::to_string(expected));
  }
  Shares out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    if (msg.payload[i] >= field().modulus()) {
      throw Error(Errc::malformed_message, "party " + std::to_string(msg.sender) +
                                               " sent out-of-field value " +
                                               std::to_string(msg.payload[i]));
    }
    out[i] = {msg.payload[i]};
  }
  return out;
}

std::map<PartyIndex, Shares> PartyContext::exchange(const std::vector<Shares>& outgoing) {
  const std::uint32_t r = next_round();
  const std::size_t n = outgoing.empty() ? 0 : outgoing.front().size();
  for (PartyIndex d : everyone_) {
    endpoint_.send(d, {params_.session, r, party_, MessageKind::pointwise, raw(outgoing[d - 1])});
  }
  auto got = endpoint_.await_round({params_.session, r, everyone_});
  std::map<PartyIndex, Shares> out;
  for (auto& [d, msg] : got) out.emplace(d, to_shares(msg, n));
  return out;
}

std::map<PartyIndex, Shares> PartyContext::broadcast_all(const Shares& payload) {
  const std::uint32_t r = next_round();
  endpoint_.broadcast(everyone_,
                      {params_.session, r, party_, MessageKind::broadcast, raw(payload)});
  auto got = endpoint_.await_round({params_.session, r, everyone_});
  std::map<PartyIndex, Shares> out;
  for (auto& [d, msg] : got) out.emplace(d, to_shares(msg, payload.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Randomness

void PartyContext::generate_random_sharings(std::size_t n) {
  const unsigned D = talliers();
  std::vector<Shares> outgoing(D, Shares(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto sv = share(field(), field().random(rng_), threshold(), D, rng_);
    for (unsigned d = 0; d < D; ++d) outgoing[d][i] = sv.shares[d];
  }
  auto got = exchange(outgoing);
  for (std::size_t i = 0; i < n; ++i) {
    FieldElement acc = field().zero();
    for (auto& [d, s] : got) acc = field().add(acc, s[i]);
    random_pool_.push_back(acc);
  }
  counters_.random_sharings += n;
}

void PartyContext::generate_double_sharings(std::size_t n) {
  const unsigned D = talliers();
  const unsigned t = threshold();
  std::vector<Shares> outgoing(D, Shares(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    const FieldElement r = field().random(rng_);
    const auto low = share(field(), r, t, D, rng_);
    const auto high = share(field(), r, 2 * t - 1, D, rng_);
    for (unsigned d = 0; d < D; ++d) {
      outgoing[d][2 * i] = low.shares[d];
      outgoing[d][2 * i + 1] = high.shares[d];
    }
  }
  auto got = exchange(outgoing);
  for (std::size_t i = 0; i < n; ++i) {
    DoubleSharing ds{field().zero(), field().zero()};
    for (auto& [d, s] : got) {
      ds.low = field().add(ds.low, s[2 * i]);
      ds.high = field().add(ds.high, s[2 * i + 1]);
    }
    double_pool_.push_back(ds);
  }
  counters_.double_sharings += n;
}

void PartyContext::pregenerate(std::size_t randoms, std::size_t doubles) {
  if (randoms > 0) generate_random_sharings(randoms);
  if (doubles > 0) generate_double_sharings(doubles);
}

Shares PartyContext::random_sharings(std::size_t n) {
  if (random_pool_.size() < n) generate_random_sharings(n - random_pool_.size());
  Shares out(random_pool_.begin(), random_pool_.begin() + static_cast<std::ptrdiff_t>(n));
  random_pool_.erase(random_pool_.begin(), random_pool_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::vector<DoubleSharing> PartyContext::double_sharings(std::size_t n) {
  if (double_pool_.size() < n) generate_double_sharings(n - double_pool_.size());
  std::vector<DoubleSharing> out(double_pool_.begin(),
                                 double_pool_.begin() + static_cast<std::ptrdiff_t>(n));
  double_pool_.erase(double_pool_.begin(), double_pool_.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Shares PartyContext::random_bits(std::size_t n) {
  const auto& f = field();
  const FieldElement half = f.inv(f.element(2));
  Shares out(n);
  std::vector<std::size_t> todo(n);
  std::iota(todo.begin(), todo.end(), std::size_t{0});
  while (!todo.empty()) {
    const Shares rho = random_sharings(todo.size());
    const Shares squares = open(mul(rho, rho), "random-bit-square");
    std::vector<std::size_t> retry;
    for (std::size_t i = 0; i < todo.size(); ++i) {
      if (squares[i].value == 0) {
        retry.push_back(todo[i]);
        continue;
      }
      // rho / sqrt(rho^2) is +1 or -1 with equal probability.
      const FieldElement sign = f.mul(rho[i], f.inv(f.sqrt(squares[i])));
      out[todo[i]] = f.mul(f.add(sign, f.one()), half);
    }
    todo = std::move(retry);
  }
  counters_.random_bits += n;
  return out;
}

// ---------------------------------------------------------------------------
// Multiplication and opening

Shares PartyContext::mul(const Shares& u, const Shares& v) {
  check_sizes(u, v);
  const std::size_t n = u.size();
  if (n == 0) return {};
  const auto& f = field();
  const unsigned t = threshold();
  const auto masks = double_sharings(n);

  // Round 1: masked degree-(2D'-2) products go to the king, T1.
  const std::uint32_t r1 = next_round();
  const bool contributes = party_ <= 2 * t - 1;
  if (contributes) {
    std::vector<std::uint64_t> masked(n);
    for (std::size_t i = 0; i < n; ++i) {
      masked[i] = f.add(f.mul(u[i], v[i]), masks[i].high).value;
    }
    endpoint_.send(1, {params_.session, r1, party_, MessageKind::pointwise, std::move(masked)});
  }
  std::vector<std::uint64_t> opened;
  if (party_ == 1) {
    std::vector<PartyIndex> senders(everyone_.begin(), everyone_.begin() + (2 * t - 1));
    auto got = endpoint_.await_round({params_.session, r1, senders});
    std::vector<Shares> values;
    for (auto& [d, msg] : got) values.push_back(to_shares(msg, n));
    opened.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      FieldElement acc = f.zero();
      for (std::size_t k = 0; k < values.size(); ++k) {
        acc = f.add(acc, f.mul(king_lambdas_[k], values[k][i]));
      }
      opened[i] = acc.value;
    }
  }

  // Round 2: the king broadcasts w + R.
  const std::uint32_t r2 = next_round();
  if (party_ == 1) {
    endpoint_.broadcast(everyone_,
                        {params_.session, r2, party_, MessageKind::broadcast, std::move(opened)});
  }
  auto got = endpoint_.await_round({params_.session, r2, {1}});
  const Shares w = to_shares(got.at(1), n);
  Shares out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f.sub(w[i], masks[i].low);

  counters_.mul_gates += n;
  counters_.mul_layers += 1;
  counters_.layer_sizes.push_back(n);
  trace(out);
  return out;
}

Shares PartyContext::open(const Shares& x, std::string_view tag) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const auto& f = field();
  const unsigned t = threshold();
  auto got = broadcast_all(x);
  std::vector<const Shares*> by_party;
  for (PartyIndex d : everyone_) by_party.push_back(&got.at(d));
  Shares out(n);
  for (std::size_t i = 0; i < n; ++i) {
    FieldElement acc = f.zero();
    for (unsigned k = 0; k < t; ++k) acc = f.add(acc, f.mul(open_lambdas_[k], (*by_party[k])[i]));
    out[i] = acc;
    for (std::size_t j = 0; j < check_lambdas_.size(); ++j) {
      FieldElement expect = f.zero();
      for (unsigned k = 0; k < t; ++k) {
        expect = f.add(expect, f.mul(check_lambdas_[j][k], (*by_party[k])[i]));
      }
      if (expect != (*by_party[t + j])[i]) {
        throw Error(Errc::inconsistent_open,
                    std::string(tag) + ": share of party " + std::to_string(t + j + 1) +
                        " is off the degree-" + std::to_string(t - 1) + " interpolant");
      }
    }
  }
  log_open(tag, out);
  return out;
}

void PartyContext::log_open(std::string_view tag, Shares values) {
  counters_.opens += 1;
  counters_.opened_values += values.size();
  open_log_.push_back({std::string(tag), std::move(values)});
}

// ---------------------------------------------------------------------------
// Comparison machinery

Shares PartyContext::compare_public_bits(const std::vector<std::uint64_t>& c,
                                         const Shares& r_bits, bool public_below) {
  const auto& f = field();
  const std::size_t ell = f.bit_length();
  const std::size_t n = c.size();
  if (r_bits.size() != n * ell) {
    throw Error(Errc::insufficient_shares, "expected " + std::to_string(n * ell) + " bit shares");
  }
  // d_i = c_i xor r_i, linear because c is public.
  Shares e(n * ell);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < ell; ++i) {
      const FieldElement r = r_bits[k * ell + i];
      e[k * ell + i] = ((c[k] >> i) & 1) ? f.sub(f.one(), r) : r;
    }
  }
  // Prefix OR from the most significant bit: e_i = OR_{j >= i} d_j.
  for (std::size_t s = 1; s < ell; s *= 2) {
    Shares a, b;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i + s < ell; ++i) {
        a.push_back(e[k * ell + i]);
        b.push_back(e[k * ell + i + s]);
      }
    }
    const Shares ab = mul(a, b);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i + s < ell; ++i, ++idx) {
        e[k * ell + i] = f.sub(f.add(a[idx], b[idx]), ab[idx]);
      }
    }
  }
  // f_i = e_i - e_{i+1} marks the highest differing bit.
  Shares out(n, f.zero());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < ell; ++i) {
      const bool ci = (c[k] >> i) & 1;
      if (ci == public_below) continue;
      const FieldElement next = i + 1 < ell ? e[k * ell + i + 1] : f.zero();
      out[k] = f.add(out[k], f.sub(e[k * ell + i], next));
    }
  }
  return out;
}

Shares PartyContext::shared_lsb(const Shares& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const auto& f = field();
  const std::size_t ell = f.bit_length();
  const std::uint64_t gates_before = counters_.mul_gates;

  // Bitwise-shared r, resampled until r < p.
  Shares bits(n * ell);
  std::vector<std::size_t> pending(n);
  std::iota(pending.begin(), pending.end(), std::size_t{0});
  for (unsigned attempt = 0; !pending.empty(); ++attempt) {
    if (attempt == kMaxLsbAttempts) {
      throw Error(Errc::retry_exhausted, std::to_string(pending.size()) +
                                             " masks still out of range after " +
                                             std::to_string(kMaxLsbAttempts) + " attempts");
    }
    const Shares fresh = random_bits(pending.size() * ell);
    for (std::size_t k = 0; k < pending.size(); ++k) {
      std::copy_n(fresh.begin() + static_cast<std::ptrdiff_t>(k * ell), ell,
                  bits.begin() + static_cast<std::ptrdiff_t>(pending[k] * ell));
    }
    const std::vector<std::uint64_t> modulus(pending.size(), f.modulus());
    const Shares in_range = open(compare_public_bits(modulus, fresh, false), "lsb-range-check");
    std::vector<std::size_t> again;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (in_range[k].value == 0) again.push_back(pending[k]);
    }
    pending = std::move(again);
  }

  Shares masked(n);
  for (std::size_t k = 0; k < n; ++k) {
    FieldElement acc = x[k];
    for (std::size_t i = 0; i < ell; ++i) {
      acc = f.add(acc, f.mul(f.element(std::uint64_t{1} << i), bits[k * ell + i]));
    }
    masked[k] = acc;
  }
  const Shares c = open(masked, "lsb-masked");
  std::vector<std::uint64_t> c_raw = raw(c);
  // x + r wrapped past p exactly when c < r; p odd, so the wrap flips the LSB.
  const Shares wrapped = compare_public_bits(c_raw, bits, true);
  Shares t(n);
  for (std::size_t k = 0; k < n; ++k) {
    const FieldElement r0 = bits[k * ell];
    t[k] = (c_raw[k] & 1) ? f.sub(f.one(), r0) : r0;
  }
  const Shares tw = mul(t, wrapped);
  Shares out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = f.sub(f.add(t[k], wrapped[k]), f.add(tw[k], tw[k]));
  }
  counters_.lsb_extractions += n;
  counters_.lsb_mul_gates += counters_.mul_gates - gates_before;
  return out;
}

Shares PartyContext::less_than_half(const Shares& x) {
  const auto& f = field();
  Shares doubled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) doubled[i] = f.add(x[i], x[i]);
  Shares lsb = shared_lsb(doubled);
  for (auto& b : lsb) b = f.sub(f.one(), b);
  return lsb;
}

Shares PartyContext::compare(const Shares& a, const Shares& b) {
  check_sizes(a, b);
  const std::size_t n = a.size();
  if (n == 0) return {};
  const auto& f = field();
  Shares all;
  all.reserve(3 * n);
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) all.push_back(f.sub(a[i], b[i]));
  const Shares h = less_than_half(all);
  const Shares w(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(n));
  const Shares x(h.begin() + static_cast<std::ptrdiff_t>(n),
                 h.begin() + static_cast<std::ptrdiff_t>(2 * n));
  const Shares y(h.begin() + static_cast<std::ptrdiff_t>(2 * n), h.end());

  // z = 1 - x - y + xy + w(x + y - 2xy)
  const Shares xy = mul(x, y);
  Shares s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = f.sub(f.add(x[i], y[i]), f.add(xy[i], xy[i]));
  const Shares ws = mul(w, s);
  Shares z(n);
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = f.add(f.sub(f.sub(f.one(), x[i]), y[i]), f.add(xy[i], ws[i]));
  }
  counters_.comparisons += n;
  return z;
}

Shares PartyContext::is_positive(const Shares& x) {
  const auto& f = field();
  Shares m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = f.neg(f.add(x[i], x[i]));
  counters_.positivity_tests += x.size();
  return shared_lsb(m);
}

Shares PartyContext::is_zero(const Shares& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const auto& f = field();
  // x^(p-1) right to left; the accumulate and the square of one step share a layer.
  const std::uint64_t e = f.modulus() - 1;
  const unsigned top = static_cast<unsigned>(std::bit_width(e));
  Shares power = x;
  Shares acc;
  for (unsigned i = 0; i < top; ++i) {
    const bool take = (e >> i) & 1;
    const bool square = i + 1 < top;
    Shares a, b;
    if (take && !acc.empty()) {
      a.insert(a.end(), acc.begin(), acc.end());
      b.insert(b.end(), power.begin(), power.end());
    }
    if (square) {
      a.insert(a.end(), power.begin(), power.end());
      b.insert(b.end(), power.begin(), power.end());
    }
    const Shares prod = mul(a, b);
    std::size_t off = 0;
    if (take) {
      if (acc.empty()) {
        acc = power;
      } else {
        acc.assign(prod.begin(), prod.begin() + static_cast<std::ptrdiff_t>(n));
        off = n;
      }
    }
    if (square) power.assign(prod.begin() + static_cast<std::ptrdiff_t>(off), prod.end());
  }
  for (auto& v : acc) v = f.sub(f.one(), v);
  counters_.zero_tests += n;
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

SharedValue wrap(PartyContext& ctx, FieldElement v) {
  return {{ctx.party(), v}, ctx.threshold()};
}

SecretBit bit(PartyContext& ctx, const Shares& s) { return {wrap(ctx, s.front())}; }

}  // namespace

SharedValue gen_random_sharing(PartyContext& ctx) {
  return wrap(ctx, ctx.random_sharings(1).front());
}

DoubleSharing gen_double_sharing(PartyContext& ctx) { return ctx.double_sharings(1).front(); }

SharedValue mul_gate(PartyContext& ctx, const SharedValue& u, const SharedValue& v) {
  return wrap(ctx, ctx.mul({u.value()}, {v.value()}).front());
}

FieldElement open(PartyContext& ctx, const SharedValue& x) {
  return ctx.open({x.value()}, "open").front();
}

SecretBit shared_lsb(PartyContext& ctx, const SharedValue& x) {
  return bit(ctx, ctx.shared_lsb({x.value()}));
}

SecretBit less_than_half(PartyContext& ctx, const SharedValue& x) {
  return bit(ctx, ctx.less_than_half({x.value()}));
}

SecretBit compare(PartyContext& ctx, const SharedValue& a, const SharedValue& b) {
  return bit(ctx, ctx.compare({a.value()}, {b.value()}));
}

SecretBit is_positive(PartyContext& ctx, const SharedValue& x) {
  return bit(ctx, ctx.is_positive({x.value()}));
}

SecretBit is_zero(PartyContext& ctx, const SharedValue& x) {
  return bit(ctx, ctx.is_zero({x.value()}));
}

}  // namespace tallyhide
