#include "tallyhide/validation.hpp"

#include "tallyhide/errors.hpp"

namespace tallyhide {

std::string_view to_string(RejectReason reason) noexcept {
  switch (reason) {
    case RejectReason::share_degree: return "ShareDegree";
    case RejectReason::entry_domain: return "EntryDomain";
    case RejectReason::column_sums: return "ColumnSums";
    case RejectReason::malformed: return "Malformed";
  }
  return "Unknown";
}

namespace {

// Factors Q_m - Q_m' for m' < m, in (m, m') lexicographic order.
Shares difference_factors(const PrimeField& f, const Shares& sums) {
  Shares out;
  for (std::size_t m = 0; m < sums.size(); ++m) {
    for (std::size_t mp = 0; mp < m; ++mp) out.push_back(f.sub(sums[m], sums[mp]));
  }
  return out;
}

// The two operands of the condition-1 product for one entry.
std::pair<FieldElement, FieldElement> domain_operands(const PrimeField& f, Rule rule,
                                                      FieldElement x) {
  if (rule == Rule::copeland) return {f.add(x, f.one()), f.sub(x, f.one())};
  return {x, f.sub(x, f.one())};
}

// Degree-check result for every entry of every ballot from the D broadcast
// vectors; also collects the opened constants.
struct DegreeOutcome {
  std::vector<bool> ok;
  Shares constants;
};

DegreeOutcome check_degrees(PartyContext& ctx, const std::map<PartyIndex, Shares>& got,
                            std::size_t count) {
  const auto& f = ctx.field();
  DegreeOutcome out{std::vector<bool>(count), Shares(count)};
  std::vector<Share> points(ctx.talliers());
  for (std::size_t i = 0; i < count; ++i) {
    for (unsigned d = 1; d <= ctx.talliers(); ++d) {
      points[d - 1] = {static_cast<PartyIndex>(d), got.at(static_cast<PartyIndex>(d))[i]};
    }
    const Polynomial g = interpolate_full(f, points);
    out.ok[i] = g.degree() <= static_cast<int>(ctx.threshold()) - 1;
    out.constants[i] = g.is_zero() ? f.zero() : g.coefficients().front();
  }
  return out;
}

}  // namespace

std::vector<bool> verify_share_degree(PartyContext& ctx, const Shares& entries) {
  const auto& f = ctx.field();
  const Shares masks = ctx.random_sharings(entries.size());
  Shares masked(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) masked[i] = f.add(entries[i], masks[i]);
  const auto got = ctx.broadcast_all(masked);
  auto outcome = check_degrees(ctx, got, entries.size());
  ctx.log_open("share-degree", std::move(outcome.constants));
  return outcome.ok;
}

bool verify_entry_domain(PartyContext& ctx, Rule rule, unsigned candidates,
                         const Shares& entries) {
  const auto& f = ctx.field();
  const auto positions = shared_positions(rule, candidates);
  if (entries.size() != positions.size()) {
    throw Error(Errc::config_mismatch, "ballot carries " + std::to_string(entries.size()) +
                                           " entries, rule needs " +
                                           std::to_string(positions.size()));
  }
  Shares a, b;
  for (FieldElement x : entries) {
    auto [u, v] = domain_operands(f, rule, x);
    a.push_back(u);
    b.push_back(v);
  }
  if (rule == Rule::kemeny) {
    // P(m,l) + P(l,m) must itself be 0 or 1.
    for (std::size_t i = 0; i < positions.size(); ++i) {
      auto [r, c] = positions[i];
      if (r > c) continue;
      for (std::size_t j = 0; j < positions.size(); ++j) {
        if (positions[j] == std::pair{c, r}) {
          const FieldElement s = f.add(entries[i], entries[j]);
          a.push_back(s);
          b.push_back(f.sub(s, f.one()));
        }
      }
    }
  }
  const Shares opened = ctx.open(ctx.mul(a, b), "entry-domain");
  for (FieldElement v : opened) {
    if (v.value != 0) return false;
  }
  return true;
}

Shares column_sum_shares(const PrimeField& f, Rule rule, unsigned candidates,
                         const Shares& upper) {
  if (rule == Rule::kemeny) {
    throw Error(Errc::wrong_rule, "Kemeny ballots have no column-sum condition");
  }
  Shares sums(candidates, f.zero());
  std::size_t k = 0;
  for (unsigned m = 0; m < candidates; ++m) {
    for (unsigned mp = m + 1; mp < candidates; ++mp, ++k) {
      // Q(m, m') contributes -Q(m, m') to Q_m and +Q(m, m') to Q_m'.
      sums[mp] = f.add(sums[mp], upper.at(k));
      sums[m] = f.sub(sums[m], upper.at(k));
    }
    if (rule == Rule::maximin) sums[m] = f.add(sums[m], f.element(candidates - 1 - m));
  }
  return sums;
}

bool verify_distinct_sums(PartyContext& ctx, const Shares& sums, FieldElement* opened) {
  const auto& f = ctx.field();
  const Shares factors = difference_factors(f, sums);
  FieldElement acc = f.one();
  if (!factors.empty()) {
    acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = ctx.mul({acc}, {factors[i]}).front();
    acc = ctx.mul({acc}, {acc}).front();
    acc = ctx.open({acc}, "column-sum-product").front();
  }
  if (opened) *opened = acc;
  return acc.value != 0;
}

std::vector<ValidationVerdict> batch_validate(PartyContext& ctx, Rule rule, unsigned candidates,
                                              std::span<const TallierBundle> bundles,
                                              const ValidationOptions& options) {
  const auto& f = ctx.field();
  const auto positions = shared_positions(rule, candidates);
  const std::size_t E = positions.size();
  const std::size_t B = bundles.size();
  std::vector<ValidationVerdict> verdicts(B);
  if (B == 0) return verdicts;

  // Local shape check. A bad bundle is replaced by zeros so every tallier
  // still runs the same circuit; the flag travels with the degree check.
  std::vector<Shares> entries(B, Shares(E, f.zero()));
  std::vector<bool> local_bad(B, false);
  for (std::size_t b = 0; b < B; ++b) {
    verdicts[b].voter = bundles[b].voter;
    const auto& got = bundles[b].entries;
    bool bad = got.size() != E;
    for (std::size_t i = 0; !bad && i < E; ++i) {
      bad = got[i].row != positions[i].first || got[i].col != positions[i].second ||
            got[i].share.value >= f.modulus();
    }
    local_bad[b] = bad;
    if (!bad) {
      for (std::size_t i = 0; i < E; ++i) entries[b][i] = got[i].share;
    }
  }

  // Share-degree check on every entry, malformed flags alongside.
  const Shares masks = ctx.random_sharings(B * E);
  Shares payload(B * E + B);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < E; ++i) payload[b * E + i] = f.add(entries[b][i], masks[b * E + i]);
    payload[B * E + b] = local_bad[b] ? f.one() : f.zero();
  }
  const auto got = ctx.broadcast_all(payload);
  auto degrees = check_degrees(ctx, got, B * E);
  ctx.log_open("share-degree", std::move(degrees.constants));

  std::vector<std::size_t> survivors;
  for (std::size_t b = 0; b < B; ++b) {
    bool malformed = false;
    for (const auto& [d, s] : got) malformed = malformed || s[B * E + b].value != 0;
    if (malformed) {
      verdicts[b].reason = RejectReason::malformed;
      continue;
    }
    bool legal = true;
    for (std::size_t i = 0; i < E; ++i) legal = legal && degrees.ok[b * E + i];
    if (!legal) {
      verdicts[b].reason = RejectReason::share_degree;
      continue;
    }
    survivors.push_back(b);
  }
  const std::size_t S = survivors.size();

  if (S > 0 && rule == Rule::kemeny) {
    // One layer: every entry and every pair sum.
    Shares a, bv;
    std::vector<std::pair<std::size_t, std::size_t>> pair_index;
    for (std::size_t i = 0; i < E; ++i) {
      auto [r, c] = positions[i];
      if (r > c) continue;
      for (std::size_t j = 0; j < E; ++j) {
        if (positions[j] == std::pair{c, r}) pair_index.emplace_back(i, j);
      }
    }
    for (std::size_t b : survivors) {
      for (std::size_t i = 0; i < E; ++i) {
        auto [u, v] = domain_operands(f, rule, entries[b][i]);
        a.push_back(u);
        bv.push_back(v);
      }
      for (auto [i, j] : pair_index) {
        const FieldElement s = f.add(entries[b][i], entries[b][j]);
        a.push_back(s);
        bv.push_back(f.sub(s, f.one()));
      }
    }
    const Shares opened = ctx.open(ctx.mul(a, bv), "entry-domain");
    const std::size_t per = E + pair_index.size();
    for (std::size_t k = 0; k < S; ++k) {
      bool ok = true;
      for (std::size_t i = 0; i < per; ++i) ok = ok && opened[k * per + i].value == 0;
      if (ok) {
        verdicts[survivors[k]].accepted = true;
      } else {
        verdicts[survivors[k]].reason = RejectReason::entry_domain;
      }
    }
  } else if (S > 0) {
    const std::size_t C = E;
    std::vector<Shares> factors(S);
    for (std::size_t k = 0; k < S; ++k) {
      factors[k] = difference_factors(f, column_sum_shares(f, rule, candidates,
                                                           entries[survivors[k]]));
    }
    Shares domain(S * C);
    Shares acc(S, f.one());
    for (std::size_t layer = 0; layer < C; ++layer) {
      Shares a(2 * S), bv(2 * S);
      for (std::size_t k = 0; k < S; ++k) {
        auto [u, v] = domain_operands(f, rule, entries[survivors[k]][layer]);
        a[k] = u;
        bv[k] = v;
        // Chain: f0*f1, then acc*f_{j+1}, and the final layer squares.
        if (C == 1) {
          a[S + k] = bv[S + k] = factors[k][0];
        } else if (layer == 0) {
          a[S + k] = factors[k][0];
          bv[S + k] = factors[k][1];
        } else if (layer + 1 < C) {
          a[S + k] = acc[k];
          bv[S + k] = factors[k][layer + 1];
        } else {
          a[S + k] = bv[S + k] = acc[k];
        }
      }
      const Shares prod = ctx.mul(a, bv);
      for (std::size_t k = 0; k < S; ++k) {
        domain[k * C + layer] = prod[k];
        acc[k] = prod[S + k];
      }
    }
    Shares to_open = domain;
    to_open.insert(to_open.end(), acc.begin(), acc.end());
    const Shares opened = C == 0 ? Shares(S, f.one()) : ctx.open(to_open, "ballot-checks");
    for (std::size_t k = 0; k < S; ++k) {
      auto& v = verdicts[survivors[k]];
      bool domain_ok = true;
      for (std::size_t i = 0; C > 0 && i < C; ++i) domain_ok = domain_ok && opened[k * C + i].value == 0;
      const FieldElement square = C == 0 ? f.one() : opened[S * C + k];
      v.distinct_sum_square = square;
      if (!domain_ok) {
        v.reason = RejectReason::entry_domain;
      } else if (square.value == 0) {
        v.reason = RejectReason::column_sums;
      } else {
        v.accepted = true;
      }
    }
  }

  if (options.reconstruct_rejected) {
    std::vector<std::size_t> rejected;
    Shares shares;
    for (std::size_t b = 0; b < B; ++b) {
      if (verdicts[b].accepted) continue;
      rejected.push_back(b);
      shares.insert(shares.end(), entries[b].begin(), entries[b].end());
    }
    if (!rejected.empty()) {
      // Reconstruct from the first D' points without the consistency check:
      // degree-illegal ballots would fail it.
      const auto all = ctx.broadcast_all(shares);
      std::vector<PartyIndex> xs(ctx.threshold());
      for (unsigned d = 0; d < ctx.threshold(); ++d) xs[d] = static_cast<PartyIndex>(d + 1);
      const auto lambdas = lagrange_at_zero(f, xs);
      Shares values(shares.size(), f.zero());
      for (std::size_t i = 0; i < shares.size(); ++i) {
        for (unsigned d = 0; d < ctx.threshold(); ++d) {
          values[i] = f.add(values[i], f.mul(lambdas[d], all.at(xs[d])[i]));
        }
      }
      for (std::size_t k = 0; k < rejected.size(); ++k) {
        std::vector<std::int64_t> rec(E);
        for (std::size_t i = 0; i < E; ++i) rec[i] = f.to_signed(values[k * E + i]);
        verdicts[rejected[k]].recovered = std::move(rec);
      }
      ctx.log_open("rejected-ballot", std::move(values));
    }
  }
  return verdicts;
}

}  // namespace tallyhide
