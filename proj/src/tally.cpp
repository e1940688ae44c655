#include "tallyhide/tally.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tallyhide/errors.hpp"

namespace tallyhide {

FieldElement AggregatedShares::at(const PrimeField& f, unsigned row, unsigned col) const {
  auto find = [&](unsigned r, unsigned c) -> const FieldElement* {
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (positions[i] == std::pair{r, c}) return &values[i];
    }
    return nullptr;
  };
  if (const auto* v = find(row, col)) return *v;
  if (rule != Rule::kemeny) {
    if (const auto* v = find(col, row)) {
      if (rule == Rule::copeland) return f.neg(*v);
      return f.sub(f.element(accepted), *v);
    }
  }
  throw Error(Errc::rule_mismatch, "no aggregate entry for (" + std::to_string(row + 1) + ", " +
                                       std::to_string(col + 1) + ")");
}

AggregatedShares aggregate(const PrimeField& f, Rule rule, unsigned candidates,
                           std::span<const TallierBundle> accepted) {
  AggregatedShares agg;
  agg.rule = rule;
  agg.candidates = candidates;
  agg.positions = shared_positions(rule, candidates);
  agg.values.assign(agg.positions.size(), f.zero());
  agg.accepted = accepted.size();
  for (const auto& bundle : accepted) {
    if (bundle.entries.size() != agg.positions.size()) {
      throw Error(Errc::rule_mismatch, "ballot of voter " + std::to_string(bundle.voter) +
                                           " has " + std::to_string(bundle.entries.size()) +
                                           " entries, " + std::string(to_string(rule)) +
                                           " needs " + std::to_string(agg.positions.size()));
    }
    for (std::size_t i = 0; i < agg.positions.size(); ++i) {
      const auto& e = bundle.entries[i];
      if (std::pair{e.row, e.col} != agg.positions[i]) {
        throw Error(Errc::rule_mismatch, "ballot of voter " + std::to_string(bundle.voter) +
                                             " carries entries in the wrong positions");
      }
      agg.values[i] = f.add(agg.values[i], e.share);
    }
  }
  return agg;
}

Shares copeland_scores(PartyContext& ctx, const AggregatedShares& agg, Alpha alpha) {
  const auto& f = ctx.field();
  const unsigned M = agg.candidates;
  const Shares& P = agg.values;
  const std::size_t C = P.size();
  Shares signed_both(P);
  for (FieldElement v : P) signed_both.push_back(f.neg(v));
  const Shares positive = ctx.is_positive(signed_both);
  const Shares zero = ctx.is_zero(P);
  const FieldElement s = f.element(alpha.s);
  const FieldElement t = f.element(alpha.t);
  Shares scores(M, f.zero());
  for (std::size_t k = 0; k < C; ++k) {
    auto [m, mp] = agg.positions[k];
    // m beats m' when P(m,m') > 0, m' beats m when -P(m,m') > 0.
    scores[m] = f.add(scores[m], f.mul(t, positive[k]));
    scores[mp] = f.add(scores[mp], f.mul(t, positive[C + k]));
    const FieldElement tie = f.mul(s, zero[k]);
    scores[m] = f.add(scores[m], tie);
    scores[mp] = f.add(scores[mp], tie);
  }
  return scores;
}

Shares maximin_scores(PartyContext& ctx, const AggregatedShares& agg) {
  const auto& f = ctx.field();
  const unsigned M = agg.candidates;
  std::vector<Shares> lists(M);
  for (unsigned m = 0; m < M; ++m) {
    for (unsigned mp = 0; mp < M; ++mp) {
      if (mp != m) lists[m].push_back(agg.at(f, m, mp));
    }
  }
  // Tournament minimum, all candidates in the same rounds.
  while (std::any_of(lists.begin(), lists.end(), [](const Shares& l) { return l.size() > 1; })) {
    Shares lhs, rhs;
    for (const auto& l : lists) {
      for (std::size_t i = 0; i + 1 < l.size(); i += 2) {
        lhs.push_back(l[i]);
        rhs.push_back(l[i + 1]);
      }
    }
    const Shares z = ctx.compare(rhs, lhs);  // [b < a]
    Shares diff(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = f.sub(rhs[i], lhs[i]);
    const Shares step = ctx.mul(z, diff);
    std::size_t idx = 0;
    for (auto& l : lists) {
      Shares next;
      for (std::size_t i = 0; i + 1 < l.size(); i += 2, ++idx) {
        next.push_back(f.add(lhs[idx], step[idx]));
      }
      if (l.size() % 2 == 1) next.push_back(l.back());
      l = std::move(next);
    }
  }
  Shares out(M, f.zero());
  for (unsigned m = 0; m < M; ++m) {
    if (!lists[m].empty()) out[m] = lists[m].front();
  }
  return out;
}

namespace {

struct Contender {
  FieldElement score;
  FieldElement index;  // share of a public-at-start index
};

// Shared (score, index) of the maximum; the left operand wins ties, so the
// lowest-indexed maximum survives when contenders are in index order.
Contender tournament_max(PartyContext& ctx, std::vector<Contender> items) {
  const auto& f = ctx.field();
  while (items.size() > 1) {
    Shares ls, rs;
    for (std::size_t i = 0; i + 1 < items.size(); i += 2) {
      ls.push_back(items[i].score);
      rs.push_back(items[i + 1].score);
    }
    const std::size_t n = ls.size();
    const Shares z = ctx.compare(ls, rs);  // right wins iff left < right
    Shares zz(z);
    zz.insert(zz.end(), z.begin(), z.end());
    Shares diffs(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      diffs[i] = f.sub(items[2 * i + 1].score, items[2 * i].score);
      diffs[n + i] = f.sub(items[2 * i + 1].index, items[2 * i].index);
    }
    const Shares step = ctx.mul(zz, diffs);
    std::vector<Contender> next;
    for (std::size_t i = 0; i < n; ++i) {
      next.push_back({f.add(items[2 * i].score, step[i]), f.add(items[2 * i].index, step[n + i])});
    }
    if (items.size() % 2 == 1) next.push_back(items.back());
    items = std::move(next);
  }
  return items.front();
}

}  // namespace

std::vector<unsigned> top_k(PartyContext& ctx, const Shares& scores, unsigned k) {
  const auto& f = ctx.field();
  const unsigned M = static_cast<unsigned>(scores.size());
  if (k > M) {
    throw Error(Errc::invalid_config, "K = " + std::to_string(k) + " exceeds M = " +
                                          std::to_string(M));
  }
  std::vector<unsigned> pool(M);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<unsigned> winners;
  for (unsigned stage = 0; stage < k; ++stage) {
    std::vector<Contender> items;
    for (unsigned c : pool) items.push_back({scores[c], f.element(c)});
    unsigned winner = pool.front();
    if (items.size() > 1) {
      const Contender best = tournament_max(ctx, std::move(items));
      const FieldElement opened = ctx.open({best.index}, "winner-index").front();
      winner = static_cast<unsigned>(opened.value);
      if (std::find(pool.begin(), pool.end(), winner) == pool.end()) {
        throw Error(Errc::inconsistent_open, "opened winner index " + std::to_string(winner) +
                                                 " is not in the remaining pool");
      }
    }
    winners.push_back(winner);
    pool.erase(std::find(pool.begin(), pool.end(), winner));
  }
  return winners;
}

KemenyOutcome kemeny_winners(PartyContext& ctx, const AggregatedShares& agg, bool open_score) {
  const auto& f = ctx.field();
  const unsigned M = agg.candidates;
  if (M > kMaxKemenyCandidates) {
    throw Error(Errc::too_many_candidates,
                std::to_string(M) + " candidates; Kemeny enumeration is limited to " +
                    std::to_string(kMaxKemenyCandidates));
  }
  std::vector<std::vector<unsigned>> rankings;
  std::vector<unsigned> order(M);
  std::iota(order.begin(), order.end(), 0u);
  do {
    rankings.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));

  // w(rho) = sum over pairs placed (m before l) of P(m, l); local.
  std::vector<Contender> items;
  for (std::size_t j = 0; j < rankings.size(); ++j) {
    const auto& r = rankings[j];
    FieldElement w = f.zero();
    for (unsigned a = 0; a < M; ++a) {
      for (unsigned b = a + 1; b < M; ++b) w = f.add(w, agg.at(f, r[a], r[b]));
    }
    items.push_back({w, f.element(j)});
  }
  KemenyOutcome out;
  if (items.size() == 1) {
    out.ranking = rankings.front();
    if (open_score) out.score = ctx.open({items.front().score}, "ranking-score").front();
    return out;
  }
  const Contender best = tournament_max(ctx, std::move(items));
  const std::uint64_t j = ctx.open({best.index}, "winning-ranking").front().value;
  if (j >= rankings.size()) {
    throw Error(Errc::inconsistent_open, "opened ranking index " + std::to_string(j) +
                                             " out of range");
  }
  out.ranking = rankings[j];
  out.ranking_index = j;
  if (open_score) out.score = ctx.open({best.score}, "ranking-score").front();
  return out;
}

TallyResult tally(PartyContext& ctx, const AggregatedShares& agg, unsigned k,
                  const TallyOptions& options) {
  const auto& f = ctx.field();
  const Counters before = ctx.counters();
  TallyResult result;
  result.rule = agg.rule;
  ctx.trace(agg.values);
  if (agg.rule == Rule::kemeny) {
    auto outcome = kemeny_winners(ctx, agg, options.open_scores);
    result.winners.assign(outcome.ranking.begin(), outcome.ranking.begin() + k);
    result.ranking = outcome.ranking;
    if (outcome.score) result.ranking_score = f.to_signed(*outcome.score);
  } else {
    result.score_shares = agg.rule == Rule::copeland ? copeland_scores(ctx, agg, options.alpha)
                                                     : maximin_scores(ctx, agg);
    ctx.trace(result.score_shares);
    if (options.open_scores) {
      const Shares opened = ctx.open(result.score_shares, "scores");
      std::vector<std::int64_t> scores;
      for (FieldElement v : opened) scores.push_back(f.to_signed(v));
      result.scores = std::move(scores);
    }
    result.winners = top_k(ctx, result.score_shares, k);
  }
  result.counters = ctx.counters().since(before);
  return result;
}

}  // namespace tallyhide
