#include "tallyhide/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "tallyhide/errors.hpp"

namespace tallyhide {

std::vector<std::vector<std::int64_t>> pairwise_matrix(const PlainElection& e) {
  const unsigned M = e.candidates;
  std::vector<std::vector<std::int64_t>> P(M, std::vector<std::int64_t>(M, 0));
  for (const auto& r : e.rankings) {
    const BallotMatrix q = ranking_to_matrix(e.rule, r, M);
    for (unsigned a = 0; a < M; ++a) {
      for (unsigned b = 0; b < M; ++b) P[a][b] += q.at(a, b);
    }
  }
  return P;
}

std::vector<unsigned> plain_top_k(std::span<const std::int64_t> scores, unsigned k, TieBreak) {
  std::vector<unsigned> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](unsigned a, unsigned b) { return scores[a] > scores[b]; });
  idx.resize(std::min<std::size_t>(k, idx.size()));
  return idx;
}

PlainOutcome plain_copeland(const PlainElection& e) {
  const auto P = pairwise_matrix(e);
  const unsigned M = e.candidates;
  const auto s = static_cast<std::int64_t>(e.alpha.s);
  const auto t = static_cast<std::int64_t>(e.alpha.t);
  PlainOutcome out;
  out.scores.assign(M, 0);
  for (unsigned m = 0; m < M; ++m) {
    for (unsigned mp = 0; mp < M; ++mp) {
      if (m == mp) continue;
      if (P[m][mp] > 0) out.scores[m] += t;
      if (P[m][mp] == 0) out.scores[m] += s;
    }
  }
  out.winners = plain_top_k(out.scores, e.winners, e.tie_break);
  return out;
}

PlainOutcome plain_maximin(const PlainElection& e) {
  const auto P = pairwise_matrix(e);
  const unsigned M = e.candidates;
  PlainOutcome out;
  out.scores.assign(M, 0);
  for (unsigned m = 0; m < M; ++m) {
    std::int64_t best = 0;
    bool any = false;
    for (unsigned mp = 0; mp < M; ++mp) {
      if (m == mp) continue;
      best = any ? std::min(best, P[m][mp]) : P[m][mp];
      any = true;
    }
    out.scores[m] = best;
  }
  out.winners = plain_top_k(out.scores, e.winners, e.tie_break);
  return out;
}

PlainOutcome plain_kemeny(const PlainElection& e) {
  const auto P = pairwise_matrix(e);
  const unsigned M = e.candidates;
  std::vector<unsigned> order(M);
  std::iota(order.begin(), order.end(), 0u);
  PlainOutcome out;
  bool first = true;
  do {
    std::int64_t w = 0;
    for (unsigned a = 0; a < M; ++a) {
      for (unsigned b = a + 1; b < M; ++b) w += P[order[a]][order[b]];
    }
    if (first || w > out.ranking_score) {
      out.ranking = order;
      out.ranking_score = w;
      first = false;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  out.winners.assign(out.ranking.begin(), out.ranking.begin() + std::min(e.winners, M));
  return out;
}

PlainOutcome plain_winners(const PlainElection& e) {
  switch (e.rule) {
    case Rule::copeland: return plain_copeland(e);
    case Rule::maximin: return plain_maximin(e);
    case Rule::kemeny: return plain_kemeny(e);
  }
  throw Error(Errc::invalid_rule, "unknown rule");
}

std::int64_t kemeny_agreements(std::span<const Ranking> rankings,
                               std::span<const unsigned> order) {
  std::int64_t total = 0;
  for (const auto& r : rankings) {
    for (std::size_t a = 0; a < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        // The voter agrees when they strictly prefer order[a] to order[b].
        if (r.is_weak()) {
          if (r.ranks[order[a]] < r.ranks[order[b]]) ++total;
        } else {
          const auto pa = std::find(r.order.begin(), r.order.end(), order[a]);
          const auto pb = std::find(r.order.begin(), r.order.end(), order[b]);
          if (pa < pb) ++total;
        }
      }
    }
  }
  return total;
}

namespace plain {

std::uint64_t lsb(std::uint64_t x) noexcept { return x & 1; }

std::uint64_t less_than_half(std::uint64_t p, std::uint64_t x) noexcept {
  return 2 * x < p ? 1 : 0;
}

std::uint64_t compare(std::uint64_t a, std::uint64_t b) noexcept { return a < b ? 1 : 0; }

std::uint64_t is_positive(std::uint64_t p, std::uint64_t x) noexcept {
  return x != 0 && 2 * x < p ? 1 : 0;
}

std::uint64_t is_zero(std::uint64_t x) noexcept { return x == 0 ? 1 : 0; }

}  // namespace plain

}  // namespace tallyhide
