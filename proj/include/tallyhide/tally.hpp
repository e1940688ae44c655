#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tallyhide/ballot.hpp"
#include "tallyhide/engine.hpp"

namespace tallyhide {

/// Elementwise share sums over accepted ballots.
struct AggregatedShares {
  Rule rule = Rule::copeland;
  unsigned candidates = 0;
  std::vector<std::pair<unsigned, unsigned>> positions;
  Shares values;
  /// Public number of ballots summed.
  std::uint64_t accepted = 0;

  /// Share of P(row, col); for Copeland/Maximin the lower triangle is derived.
  FieldElement at(const PrimeField& field, unsigned row, unsigned col) const;
};

/// Throws Error{rule_mismatch} if a bundle does not carry the rule's positions.
AggregatedShares aggregate(const PrimeField& field, Rule rule, unsigned candidates,
                           std::span<const TallierBundle> accepted);

/// Shares of t * w(m) for Copeland with tie weight s/t.
Shares copeland_scores(PartyContext& ctx, const AggregatedShares& agg, Alpha alpha);
/// Shares of min over m' != m of P(m, m').
Shares maximin_scores(PartyContext& ctx, const AggregatedShares& agg);
/// Indices of the k highest scores in order; equal scores go to the lower
/// index. Only the winners' indices are opened.
std::vector<unsigned> top_k(PartyContext& ctx, const Shares& scores, unsigned k);

struct KemenyOutcome {
  /// Best ranking, most preferred first.
  std::vector<unsigned> ranking;
  /// Position of that ranking in lexicographic order of all M! rankings.
  std::uint64_t ranking_index = 0;
  std::optional<FieldElement> score;
};

inline constexpr unsigned kMaxKemenyCandidates = 6;

/// Throws Error{too_many_candidates} above kMaxKemenyCandidates.
KemenyOutcome kemeny_winners(PartyContext& ctx, const AggregatedShares& agg, bool open_score);

struct TallyOptions {
  Alpha alpha;
  TieBreak tie_break = TieBreak::lowest_index;
  bool open_scores = false;
};

struct TallyResult {
  Rule rule = Rule::copeland;
  std::vector<unsigned> winners;
  /// Opened per-candidate scores (t*w for Copeland), only on request.
  std::optional<std::vector<std::int64_t>> scores;
  std::optional<std::vector<unsigned>> ranking;
  std::optional<std::int64_t> ranking_score;
  Counters counters;
  /// This party's shares of the candidate scores, kept for auditing.
  Shares score_shares;
};

TallyResult tally(PartyContext& ctx, const AggregatedShares& agg, unsigned k,
                  const TallyOptions& options);

}  // namespace tallyhide
