#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tallyhide/ballot.hpp"

namespace tallyhide {

struct PlainElection {
  Rule rule = Rule::copeland;
  unsigned candidates = 0;
  unsigned winners = 1;
  std::vector<Ranking> rankings;
  Alpha alpha;
  TieBreak tie_break = TieBreak::lowest_index;
};

struct PlainOutcome {
  std::vector<unsigned> winners;
  /// t*w(m) for Copeland, w(m) for Maximin; empty for Kemeny.
  std::vector<std::int64_t> scores;
  std::vector<unsigned> ranking;  // Kemeny only
  std::int64_t ranking_score = 0;
};

/// P = sum of ballot matrices. Throws Error{invalid_ranking}.
std::vector<std::vector<std::int64_t>> pairwise_matrix(const PlainElection& e);

PlainOutcome plain_copeland(const PlainElection& e);
PlainOutcome plain_maximin(const PlainElection& e);
/// Brute force over all M! rankings; the lexicographically first best one wins.
PlainOutcome plain_kemeny(const PlainElection& e);
PlainOutcome plain_winners(const PlainElection& e);

/// Indices of the k largest scores, lower index first among equals.
std::vector<unsigned> plain_top_k(std::span<const std::int64_t> scores, unsigned k,
                                  TieBreak tie_break);

/// Kemeny score of `order` counted voter by voter, without building P.
std::int64_t kemeny_agreements(std::span<const Ranking> rankings,
                               std::span<const unsigned> order);

// Ideal functionalities of the engine primitives over Z_p.
namespace plain {
std::uint64_t lsb(std::uint64_t x) noexcept;
std::uint64_t less_than_half(std::uint64_t p, std::uint64_t x) noexcept;
std::uint64_t compare(std::uint64_t a, std::uint64_t b) noexcept;
/// x embeds a signed integer; 1 iff it is positive.
std::uint64_t is_positive(std::uint64_t p, std::uint64_t x) noexcept;
std::uint64_t is_zero(std::uint64_t x) noexcept;
}  // namespace plain

}  // namespace tallyhide
