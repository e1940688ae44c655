#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tallyhide/field.hpp"
#include "tallyhide/secretshare.hpp"

namespace tallyhide {

enum class Rule { copeland, maximin, kemeny };

std::string_view to_string(Rule rule) noexcept;
/// Throws Error{invalid_rule} for anything but copeland / maximin / kemeny.
Rule parse_rule(std::string_view name);

/// Weight of a pairwise tie in Copeland scoring, kept as the exact ratio s/t.
struct Alpha {
  std::uint64_t s = 1;
  std::uint64_t t = 2;

  friend bool operator==(const Alpha&, const Alpha&) = default;
};

/// How equal scores are ordered. Only one policy exists; the tally and the
/// plaintext reference both read it from the election configuration.
enum class TieBreak { lowest_index };

std::string_view to_string(TieBreak tie) noexcept;
TieBreak parse_tie_break(std::string_view name);

/// A voter's preferences. Strict rankings list candidate indices from most to
/// least preferred. Weak rankings give every candidate a rank in 1..M where a
/// smaller rank is better and equal ranks are ties.
struct Ranking {
  std::vector<unsigned> order;
  std::vector<unsigned> ranks;

  static Ranking strict(std::vector<unsigned> order);
  static Ranking weak(std::vector<unsigned> ranks);

  bool is_weak() const noexcept { return !ranks.empty(); }
  unsigned size() const noexcept {
    return static_cast<unsigned>(is_weak() ? ranks.size() : order.size());
  }
};

class BallotMatrix {
 public:
  BallotMatrix(Rule rule, unsigned candidates);

  Rule rule() const noexcept { return rule_; }
  unsigned candidates() const noexcept { return m_; }
  int at(unsigned row, unsigned col) const { return entries_.at(row * m_ + col); }
  void set(unsigned row, unsigned col, int value) { entries_.at(row * m_ + col) = value; }

  /// Sum of column m over all rows.
  int column_sum(unsigned m) const;
  std::vector<int> column_sums() const;
  /// The structural conditions a legal ballot of this rule satisfies
  /// (entry domain, zero diagonal, antisymmetry, and for Copeland/Maximin
  /// distinct column sums).
  bool is_legal() const;

  BallotMatrix scaled(int c) const;

  friend bool operator==(const BallotMatrix&, const BallotMatrix&) = default;

 private:
  Rule rule_;
  unsigned m_;
  std::vector<int> entries_;
};

/// Throws Error{invalid_ranking} if the ranking does not fit the rule or M.
BallotMatrix ranking_to_matrix(Rule rule, const Ranking& ranking, unsigned candidates);

struct MatrixEntry {
  unsigned row = 0;
  unsigned col = 0;
  int value = 0;

  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Entries above the diagonal in row-major order. Throws Error{wrong_rule}
/// for Kemeny ballots, whose lower triangle is not implied.
std::vector<MatrixEntry> project_upper(const BallotMatrix& q);
/// Rebuilds the full matrix from its upper triangle.
BallotMatrix expand_upper(Rule rule, unsigned candidates, std::span<const MatrixEntry> upper);

/// Matrix positions a shared ballot carries for this rule, in order: the
/// upper triangle for Copeland/Maximin, every off-diagonal cell for Kemeny.
std::vector<std::pair<unsigned, unsigned>> shared_positions(Rule rule, unsigned candidates);

struct EntryShare {
  unsigned row = 0;
  unsigned col = 0;
  FieldElement share;

  friend bool operator==(const EntryShare&, const EntryShare&) = default;
};

/// What one voter sends to one tallier.
struct TallierBundle {
  std::uint64_t voter = 0;
  PartyIndex tallier = 0;
  std::vector<EntryShare> entries;

  friend bool operator==(const TallierBundle&, const TallierBundle&) = default;
};

struct SharedBallot {
  std::uint64_t voter = 0;
  std::vector<TallierBundle> bundles;  // bundles[d-1] goes to tallier d
};

/// Shares every carried entry at threshold D' = floor((D+1)/2); negative
/// entries are embedded as p - |v|. Throws Error{config_mismatch} when the
/// matrix size differs from `candidates` or D is not below p.
SharedBallot share_ballot(const PrimeField& field, const BallotMatrix& q, unsigned candidates,
                          unsigned talliers, std::uint64_t voter, Rng& rng);

/// Flat wire form: voter, entry count, then (row, col, share) per entry.
std::vector<std::uint64_t> encode_bundle(const TallierBundle& bundle);
TallierBundle decode_bundle(std::span<const std::uint64_t> payload, PartyIndex tallier);

/// A voter owns its generator so ballots are reproducible under a seed.
class Voter {
 public:
  Voter(std::uint64_t id, std::uint64_t seed);

  std::uint64_t id() const noexcept { return id_; }
  SharedBallot cast(const PrimeField& field, Rule rule, const Ranking& ranking,
                    unsigned candidates, unsigned talliers);

 private:
  std::uint64_t id_;
  Rng rng_;
};

/// "C2,C1,C3": candidate names (or 1-based indices) most to least preferred.
Ranking parse_order(std::string_view text, std::span<const std::string> candidates);
/// "A=3,B=2,C=1,D=3": every candidate with a rank in 1..M.
Ranking parse_ranks(std::string_view text, std::span<const std::string> candidates);

}  // namespace tallyhide
