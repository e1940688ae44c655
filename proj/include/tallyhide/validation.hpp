#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tallyhide/ballot.hpp"
#include "tallyhide/engine.hpp"

namespace tallyhide {

enum class RejectReason {
  share_degree,
  entry_domain,
  column_sums,
  /// The bundle a tallier received does not carry the positions the rule
  /// requires (missing, extra or reordered entries).
  malformed,
};

std::string_view to_string(RejectReason reason) noexcept;

struct ValidationVerdict {
  std::uint64_t voter = 0;
  bool accepted = false;
  std::optional<RejectReason> reason;
  /// The opened square of the column-sum product (Copeland/Maximin ballots
  /// that reached that check).
  std::optional<FieldElement> distinct_sum_square;
  /// Entries recovered from a rejected ballot when reconstruction was asked
  /// for, as centred integers in shared-position order.
  std::optional<std::vector<std::int64_t>> recovered;
};

struct ValidationOptions {
  bool reconstruct_rejected = false;
};

/// Degree check of each shared entry: mask with a fresh random sharing,
/// broadcast, interpolate all D points, accept iff degree < D'.
std::vector<bool> verify_share_degree(PartyContext& ctx, const Shares& entries);

/// Domain test for one ballot's carried entries (shared-position order),
/// one multiplication layer plus one opening.
bool verify_entry_domain(PartyContext& ctx, Rule rule, unsigned candidates, const Shares& entries);

/// Column sums Q_m from the upper triangle; local only.
Shares column_sum_shares(const PrimeField& field, Rule rule, unsigned candidates,
                         const Shares& upper);

/// Opens the square of prod_{m'<m} (Q_m - Q_m') and accepts iff it is
/// nonzero. `opened` receives the square.
bool verify_distinct_sums(PartyContext& ctx, const Shares& sums,
                          FieldElement* opened = nullptr);

/// Validates this tallier's bundles of a batch of ballots. Every tallier must
/// pass bundles of the same voters in the same order. Condition-1 products
/// and the column-sum product chain share multiplication layers, so a batch
/// of B surviving Copeland/Maximin ballots costs exactly C(M,2) layers of 2B
/// gates.
std::vector<ValidationVerdict> batch_validate(PartyContext& ctx, Rule rule, unsigned candidates,
                                              std::span<const TallierBundle> bundles,
                                              const ValidationOptions& options = {});

}  // namespace tallyhide
