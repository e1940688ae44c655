#pragma once

#include <functional>
#include <vector>

#include "tallyhide/engine.hpp"
#include "tallyhide/secretshare.hpp"
#include "tallyhide/session.hpp"

namespace tallyhide::testing {

/// Per-party share batches: result[d-1][i] is party d's share of value i.
using PartyShares = std::vector<Shares>;

inline PartyShares deal(const PrimeField& f, const std::vector<FieldElement>& values,
                        unsigned talliers, Rng& rng) {
  PartyShares out(talliers);
  for (FieldElement v : values) {
    const ShareVector sv = share(f, v, threshold_for(talliers), talliers, rng);
    for (unsigned d = 0; d < talliers; ++d) out[d].push_back(sv.shares[d]);
  }
  return out;
}

/// Runs `fn` on every party and gathers the share batches it returns.
inline PartyShares run_all(const ProtocolParams& params, std::uint64_t seed,
                           const std::function<Shares(PartyContext&)>& fn) {
  PartyShares out(params.talliers);
  run_local_parties(params, seed, [&](PartyContext& ctx) { out[ctx.party() - 1] = fn(ctx); });
  return out;
}

/// Points (d, share of value i) for the parties in `subset`.
inline std::vector<Share> points_of(const PartyShares& shares, std::size_t i,
                                    const std::vector<PartyIndex>& subset) {
  std::vector<Share> pts;
  for (PartyIndex d : subset) pts.push_back({d, shares[d - 1][i]});
  return pts;
}

inline std::vector<PartyIndex> all_parties(unsigned talliers) {
  std::vector<PartyIndex> v;
  for (unsigned d = 1; d <= talliers; ++d) v.push_back(static_cast<PartyIndex>(d));
  return v;
}

inline FieldElement reveal(const PrimeField& f, const PartyShares& shares, std::size_t i) {
  const unsigned D = static_cast<unsigned>(shares.size());
  return reconstruct(f, points_of(shares, i, all_parties(D)), threshold_for(D));
}

/// Every k-subset of {1..n}.
inline std::vector<std::vector<PartyIndex>> subsets(unsigned n, unsigned k) {
  std::vector<std::vector<PartyIndex>> out;
  std::vector<PartyIndex> cur;
  std::function<void(unsigned)> rec = [&](unsigned next) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (unsigned d = next; d <= n; ++d) {
      cur.push_back(static_cast<PartyIndex>(d));
      rec(d + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return out;
}

}  // namespace tallyhide::testing
