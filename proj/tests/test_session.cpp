#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "tallyhide/errors.hpp"
#include "tallyhide/oracle.hpp"

using namespace tallyhide;
using namespace tallyhide::testing;

namespace {

ElectionConfig config(Rule rule, unsigned M, unsigned K, unsigned D) {
  ElectionConfig c;
  c.rule = rule;
  for (unsigned m = 0; m < M; ++m) c.candidates.push_back("C" + std::to_string(m + 1));
  c.winners = K;
  c.talliers = D;
  c.seed = 17;
  return c;
}

std::vector<Ranking> strict_rankings(unsigned M, std::size_t n, Rng& rng) {
  std::vector<Ranking> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<unsigned> o(M);
    std::iota(o.begin(), o.end(), 0u);
    std::shuffle(o.begin(), o.end(), rng);
    out.push_back(Ranking::strict(o));
  }
  return out;
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("a full election delivers receipts and agrees with the oracle") {
  Rng rng(1);
  const auto c = config(Rule::copeland, 4, 2, 5);
  const auto rankings = strict_rankings(4, 12, rng);
  const auto run = run_election_local(c, cast_ballots(c, rankings, 9));
  CHECK(run.receipts == 12 * 5);
  CHECK(run.verdicts().size() == 12);
  const auto plain = plain_winners({c.rule, 4, 2, rankings, c.alpha, c.tie_break});
  CHECK(run.result().winners == plain.winners);
  for (const auto& p : run.parties) CHECK(p.result.winners == plain.winners);
}

TEST_CASE("rejected ballots are left out of the tally") {
  Rng rng(2);
  const auto c = config(Rule::maximin, 3, 1, 3);
  auto rankings = strict_rankings(3, 6, rng);
  auto ballots = cast_ballots(c, rankings, 4);
  // Voter 2 submits twice their legal matrix.
  const PrimeField f(c.prime);
  const auto q = ranking_to_matrix(Rule::maximin, Ranking::strict({0, 1, 2}), 3).scaled(2);
  ballots[1] = share_ballot(f, q, 3, 3, 2, rng);
  RunOptions opts;
  opts.open_scores = true;
  const auto run = run_election_local(c, ballots, opts);
  CHECK_FALSE(run.verdicts()[1].accepted);
  rankings.erase(rankings.begin() + 1);
  const auto plain = plain_winners({c.rule, 3, 1, rankings, c.alpha, c.tie_break});
  CHECK(*run.result().scores == plain.scores);
  CHECK(run.result().winners == plain.winners);
}

TEST_CASE("batch size does not change the outcome") {
  Rng rng(3);
  auto c = config(Rule::copeland, 3, 1, 3);
  const auto rankings = strict_rankings(3, 10, rng);
  const auto ballots = cast_ballots(c, rankings, 5);
  const auto whole = run_election_local(c, ballots);
  c.batch_size = 3;
  const auto split = run_election_local(c, ballots);
  CHECK(whole.result().winners == split.result().winners);
  // Four batches of validation instead of one.
  CHECK(split.parties[0].validation_counters.mul_layers == 4 * 3);
  CHECK(whole.parties[0].validation_counters.mul_layers == 3);
}

TEST_CASE("the first bundle per voter wins") {
  const PrimeField f = PrimeField::mersenne31();
  const auto c = config(Rule::copeland, 3, 1, 3);
  Rng rng(4);
  const auto first = share_ballot(f, ranking_to_matrix(c.rule, Ranking::strict({2, 0, 1}), 3), 3, 3, 1, rng);
  const auto second = share_ballot(f, ranking_to_matrix(c.rule, Ranking::strict({0, 1, 2}), 3), 3, 3, 1, rng);
  std::vector<TallierOutput> out(3);
  run_local_parties(protocol_params(c, 1), 1, [&](PartyContext& ctx) {
    const unsigned d = ctx.party() - 1;
    TallierOptions opts;
    opts.tally.open_scores = true;
    out[d] = run_tallier(ctx, c, {first.bundles[d], second.bundles[d]}, opts);
  });
  CHECK(out[0].verdicts.size() == 1);
  CHECK(out[0].result.winners == std::vector<unsigned>{2});
}

TEST_CASE("too many ballots for the field are refused") {
  auto c = config(Rule::copeland, 3, 1, 3);
  c.prime = 31;
  Rng rng(5);
  const auto rankings = strict_rankings(3, 16, rng);
  try {
    run_election_local(c, cast_ballots(c, rankings, 1));
    FAIL("2N >= p accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::field_too_small);
  }
}

TEST_CASE("every shared quantity reconstructs from any threshold subset") {
  Rng rng(6);
  for (unsigned D : {3u, 5u}) {
    const auto c = config(Rule::maximin, 3, 2, D);
    RunOptions opts;
    opts.trace = true;
    const auto run = run_election_local(c, cast_ballots(c, strict_rankings(3, 5, rng), 2), opts);
    const PrimeField f(c.prime);
    const unsigned t = threshold_for(D);
    PartyShares traced(D);
    for (unsigned d = 0; d < D; ++d) {
      for (const auto& batch : run.parties[d].traced) {
        traced[d].insert(traced[d].end(), batch.begin(), batch.end());
      }
    }
    REQUIRE(traced[0].size() > 100);
    for (unsigned d = 1; d < D; ++d) REQUIRE(traced[d].size() == traced[0].size());
    const auto groups = subsets(D, t);
    for (std::size_t i = 0; i < traced[0].size(); ++i) {
      const FieldElement ref = reconstruct(f, points_of(traced, i, groups.front()), t);
      for (const auto& g : groups) REQUIRE(reconstruct(f, points_of(traced, i, g), t) == ref);
    }
  }
}

}  // TEST_SUITE
