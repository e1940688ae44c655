#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "tallyhide/errors.hpp"
#include "tallyhide/oracle.hpp"
#include "tallyhide/tally.hpp"

using namespace tallyhide;
using namespace tallyhide::testing;

namespace {

std::vector<Ranking> random_rankings(Rule rule, unsigned M, std::size_t n, Rng& rng) {
  std::vector<Ranking> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rule == Rule::kemeny) {
      std::uniform_int_distribution<unsigned> r(1, M);
      std::vector<unsigned> ranks(M);
      for (auto& x : ranks) x = r(rng);
      out.push_back(Ranking::weak(ranks));
    } else {
      std::vector<unsigned> order(M);
      std::iota(order.begin(), order.end(), 0u);
      std::shuffle(order.begin(), order.end(), rng);
      out.push_back(Ranking::strict(order));
    }
  }
  return out;
}

struct Run {
  TallyResult result;
  AggregatedShares agg;
};

Run run_tally(Rule rule, unsigned M, unsigned K, unsigned D, const std::vector<Ranking>& rankings,
              TallyOptions options) {
  const PrimeField f = PrimeField::mersenne31();
  std::vector<SharedBallot> ballots;
  for (std::size_t n = 0; n < rankings.size(); ++n) {
    Voter v(n + 1, 77);
    ballots.push_back(v.cast(f, rule, rankings[n], M, D));
  }
  std::vector<Run> out(D);
  run_local_parties({f, D, 1}, 5, [&](PartyContext& ctx) {
    std::vector<TallierBundle> mine;
    for (const auto& b : ballots) mine.push_back(b.bundles[ctx.party() - 1]);
    auto agg = aggregate(f, rule, M, mine);
    out[ctx.party() - 1] = {tally(ctx, agg, K, options), agg};
  });
  for (const auto& r : out) REQUIRE(r.result.winners == out[0].result.winners);
  return out[0];
}

}  // namespace

TEST_SUITE("tally") {

TEST_CASE("MPC winners and scores equal the plaintext ones") {
  Rng rng(1);
  for (Rule rule : {Rule::copeland, Rule::maximin, Rule::kemeny}) {
    for (unsigned M : {2u, 3u, 4u}) {
      for (int trial = 0; trial < 4; ++trial) {
        const unsigned K = 1 + trial % M;
        const auto rankings = random_rankings(rule, M, 3 + 4 * trial, rng);
        Alpha alpha{static_cast<std::uint64_t>(trial % 3), 2};
        const auto run = run_tally(rule, M, K, 3, rankings, {alpha, TieBreak::lowest_index, true});
        const auto plain = plain_winners({rule, M, K, rankings, alpha, TieBreak::lowest_index});
        CAPTURE(to_string(rule));
        CAPTURE(M);
        CHECK(run.result.winners == plain.winners);
        if (rule == Rule::kemeny) {
          CHECK(*run.result.ranking == plain.ranking);
          CHECK(*run.result.ranking_score == plain.ranking_score);
        } else {
          CHECK(*run.result.scores == plain.scores);
        }
      }
    }
  }
}

TEST_CASE("all-tied elections resolve to the lowest indices") {
  std::vector<Ranking> cycle = {Ranking::strict({0, 1, 2}), Ranking::strict({1, 2, 0}),
                                Ranking::strict({2, 0, 1})};
  for (Rule rule : {Rule::copeland, Rule::maximin}) {
    const auto run = run_tally(rule, 3, 2, 3, cycle, {});
    CHECK(run.result.winners == std::vector<unsigned>{0, 1});
    CHECK_FALSE(run.result.scores.has_value());
  }
  const auto k = run_tally(Rule::kemeny, 3, 3, 3, {Ranking::weak({1, 1, 1})}, {});
  CHECK(k.result.winners == std::vector<unsigned>{0, 1, 2});
}

TEST_CASE("top-k compare counts") {
  Rng rng(2);
  for (unsigned M : {3u, 5u}) {
    for (unsigned K = 1; K <= M; ++K) {
      const auto rankings = random_rankings(Rule::copeland, M, 5, rng);
      const auto run = run_tally(Rule::copeland, M, K, 3, rankings, {});
      // K stages over M, M-1, ... candidates.
      CHECK(2 * run.result.counters.comparisons == K * (2 * M - K - 1));
      CHECK(run.result.counters.positivity_tests == 2 * M * (M - 1) / 2);
      CHECK(run.result.counters.zero_tests == M * (M - 1) / 2);
    }
  }
}

TEST_CASE("maximin scoring compare count") {
  Rng rng(3);
  for (unsigned M : {2u, 3u, 4u, 5u}) {
    const auto rankings = random_rankings(Rule::maximin, M, 4, rng);
    const auto run = run_tally(Rule::maximin, M, 1, 3, rankings, {});
    CHECK(run.result.counters.comparisons == M * (M - 2) + (M - 1));
  }
}

TEST_CASE("Kemeny compares every ranking once") {
  Rng rng(4);
  const auto rankings = random_rankings(Rule::kemeny, 4, 6, rng);
  const auto run = run_tally(Rule::kemeny, 4, 1, 3, rankings, {});
  CHECK(run.result.counters.comparisons == 24 - 1);
}

TEST_CASE("aggregate sums shares and derives the lower triangle") {
  const PrimeField f = PrimeField::mersenne31();
  Rng rng(5);
  const auto rankings = random_rankings(Rule::maximin, 4, 11, rng);
  std::vector<SharedBallot> ballots;
  for (std::size_t n = 0; n < rankings.size(); ++n) {
    ballots.push_back(share_ballot(f, ranking_to_matrix(Rule::maximin, rankings[n], 4), 4, 3, n + 1, rng));
  }
  PartyShares cells(3);
  for (unsigned d = 1; d <= 3; ++d) {
    std::vector<TallierBundle> mine;
    for (const auto& b : ballots) mine.push_back(b.bundles[d - 1]);
    const auto agg = aggregate(f, Rule::maximin, 4, mine);
    CHECK(agg.accepted == 11);
    for (unsigned r = 0; r < 4; ++r) {
      for (unsigned c = 0; c < 4; ++c) {
        if (r != c) cells[d - 1].push_back(agg.at(f, r, c));
      }
    }
  }
  const auto P = pairwise_matrix({Rule::maximin, 4, 1, rankings, {}, TieBreak::lowest_index});
  std::size_t i = 0;
  for (unsigned r = 0; r < 4; ++r) {
    for (unsigned c = 0; c < 4; ++c) {
      if (r != c) CHECK(static_cast<std::int64_t>(reveal(f, cells, i++).value) == P[r][c]);
    }
  }
}

TEST_CASE("argument errors") {
  const PrimeField f = PrimeField::mersenne31();
  Rng rng(6);
  const auto b = share_ballot(f, ranking_to_matrix(Rule::kemeny, Ranking::weak({1, 2, 3}), 3), 3, 3, 1, rng);
  try {
    aggregate(f, Rule::copeland, 3, std::vector<TallierBundle>{b.bundles[0]});
    FAIL("mixed rule aggregated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rule_mismatch);
  }
  std::vector<Ranking> seven = {Ranking::weak({1, 2, 3, 4, 5, 6, 7})};
  try {
    run_tally(Rule::kemeny, 7, 1, 3, seven, {});
    FAIL("M = 7 Kemeny accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_many_candidates);
  }
  try {
    run_tally(Rule::copeland, 3, 4, 3, {Ranking::strict({0, 1, 2})}, {});
    FAIL("K > M accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_config);
  }
}

TEST_CASE("only the winners are opened by default") {
  Rng rng(7);
  const PrimeField f = PrimeField::mersenne31();
  const auto rankings = random_rankings(Rule::copeland, 4, 7, rng);
  std::vector<SharedBallot> ballots;
  for (std::size_t n = 0; n < rankings.size(); ++n) ballots.push_back(Voter(n + 1, 1).cast(f, Rule::copeland, rankings[n], 4, 3));
  run_local_parties({f, 3, 1}, 1, [&](PartyContext& ctx) {
    std::vector<TallierBundle> mine;
    for (const auto& b : ballots) mine.push_back(b.bundles[ctx.party() - 1]);
    tally(ctx, aggregate(f, Rule::copeland, 4, mine), 2, {});
    std::vector<std::string> tags;
    for (const auto& r : ctx.open_log()) {
      if (r.tag != "lsb-range-check" && r.tag != "lsb-masked" && r.tag != "random-bit-square") tags.push_back(r.tag);
    }
    CHECK(tags == std::vector<std::string>{"winner-index", "winner-index"});
  });
}

}  // TEST_SUITE
