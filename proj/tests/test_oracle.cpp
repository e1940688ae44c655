#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "tallyhide/oracle.hpp"

using namespace tallyhide;

namespace {

PlainElection election(Rule rule, unsigned M, unsigned K,
                       std::vector<std::vector<unsigned>> orders) {
  PlainElection e{rule, M, K, {}, {}, TieBreak::lowest_index};
  for (auto& o : orders) e.rankings.push_back(Ranking::strict(std::move(o)));
  return e;
}

// Voters preferring a to b, counted straight from the orders.
std::int64_t prefer(const std::vector<Ranking>& rs, unsigned a, unsigned b) {
  std::int64_t n = 0;
  for (const auto& r : rs) {
    const auto pa = std::find(r.order.begin(), r.order.end(), a);
    const auto pb = std::find(r.order.begin(), r.order.end(), b);
    n += pa < pb;
  }
  return n;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("Copeland on a clear majority") {
  auto e = election(Rule::copeland, 3, 1, {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}});
  const auto out = plain_copeland(e);
  CHECK(out.scores == std::vector<std::int64_t>{4, 2, 0});
  CHECK(out.winners == std::vector<unsigned>{0});
}

TEST_CASE("Copeland cycle ties everyone; lowest index wins") {
  auto e = election(Rule::copeland, 3, 2, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
  const auto out = plain_copeland(e);
  CHECK(out.scores == std::vector<std::int64_t>{2, 2, 2});
  CHECK(out.winners == std::vector<unsigned>{0, 1});
}

TEST_CASE("Copeland tie weight") {
  auto e = election(Rule::copeland, 3, 3, {{0, 1, 2}, {1, 0, 2}});
  e.alpha = {1, 2};
  CHECK(plain_copeland(e).scores == std::vector<std::int64_t>{3, 3, 0});
  e.alpha = {0, 1};
  CHECK(plain_copeland(e).scores == std::vector<std::int64_t>{1, 1, 0});
  e.alpha = {1, 1};
  CHECK(plain_copeland(e).scores == std::vector<std::int64_t>{2, 2, 0});
  CHECK(plain_copeland(e).winners == std::vector<unsigned>{0, 1, 2});
}

TEST_CASE("Maximin worst pairwise support") {
  auto e = election(Rule::maximin, 3, 2, {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}});
  const auto out = plain_maximin(e);
  CHECK(out.scores == std::vector<std::int64_t>{2, 1, 0});
  CHECK(out.winners == std::vector<unsigned>{0, 1});
  CHECK(plain_maximin(election(Rule::maximin, 1, 1, {{0}})).scores == std::vector<std::int64_t>{0});
}

TEST_CASE("pairwise matrix matches direct counting") {
  Rng rng(4);
  std::vector<std::vector<unsigned>> orders;
  for (int i = 0; i < 40; ++i) {
    std::vector<unsigned> o(5);
    std::iota(o.begin(), o.end(), 0u);
    std::shuffle(o.begin(), o.end(), rng);
    orders.push_back(o);
  }
  const auto mm = election(Rule::maximin, 5, 1, orders);
  const auto cp = election(Rule::copeland, 5, 1, orders);
  const auto P = pairwise_matrix(mm);
  const auto S = pairwise_matrix(cp);
  for (unsigned a = 0; a < 5; ++a) {
    for (unsigned b = 0; b < 5; ++b) {
      if (a == b) continue;
      CHECK(P[a][b] == prefer(mm.rankings, a, b));
      CHECK(S[a][b] == prefer(mm.rankings, a, b) - prefer(mm.rankings, b, a));
    }
  }
}

TEST_CASE("Kemeny picks the best ranking, lexicographically first among equals") {
  PlainElection e{Rule::kemeny, 3, 1, {}, {}, TieBreak::lowest_index};
  e.rankings = {Ranking::weak({2, 1, 3}), Ranking::weak({1, 1, 2}), Ranking::weak({2, 1, 2})};
  const auto out = plain_kemeny(e);
  CHECK(out.ranking == std::vector<unsigned>{1, 0, 2});
  CHECK(out.ranking_score == kemeny_agreements(e.rankings, out.ranking));
  CHECK(out.winners == std::vector<unsigned>{1});

  e.rankings = {Ranking::weak({1, 1, 1})};
  e.winners = 3;
  const auto tie = plain_kemeny(e);
  CHECK(tie.ranking == std::vector<unsigned>{0, 1, 2});
  CHECK(tie.ranking_score == 0);
  CHECK(tie.winners == std::vector<unsigned>{0, 1, 2});
}

TEST_CASE("Kemeny score from P equals voter-by-voter agreement count") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    PlainElection e{Rule::kemeny, 4, 2, {}, {}, TieBreak::lowest_index};
    std::uniform_int_distribution<unsigned> rank(1, 4);
    for (int n = 0; n < 9; ++n) e.rankings.push_back(Ranking::weak({rank(rng), rank(rng), rank(rng), rank(rng)}));
    const auto out = plain_kemeny(e);
    std::vector<unsigned> order = {0, 1, 2, 3};
    std::int64_t best = -1;
    std::vector<unsigned> arg;
    do {
      const auto w = kemeny_agreements(e.rankings, order);
      if (w > best) {
        best = w;
        arg = order;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(out.ranking_score == best);
    CHECK(out.ranking == arg);
  }
}

TEST_CASE("top-k ordering") {
  const std::vector<std::int64_t> s = {3, 5, 5, 1, 5};
  CHECK(plain_top_k(s, 3, TieBreak::lowest_index) == std::vector<unsigned>{1, 2, 4});
  CHECK(plain_top_k(s, 5, TieBreak::lowest_index) == std::vector<unsigned>{1, 2, 4, 0, 3});
}

TEST_CASE("ideal primitive functionalities") {
  CHECK(plain::lsb(7) == 1);
  CHECK(plain::less_than_half(31, 15) == 1);
  CHECK(plain::less_than_half(31, 16) == 0);
  CHECK(plain::compare(3, 4) == 1);
  CHECK(plain::compare(4, 4) == 0);
  CHECK(plain::is_positive(31, 0) == 0);
  CHECK(plain::is_positive(31, 15) == 1);
  CHECK(plain::is_positive(31, 16) == 0);
  CHECK(plain::is_zero(0) == 1);
}

}  // TEST_SUITE
