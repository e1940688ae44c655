#include "tallyhide/ballot.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "tallyhide/errors.hpp"

namespace tallyhide {

std::string_view to_string(Rule rule) noexcept {
  switch (rule) {
    case Rule::copeland: return "copeland";
    case Rule::maximin: return "maximin";
    case Rule::kemeny: return "kemeny";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  if (name == "copeland") return Rule::copeland;
  if (name == "maximin") return Rule::maximin;
  if (name == "kemeny") return Rule::kemeny;
  throw Error(Errc::invalid_rule, "unknown rule '" + std::string(name) +
                                      "' (expected copeland, maximin or kemeny)");
}

std::string_view to_string(TieBreak) noexcept { return "lowest-index"; }

TieBreak parse_tie_break(std::string_view name) {
  if (name == "lowest-index") return TieBreak::lowest_index;
  throw Error(Errc::invalid_config, "unsupported tie-break '" + std::string(name) + "'");
}

Ranking Ranking::strict(std::vector<unsigned> order) {
  Ranking r;
  r.order = std::move(order);
  return r;
}

Ranking Ranking::weak(std::vector<unsigned> ranks) {
  Ranking r;
  r.ranks = std::move(ranks);
  return r;
}

BallotMatrix::BallotMatrix(Rule rule, unsigned candidates)
    : rule_(rule), m_(candidates), entries_(std::size_t{candidates} * candidates, 0) {}

int BallotMatrix::column_sum(unsigned m) const {
  int s = 0;
  for (unsigned r = 0; r < m_; ++r) s += at(r, m);
  return s;
}

std::vector<int> BallotMatrix::column_sums() const {
  std::vector<int> out(m_);
  for (unsigned m = 0; m < m_; ++m) out[m] = column_sum(m);
  return out;
}

bool BallotMatrix::is_legal() const {
  for (unsigned i = 0; i < m_; ++i) {
    if (at(i, i) != 0) return false;
    for (unsigned j = 0; j < m_; ++j) {
      if (i == j) continue;
      const int a = at(i, j);
      const int b = at(j, i);
      switch (rule_) {
        case Rule::copeland:
          if ((a != 1 && a != -1) || a + b != 0) return false;
          break;
        case Rule::maximin:
          if ((a != 0 && a != 1) || a + b != 1) return false;
          break;
        case Rule::kemeny:
          if ((a != 0 && a != 1) || a + b > 1) return false;
          break;
      }
    }
  }
  if (rule_ == Rule::kemeny) return true;
  auto sums = column_sums();
  std::sort(sums.begin(), sums.end());
  return std::adjacent_find(sums.begin(), sums.end()) == sums.end();
}

BallotMatrix BallotMatrix::scaled(int c) const {
  BallotMatrix out = *this;
  for (auto& e : out.entries_) e *= c;
  return out;
}

BallotMatrix ranking_to_matrix(Rule rule, const Ranking& ranking, unsigned candidates) {
  const unsigned M = candidates;
  std::vector<unsigned> position(M);
  if (rule == Rule::kemeny) {
    if (!ranking.is_weak() || ranking.ranks.size() != M) {
      throw Error(Errc::invalid_ranking, "Kemeny ballots need a rank for each of the " +
                                             std::to_string(M) + " candidates");
    }
    for (unsigned m = 0; m < M; ++m) {
      const unsigned r = ranking.ranks[m];
      if (r < 1 || r > M) {
        throw Error(Errc::invalid_ranking, "rank " + std::to_string(r) + " outside 1.." +
                                               std::to_string(M));
      }
      position[m] = r;
    }
  } else {
    if (ranking.is_weak() || ranking.order.size() != M) {
      throw Error(Errc::invalid_ranking, "expected an ordering of all " + std::to_string(M) +
                                             " candidates");
    }
    std::vector<bool> seen(M, false);
    for (unsigned i = 0; i < M; ++i) {
      const unsigned c = ranking.order[i];
      if (c >= M || seen[c]) {
        throw Error(Errc::invalid_ranking, "ordering is not a permutation (candidate " +
                                               std::to_string(c + 1) + ")");
      }
      seen[c] = true;
      position[c] = i;
    }
  }
  BallotMatrix q(rule, M);
  for (unsigned a = 0; a < M; ++a) {
    for (unsigned b = 0; b < M; ++b) {
      if (a == b) continue;
      const bool above = position[a] < position[b];
      if (rule == Rule::copeland) {
        q.set(a, b, above ? 1 : -1);
      } else {
        q.set(a, b, above ? 1 : 0);
      }
    }
  }
  return q;
}

std::vector<MatrixEntry> project_upper(const BallotMatrix& q) {
  if (q.rule() == Rule::kemeny) {
    throw Error(Errc::wrong_rule, "Kemeny ballots are not determined by their upper triangle");
  }
  std::vector<MatrixEntry> out;
  for (unsigned a = 0; a < q.candidates(); ++a) {
    for (unsigned b = a + 1; b < q.candidates(); ++b) out.push_back({a, b, q.at(a, b)});
  }
  return out;
}

BallotMatrix expand_upper(Rule rule, unsigned candidates, std::span<const MatrixEntry> upper) {
  if (rule == Rule::kemeny) {
    throw Error(Errc::wrong_rule, "Kemeny ballots are not determined by their upper triangle");
  }
  BallotMatrix q(rule, candidates);
  for (const auto& e : upper) {
    q.set(e.row, e.col, e.value);
    q.set(e.col, e.row, rule == Rule::copeland ? -e.value : 1 - e.value);
  }
  return q;
}

std::vector<std::pair<unsigned, unsigned>> shared_positions(Rule rule, unsigned candidates) {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned a = 0; a < candidates; ++a) {
    for (unsigned b = rule == Rule::kemeny ? 0 : a + 1; b < candidates; ++b) {
      if (a != b) out.emplace_back(a, b);
    }
  }
  return out;
}

SharedBallot share_ballot(const PrimeField& field, const BallotMatrix& q, unsigned candidates,
                          unsigned talliers, std::uint64_t voter, Rng& rng) {
  if (q.candidates() != candidates) {
    throw Error(Errc::config_mismatch, "ballot has " + std::to_string(q.candidates()) +
                                           " candidates, election has " +
                                           std::to_string(candidates));
  }
  if (talliers == 0 || talliers >= field.modulus()) {
    throw Error(Errc::config_mismatch, std::to_string(talliers) + " talliers over p = " +
                                           std::to_string(field.modulus()));
  }
  const unsigned threshold = (talliers + 1) / 2;
  SharedBallot out;
  out.voter = voter;
  for (unsigned d = 1; d <= talliers; ++d) {
    out.bundles.push_back({voter, static_cast<PartyIndex>(d), {}});
  }
  for (auto [a, b] : shared_positions(q.rule(), candidates)) {
    const auto sv = share(field, field.from_signed(q.at(a, b)), threshold, talliers, rng);
    for (unsigned d = 0; d < talliers; ++d) out.bundles[d].entries.push_back({a, b, sv.shares[d]});
  }
  return out;
}

std::vector<std::uint64_t> encode_bundle(const TallierBundle& bundle) {
  std::vector<std::uint64_t> out{bundle.voter, bundle.entries.size()};
  for (const auto& e : bundle.entries) {
    out.push_back(e.row);
    out.push_back(e.col);
    out.push_back(e.share.value);
  }
  return out;
}

TallierBundle decode_bundle(std::span<const std::uint64_t> payload, PartyIndex tallier) {
  if (payload.size() < 2 || payload.size() != 2 + 3 * payload[1]) {
    throw Error(Errc::malformed_message, "ballot submission of " +
                                             std::to_string(payload.size()) + " words");
  }
  TallierBundle b{payload[0], tallier, {}};
  for (std::size_t i = 0; i < payload[1]; ++i) {
    b.entries.push_back({static_cast<unsigned>(payload[2 + 3 * i]),
                         static_cast<unsigned>(payload[3 + 3 * i]), {payload[4 + 3 * i]}});
  }
  return b;
}

Voter::Voter(std::uint64_t id, std::uint64_t seed) : id_(id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32),
                    0x766f7465u};
  rng_.seed(seq);
}

SharedBallot Voter::cast(const PrimeField& field, Rule rule, const Ranking& ranking,
                         unsigned candidates, unsigned talliers) {
  return share_ballot(field, ranking_to_matrix(rule, ranking, candidates), candidates, talliers,
                      id_, rng_);
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    out.push_back(text.substr(start, end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

unsigned candidate_index(std::string_view name, std::span<const std::string> candidates) {
  for (unsigned i = 0; i < candidates.size(); ++i) {
    if (candidates[i] == name) return i;
  }
  unsigned n = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), n);
  if (ec == std::errc{} && ptr == name.data() + name.size() && n >= 1 && n <= candidates.size()) {
    return n - 1;
  }
  throw Error(Errc::invalid_ranking, "unknown candidate '" + std::string(name) + "'");
}

}  // namespace

Ranking parse_order(std::string_view text, std::span<const std::string> candidates) {
  std::vector<unsigned> order;
  std::set<unsigned> seen;
  for (auto part : split(text, ',')) {
    const unsigned c = candidate_index(trim(part), candidates);
    if (!seen.insert(c).second) {
      throw Error(Errc::invalid_ranking, "candidate '" + candidates[c] + "' listed twice");
    }
    order.push_back(c);
  }
  if (order.size() != candidates.size()) {
    throw Error(Errc::invalid_ranking, "ordering names " + std::to_string(order.size()) +
                                           " of " + std::to_string(candidates.size()) +
                                           " candidates");
  }
  return Ranking::strict(std::move(order));
}

Ranking parse_ranks(std::string_view text, std::span<const std::string> candidates) {
  const unsigned M = static_cast<unsigned>(candidates.size());
  std::vector<unsigned> ranks(M, 0);
  for (auto part : split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::invalid_ranking, "expected name=rank, got '" + std::string(part) + "'");
    }
    const unsigned c = candidate_index(trim(part.substr(0, eq)), candidates);
    const auto value = trim(part.substr(eq + 1));
    unsigned r = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), r);
    if (ec != std::errc{} || ptr != value.data() + value.size() || r < 1 || r > M) {
      throw Error(Errc::invalid_ranking, "rank '" + std::string(value) + "' outside 1.." +
                                             std::to_string(M));
    }
    if (ranks[c] != 0) {
      throw Error(Errc::invalid_ranking, "candidate '" + candidates[c] + "' ranked twice");
    }
    ranks[c] = r;
  }
  for (unsigned m = 0; m < M; ++m) {
    if (ranks[m] == 0) {
      throw Error(Errc::invalid_ranking, "candidate '" + candidates[m] + "' has no rank");
    }
  }
  return Ranking::weak(std::move(ranks));
}

}  // namespace tallyhide
