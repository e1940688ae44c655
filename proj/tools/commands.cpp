#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tallyhide/config.hpp"
#include "tallyhide/errors.hpp"
#include "tallyhide/oracle.hpp"
#include "tallyhide/session.hpp"

namespace tallyhide::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t session_id(std::uint64_t seed) {
  // splitmix64 finaliser; keeps ids stable for a given seed.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return (z ^ (z >> 31)) >> 16;
}

std::string box_file(const SessionDescriptor& s, unsigned d) {
  return (fs::path(s.ballot_box) / ("tallier_" + std::to_string(d) + ".jsonl")).string();
}

std::vector<TallierBundle> read_box(const SessionDescriptor& s, unsigned d) {
  std::vector<TallierBundle> out;
  std::ifstream in(box_file(s, d));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    TallierBundle b{j.at("voter").get<std::uint64_t>(), static_cast<PartyIndex>(d), {}};
    for (const auto& e : j.at("entries")) {
      b.entries.push_back({e.at(0).get<unsigned>(), e.at(1).get<unsigned>(),
                           {e.at(2).get<std::uint64_t>()}});
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

Ranking parse_ballot(const ElectionConfig& c, const std::string& text) {
  return c.rule == Rule::kemeny ? parse_ranks(text, c.candidates)
                                : parse_order(text, c.candidates);
}

json counters_json(const Counters& c) {
  return {{"mul_gates", c.mul_gates},
          {"mul_layers", c.mul_layers},
          {"rounds", c.rounds},
          {"opens", c.opens},
          {"opened_values", c.opened_values},
          {"random_bits", c.random_bits},
          {"lsb_extractions", c.lsb_extractions},
          {"lsb_mul_gates", c.lsb_mul_gates},
          {"comparisons", c.comparisons},
          {"positivity_tests", c.positivity_tests},
          {"zero_tests", c.zero_tests}};
}

json verdicts_json(const std::vector<ValidationVerdict>& verdicts) {
  json rejected = json::array();
  for (const auto& v : verdicts) {
    if (v.accepted) continue;
    json r = {{"voter", v.voter}, {"reason", std::string(to_string(*v.reason))}};
    if (v.recovered) r["recovered"] = *v.recovered;
    rejected.push_back(r);
  }
  return rejected;
}

std::size_t accepted_count(const std::vector<ValidationVerdict>& verdicts) {
  return static_cast<std::size_t>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.accepted; }));
}

json result_json(const ElectionConfig& c, const TallierOutput& out) {
  json winners = json::array();
  for (unsigned w : out.result.winners) {
    winners.push_back({{"index", w + 1}, {"name", c.candidates[w]}});
  }
  json j = {{"rule", std::string(to_string(c.rule))},
            {"winners", winners},
            {"ballots", out.verdicts.size()},
            {"accepted", accepted_count(out.verdicts)},
            {"rejected", verdicts_json(out.verdicts)},
            {"validation_counters", counters_json(out.validation_counters)},
            {"tally_counters", counters_json(out.result.counters)}};
  if (out.result.scores) j["scores"] = *out.result.scores;
  if (out.result.ranking) {
    json ranking = json::array();
    for (unsigned m : *out.result.ranking) ranking.push_back(m + 1);
    j["ranking"] = ranking;
  }
  if (out.result.ranking_score) j["ranking_score"] = *out.result.ranking_score;
  return j;
}

std::string names(const ElectionConfig& c, const std::vector<unsigned>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? ", " : "") + c.candidates[idx[i]];
  return s;
}

void print_counters(const char* label, const Counters& c) {
  std::cout << label << ": mul_gates=" << c.mul_gates << " layers=" << c.mul_layers
            << " rounds=" << c.rounds << " comparisons=" << c.comparisons
            << " lsb=" << c.lsb_extractions << " zero_tests=" << c.zero_tests
            << " opens=" << c.opens << "\n";
}

// Runs `fn` for each tallier either as local threads or as this process's
// single socket party; returns the output of party 1 (local) or this party.
TallierOutput run_talliers(const SessionDescriptor& s, const RunArgs& args,
                           const std::function<TallierOutput(PartyContext&,
                                                             std::vector<TallierBundle>)>& fn) {
  const ElectionConfig& c = s.config;
  const ProtocolParams params = protocol_params(c, s.session);
  if (args.party) {
    const unsigned d = *args.party;
    if (d < 1 || d > c.talliers) {
      throw Error(Errc::config_mismatch, "party " + std::to_string(d) + " outside 1.." +
                                             std::to_string(c.talliers));
    }
    SocketEndpoint endpoint(static_cast<PartyIndex>(d), c.prime);
    if (c.transport.timeout_ms == 0) {
      endpoint.set_timeout(std::nullopt);
    } else {
      endpoint.set_timeout(std::chrono::milliseconds(c.transport.timeout_ms));
    }
    endpoint.listen(resolve_endpoint(c, static_cast<PartyIndex>(d)));
    for (unsigned e = 1; e <= c.talliers; ++e) {
      if (e != d) endpoint.set_peer(static_cast<PartyIndex>(e), resolve_endpoint(c, static_cast<PartyIndex>(e)));
    }
    PartyContext ctx(params, endpoint, party_rng(c.seed, static_cast<PartyIndex>(d)));
    TallierOutput out = fn(ctx, read_box(s, d));
    // Closing barrier: nobody leaves while a peer may still be sending.
    ctx.broadcast_all({});
    endpoint.stop();
    return out;
  }
  if (args.local && *args.local != c.talliers) {
    throw Error(Errc::config_mismatch, "--local " + std::to_string(*args.local) +
                                           " but the session has D = " +
                                           std::to_string(c.talliers));
  }
  std::vector<TallierOutput> outs(c.talliers);
  run_local_parties(params, c.seed, [&](PartyContext& ctx) {
    outs[ctx.party() - 1] = fn(ctx, read_box(s, ctx.party()));
  });
  return outs.front();
}

void emit(const std::string& path, const json& j) {
  if (!path.empty()) write_file(path, j.dump(2) + "\n");
}

}  // namespace

int cmd_setup(const SetupArgs& args) {
  const ElectionConfig config = load_config(args.config);
  SessionDescriptor s;
  s.config = config;
  s.session = session_id(config.seed);
  const fs::path out(args.out);
  s.ballot_box = fs::absolute(args.box.empty() ? out.parent_path() / "ballots" : fs::path(args.box))
                     .lexically_normal()
                     .string();
  fs::create_directories(s.ballot_box);
  for (unsigned d = 1; d <= config.talliers; ++d) {
    std::ofstream(box_file(s, d), std::ios::app);
  }
  write_file(args.out, session_to_json(s) + "\n");
  std::cout << "Session " << s.session << ": " << to_string(config.rule) << ", M = "
            << config.candidate_count() << ", K = " << config.winners << ", D = "
            << config.talliers << ", D' = " << config.threshold() << ", p = " << config.prime
            << "\n"
            << "Ballot box: " << s.ballot_box << "\n"
            << "Descriptor: " << args.out << "\n";
  return 0;
}

int cmd_vote(const VoteArgs& args) {
  const SessionDescriptor s = load_session(args.session);
  const ElectionConfig& c = s.config;
  const Ranking ranking = parse_ballot(c, args.order.empty() ? args.ranks : args.order);
  const std::uint64_t voter = args.voter.value_or(count_lines(box_file(s, 1)) + 1);
  Voter v(voter, args.seed.value_or(c.seed));
  const SharedBallot ballot = v.cast(PrimeField(c.prime), c.rule, ranking,
                                     c.candidate_count(), c.talliers);
  for (const auto& bundle : ballot.bundles) {
    json entries = json::array();
    for (const auto& e : bundle.entries) entries.push_back({e.row, e.col, e.share.value});
    std::ofstream out(box_file(s, bundle.tallier), std::ios::app);
    if (!out) throw Error(Errc::transport_failure, "cannot append to " + box_file(s, bundle.tallier));
    out << json{{"voter", voter}, {"entries", entries}}.dump() << "\n";
    out.flush();
    if (!out) throw Error(Errc::transport_failure, "write to " + box_file(s, bundle.tallier) + " failed");
    std::cout << "Receipt from T" << bundle.tallier << ": voter " << voter << ", "
              << bundle.entries.size() << " shares\n";
  }
  return 0;
}

int cmd_validate(const RunArgs& args) {
  const SessionDescriptor s = load_session(args.session);
  const ElectionConfig& c = s.config;
  ValidationOptions options{args.reconstruct_rejected};
  const TallierOutput out =
      run_talliers(s, args, [&](PartyContext& ctx, std::vector<TallierBundle> bundles) {
        std::stable_sort(bundles.begin(), bundles.end(),
                         [](const auto& a, const auto& b) { return a.voter < b.voter; });
        TallierOutput o;
        o.verdicts = batch_validate(ctx, c.rule, c.candidate_count(), bundles, options);
        o.validation_counters = ctx.counters();
        return o;
      });
  for (const auto& v : out.verdicts) {
    std::cout << "voter " << v.voter << ": "
              << (v.accepted ? "accepted" : "rejected (" + std::string(to_string(*v.reason)) + ")")
              << "\n";
  }
  std::cout << "Accepted " << accepted_count(out.verdicts) << " of " << out.verdicts.size()
            << "\n";
  print_counters("Counters", out.validation_counters);
  emit(args.out, {{"ballots", out.verdicts.size()},
                  {"accepted", accepted_count(out.verdicts)},
                  {"rejected", verdicts_json(out.verdicts)},
                  {"counters", counters_json(out.validation_counters)}});
  return 0;
}

int cmd_tally(const RunArgs& args) {
  const SessionDescriptor s = load_session(args.session);
  const ElectionConfig& c = s.config;
  TallierOptions options;
  options.validation.reconstruct_rejected = args.reconstruct_rejected;
  options.tally.open_scores = args.open_scores;
  const TallierOutput out =
      run_talliers(s, args, [&](PartyContext& ctx, std::vector<TallierBundle> bundles) {
        return run_tallier(ctx, c, std::move(bundles), options);
      });
  std::cout << "Ballots: " << out.verdicts.size() << ", accepted " << accepted_count(out.verdicts)
            << "\n";
  for (const auto& v : out.verdicts) {
    if (!v.accepted) {
      std::cout << "Rejected voter " << v.voter << " (" << to_string(*v.reason) << ")\n";
    }
  }
  std::cout << (out.result.winners.size() == 1 ? "Winner: " : "Winners: ")
            << names(c, out.result.winners) << "\n";
  if (out.result.ranking) std::cout << "Ranking: " << names(c, *out.result.ranking) << "\n";
  if (out.result.scores) {
    std::cout << "Scores" << (c.rule == Rule::copeland ? " (t*w)" : "") << ":";
    for (std::size_t m = 0; m < out.result.scores->size(); ++m) {
      std::cout << " " << c.candidates[m] << "=" << (*out.result.scores)[m];
    }
    std::cout << "\n";
  }
  print_counters("Validation counters", out.validation_counters);
  print_counters("Tally counters", out.result.counters);
  emit(args.out, result_json(c, out));
  return 0;
}

namespace {

struct Timing {
  double min = 0;
  double median = 0;
};

Timing summarize(std::vector<double> seconds) {
  std::sort(seconds.begin(), seconds.end());
  return {seconds.front(), seconds[seconds.size() / 2]};
}

template <class F>
double seconds_of(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Ranking> random_rankings(Rule rule, unsigned M, std::size_t n, Rng& rng) {
  std::vector<Ranking> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (rule == Rule::kemeny) {
      std::uniform_int_distribution<unsigned> rank(1, M);
      std::vector<unsigned> r(M);
      for (auto& x : r) x = rank(rng);
      out.push_back(Ranking::weak(std::move(r)));
    } else {
      std::vector<unsigned> order(M);
      std::iota(order.begin(), order.end(), 0u);
      std::shuffle(order.begin(), order.end(), rng);
      out.push_back(Ranking::strict(std::move(order)));
    }
  }
  return out;
}

}  // namespace

int cmd_bench(const BenchArgs& args) {
  ElectionConfig c;
  c.rule = parse_rule(args.rule);
  for (unsigned m = 1; m <= args.candidates; ++m) c.candidates.push_back("C" + std::to_string(m));
  c.talliers = args.talliers;
  c.expected_voters = std::max(args.batch, args.voters);
  c.seed = args.seed;
  validate_config(c);
  const unsigned M = c.candidate_count();
  const unsigned reps = std::max(1u, args.repetitions);
  Rng rng(args.seed);
  json records = json::array();

  // Batch validation.
  const auto ballots = cast_ballots(c, random_rankings(c.rule, M, args.batch, rng), args.seed);
  std::vector<double> times;
  Counters counters;
  for (unsigned r = 0; r < reps; ++r) {
    std::vector<Counters> per(c.talliers);
    times.push_back(seconds_of([&] {
      run_local_parties(protocol_params(c, 1), args.seed + r, [&](PartyContext& ctx) {
        std::vector<TallierBundle> mine;
        for (const auto& b : ballots) mine.push_back(b.bundles[ctx.party() - 1]);
        const Counters before = ctx.counters();
        batch_validate(ctx, c.rule, M, mine);
        per[ctx.party() - 1] = ctx.counters().since(before);
      });
    }));
    counters = per.front();
  }
  const Timing validate = summarize(times);
  std::cout << std::fixed << std::setprecision(3);
  std::cout << "Batch validation (" << to_string(c.rule) << ", in-memory)\n"
            << "   M     B   D   min s  median s   mul_gates  layers  rounds\n"
            << std::setw(4) << M << std::setw(6) << args.batch << std::setw(4) << c.talliers
            << std::setw(8) << validate.min << std::setw(10) << validate.median << std::setw(12)
            << counters.mul_gates << std::setw(8) << counters.mul_layers << std::setw(8)
            << counters.rounds << "\n";
  records.push_back({{"kind", "validation"},
                     {"rule", args.rule},
                     {"M", M},
                     {"B", args.batch},
                     {"D", c.talliers},
                     {"repetitions", reps},
                     {"min_seconds", validate.min},
                     {"median_seconds", validate.median},
                     {"counters", counters_json(counters)}});

  // Full tally on pre-shared ballots.
  const auto voters = cast_ballots(c, random_rankings(c.rule, M, args.voters, rng), args.seed);
  times.clear();
  for (unsigned r = 0; r < reps; ++r) {
    std::vector<Counters> per(c.talliers);
    times.push_back(seconds_of([&] {
      run_local_parties(protocol_params(c, 2), args.seed + r, [&](PartyContext& ctx) {
        std::vector<TallierBundle> mine;
        for (const auto& b : voters) mine.push_back(b.bundles[ctx.party() - 1]);
        const auto agg = aggregate(ctx.field(), c.rule, M, mine);
        per[ctx.party() - 1] = tally(ctx, agg, c.winners, {c.alpha, c.tie_break, false}).counters;
      });
    }));
    counters = per.front();
  }
  const Timing tallied = summarize(times);
  std::cout << "Tally (K = " << c.winners << ")\n"
            << "   M     N   D   min s  median s   mul_gates  layers  rounds  compares\n"
            << std::setw(4) << M << std::setw(6) << args.voters << std::setw(4) << c.talliers
            << std::setw(8) << tallied.min << std::setw(10) << tallied.median << std::setw(12)
            << counters.mul_gates << std::setw(8) << counters.mul_layers << std::setw(8)
            << counters.rounds << std::setw(10) << counters.comparisons << "\n";
  records.push_back({{"kind", "tally"},
                     {"rule", args.rule},
                     {"M", M},
                     {"N", args.voters},
                     {"K", c.winners},
                     {"D", c.talliers},
                     {"repetitions", reps},
                     {"min_seconds", tallied.min},
                     {"median_seconds", tallied.median},
                     {"counters", counters_json(counters)}});

  if (!args.skip_compare) {
    std::cout << "Secure comparison (" << args.comparisons << " per batch)\n"
              << "   D   min s  median s  ms/compare   mul_gates  rounds\n";
    for (unsigned D : {3u, 5u, 7u, 9u}) {
      ProtocolParams params{PrimeField::mersenne31(), D, 3};
      std::vector<double> t;
      Counters cc;
      for (unsigned r = 0; r < reps; ++r) {
        std::vector<Counters> per(D);
        t.push_back(seconds_of([&] {
          run_local_parties(params, args.seed + r, [&](PartyContext& ctx) {
            const Shares a = ctx.random_sharings(args.comparisons);
            const Shares b = ctx.random_sharings(args.comparisons);
            const Counters before = ctx.counters();
            ctx.compare(a, b);
            per[ctx.party() - 1] = ctx.counters().since(before);
          });
        }));
        cc = per.front();
      }
      const Timing tc = summarize(t);
      std::cout << std::setw(4) << D << std::setw(8) << tc.min << std::setw(10) << tc.median
                << std::setw(12) << 1000.0 * tc.median / static_cast<double>(args.comparisons)
                << std::setw(12) << cc.mul_gates << std::setw(8) << cc.rounds << "\n";
      records.push_back({{"kind", "comparison"},
                         {"D", D},
                         {"batch", args.comparisons},
                         {"repetitions", reps},
                         {"min_seconds", tc.min},
                         {"median_seconds", tc.median},
                         {"counters", counters_json(cc)}});
    }
  }
  emit(args.out, records);
  return 0;
}

int cmd_oracle(const OracleArgs& args) {
  const SessionDescriptor s = load_session(args.session);
  ElectionConfig c = s.config;
  std::vector<Ranking> rankings;
  std::ifstream in(args.ballots);
  if (!in) throw Error(Errc::invalid_config, "cannot read " + args.ballots);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rankings.push_back(parse_ballot(c, line));
  }
  const PlainOutcome plain = plain_winners({c.rule, c.candidate_count(), c.winners, rankings,
                                            c.alpha, c.tie_break});
  c.expected_voters = std::max<std::uint64_t>(c.expected_voters, rankings.size());
  const ElectionRun run = run_election_local(c, cast_ballots(c, rankings, args.seed));
  std::cout << "Plaintext winners: " << names(c, plain.winners) << "\n";
  if (!plain.scores.empty()) {
    std::cout << "Plaintext scores" << (c.rule == Rule::copeland ? " (t*w)" : "") << ":";
    for (std::size_t m = 0; m < plain.scores.size(); ++m) {
      std::cout << " " << c.candidates[m] << "=" << plain.scores[m];
    }
    std::cout << "\n";
  }
  if (c.rule == Rule::kemeny) {
    std::cout << "Plaintext ranking: " << names(c, plain.ranking) << " (score "
              << plain.ranking_score << ")\n";
  }
  std::cout << "MPC winners:       " << names(c, run.result().winners) << "\n";
  const bool match = plain.winners == run.result().winners;
  std::cout << "Match: " << (match ? "yes" : "no") << "\n";
  return match ? 0 : 3;
}

}  // namespace tallyhide::cli
