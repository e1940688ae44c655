#include "tallyhide/session.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "tallyhide/errors.hpp"

namespace tallyhide {

Rng party_rng(std::uint64_t seed, PartyIndex party, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(party), static_cast<std::uint32_t>(tag),
                    static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

ProtocolParams protocol_params(const ElectionConfig& config, std::uint64_t session) {
  return {PrimeField(config.prime), config.talliers, session};
}

void run_local_parties(const ProtocolParams& params, std::uint64_t seed, MemoryNetwork& network,
                       const std::function<void(PartyContext&)>& fn) {
  std::mutex mutex;
  std::exception_ptr first;
  std::vector<std::thread> threads;
  for (unsigned d = 1; d <= params.talliers; ++d) {
    threads.emplace_back([&, d] {
      try {
        PartyContext ctx(params, network.endpoint(static_cast<PartyIndex>(d)),
                         party_rng(seed, static_cast<PartyIndex>(d)));
        fn(ctx);
      } catch (...) {
        {
          std::lock_guard lock(mutex);
          if (!first) first = std::current_exception();
        }
        network.abort("party " + std::to_string(d) + " failed");
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first) std::rethrow_exception(first);
}

void run_local_parties(const ProtocolParams& params, std::uint64_t seed,
                       const std::function<void(PartyContext&)>& fn) {
  MemoryNetwork network(params.talliers);
  run_local_parties(params, seed, network, fn);
}

TallierOutput run_tallier(PartyContext& ctx, const ElectionConfig& config,
                          std::vector<TallierBundle> bundles, const TallierOptions& options) {
  ctx.enable_trace(options.trace);
  std::stable_sort(bundles.begin(), bundles.end(),
                   [](const auto& a, const auto& b) { return a.voter < b.voter; });
  bundles.erase(std::unique(bundles.begin(), bundles.end(),
                            [](const auto& a, const auto& b) { return a.voter == b.voter; }),
                bundles.end());

  TallierOutput out;
  const unsigned M = config.candidate_count();
  ElectionConfig actual = config;
  actual.expected_voters = std::max<std::uint64_t>(config.expected_voters, bundles.size());
  validate_config(actual);
  const std::size_t batch = config.batch_size == 0 ? bundles.size() : config.batch_size;
  std::vector<TallierBundle> accepted;
  for (std::size_t start = 0; start < bundles.size(); start += batch) {
    const std::size_t end = std::min(bundles.size(), start + batch);
    const std::span<const TallierBundle> chunk(bundles.data() + start, end - start);
    auto verdicts = batch_validate(ctx, config.rule, M, chunk, options.validation);
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      if (verdicts[i].accepted) accepted.push_back(chunk[i]);
    }
    out.verdicts.insert(out.verdicts.end(), verdicts.begin(), verdicts.end());
  }
  out.validation_counters = ctx.counters();

  const auto agg = aggregate(ctx.field(), config.rule, M, accepted);
  out.aggregate = agg.values;
  TallyOptions tally_options = options.tally;
  tally_options.alpha = config.alpha;
  tally_options.tie_break = config.tie_break;
  out.result = tally(ctx, agg, config.winners, tally_options);
  out.totals = ctx.counters();
  out.opens = ctx.open_log();
  out.traced = ctx.traced();
  out.max_round_observed = ctx.endpoint().mailbox().max_round_observed(ctx.params().session);
  return out;
}

std::vector<SharedBallot> cast_ballots(const ElectionConfig& config,
                                       const std::vector<Ranking>& rankings, std::uint64_t seed) {
  const PrimeField field(config.prime);
  std::vector<SharedBallot> out;
  for (std::size_t n = 0; n < rankings.size(); ++n) {
    Voter voter(n + 1, seed);
    out.push_back(voter.cast(field, config.rule, rankings[n], config.candidate_count(),
                             config.talliers));
  }
  return out;
}

namespace {

void check_agreement(const ElectionRun& run) {
  const auto& a = run.parties.front();
  for (const auto& b : run.parties) {
    bool same = a.result.winners == b.result.winners && a.result.scores == b.result.scores &&
                a.result.ranking == b.result.ranking && a.verdicts.size() == b.verdicts.size();
    for (std::size_t i = 0; same && i < a.verdicts.size(); ++i) {
      same = a.verdicts[i].accepted == b.verdicts[i].accepted &&
             a.verdicts[i].reason == b.verdicts[i].reason;
    }
    if (!same) throw Error(Errc::inconsistent_open, "talliers disagree on the public outcome");
  }
}

}  // namespace

ElectionRun run_election_local(const ElectionConfig& config,
                               const std::vector<SharedBallot>& ballots,
                               const RunOptions& options) {
  const unsigned D = config.talliers;
  MemoryNetwork network(D);
  if (options.transcripts) {
    options.transcripts->clear();
    std::vector<TranscriptLog> logs(D);
    options.transcripts->swap(logs);
    for (unsigned d = 1; d <= D; ++d) {
      network.endpoint(static_cast<PartyIndex>(d)).set_transcript(&(*options.transcripts)[d - 1]);
    }
  }
  TallierOptions tallier_options;
  tallier_options.validation.reconstruct_rejected = options.reconstruct_rejected;
  tallier_options.tally.open_scores = options.open_scores;
  tallier_options.trace = options.trace;

  ElectionRun run;
  run.parties.resize(D);
  const std::size_t N = ballots.size();
  const ProtocolParams params = protocol_params(config, options.session);

  std::exception_ptr client_error;
  std::thread client([&] {
    try {
      Endpoint& voter = network.endpoint(0);
      for (const auto& ballot : ballots) {
        for (const auto& bundle : ballot.bundles) {
          voter.send(bundle.tallier, {options.session, 0, 0, MessageKind::ballot_submission,
                                      encode_bundle(bundle)});
        }
      }
      for (std::size_t i = 0; i < N * D; ++i) {
        voter.await_queued(MessageKind::receipt);
        ++run.receipts;
      }
    } catch (...) {
      client_error = std::current_exception();
      network.abort("voter client failed");
    }
  });

  try {
    run_local_parties(params, config.seed, network, [&](PartyContext& ctx) {
      Endpoint& self = ctx.endpoint();
      std::vector<TallierBundle> bundles;
      for (std::size_t i = 0; i < N; ++i) {
        const ProtocolMessage msg = self.await_queued(MessageKind::ballot_submission);
        bundles.push_back(decode_bundle(msg.payload, ctx.party()));
        self.send(0, {options.session, 0, ctx.party(), MessageKind::receipt,
                      {bundles.back().voter, ctx.party()}});
      }
      run.parties[ctx.party() - 1] = run_tallier(ctx, config, std::move(bundles), tallier_options);
    });
  } catch (...) {
    client.join();
    throw;
  }
  client.join();
  if (client_error) std::rethrow_exception(client_error);
  check_agreement(run);
  return run;
}

}  // namespace tallyhide
