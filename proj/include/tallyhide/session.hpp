#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tallyhide/ballot.hpp"
#include "tallyhide/config.hpp"
#include "tallyhide/engine.hpp"
#include "tallyhide/tally.hpp"
#include "tallyhide/validation.hpp"

namespace tallyhide {

/// Independent, reproducible generator for one party and purpose.
Rng party_rng(std::uint64_t seed, PartyIndex party, std::uint64_t tag = 0);

ProtocolParams protocol_params(const ElectionConfig& config, std::uint64_t session);

/// Runs `fn` for every tallier on its own thread over `network`. If any party
/// throws, the whole network is aborted so the others stop waiting, and the
/// first error is rethrown once all threads have finished.
void run_local_parties(const ProtocolParams& params, std::uint64_t seed, MemoryNetwork& network,
                       const std::function<void(PartyContext&)>& fn);
/// Same over a private network.
void run_local_parties(const ProtocolParams& params, std::uint64_t seed,
                       const std::function<void(PartyContext&)>& fn);

struct TallierOptions {
  ValidationOptions validation;
  TallyOptions tally;
  bool trace = false;
};

struct TallierOutput {
  std::vector<ValidationVerdict> verdicts;
  TallyResult result;
  Shares aggregate;
  Counters validation_counters;
  Counters totals;
  std::vector<OpenRecord> opens;
  std::vector<Shares> traced;
  std::uint32_t max_round_observed = 0;
};

/// One tallier's whole session: validate the bundles in batches, sum the
/// accepted ones, and compute the winners. Bundles are ordered by voter id
/// and only the first bundle per voter is kept, so all talliers agree on
/// the batch layout.
TallierOutput run_tallier(PartyContext& ctx, const ElectionConfig& config,
                          std::vector<TallierBundle> bundles, const TallierOptions& options);

std::vector<SharedBallot> cast_ballots(const ElectionConfig& config,
                                       const std::vector<Ranking>& rankings, std::uint64_t seed);

struct RunOptions {
  bool open_scores = false;
  bool reconstruct_rejected = false;
  bool trace = false;
  std::uint64_t session = 1;
  /// When set, holds one transcript per tallier (index d-1).
  std::vector<TranscriptLog>* transcripts = nullptr;
};

struct ElectionRun {
  std::vector<TallierOutput> parties;  // index d-1
  std::size_t receipts = 0;

  const TallyResult& result() const { return parties.front().result; }
  const std::vector<ValidationVerdict>& verdicts() const { return parties.front().verdicts; }
};

/// Full election on an in-memory network: ballots are submitted through the
/// transport (one receipt per tallier per ballot), then every tallier runs
/// `run_tallier`. Throws if the talliers disagree on any public output.
ElectionRun run_election_local(const ElectionConfig& config,
                               const std::vector<SharedBallot>& ballots,
                               const RunOptions& options = {});

}  // namespace tallyhide
