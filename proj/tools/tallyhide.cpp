#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tallyhide/errors.hpp"

int main(int argc, char** argv) {
  using namespace tallyhide::cli;
  CLI::App app{"tallyhide: tally-hiding elections among secret-sharing talliers"};
  app.require_subcommand(1);

  SetupArgs setup;
  auto* s = app.add_subcommand("setup", "validate a configuration and write a session descriptor");
  s->add_option("--config", setup.config, "election configuration (JSON)")->required();
  s->add_option("--out", setup.out, "session descriptor to write");
  s->add_option("--box", setup.box, "ballot box directory (default: next to the descriptor)");

  VoteArgs vote;
  auto* v = app.add_subcommand("vote", "cast one ballot");
  v->add_option("--session", vote.session, "session descriptor");
  auto* order = v->add_option("--order", vote.order, "candidates, most preferred first");
  auto* ranks = v->add_option("--ranks", vote.ranks, "name=rank pairs (Kemeny)");
  order->excludes(ranks);
  v->add_option("--voter", vote.voter, "voter id (default: next free id)");
  v->add_option("--seed", vote.seed, "seed for this voter's share randomness");

  RunArgs validate;
  auto* va = app.add_subcommand("validate", "validate the ballot box and report verdicts");
  RunArgs tally;
  auto* ta = app.add_subcommand("tally", "validate, aggregate and compute the winners");
  for (auto [cmd, args] : {std::pair{va, &validate}, std::pair{ta, &tally}}) {
    cmd->add_option("--session", args->session, "session descriptor");
    auto* local = cmd->add_option("--local", args->local, "run D talliers as threads");
    auto* party = cmd->add_option("--party", args->party, "run as tallier d over sockets");
    local->excludes(party);
    cmd->add_flag("--reconstruct-rejected", args->reconstruct_rejected,
                  "open rejected ballots as evidence");
    cmd->add_option("--out", args->out, "result file (JSON)");
  }
  ta->add_flag("--open-scores", tally.open_scores, "also publish candidate scores");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "time batch validation, tallying and comparisons");
  b->add_option("--rule", bench.rule);
  b->add_option("--candidates,-M", bench.candidates);
  b->add_option("--batch", bench.batch, "ballots per validation batch");
  b->add_option("--talliers,-D", bench.talliers);
  b->add_option("--voters,-N", bench.voters, "ballots in the timed tally");
  b->add_option("--reps", bench.repetitions, "repetitions per measurement");
  b->add_option("--comparisons", bench.comparisons, "comparisons per microbenchmark batch");
  b->add_option("--seed", bench.seed);
  b->add_flag("--skip-compare", bench.skip_compare, "omit the comparison microbenchmark");
  b->add_option("--out", bench.out, "machine-readable records (JSON)");

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "plaintext reference winners next to an MPC run");
  o->add_option("--session", oracle.session, "session descriptor");
  o->add_option("--ballots", oracle.ballots, "one ballot per line, as for vote")->required();
  o->add_option("--seed", oracle.seed, "share randomness for the MPC side");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_setup(setup);
    if (*v) {
      if (vote.order.empty() && vote.ranks.empty()) {
        std::cerr << "vote: one of --order or --ranks is required\n";
        return 2;
      }
      return cmd_vote(vote);
    }
    if (*va) return cmd_validate(validate);
    if (*ta) return cmd_tally(tally);
    if (*b) return cmd_bench(bench);
    if (*o) return cmd_oracle(oracle);
  } catch (const tallyhide::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
