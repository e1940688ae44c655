#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tallyhide::cli {

struct SetupArgs {
  std::string config;
  std::string out = "session.json";
  std::string box;
};

struct VoteArgs {
  std::string session = "session.json";
  std::string order;
  std::string ranks;
  std::optional<std::uint64_t> voter;
  std::optional<std::uint64_t> seed;
};

struct RunArgs {
  std::string session = "session.json";
  std::optional<unsigned> local;
  std::optional<unsigned> party;
  bool open_scores = false;
  bool reconstruct_rejected = false;
  std::string out;
};

struct BenchArgs {
  std::string rule = "copeland";
  unsigned candidates = 5;
  std::size_t batch = 500;
  unsigned talliers = 3;
  std::size_t voters = 500;
  unsigned repetitions = 1;
  std::size_t comparisons = 100;
  std::uint64_t seed = 1;
  bool skip_compare = false;
  std::string out;
};

struct OracleArgs {
  std::string session = "session.json";
  std::string ballots;
  std::uint64_t seed = 7;
};

int cmd_setup(const SetupArgs& args);
int cmd_vote(const VoteArgs& args);
int cmd_validate(const RunArgs& args);
int cmd_tally(const RunArgs& args);
int cmd_bench(const BenchArgs& args);
int cmd_oracle(const OracleArgs& args);

}  // namespace tallyhide::cli
