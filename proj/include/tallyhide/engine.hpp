#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tallyhide/field.hpp"
#include "tallyhide/secretshare.hpp"
#include "tallyhide/transport.hpp"

namespace tallyhide {

/// D' = floor((D+1)/2).
constexpr unsigned threshold_for(unsigned talliers) noexcept { return (talliers + 1) / 2; }

struct ProtocolParams {
  PrimeField field = PrimeField::mersenne31();
  unsigned talliers = 3;
  std::uint64_t session = 1;

  unsigned threshold() const noexcept { return threshold_for(talliers); }
};

struct Counters {
  std::uint64_t mul_gates = 0;
  std::uint64_t mul_layers = 0;
  std::uint64_t rounds = 0;
  std::uint64_t opens = 0;
  std::uint64_t opened_values = 0;
  std::uint64_t random_sharings = 0;
  std::uint64_t double_sharings = 0;
  std::uint64_t random_bits = 0;
  std::uint64_t lsb_extractions = 0;
  std::uint64_t lsb_mul_gates = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t positivity_tests = 0;
  std::uint64_t zero_tests = 0;
  /// Gate count of every multiplication layer, in execution order.
  std::vector<std::uint64_t> layer_sizes;

  /// Scalar differences against an earlier snapshot; `layer_sizes` keeps
  /// only the layers executed after it.
  Counters since(const Counters& earlier) const;
};

struct OpenRecord {
  std::string tag;
  std::vector<FieldElement> values;
};

/// This party's shares of a batch of independent secrets, all at threshold D'.
using Shares = std::vector<FieldElement>;

struct DoubleSharing {
  FieldElement low;   // threshold D'
  FieldElement high;  // threshold 2D'-1
};

struct SecretBit {
  SharedValue value;
};

/// One tallier's state in a protocol session. Every method that communicates
/// must be called by all D parties in the same order with batches of the same
/// length; batch entries share rounds.
class PartyContext {
 public:
  PartyContext(const ProtocolParams& params, Endpoint& endpoint, Rng rng);

  PartyIndex party() const noexcept { return party_; }
  const PrimeField& field() const noexcept { return params_.field; }
  const ProtocolParams& params() const noexcept { return params_; }
  unsigned talliers() const noexcept { return params_.talliers; }
  unsigned threshold() const noexcept { return params_.threshold(); }
  Rng& rng() noexcept { return rng_; }
  Endpoint& endpoint() noexcept { return endpoint_; }

  const Counters& counters() const noexcept { return counters_; }
  const std::vector<OpenRecord>& open_log() const noexcept { return open_log_; }
  std::uint32_t round() const noexcept { return round_; }
  /// Records values made public by a step other than `open`.
  void log_open(std::string_view tag, Shares values);

  /// When enabled every multiplication output and every batch passed to
  /// `trace` is kept, so tests can check them against other parties' views.
  void enable_trace(bool on) noexcept { tracing_ = on; }
  void trace(const Shares& shares);
  const std::vector<Shares>& traced() const noexcept { return traced_; }

  // --- communication steps (one round each) ---------------------------------

  /// outgoing[d-1] goes to party d; returns what every party sent to us.
  std::map<PartyIndex, Shares> exchange(const std::vector<Shares>& outgoing);
  /// Sends the same payload to every party and collects all D payloads.
  std::map<PartyIndex, Shares> broadcast_all(const Shares& payload);

  // --- randomness -----------------------------------------------------------

  /// Generates the pools in advance, one round per non-empty pool.
  void pregenerate(std::size_t random_sharings, std::size_t double_sharings);
  Shares random_sharings(std::size_t n);
  std::vector<DoubleSharing> double_sharings(std::size_t n);
  /// Shares of uniformly random bits.
  Shares random_bits(std::size_t n);

  // --- arithmetic -----------------------------------------------------------

  /// Elementwise products, one multiplication layer.
  Shares mul(const Shares& u, const Shares& v);
  /// All parties learn the secrets. Throws InconsistentOpen when the D
  /// shares do not lie on one polynomial of degree < D'.
  Shares open(const Shares& x, std::string_view tag);

  /// [c < r] (or [r < c] when `public_below` is false) for public c and a
  /// secret r given by its ell shared bits, least significant first.
  Shares compare_public_bits(const std::vector<std::uint64_t>& c, const Shares& r_bits,
                             bool public_below);

  Shares shared_lsb(const Shares& x);
  /// [x < p/2]
  Shares less_than_half(const Shares& x);
  /// [a < b]
  Shares compare(const Shares& a, const Shares& b);
  /// [x > 0] for x embedding an integer of magnitude below p/2.
  Shares is_positive(const Shares& x);
  /// [x == 0]
  Shares is_zero(const Shares& x);

 private:
  std::uint32_t next_round();
  Shares to_shares(const ProtocolMessage& msg, std::size_t expected) const;
  void generate_random_sharings(std::size_t n);
  void generate_double_sharings(std::size_t n);

  ProtocolParams params_;
  Endpoint& endpoint_;
  PartyIndex party_;
  Rng rng_;
  std::uint32_t round_ = 0;
  Counters counters_;
  std::vector<OpenRecord> open_log_;
  bool tracing_ = false;
  std::vector<Shares> traced_;

  std::vector<PartyIndex> everyone_;
  std::deque<FieldElement> random_pool_;
  std::deque<DoubleSharing> double_pool_;
  std::vector<FieldElement> king_lambdas_;              // 1..2D'-1 at 0
  std::vector<FieldElement> open_lambdas_;              // 1..D' at 0
  std::vector<std::vector<FieldElement>> check_lambdas_;  // 1..D' at D'+1..D
};

// Single-instance forms of the batched primitives.
SharedValue gen_random_sharing(PartyContext& ctx);
DoubleSharing gen_double_sharing(PartyContext& ctx);
SharedValue mul_gate(PartyContext& ctx, const SharedValue& u, const SharedValue& v);
FieldElement open(PartyContext& ctx, const SharedValue& x);
SecretBit shared_lsb(PartyContext& ctx, const SharedValue& x);
SecretBit less_than_half(PartyContext& ctx, const SharedValue& x);
SecretBit compare(PartyContext& ctx, const SharedValue& a, const SharedValue& b);
SecretBit is_positive(PartyContext& ctx, const SharedValue& x);
SecretBit is_zero(PartyContext& ctx, const SharedValue& x);

}  // namespace tallyhide
