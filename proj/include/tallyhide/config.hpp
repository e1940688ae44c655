#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tallyhide/ballot.hpp"
#include "tallyhide/transport.hpp"

namespace tallyhide {

inline constexpr int kConfigSchemaVersion = 1;

enum class Backend { memory, socket };

struct TransportConfig {
  Backend backend = Backend::memory;
  /// Listening address of tallier d at index d-1 (socket backend).
  std::vector<PeerAddress> endpoints;
  /// Per-round deadline; 0 means wait indefinitely.
  std::uint64_t timeout_ms = 30000;

  friend bool operator==(const TransportConfig&, const TransportConfig&) = default;
};

struct ElectionConfig {
  Rule rule = Rule::copeland;
  std::vector<std::string> candidates;
  unsigned winners = 1;
  unsigned talliers = 3;
  std::uint64_t prime = (std::uint64_t{1} << 31) - 1;
  Alpha alpha;
  std::uint64_t expected_voters = 0;
  std::uint64_t seed = 1;
  TieBreak tie_break = TieBreak::lowest_index;
  /// Ballots validated per batch; 0 validates everything in one batch.
  std::size_t batch_size = 0;
  TransportConfig transport;

  unsigned candidate_count() const noexcept { return static_cast<unsigned>(candidates.size()); }
  unsigned threshold() const noexcept { return (talliers + 1) / 2; }

  friend bool operator==(const ElectionConfig&, const ElectionConfig&) = default;
};

/// Checks every parameter bound and throws the matching error naming it:
/// InvalidRule, BadThreshold, FieldTooSmall, TooManyCandidates or
/// InvalidConfig.
void validate_config(const ElectionConfig& config);

std::string config_to_json(const ElectionConfig& config);
/// Parses and validates. Throws Error{invalid_config} on malformed documents.
ElectionConfig config_from_json(const std::string& text);
ElectionConfig load_config(const std::string& path);

/// Everything a tallier process needs to join a session.
struct SessionDescriptor {
  ElectionConfig config;
  std::uint64_t session = 1;
  std::string ballot_box;

  friend bool operator==(const SessionDescriptor&, const SessionDescriptor&) = default;
};

std::string session_to_json(const SessionDescriptor& session);
SessionDescriptor session_from_json(const std::string& text);
SessionDescriptor load_session(const std::string& path);

/// Endpoint of tallier d after TALLYHIDE_PARTY_<d>_HOST / _PORT overrides.
PeerAddress resolve_endpoint(const ElectionConfig& config, PartyIndex party);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace tallyhide
