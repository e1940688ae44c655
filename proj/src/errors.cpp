#include "tallyhide/errors.hpp"

#include <sstream>

namespace tallyhide {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::zero_inverse: return "ZeroInverse";
    case Errc::invalid_prime: return "InvalidPrime";
    case Errc::invalid_threshold: return "InvalidThreshold";
    case Errc::insufficient_shares: return "InsufficientShares";
    case Errc::duplicate_index: return "DuplicateIndex";
    case Errc::mixed_indices: return "MixedIndices";
    case Errc::degree_overflow: return "DegreeOverflow";
    case Errc::inconsistent_open: return "InconsistentOpen";
    case Errc::retry_exhausted: return "RetryExhausted";
    case Errc::transport_failure: return "TransportFailure";
    case Errc::timeout: return "Timeout";
    case Errc::duplicate_message: return "DuplicateMessage";
    case Errc::malformed_message: return "MalformedMessage";
    case Errc::invalid_ranking: return "InvalidRanking";
    case Errc::wrong_rule: return "WrongRule";
    case Errc::config_mismatch: return "ConfigMismatch";
    case Errc::rule_mismatch: return "RuleMismatch";
    case Errc::field_too_small: return "FieldTooSmall";
    case Errc::too_many_candidates: return "TooManyCandidates";
    case Errc::invalid_rule: return "InvalidRule";
    case Errc::bad_threshold: return "BadThreshold";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool Error::is_transport_failure() const noexcept {
  return code_ == Errc::transport_failure || code_ == Errc::timeout ||
         code_ == Errc::duplicate_message || code_ == Errc::malformed_message;
}

namespace {

std::string describe_timeout(std::uint64_t session, std::uint32_t round,
                             const std::vector<std::uint16_t>& missing) {
  std::ostringstream os;
  os << "session " << session << " round " << round << " timed out waiting for party";
  if (missing.size() != 1) os << "ies";
  for (std::size_t i = 0; i < missing.size(); ++i) os << (i ? ", T" : " T") << missing[i];
  return os.str();
}

}  // namespace

TimeoutError::TimeoutError(std::uint64_t session, std::uint32_t round,
                           std::vector<std::uint16_t> missing)
    : Error(Errc::timeout, describe_timeout(session, round, missing)),
      missing_(std::move(missing)) {}

}  // namespace tallyhide
