#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tallyhide {

enum class Errc {
  zero_inverse,
  invalid_prime,
  invalid_threshold,
  insufficient_shares,
  duplicate_index,
  mixed_indices,
  degree_overflow,
  inconsistent_open,
  retry_exhausted,
  transport_failure,
  timeout,
  duplicate_message,
  malformed_message,
  invalid_ranking,
  wrong_rule,
  config_mismatch,
  rule_mismatch,
  field_too_small,
  too_many_candidates,
  invalid_rule,
  bad_threshold,
  invalid_config,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library. `code()` identifies the condition;
/// `what()` carries a human-readable description naming the offending value.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

  /// Timeouts, duplicates and undecodable frames all surface as transport
  /// failures to protocol callers.
  bool is_transport_failure() const noexcept;

 private:
  Errc code_;
};

/// Raised by a round barrier whose deadline expired.
class TimeoutError : public Error {
 public:
  TimeoutError(std::uint64_t session, std::uint32_t round,
               std::vector<std::uint16_t> missing);

  const std::vector<std::uint16_t>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::uint16_t> missing_;
};

}  // namespace tallyhide
