#include "tallyhide/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tallyhide/errors.hpp"
#include "tallyhide/field.hpp"

namespace tallyhide {

using nlohmann::json;

namespace {

void require_above(std::uint64_t p, std::uint64_t bound, const std::string& what) {
  if (p <= bound) {
    throw Error(Errc::field_too_small, "p = " + std::to_string(p) + " must exceed " + what +
                                           " = " + std::to_string(bound));
  }
}

json config_json(const ElectionConfig& c) {
  json endpoints = json::array();
  for (const auto& e : c.transport.endpoints) endpoints.push_back({{"host", e.host}, {"port", e.port}});
  return {
      {"schema_version", kConfigSchemaVersion},
      {"rule", std::string(to_string(c.rule))},
      {"candidates", c.candidates},
      {"winners", c.winners},
      {"talliers", c.talliers},
      {"prime", c.prime},
      {"alpha", {{"s", c.alpha.s}, {"t", c.alpha.t}}},
      {"expected_voters", c.expected_voters},
      {"seed", c.seed},
      {"tie_break", std::string(to_string(c.tie_break))},
      {"batch_size", c.batch_size},
      {"transport",
       {{"backend", c.transport.backend == Backend::memory ? "memory" : "socket"},
        {"endpoints", endpoints},
        {"timeout_ms", c.transport.timeout_ms}}},
  };
}

ElectionConfig config_from(const json& j) {
  ElectionConfig c;
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kConfigSchemaVersion) {
      throw Error(Errc::invalid_config, "unsupported schema_version " + std::to_string(version));
    }
    c.rule = parse_rule(j.at("rule").get<std::string>());
    c.candidates = j.at("candidates").get<std::vector<std::string>>();
    c.winners = j.value("winners", 1u);
    c.talliers = j.value("talliers", 3u);
    c.prime = j.value("prime", c.prime);
    if (j.contains("alpha")) {
      c.alpha.s = j["alpha"].value("s", c.alpha.s);
      c.alpha.t = j["alpha"].value("t", c.alpha.t);
    }
    c.expected_voters = j.value("expected_voters", std::uint64_t{0});
    c.seed = j.value("seed", c.seed);
    c.tie_break = parse_tie_break(j.value("tie_break", std::string("lowest-index")));
    c.batch_size = j.value("batch_size", std::size_t{0});
    if (j.contains("transport")) {
      const auto& t = j["transport"];
      const std::string backend = t.value("backend", std::string("memory"));
      if (backend == "memory") {
        c.transport.backend = Backend::memory;
      } else if (backend == "socket") {
        c.transport.backend = Backend::socket;
      } else {
        throw Error(Errc::invalid_config, "unknown transport backend '" + backend + "'");
      }
      for (const auto& e : t.value("endpoints", json::array())) {
        c.transport.endpoints.push_back(
            {e.value("host", std::string("127.0.0.1")), e.at("port").get<std::uint16_t>()});
      }
      c.transport.timeout_ms = t.value("timeout_ms", c.transport.timeout_ms);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  validate_config(c);
  return c;
}

}  // namespace

void validate_config(const ElectionConfig& c) {
  const std::uint64_t M = c.candidate_count();
  if (M == 0) throw Error(Errc::invalid_config, "at least one candidate is required");
  std::set<std::string> names(c.candidates.begin(), c.candidates.end());
  if (names.size() != M) throw Error(Errc::invalid_config, "candidate names must be distinct");
  if (c.winners < 1 || c.winners > M) {
    throw Error(Errc::invalid_config, "winners K = " + std::to_string(c.winners) +
                                          " must lie in 1.." + std::to_string(M));
  }
  if (c.talliers < 1 || c.talliers > 1000) {
    throw Error(Errc::bad_threshold, "D = " + std::to_string(c.talliers) +
                                         " talliers; need 1 <= D <= 1000");
  }
  if (2 * c.threshold() - 1 > c.talliers) {
    throw Error(Errc::bad_threshold, "2D'-1 = " + std::to_string(2 * c.threshold() - 1) +
                                         " exceeds D = " + std::to_string(c.talliers));
  }
  if (c.alpha.t == 0 || c.alpha.s > c.alpha.t) {
    throw Error(Errc::invalid_config, "alpha = " + std::to_string(c.alpha.s) + "/" +
                                          std::to_string(c.alpha.t) + " must lie in [0, 1]");
  }
  if (c.rule == Rule::kemeny && M > 6) {
    throw Error(Errc::too_many_candidates,
                std::to_string(M) + " candidates; Kemeny enumeration is limited to 6");
  }
  if (c.prime < 3 || c.prime >= (std::uint64_t{1} << 32) || !is_prime(c.prime)) {
    throw Error(Errc::field_too_small, "p = " + std::to_string(c.prime) +
                                           " is not an odd prime below 2^32");
  }
  const std::uint64_t p = c.prime;
  const std::uint64_t N = c.expected_voters;
  require_above(p, c.talliers, "the number of talliers D");
  require_above(p, 2 * N, "2N");
  require_above(p, std::max(c.alpha.s, c.alpha.t) * (M - 1), "max(s,t)(M-1)");
  require_above(p, 2 * (M - 1), "2(M-1)");
  if (c.rule == Rule::kemeny) require_above(p, N * (M * (M - 1) / 2), "N*M(M-1)/2");
  if (c.transport.backend == Backend::socket && c.transport.endpoints.size() != c.talliers) {
    throw Error(Errc::invalid_config, "socket backend needs " + std::to_string(c.talliers) +
                                          " endpoints, got " +
                                          std::to_string(c.transport.endpoints.size()));
  }
}

std::string config_to_json(const ElectionConfig& config) { return config_json(config).dump(2); }

ElectionConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return config_from(j);
}

ElectionConfig load_config(const std::string& path) { return config_from_json(read_file(path)); }

std::string session_to_json(const SessionDescriptor& s) {
  json j = config_json(s.config);
  j["threshold"] = s.config.threshold();
  j["session"] = s.session;
  j["ballot_box"] = s.ballot_box;
  return j.dump(2);
}

SessionDescriptor session_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  SessionDescriptor s;
  s.config = config_from(j);
  try {
    s.session = j.at("session").get<std::uint64_t>();
    s.ballot_box = j.at("ballot_box").get<std::string>();
    if (j.contains("threshold") && j["threshold"].get<unsigned>() != s.config.threshold()) {
      throw Error(Errc::bad_threshold, "descriptor threshold disagrees with D");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_config, e.what());
  }
  return s;
}

SessionDescriptor load_session(const std::string& path) {
  return session_from_json(read_file(path));
}

PeerAddress resolve_endpoint(const ElectionConfig& config, PartyIndex party) {
  PeerAddress address;
  if (party >= 1 && party <= config.transport.endpoints.size()) {
    address = config.transport.endpoints[party - 1];
  }
  const std::string prefix = "TALLYHIDE_PARTY_" + std::to_string(party);
  if (const char* host = std::getenv((prefix + "_HOST").c_str())) address.host = host;
  if (const char* port = std::getenv((prefix + "_PORT").c_str())) {
    address.port = static_cast<std::uint16_t>(std::strtoul(port, nullptr, 10));
  }
  return address;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_config, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::invalid_config, "cannot write " + path);
  out << contents;
}

}  // namespace tallyhide
