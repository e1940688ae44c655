#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "tallyhide/secretshare.hpp"

namespace tallyhide {

enum class MessageKind : std::uint8_t {
  pointwise = 0,
  broadcast = 1,
  ballot_submission = 2,
  receipt = 3,
};

/// One protocol message. On the wire it is framed as
///   u32 length | u64 session | u32 round | u16 sender | u8 kind | u32 count | count * u64
/// with every integer little-endian and `length` counting the bytes after it.
struct ProtocolMessage {
  std::uint64_t session = 0;
  std::uint32_t round = 0;
  PartyIndex sender = 0;
  MessageKind kind = MessageKind::pointwise;
  std::vector<std::uint64_t> payload;

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 8 + 4 + 2 + 1 + 4;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 30;

std::vector<std::uint8_t> encode_frame(const ProtocolMessage& msg);
/// Decodes the bytes following the length prefix. When `modulus` is set
/// every payload value must be below it.
ProtocolMessage decode_frame_body(std::span<const std::uint8_t> body,
                                  std::optional<std::uint64_t> modulus);

/// Extension point for authenticating and encrypting transport messages.
/// The default implementation passes messages through unchanged.
class MessageSecurity {
 public:
  virtual ~MessageSecurity() = default;
  virtual void seal(ProtocolMessage& /*msg*/, PartyIndex /*to*/) {}
  virtual void unseal(ProtocolMessage& /*msg*/) {}
};

struct RoundBarrier {
  std::uint64_t session = 0;
  std::uint32_t round = 0;
  std::vector<PartyIndex> expected;
};

using Timeout = std::optional<std::chrono::milliseconds>;

/// Buffers inbound messages for one party. Round messages are keyed by
/// (session, round, sender) and released by `await` once every expected
/// sender has delivered; submissions and receipts are queued FIFO.
class Mailbox {
 public:
  void deliver(ProtocolMessage msg);

  /// Blocks until every expected sender's message for the round is present.
  /// Throws TimeoutError (naming the missing senders), Error{duplicate_message}
  /// or Error{transport_failure} after `abort`.
  std::map<PartyIndex, ProtocolMessage> await(const RoundBarrier& barrier, Timeout timeout);

  /// Next queued message of the given kind (ballot_submission / receipt).
  ProtocolMessage await_queued(MessageKind kind, Timeout timeout);

  void abort(const std::string& reason);

  /// Largest round for which a barrier completed in `session`.
  std::uint32_t max_round_observed(std::uint64_t session) const;

 private:
  using Key = std::tuple<std::uint64_t, std::uint32_t, PartyIndex>;

  template <class Pred>
  bool wait(std::unique_lock<std::mutex>& lock, Timeout timeout, Pred pred);

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<Key, ProtocolMessage> pending_;
  std::set<std::pair<std::uint64_t, std::uint32_t>> duplicates_;
  std::map<std::pair<std::uint64_t, PartyIndex>, std::uint32_t> consumed_;
  std::map<std::uint64_t, std::uint32_t> max_round_;
  std::map<std::uint64_t, std::string> late_duplicates_;
  std::deque<ProtocolMessage> queued_;
  std::optional<std::string> aborted_;
};

/// Receives raw encoded frames for transcript comparison.
class TranscriptSink {
 public:
  virtual ~TranscriptSink() = default;
  virtual void record(PartyIndex to, std::span<const std::uint8_t> frame) = 0;
};

/// Byte transcript of everything one party sent, in send order.
class TranscriptLog : public TranscriptSink {
 public:
  void record(PartyIndex to, std::span<const std::uint8_t> frame) override;
  std::vector<std::uint8_t> bytes() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::uint8_t> bytes_;
};

/// One party's handle on the network. Messages to itself are delivered
/// straight into its own mailbox.
class Endpoint {
 public:
  explicit Endpoint(PartyIndex self) : self_(self) {}
  virtual ~Endpoint() = default;
  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  PartyIndex self() const noexcept { return self_; }

  void send(PartyIndex to, ProtocolMessage msg);
  /// One pointwise send per recipient, identical payloads.
  void broadcast(std::span<const PartyIndex> recipients, const ProtocolMessage& msg);

  std::map<PartyIndex, ProtocolMessage> await_round(const RoundBarrier& barrier) {
    return mailbox_.await(barrier, timeout_);
  }
  ProtocolMessage await_queued(MessageKind kind) { return mailbox_.await_queued(kind, timeout_); }

  Mailbox& mailbox() noexcept { return mailbox_; }
  void set_timeout(Timeout timeout) noexcept { timeout_ = timeout; }
  Timeout timeout() const noexcept { return timeout_; }
  void set_transcript(TranscriptSink* sink) noexcept { transcript_ = sink; }
  void set_security(std::shared_ptr<MessageSecurity> security) { security_ = std::move(security); }
  void abort(const std::string& reason) { mailbox_.abort(reason); }

 protected:
  virtual void transmit(PartyIndex to, const ProtocolMessage& msg) = 0;
  /// Entry point for inbound messages from the backend.
  void receive(ProtocolMessage msg);

 private:
  PartyIndex self_;
  Mailbox mailbox_;
  Timeout timeout_;
  TranscriptSink* transcript_ = nullptr;
  std::shared_ptr<MessageSecurity> security_ = std::make_shared<MessageSecurity>();
};

/// In-process network of D talliers (indices 1..D) plus a client slot at
/// index 0 used by voters.
class MemoryNetwork {
 public:
  explicit MemoryNetwork(unsigned talliers);
  ~MemoryNetwork();

  Endpoint& endpoint(PartyIndex index);
  unsigned talliers() const noexcept { return talliers_; }
  std::vector<Endpoint*> tallier_endpoints();
  void abort(const std::string& reason);

 private:
  class MemoryEndpoint;
  unsigned talliers_;
  std::vector<std::unique_ptr<MemoryEndpoint>> endpoints_;
};

struct PeerAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  friend bool operator==(const PeerAddress&, const PeerAddress&) = default;
};

/// TCP backend: one listener per party, one outbound connection per peer
/// opened lazily, one reader thread per inbound connection.
class SocketEndpoint : public Endpoint {
 public:
  SocketEndpoint(PartyIndex self, std::optional<std::uint64_t> modulus);
  ~SocketEndpoint() override;

  /// Binds and starts accepting. Port 0 picks an ephemeral port.
  void listen(const PeerAddress& address);
  std::uint16_t bound_port() const noexcept;
  void set_peer(PartyIndex party, PeerAddress address);
  void stop();

 protected:
  void transmit(PartyIndex to, const ProtocolMessage& msg) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tallyhide
