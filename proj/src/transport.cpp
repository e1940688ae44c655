#include "tallyhide/transport.hpp"

#include <string>

#include "tallyhide/errors.hpp"

namespace tallyhide {

namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned bytes) {
  for (unsigned i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t offset, unsigned bytes) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < bytes; ++i) v |= std::uint64_t{in[offset + i]} << (8 * i);
  return v;
}

bool is_queued_kind(MessageKind kind) {
  return kind == MessageKind::ballot_submission || kind == MessageKind::receipt;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const ProtocolMessage& msg) {
  const std::size_t body = kFrameHeaderBytes + 8 * msg.payload.size();
  if (body > kMaxFrameBytes) {
    throw Error(Errc::malformed_message, "frame of " + std::to_string(body) + " bytes too large");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + body);
  put_le(out, body, 4);
  put_le(out, msg.session, 8);
  put_le(out, msg.round, 4);
  put_le(out, msg.sender, 2);
  put_le(out, static_cast<std::uint8_t>(msg.kind), 1);
  put_le(out, msg.payload.size(), 4);
  for (std::uint64_t v : msg.payload) put_le(out, v, 8);
  return out;
}

ProtocolMessage decode_frame_body(std::span<const std::uint8_t> body,
                                  std::optional<std::uint64_t> modulus) {
  if (body.size() < kFrameHeaderBytes) {
    throw Error(Errc::malformed_message, "frame shorter than its header");
  }
  ProtocolMessage msg;
  msg.session = get_le(body, 0, 8);
  msg.round = static_cast<std::uint32_t>(get_le(body, 8, 4));
  msg.sender = static_cast<PartyIndex>(get_le(body, 12, 2));
  const auto kind = get_le(body, 14, 1);
  if (kind > static_cast<std::uint8_t>(MessageKind::receipt)) {
    throw Error(Errc::malformed_message, "unknown message kind " + std::to_string(kind));
  }
  msg.kind = static_cast<MessageKind>(kind);
  const std::uint64_t count = get_le(body, 15, 4);
  if (body.size() != kFrameHeaderBytes + 8 * count) {
    throw Error(Errc::malformed_message, "payload count " + std::to_string(count) +
                                             " does not match frame length " +
                                             std::to_string(body.size()));
  }
  msg.payload.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    msg.payload[i] = get_le(body, kFrameHeaderBytes + 8 * i, 8);
    if (modulus && msg.payload[i] >= *modulus) {
      throw Error(Errc::malformed_message, "payload value " + std::to_string(msg.payload[i]) +
                                               " not below " + std::to_string(*modulus));
    }
  }
  return msg;
}

// ---------------------------------------------------------------------------

template <class Pred>
bool Mailbox::wait(std::unique_lock<std::mutex>& lock, Timeout timeout, Pred pred) {
  if (!timeout) {
    cv_.wait(lock, pred);
    return true;
  }
  return cv_.wait_for(lock, *timeout, pred);
}

void Mailbox::deliver(ProtocolMessage msg) {
  {
    std::lock_guard lock(mutex_);
    if (is_queued_kind(msg.kind)) {
      queued_.push_back(std::move(msg));
    } else {
      auto consumed = consumed_.find({msg.session, msg.sender});
      if (consumed != consumed_.end() && msg.round <= consumed->second) {
        late_duplicates_[msg.session] = "party " + std::to_string(msg.sender) +
                                        " resent round " + std::to_string(msg.round);
      } else {
        Key key{msg.session, msg.round, msg.sender};
        if (pending_.contains(key)) {
          duplicates_.insert({msg.session, msg.round});
        } else {
          pending_.emplace(key, std::move(msg));
        }
      }
    }
  }
  cv_.notify_all();
}

std::map<PartyIndex, ProtocolMessage> Mailbox::await(const RoundBarrier& barrier,
                                                     Timeout timeout) {
  std::unique_lock lock(mutex_);
  auto complete = [&] {
    for (PartyIndex p : barrier.expected) {
      if (!pending_.contains({barrier.session, barrier.round, p})) return false;
    }
    return true;
  };
  auto violated = [&] {
    return aborted_.has_value() || duplicates_.contains({barrier.session, barrier.round}) ||
           late_duplicates_.contains(barrier.session);
  };
  const bool ready = wait(lock, timeout, [&] { return violated() || complete(); });
  if (aborted_) throw Error(Errc::transport_failure, "session aborted: " + *aborted_);
  if (duplicates_.contains({barrier.session, barrier.round})) {
    throw Error(Errc::duplicate_message, "round " + std::to_string(barrier.round) +
                                             " of session " + std::to_string(barrier.session) +
                                             " received a message twice");
  }
  if (auto it = late_duplicates_.find(barrier.session); it != late_duplicates_.end()) {
    throw Error(Errc::duplicate_message, it->second);
  }
  if (!ready) {
    std::vector<PartyIndex> missing;
    for (PartyIndex p : barrier.expected) {
      if (!pending_.contains({barrier.session, barrier.round, p})) missing.push_back(p);
    }
    throw TimeoutError(barrier.session, barrier.round, std::move(missing));
  }
  std::map<PartyIndex, ProtocolMessage> out;
  for (PartyIndex p : barrier.expected) {
    auto node = pending_.extract({barrier.session, barrier.round, p});
    out.emplace(p, std::move(node.mapped()));
    auto& last = consumed_[{barrier.session, p}];
    last = std::max(last, barrier.round);
  }
  auto& max_round = max_round_[barrier.session];
  max_round = std::max(max_round, barrier.round);
  return out;
}

ProtocolMessage Mailbox::await_queued(MessageKind kind, Timeout timeout) {
  std::unique_lock lock(mutex_);
  auto find = [&] {
    for (auto it = queued_.begin(); it != queued_.end(); ++it) {
      if (it->kind == kind) return it;
    }
    return queued_.end();
  };
  const bool ready =
      wait(lock, timeout, [&] { return aborted_.has_value() || find() != queued_.end(); });
  if (aborted_) throw Error(Errc::transport_failure, "session aborted: " + *aborted_);
  if (!ready) throw Error(Errc::timeout, "no queued message arrived before the deadline");
  auto it = find();
  ProtocolMessage msg = std::move(*it);
  queued_.erase(it);
  return msg;
}

void Mailbox::abort(const std::string& reason) {
  {
    std::lock_guard lock(mutex_);
    if (!aborted_) aborted_ = reason;
  }
  cv_.notify_all();
}

std::uint32_t Mailbox::max_round_observed(std::uint64_t session) const {
  std::lock_guard lock(mutex_);
  auto it = max_round_.find(session);
  return it == max_round_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------

void TranscriptLog::record(PartyIndex to, std::span<const std::uint8_t> frame) {
  std::lock_guard lock(mutex_);
  bytes_.push_back(static_cast<std::uint8_t>(to));
  bytes_.push_back(static_cast<std::uint8_t>(to >> 8));
  bytes_.insert(bytes_.end(), frame.begin(), frame.end());
}

std::vector<std::uint8_t> TranscriptLog::bytes() const {
  std::lock_guard lock(mutex_);
  return bytes_;
}

void Endpoint::send(PartyIndex to, ProtocolMessage msg) {
  msg.sender = self_;
  if (transcript_) transcript_->record(to, encode_frame(msg));
  if (to == self_) {
    mailbox_.deliver(std::move(msg));
    return;
  }
  security_->seal(msg, to);
  transmit(to, msg);
}

void Endpoint::broadcast(std::span<const PartyIndex> recipients, const ProtocolMessage& msg) {
  for (PartyIndex to : recipients) send(to, msg);
}

void Endpoint::receive(ProtocolMessage msg) {
  security_->unseal(msg);
  mailbox_.deliver(std::move(msg));
}

// ---------------------------------------------------------------------------

class MemoryNetwork::MemoryEndpoint : public Endpoint {
 public:
  MemoryEndpoint(PartyIndex self, MemoryNetwork& network) : Endpoint(self), network_(network) {}

  void accept(const ProtocolMessage& msg) { receive(msg); }

 protected:
  void transmit(PartyIndex to, const ProtocolMessage& msg) override {
    if (to >= network_.endpoints_.size()) {
      throw Error(Errc::transport_failure, "no party " + std::to_string(to) + " on the network");
    }
    network_.endpoints_[to]->accept(msg);
  }

 private:
  MemoryNetwork& network_;
};

MemoryNetwork::MemoryNetwork(unsigned talliers) : talliers_(talliers) {
  for (unsigned i = 0; i <= talliers; ++i) {
    endpoints_.push_back(std::make_unique<MemoryEndpoint>(static_cast<PartyIndex>(i), *this));
  }
}

MemoryNetwork::~MemoryNetwork() = default;

Endpoint& MemoryNetwork::endpoint(PartyIndex index) {
  if (index >= endpoints_.size()) {
    throw Error(Errc::transport_failure, "no party " + std::to_string(index) + " on the network");
  }
  return *endpoints_[index];
}

std::vector<Endpoint*> MemoryNetwork::tallier_endpoints() {
  std::vector<Endpoint*> out;
  for (unsigned i = 1; i <= talliers_; ++i) out.push_back(endpoints_[i].get());
  return out;
}

void MemoryNetwork::abort(const std::string& reason) {
  for (auto& e : endpoints_) e->abort(reason);
}

}  // namespace tallyhide
