#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <string>
#include <thread>

#include "tallyhide/errors.hpp"
#include "tallyhide/transport.hpp"

namespace tallyhide {

namespace {

constexpr std::chrono::milliseconds kConnectDeadline{30000};
constexpr std::chrono::milliseconds kConnectRetry{25};

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

bool read_exact(int fd, std::uint8_t* out, std::size_t n) {
  while (n > 0) {
    const ssize_t got = ::recv(fd, out, n, 0);
    if (got == 0) return false;
    if (got < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    out += got;
    n -= static_cast<std::size_t>(got);
  }
  return true;
}

void write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const ssize_t put = ::send(fd, data, n, MSG_NOSIGNAL);
    if (put < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::transport_failure, sys_error("send failed"));
    }
    data += put;
    n -= static_cast<std::size_t>(put);
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

int connect_once(const PeerAddress& address) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(address.port);
  if (::getaddrinfo(address.host.c_str(), port.c_str(), &hints, &found) != 0 || !found) {
    throw Error(Errc::transport_failure, "cannot resolve host " + address.host);
  }
  int fd = -1;
  for (addrinfo* ai = found; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd >= 0) set_nodelay(fd);
  return fd;
}

}  // namespace

struct SocketEndpoint::Impl {
  struct Outbound {
    std::mutex mutex;
    int fd = -1;
  };

  SocketEndpoint& owner;
  std::optional<std::uint64_t> modulus;
  int listen_fd = -1;
  std::uint16_t port = 0;
  std::atomic<bool> stopping{false};
  std::thread listener;

  std::mutex mutex;  // guards everything below
  std::map<PartyIndex, PeerAddress> peers;
  std::map<PartyIndex, std::unique_ptr<Outbound>> outbound;
  std::vector<int> inbound;
  std::vector<std::thread> readers;

  Impl(SocketEndpoint& o, std::optional<std::uint64_t> m) : owner(o), modulus(m) {}

  void accept_loop() {
    while (!stopping) {
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      set_nodelay(fd);
      std::lock_guard lock(mutex);
      if (stopping) {
        ::close(fd);
        return;
      }
      inbound.push_back(fd);
      readers.emplace_back([this, fd] { read_loop(fd); });
    }
  }

  void read_loop(int fd) {
    std::vector<std::uint8_t> body;
    while (!stopping) {
      std::uint8_t prefix[4];
      if (!read_exact(fd, prefix, 4)) return;
      const std::uint32_t length = std::uint32_t{prefix[0]} | std::uint32_t{prefix[1]} << 8 |
                                   std::uint32_t{prefix[2]} << 16 |
                                   std::uint32_t{prefix[3]} << 24;
      if (length < kFrameHeaderBytes || length > kMaxFrameBytes) {
        owner.abort("frame length " + std::to_string(length) + " out of range");
        return;
      }
      body.resize(length);
      if (!read_exact(fd, body.data(), length)) return;
      try {
        owner.receive(decode_frame_body(body, modulus));
      } catch (const Error& e) {
        owner.abort(e.what());
        return;
      }
    }
  }

  Outbound& connection(PartyIndex to) {
    std::unique_lock lock(mutex);
    auto& slot = outbound[to];
    if (!slot) slot = std::make_unique<Outbound>();
    Outbound& out = *slot;
    auto peer = peers.find(to);
    if (peer == peers.end()) {
      throw Error(Errc::transport_failure, "no address configured for party " + std::to_string(to));
    }
    const PeerAddress address = peer->second;
    lock.unlock();

    std::lock_guard out_lock(out.mutex);
    if (out.fd >= 0) return out;
    const auto deadline = std::chrono::steady_clock::now() + kConnectDeadline;
    while (!stopping) {
      const int fd = connect_once(address);
      if (fd >= 0) {
        out.fd = fd;
        return out;
      }
      if (std::chrono::steady_clock::now() > deadline) break;
      std::this_thread::sleep_for(kConnectRetry);
    }
    throw Error(Errc::transport_failure, "party " + std::to_string(to) + " unreachable at " +
                                             address.host + ":" + std::to_string(address.port));
  }
};

SocketEndpoint::SocketEndpoint(PartyIndex self, std::optional<std::uint64_t> modulus)
    : Endpoint(self), impl_(std::make_unique<Impl>(*this, modulus)) {
  set_timeout(std::chrono::milliseconds{30000});
}

SocketEndpoint::~SocketEndpoint() { stop(); }

void SocketEndpoint::listen(const PeerAddress& address) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(Errc::transport_failure, sys_error("socket"));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(address.port);
  if (::inet_pton(AF_INET, address.host.c_str(), &addr.sin_addr) != 1) {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 64) != 0) {
    const std::string msg = sys_error("cannot listen on port " + std::to_string(address.port));
    ::close(fd);
    throw Error(Errc::transport_failure, msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  impl_->listen_fd = fd;
  impl_->port = ntohs(addr.sin_port);
  impl_->listener = std::thread([this] { impl_->accept_loop(); });
}

std::uint16_t SocketEndpoint::bound_port() const noexcept { return impl_->port; }

void SocketEndpoint::set_peer(PartyIndex party, PeerAddress address) {
  std::lock_guard lock(impl_->mutex);
  impl_->peers[party] = std::move(address);
}

void SocketEndpoint::stop() {
  if (impl_->stopping.exchange(true)) return;
  if (impl_->listen_fd >= 0) {
    ::shutdown(impl_->listen_fd, SHUT_RDWR);
    ::close(impl_->listen_fd);
  }
  if (impl_->listener.joinable()) impl_->listener.join();
  std::vector<std::thread> readers;
  {
    std::lock_guard lock(impl_->mutex);
    for (int fd : impl_->inbound) ::shutdown(fd, SHUT_RDWR);
    for (auto& [party, out] : impl_->outbound) {
      if (out->fd >= 0) ::shutdown(out->fd, SHUT_RDWR);
    }
    readers.swap(impl_->readers);
  }
  for (auto& t : readers) t.join();
  std::lock_guard lock(impl_->mutex);
  for (int fd : impl_->inbound) ::close(fd);
  for (auto& [party, out] : impl_->outbound) {
    if (out->fd >= 0) ::close(out->fd);
  }
  impl_->inbound.clear();
  abort("endpoint stopped");
}

void SocketEndpoint::transmit(PartyIndex to, const ProtocolMessage& msg) {
  auto frame = encode_frame(msg);
  auto& out = impl_->connection(to);
  std::lock_guard lock(out.mutex);
  write_all(out.fd, frame.data(), frame.size());
}

}  // namespace tallyhide
