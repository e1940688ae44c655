#include <doctest.h>

#include <thread>

#include "support.hpp"
#include "tallyhide/errors.hpp"
#include "tallyhide/transport.hpp"

using namespace tallyhide;
using namespace tallyhide::testing;
using namespace std::chrono_literals;

namespace {

ProtocolMessage msg(std::uint64_t session, std::uint32_t round, PartyIndex sender,
                    std::vector<std::uint64_t> payload = {1, 2, 3}) {
  return {session, round, sender, MessageKind::pointwise, std::move(payload)};
}

std::vector<std::uint8_t> body_of(const std::vector<std::uint8_t>& frame) {
  return {frame.begin() + 4, frame.end()};
}

// Socket parties 1..D on ephemeral ports, wired to each other.
std::vector<std::unique_ptr<SocketEndpoint>> socket_mesh(unsigned D, std::uint64_t p) {
  std::vector<std::unique_ptr<SocketEndpoint>> eps;
  for (unsigned d = 1; d <= D; ++d) {
    eps.push_back(std::make_unique<SocketEndpoint>(static_cast<PartyIndex>(d), p));
    eps.back()->listen({"127.0.0.1", 0});
    eps.back()->set_timeout(20s);
  }
  for (auto& a : eps) {
    for (auto& b : eps) {
      if (a != b) a->set_peer(b->self(), {"127.0.0.1", b->bound_port()});
    }
  }
  return eps;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("frame layout") {
  const auto frame = encode_frame({0x1122334455667788ULL, 7, 3, MessageKind::broadcast, {9, 10}});
  REQUIRE(frame.size() == 4 + kFrameHeaderBytes + 16);
  CHECK(frame[0] == kFrameHeaderBytes + 16);
  CHECK(frame[4] == 0x88);
  CHECK(frame[12] == 7);
  CHECK(frame[16] == 3);
  CHECK(frame[18] == 1);
  CHECK(frame[19] == 2);
  CHECK(frame[23] == 9);
  const auto back = decode_frame_body(body_of(frame), std::nullopt);
  CHECK(back == ProtocolMessage{0x1122334455667788ULL, 7, 3, MessageKind::broadcast, {9, 10}});
}

TEST_CASE("malformed frames are refused") {
  auto frame = encode_frame(msg(1, 1, 1, {5, 40}));
  auto code = [](const std::vector<std::uint8_t>& body, std::optional<std::uint64_t> p) {
    try {
      decode_frame_body(body, p);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::invalid_config;
  };
  CHECK(code(body_of(frame), 31) == Errc::malformed_message);
  CHECK(code({frame.begin() + 4, frame.begin() + 10}, std::nullopt) == Errc::malformed_message);
  auto bad_kind = body_of(frame);
  bad_kind[14] = 9;
  CHECK(code(bad_kind, std::nullopt) == Errc::malformed_message);
  auto short_payload = body_of(frame);
  short_payload.pop_back();
  CHECK(code(short_payload, std::nullopt) == Errc::malformed_message);
}

TEST_CASE("mailbox releases a round once every sender has delivered") {
  Mailbox box;
  box.deliver(msg(1, 1, 2));
  std::thread late([&] {
    std::this_thread::sleep_for(20ms);
    box.deliver(msg(1, 1, 3));
  });
  const auto got = box.await({1, 1, {2, 3}}, 5s);
  late.join();
  CHECK(got.size() == 2);
  CHECK(got.at(3).sender == 3);
  CHECK(box.max_round_observed(1) == 1);
}

TEST_CASE("timeouts name the missing parties") {
  Mailbox box;
  box.deliver(msg(1, 4, 1));
  try {
    box.await({1, 4, {1, 2, 3}}, 50ms);
    FAIL("no timeout");
  } catch (const TimeoutError& e) {
    CHECK(e.code() == Errc::timeout);
    CHECK(e.missing() == std::vector<std::uint16_t>{2, 3});
    CHECK(std::string(e.what()).find("T2, T3") != std::string::npos);
    CHECK(e.is_transport_failure());
  }
}

TEST_CASE("duplicates are detected before and after consumption") {
  Mailbox box;
  box.deliver(msg(1, 1, 2));
  box.deliver(msg(1, 1, 2));
  CHECK_THROWS_AS(box.await({1, 1, {2}}, 1s), Error);

  Mailbox other;
  other.deliver(msg(1, 1, 2));
  other.await({1, 1, {2}}, 1s);
  other.deliver(msg(1, 1, 2));
  try {
    other.await({1, 2, {2}}, 1s);
    FAIL("late duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_message);
  }
}

TEST_CASE("sessions are isolated") {
  Mailbox box;
  box.deliver(msg(7, 1, 2, {70}));
  box.deliver(msg(8, 1, 2, {80}));
  CHECK(box.await({8, 1, {2}}, 1s).at(2).payload == std::vector<std::uint64_t>{80});
  CHECK(box.await({7, 1, {2}}, 1s).at(2).payload == std::vector<std::uint64_t>{70});
  CHECK_THROWS_AS(box.await({9, 1, {2}}, 10ms), TimeoutError);
}

TEST_CASE("queued kinds are FIFO and abort wakes waiters") {
  Mailbox box;
  box.deliver({1, 0, 0, MessageKind::ballot_submission, {1}});
  box.deliver({1, 0, 0, MessageKind::receipt, {2}});
  box.deliver({1, 0, 0, MessageKind::ballot_submission, {3}});
  CHECK(box.await_queued(MessageKind::ballot_submission, 1s).payload.front() == 1);
  CHECK(box.await_queued(MessageKind::ballot_submission, 1s).payload.front() == 3);
  CHECK(box.await_queued(MessageKind::receipt, 1s).payload.front() == 2);
  std::thread stopper([&] {
    std::this_thread::sleep_for(20ms);
    box.abort("test");
  });
  try {
    box.await({1, 1, {1}}, std::nullopt);
    FAIL("abort ignored");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::transport_failure);
  }
  stopper.join();
}

TEST_CASE("memory network delivers pointwise and to self") {
  MemoryNetwork net(3);
  const PartyIndex everyone[] = {1, 2, 3};
  net.endpoint(2).broadcast(everyone, msg(1, 1, 0, {4}));
  for (PartyIndex d : everyone) {
    const auto got = net.endpoint(d).await_round({1, 1, {2}});
    CHECK(got.at(2).payload == std::vector<std::uint64_t>{4});
  }
  CHECK_THROWS_AS(net.endpoint(9), Error);
}

TEST_CASE("transcripts are deterministic under a seed") {
  const ElectionConfig c{Rule::copeland, {"A", "B", "C"}, 1, 3};
  std::vector<Ranking> rankings = {Ranking::strict({0, 1, 2}), Ranking::strict({2, 1, 0}),
                                   Ranking::strict({1, 0, 2})};
  std::vector<TranscriptLog> first, second;
  RunOptions opts;
  opts.transcripts = &first;
  run_election_local(c, cast_ballots(c, rankings, 3), opts);
  opts.transcripts = &second;
  run_election_local(c, cast_ballots(c, rankings, 3), opts);
  REQUIRE(first.size() == 3);
  for (unsigned d = 0; d < 3; ++d) {
    CHECK_FALSE(first[d].bytes().empty());
    CHECK(first[d].bytes() == second[d].bytes());
  }
}

TEST_CASE("socket round trip of a million elements") {
  const std::uint64_t p = PrimeField::mersenne31().modulus();
  auto eps = socket_mesh(2, p);
  std::vector<std::uint64_t> big(1'000'000);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = (i * 2654435761ULL) % p;
  std::thread echo([&] {
    auto got = eps[1]->await_round({5, 1, {1}});
    auto back = got.at(1);
    back.round = 2;
    eps[1]->send(1, back);
  });
  eps[0]->send(2, msg(5, 1, 1, big));
  const auto got = eps[0]->await_round({5, 2, {2}});
  echo.join();
  CHECK(got.at(2).payload == big);
  CHECK(got.at(2).sender == 2);
  for (auto& e : eps) e->stop();
}

TEST_CASE("socket peers reject out-of-field values") {
  auto eps = socket_mesh(2, 31);
  eps[0]->send(2, msg(1, 1, 1, {31}));
  CHECK_THROWS_AS(eps[1]->await_round({1, 1, {1}}), Error);
  for (auto& e : eps) e->stop();
}

TEST_CASE("socket timeout names the silent party") {
  auto eps = socket_mesh(3, 31);
  eps[0]->set_timeout(100ms);
  eps[1]->send(1, msg(1, 1, 2));
  try {
    eps[0]->await_round({1, 1, {2, 3}});
    FAIL("no timeout");
  } catch (const TimeoutError& e) {
    CHECK(e.missing() == std::vector<std::uint16_t>{3});
  }
  for (auto& e : eps) e->stop();
}

TEST_CASE("socket and memory backends compute the same outputs and transcripts") {
  const PrimeField f = PrimeField::mersenne31();
  const unsigned D = 3;
  Rng rng(10);
  const auto a = deal(f, {{5}, {1000}, {f.modulus() - 3}}, D, rng);
  const auto b = deal(f, {{7}, {999}, {4}}, D, rng);
  auto program = [&](PartyContext& ctx) {
    const auto& x = a[ctx.party() - 1];
    const auto& y = b[ctx.party() - 1];
    Shares out = ctx.compare(x, y);
    const auto z = ctx.is_zero(ctx.mul(x, y));
    out.insert(out.end(), z.begin(), z.end());
    return ctx.open(out, "result");
  };

  std::vector<TranscriptLog> mem_logs(D), sock_logs(D);
  std::vector<Shares> mem(D), sock(D);
  MemoryNetwork net(D);
  for (unsigned d = 1; d <= D; ++d) net.endpoint(static_cast<PartyIndex>(d)).set_transcript(&mem_logs[d - 1]);
  run_local_parties({f, D, 1}, 21, net, [&](PartyContext& ctx) { mem[ctx.party() - 1] = program(ctx); });

  auto eps = socket_mesh(D, f.modulus());
  std::vector<std::thread> threads;
  for (unsigned d = 1; d <= D; ++d) {
    eps[d - 1]->set_transcript(&sock_logs[d - 1]);
    threads.emplace_back([&, d] {
      PartyContext ctx({f, D, 1}, *eps[d - 1], party_rng(21, static_cast<PartyIndex>(d)));
      sock[d - 1] = program(ctx);
      ctx.broadcast_all({});
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : eps) e->stop();

  CHECK(mem[0] == std::vector<FieldElement>{{1}, {0}, {0}, {0}, {0}, {0}});
  for (unsigned d = 0; d < D; ++d) {
    CHECK(sock[d] == mem[d]);
    // The socket run ends with one extra closing broadcast.
    const auto m = mem_logs[d].bytes();
    const auto s = sock_logs[d].bytes();
    REQUIRE(s.size() > m.size());
    CHECK(std::equal(m.begin(), m.end(), s.begin()));
  }
}

}  // TEST_SUITE
