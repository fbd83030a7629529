#include <gtest/gtest.h>

#include "generators.hpp"
#include "wot/ndn/forwarder.hpp"

using namespace wot;
using namespace wot::ndn;

namespace {

DataKeys keys() {
  return {from_hex("00112233445566778899aabbccddeeff"),
          from_hex("0f0e0d0c0b0a09080706050403020100f0e0d0c0b0a090807060504030201000")};
}

Data make(const std::string& name, const std::string& body) {
  security::CryptoCounters c;
  return seal_data(Name::parse(name), to_bytes(body), Bytes(13, 0x42), keys(), c);
}

struct Harness {
  security::CryptoCounters counters;
  std::uint32_t next_nonce = 1000;
  Forwarder forwarder;

  explicit Harness(NameFib fib)
      : forwarder("f", std::move(fib), {},
                  [this](const Data& d) { return verify_data(d, keys(), counters); },
                  [this] { return next_nonce++; }) {}
};

std::vector<SendPacket> sends(const Actions& actions) {
  std::vector<SendPacket> out;
  for (const auto& a : actions) {
    if (const auto* s = std::get_if<SendPacket>(&a)) out.push_back(*s);
  }
  return out;
}

NameFib upstream_fib(std::vector<FaceId> faces = {"up"}) {
  NameFib fib;
  fib.add(Name::parse("/instruction"), std::move(faces));
  return fib;
}

} // namespace

TEST(Name, ParseAndPrefix) {
  auto n = Name::parse("/instruction?t=5");
  EXPECT_EQ(n.components, (std::vector<std::string>{"instruction", "t=5"}));
  EXPECT_EQ(n.to_uri(), "/instruction/t=5");
  EXPECT_TRUE(Name::parse("/instruction").is_prefix_of(n));
  EXPECT_FALSE(Name::parse("/instr").is_prefix_of(n));
  EXPECT_TRUE(Name{}.is_prefix_of(n));
}

TEST(Tlv, HandEncodedInterest) {
  Interest i{Name::parse("/a"), 0x01020304};
  // 05 len { 07 03 { 08 01 'a' } 0A 04 01 02 03 04 }
  EXPECT_EQ(encode_packet(i), (Bytes{0x05, 0x0B, 0x07, 0x03, 0x08, 0x01, 'a', 0x0A, 0x04, 1, 2, 3, 4}));
}

TEST(Tlv, RoundTripAndErrors) {
  gen::Gen g(8);
  for (int k = 0; k < 500; ++k) {
    Name n;
    for (auto c = g.uniform(1, 5); c > 0; --c) n.components.push_back(g.word(0, 30));
    Interest i{n, static_cast<std::uint32_t>(g.uniform(0, 0xFFFFFFFF))};
    ASSERT_EQ(std::get<Interest>(decode_packet(encode_packet(i))), i);
    security::CryptoCounters c;
    auto d = seal_data(n, g.bytes(0, 300), g.bytes(13, 13), keys(), c);
    ASSERT_EQ(std::get<Data>(decode_packet(encode_packet(d))), d);
  }
  auto wire = encode_packet(Interest{Name::parse("/a"), 1});
  wire.pop_back();
  EXPECT_THROW(decode_packet(wire), TlvError);
  EXPECT_THROW(decode_packet(Bytes{0x09, 0x00}), TlvError);
}

TEST(DataCrypto, SealVerifyOpenAndTamper) {
  security::CryptoCounters c;
  auto d = seal_data(Name::parse("/instruction?t=1"), to_bytes("go left"), Bytes(13, 1), keys(), c);
  EXPECT_EQ(c, (security::CryptoCounters{1, 0, 0, 1}));
  EXPECT_TRUE(verify_data(d, keys(), c));
  EXPECT_EQ(open_data(d, keys(), c), to_bytes("go left"));
  for (std::size_t bit = 0; bit < d.content.size() * 8; ++bit) {
    Data t = d;
    t.content[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_FALSE(verify_data(t, keys(), c));
    EXPECT_FALSE(open_data(t, keys(), c));
  }
  Data renamed = d;
  renamed.name = Name::parse("/instruction?t=2");
  EXPECT_FALSE(verify_data(renamed, keys(), c));
}

TEST(NameFib, ComponentWiseLongestPrefix) {
  NameFib fib;
  fib.add(Name::parse("/"), {"default"});
  fib.add(Name::parse("/firmware"), {"fw"});
  fib.add(Name::parse("/firmware/v2"), {"fw2a", "fw2b"});
  EXPECT_EQ(fib.lookup(Name::parse("/firmware/v2/a")), (std::vector<FaceId>{"fw2a", "fw2b"}));
  EXPECT_EQ(fib.lookup(Name::parse("/firmware/v20")), std::vector<FaceId>{"fw"});
  EXPECT_EQ(fib.lookup(Name::parse("/other")), std::vector<FaceId>{"default"});
  NameFib empty;
  EXPECT_TRUE(empty.lookup(Name::parse("/x")).empty());
}

TEST(Forwarder, TwoFacesOneUpstreamInterestAndFanOut) {
  Harness h(upstream_fib());
  auto n = Name::parse("/instruction?t=3");
  auto first = sends(h.forwarder.on_interest({n, 1}, "c2", 0));
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(first[0].face, "up");
  EXPECT_TRUE(h.forwarder.on_interest({n, 2}, "c5", 10).empty());
  EXPECT_EQ(h.forwarder.pit_entry(n)->in_faces, (std::vector<FaceId>{"c2", "c5"}));

  auto fan = sends(h.forwarder.on_data(make("/instruction?t=3", "x"), "up", 20));
  ASSERT_EQ(fan.size(), 2u);
  EXPECT_EQ(fan[0].face, "c2");
  EXPECT_EQ(fan[1].face, "c5");
  EXPECT_EQ(h.forwarder.pit_size(), 0u);

  // second Data for the consumed entry is dropped
  EXPECT_TRUE(h.forwarder.on_data(make("/instruction?t=3", "x"), "up", 30).empty());
  EXPECT_EQ(h.forwarder.stats().unsolicited, 1u);
  // and the name is now served from the content store
  auto hit = sends(h.forwarder.on_interest({n, 3}, "c7", 40));
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].face, "c7");
  EXPECT_EQ(h.forwarder.stats().cs_hits, 1u);
}

TEST(Forwarder, DuplicateNonceDropped) {
  Harness h(upstream_fib());
  auto n = Name::parse("/instruction?t=1");
  h.forwarder.on_interest({n, 7}, "a", 0);
  EXPECT_TRUE(h.forwarder.on_interest({n, 7}, "b", 0).empty());
  EXPECT_EQ(h.forwarder.stats().duplicate_nonces, 1u);
  EXPECT_EQ(h.forwarder.pit_entry(n)->in_faces.size(), 1u);
}

TEST(Forwarder, NoRouteDropped) {
  Harness h(upstream_fib());
  EXPECT_TRUE(h.forwarder.on_interest({Name::parse("/other"), 1}, "a", 0).empty());
  EXPECT_EQ(h.forwarder.stats().no_route, 1u);
  // never sent back out of the arrival face
  EXPECT_TRUE(h.forwarder.on_interest({Name::parse("/instruction/x"), 2}, "up", 0).empty());
}

TEST(Forwarder, DataWithoutPitDropped) {
  Harness h(upstream_fib());
  EXPECT_TRUE(h.forwarder.on_data(make("/instruction?t=9", "x"), "up", 0).empty());
  EXPECT_EQ(h.forwarder.content_store().size(), 0u);
}

TEST(Forwarder, TamperedDataNeverCached) {
  Harness h(upstream_fib({"up1", "up2"}));
  auto n = Name::parse("/instruction?t=4");
  h.forwarder.on_interest({n, 1}, "c", 0);
  auto bad = make("/instruction?t=4", "x");
  bad.content[0] ^= 1;
  EXPECT_TRUE(h.forwarder.on_data(bad, "up1", 10).empty());
  EXPECT_EQ(h.forwarder.content_store().size(), 0u);
  EXPECT_EQ(h.forwarder.stats().invalid, 1u);
  // retransmission skips the face that already answered
  auto again = sends(h.forwarder.on_pit_timeout(n, seconds(2)));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].face, "up2");
  EXPECT_NE(std::get<Interest>(again[0].packet).nonce, 1u);
}

TEST(Forwarder, RetriesThenSilentExpiry) {
  Harness h(upstream_fib());
  auto n = Name::parse("/instruction?t=4");
  h.forwarder.on_interest({n, 1}, "c", 0);
  std::set<std::uint32_t> nonces{1};
  for (int i = 1; i <= 3; ++i) {
    auto out = sends(h.forwarder.on_pit_timeout(n, seconds(2 * i)));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(nonces.insert(std::get<Interest>(out[0].packet).nonce).second);
  }
  EXPECT_TRUE(h.forwarder.on_pit_timeout(n, seconds(8)).empty());
  EXPECT_EQ(h.forwarder.pit_size(), 0u);
  EXPECT_EQ(h.forwarder.stats().expired, 1u);
}

TEST(ContentStore, LruEviction) {
  ContentStore cs(2);
  EXPECT_EQ(cs.insert(make("/a", "1")), 0u);
  EXPECT_EQ(cs.insert(make("/b", "2")), 0u);
  cs.find(Name::parse("/a"));
  EXPECT_EQ(cs.insert(make("/c", "3")), 1u);
  EXPECT_EQ(cs.find(Name::parse("/b")), nullptr);
  EXPECT_NE(cs.find(Name::parse("/a")), nullptr);
}

TEST(Consumer, FreshNonceOnRetransmit) {
  std::uint32_t nonce = 1;
  Consumer consumer("c", "f", {}, [&] { return nonce++; });
  auto n = Name::parse("/instruction?t=1");
  auto out = consumer.express(1, n, 0);
  auto r1 = consumer.on_timeout(n, seconds(2));
  ASSERT_FALSE(r1.failure);
  EXPECT_NE(std::get<Interest>(std::get<SendPacket>(r1.actions[0]).packet).nonce,
            std::get<Interest>(std::get<SendPacket>(out[0]).packet).nonce);
  consumer.on_timeout(n, seconds(4));
  consumer.on_timeout(n, seconds(6));
  auto last = consumer.on_timeout(n, seconds(8));
  ASSERT_TRUE(last.failure);
  EXPECT_EQ(consumer.open_exchanges(), 0u);
}
