#include "doctest.h"

#include <random>

#include "packet.hpp"

using namespace sr6;

namespace {

Ip6Addr A(const char* s) { return *Ip6Addr::parse(s); }

std::vector<uint8_t> bytes_of(const PacketBuf& p) {
    return {p.bytes().begin(), p.bytes().end()};
}

struct FrameGen {
    std::mt19937_64 rng{0xf00dull};

    Ip6Addr addr() {
        Ip6Addr a;
        for (auto& b : a.b) b = uint8_t(rng());
        return a;
    }
    std::vector<uint8_t> payload(size_t max_len = 1400) {
        std::vector<uint8_t> p(rng() % (max_len + 1));
        for (auto& b : p) b = uint8_t(rng());
        return p;
    }
    ParsedPacket frame(bool with_srh, size_t max_segs = 10) {
        ParsedPacket p;
        p.ip.traffic_class = uint8_t(rng());
        p.ip.flow_label = uint32_t(rng()) & 0xfffff;
        p.ip.hop_limit = uint8_t(rng());
        p.ip.src = addr();
        p.ip.dst = addr();
        p.payload = payload();
        size_t srh_len = 0;
        if (with_srh) {
            SrhHeader s;
            s.next_header = kProtoUdp;
            size_t n = 1 + rng() % max_segs;
            for (size_t i = 0; i < n; ++i) s.segments.push_back(addr());
            s.segments_left = uint8_t(rng() % n);
            s.flags = uint8_t(rng());
            s.tag = uint16_t(rng());
            if (rng() % 4 == 0) {
                s.tlv.resize(8 * (1 + rng() % 3));
                for (auto& b : s.tlv) b = uint8_t(rng());
            }
            srh_len = s.byte_len();
            p.ip.next_header = kProtoRouting;
            p.srh = std::move(s);
        } else {
            p.ip.next_header = kProtoUdp;
        }
        p.ip.payload_length = uint16_t(srh_len + p.payload.size());
        return p;
    }
};

}  // namespace

TEST_CASE("parse: 60-byte UDP packet has payload_length 20") {
    std::vector<uint8_t> payload(12, 0xab);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    CHECK(pkt.size() == 60);
    auto parsed = parse_packet(pkt.bytes());
    REQUIRE(parsed.ok());
    CHECK(parsed.value().ip.payload_length == 20);
    CHECK(parsed.value().ip.next_header == kProtoUdp);
    CHECK(parsed.value().payload.size() == 20);
}

TEST_CASE("parse: minimal 40-byte packet has an empty payload") {
    ParsedPacket p;
    p.ip.next_header = 59;  // no next header
    auto bytes = serialize_packet(p);
    CHECK(bytes.size() == 40);
    auto parsed = parse_packet(bytes);
    REQUIRE(parsed.ok());
    CHECK(parsed.value().payload.empty());
    CHECK(!parsed.value().srh);
}

TEST_CASE("parse: truncated SRH yields LengthMismatch") {
    FrameGen g;
    auto p = g.frame(true);
    auto bytes = serialize_packet(p);
    bytes[41] = 0xff;  // hdr_ext_len implies more bytes than remain
    auto parsed = parse_packet(bytes);
    REQUIRE(!parsed.ok());
    CHECK(parsed.error() == CodecErr::LengthMismatch);
}

TEST_CASE("parse: short buffer and bad version") {
    std::vector<uint8_t> tiny(12, 0);
    CHECK(parse_packet(tiny).error() == CodecErr::TruncatedHeader);
    std::vector<uint8_t> v4(40, 0);
    v4[0] = 0x45;
    CHECK(parse_packet(v4).error() == CodecErr::BadVersion);
}

TEST_CASE("parse: SRH with wrong routing type") {
    FrameGen g;
    auto p = g.frame(true);
    auto bytes = serialize_packet(p);
    bytes[42] = 3;
    CHECK(parse_packet(bytes).error() == CodecErr::BadRoutingType);
}

TEST_CASE("parse/serialize round-trip on randomized frames") {
    FrameGen g;
    for (int i = 0; i < 10000; ++i) {
        auto p = g.frame(i % 3 != 0);
        auto bytes = serialize_packet(p);
        auto q = parse_packet(bytes);
        REQUIRE(q.ok());
        CHECK(q.value().ip == p.ip);
        CHECK(q.value().srh == p.srh);
        CHECK(q.value().payload == p.payload);
        CHECK(serialize_packet(q.value()) == bytes);
    }
}

TEST_CASE("encap: sizing from the two-SID template") {
    std::vector<uint8_t> payload(12, 1);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    REQUIRE(pkt.size() == 60);
    Ip6Addr segs[2] = {A("fd00:b::2"), A("fdf1::2")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    CHECK(pkt.size() == 140);
    WireView w(pkt);
    CHECK(w.dst() == segs[1]);  // active SID is the first to traverse
    CHECK(w.srh_segments_left() == 1);
    CHECK(w.srh_last_entry() == 1);
    CHECK(w.payload_length() == 100);
    // L2/L1 accounting constants
    CHECK(pkt.size() + kEthernetOverhead == 158);
    CHECK(pkt.size() + kEthernetOverhead + kPhysicalOverhead == 178);
}

TEST_CASE("encap: one-SID overhead is 48+16") {
    std::vector<uint8_t> payload(12, 1);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    Ip6Addr segs[1] = {A("fd00:b::2")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    CHECK(pkt.size() == 124);
}

TEST_CASE("encap rejects an empty SID list") {
    std::vector<uint8_t> payload(12, 1);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    CHECK(encap(pkt, {}, A("fd00:a::1")).error() == CodecErr::EmptySidList);
}

TEST_CASE("decap returns the inner packet and the exact popped bytes") {
    std::vector<uint8_t> payload(12, 7);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    auto inner_before = bytes_of(pkt);
    Ip6Addr segs[2] = {A("fd00:b::2"), A("fdf1::2")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    auto outer_bytes = bytes_of(pkt);

    auto saved = decap(pkt);
    REQUIRE(saved.ok());
    CHECK(saved.value().size() == 80);
    CHECK(bytes_of(pkt) == inner_before);
    // saved headers re-serialize to the outer headers of the encap'd packet
    CHECK(std::vector<uint8_t>(outer_bytes.begin(), outer_bytes.begin() + 80) == saved.value());
}

TEST_CASE("decap refuses a plain packet") {
    std::vector<uint8_t> payload(12, 7);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    CHECK(decap(pkt).error() == CodecErr::NotEncapsulated);
}

TEST_CASE("advance_segment walks toward segments[0]") {
    std::vector<uint8_t> payload(4, 0);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 1, 2, payload);
    Ip6Addr segs[3] = {A("fd00::a"), A("fd00::b"), A("fd00::c")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    WireView w(pkt);
    CHECK(w.dst() == segs[2]);
    // two advances end at segments[0]
    REQUIRE(advance_segment(pkt).is_ok());
    CHECK(WireView(pkt).srh_segments_left() == 1);
    CHECK(WireView(pkt).dst() == segs[1]);
    REQUIRE(advance_segment(pkt).is_ok());
    CHECK(WireView(pkt).srh_segments_left() == 0);
    CHECK(WireView(pkt).dst() == segs[0]);
    CHECK(advance_segment(pkt).error() == CodecErr::SegmentsExhausted);
}

TEST_CASE("advance_segment value-level semantics match the wire transform") {
    FrameGen g;
    for (int i = 0; i < 200; ++i) {
        auto p = g.frame(true);
        if (p.srh->segments_left == 0) continue;
        auto bytes = serialize_packet(p);
        PacketBuf pkt = PacketBuf::from_bytes(bytes);
        REQUIRE(advance_segment(pkt).is_ok());
        REQUIRE(advance_segment(p.ip, *p.srh).is_ok());
        CHECK(bytes_of(pkt) == serialize_packet(p));
    }
}

TEST_CASE("advance_segment is injective on (segments_left, dst)") {
    FrameGen g;
    auto p = g.frame(true, 8);
    p.srh->segments_left = p.srh->last_entry();
    auto bytes = serialize_packet(p);
    PacketBuf pkt = PacketBuf::from_bytes(bytes);
    std::vector<std::pair<int, Ip6Addr>> states;
    states.emplace_back(WireView(pkt).srh_segments_left(), WireView(pkt).dst());
    while (advance_segment(pkt).is_ok())
        states.emplace_back(WireView(pkt).srh_segments_left(), WireView(pkt).dst());
    CHECK(states.size() == p.srh->segments.size() + (p.srh->segments.size() ? 0 : 1));
    for (size_t i = 0; i < states.size(); ++i)
        for (size_t j = i + 1; j < states.size(); ++j) CHECK(states[i].first != states[j].first);
    CHECK(WireView(pkt).dst() == p.srh->segments[0]);
}

TEST_CASE("insert_srh: sizing and destination rewrite") {
    std::vector<uint8_t> payload(12, 3);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    Ip6Addr segs[2] = {A("fd00:b::2"), A("fdf1::2")};  // original dst first
    REQUIRE(insert_srh(pkt, segs).is_ok());
    CHECK(pkt.size() == 100);  // 60 + 8 + 16*2
    WireView w(pkt);
    CHECK(w.dst() == segs[1]);
    CHECK(w.srh_segment(0) == A("fd00:b::2"));
    CHECK(w.next_header() == kProtoRouting);
    CHECK(w.srh_next_header() == kProtoUdp);
    CHECK(insert_srh(pkt, segs).error() == CodecErr::AlreadyHasSrh);
}

TEST_CASE("insert_srh: degenerate one-SID chain keeps the destination") {
    std::vector<uint8_t> payload(12, 3);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    Ip6Addr segs[1] = {A("fd00:b::2")};
    REQUIRE(insert_srh(pkt, segs).is_ok());
    WireView w(pkt);
    CHECK(w.dst() == A("fd00:b::2"));
    CHECK(w.has_srh());
    CHECK(w.srh_segments_left() == 0);
}

TEST_CASE("insert then remove restores the original packet") {
    std::vector<uint8_t> payload(37, 9);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    auto before = bytes_of(pkt);
    Ip6Addr segs[3] = {A("fd00:b::2"), A("fdf1::3"), A("fdf1::2")};
    REQUIRE(insert_srh(pkt, segs).is_ok());
    REQUIRE(remove_srh(pkt).is_ok());
    CHECK(bytes_of(pkt) == before);
}

TEST_CASE("overhead laws hold for random packets and SID counts") {
    FrameGen g;
    std::mt19937_64 rng{42};
    for (int i = 0; i < 2000; ++i) {
        auto payload = g.payload(600);
        PacketBuf pkt = make_udp_packet(g.addr(), g.addr(), uint16_t(rng()), uint16_t(rng()),
                                        payload);
        size_t before = pkt.size();
        auto inner_bytes = bytes_of(pkt);
        size_t n = 1 + rng() % 10;
        std::vector<Ip6Addr> segs;
        for (size_t k = 0; k < n; ++k) segs.push_back(g.addr());
        if (i % 2 == 0) {
            REQUIRE(encap(pkt, segs, g.addr()).is_ok());
            CHECK(pkt.size() - before == 48 + 16 * n);
            // the inner bytes are embedded unmodified
            std::vector<uint8_t> tail(pkt.bytes().end() - long(before), pkt.bytes().end());
            CHECK(tail == inner_bytes);
            auto inner = decap(pkt);
            REQUIRE(inner.ok());
            CHECK(bytes_of(pkt) == inner_bytes);
        } else {
            REQUIRE(insert_srh(pkt, segs).is_ok());
            CHECK(pkt.size() - before == 8 + 16 * n);
        }
    }
}

TEST_CASE("golden frames match the independently computed fixture") {
    auto frames = load_hex_frames(std::string(SR6SFC_TEST_DIR) + "/fixtures/frames.hex");
    REQUIRE(frames.ok());
    REQUIRE(frames.value().size() == 2);

    std::vector<uint8_t> payload(12);
    for (size_t i = 0; i < payload.size(); ++i) payload[i] = uint8_t(i);
    PacketBuf pkt = make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
    CHECK(bytes_of(pkt) == frames.value()[0]);

    Ip6Addr segs[2] = {A("fd00:b::2"), A("fdf1::2")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    CHECK(bytes_of(pkt) == frames.value()[1]);

    // both fixture frames are structurally valid
    for (const auto& f : frames.value()) CHECK(validate_frame(f).is_ok());
}

TEST_CASE("hex helpers round-trip") {
    std::vector<uint8_t> data = {0x00, 0x7f, 0xff, 0x10};
    CHECK(to_hex(data) == "007fff10");
    CHECK(*from_hex("007fff10") == data);
    CHECK(!from_hex("0g"));
    CHECK(!from_hex("007"));
}
