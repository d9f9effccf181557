#include "doctest.h"

#include <random>
#include <thread>

#include "behaviors.hpp"

using namespace sr6;

namespace {

Ip6Addr A(const char* s) { return *Ip6Addr::parse(s); }

std::vector<uint8_t> bytes_of(const PacketBuf& p) {
    return {p.bytes().begin(), p.bytes().end()};
}

PacketBuf inner_packet(size_t payload_len = 12, uint8_t fill = 0x5a) {
    std::vector<uint8_t> payload(payload_len, fill);
    return make_udp_packet(A("fd00:a::1"), A("fd00:b::2"), 5000, 5001, payload);
}

struct ProxyRig {
    SimClock clock;
    VnfMap map;
    BehaviorInstance inst;

    ProxyRig(BehaviorKind kind = BehaviorKind::EndAD, double age = 1.0) {
        inst.kind = kind;
        inst.chain = ChainDir::Bidirectional;
        inst.sid = A("fdf1::2");
        inst.oif = 3;
        inst.nh6 = A("fdf1::2");
        inst.age = age;
    }
};

}  // namespace

TEST_CASE("End: advances the pointer and reroutes") {
    BehaviorInstance end;
    end.kind = BehaviorKind::End;
    end.sid = A("fdf1::9");

    PacketBuf pkt = inner_packet();
    Ip6Addr segs[2] = {A("fd00:b::2"), A("fdf1::9")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());

    auto out = end_behavior(end, pkt);
    CHECK(out.act == BehaviorOutcome::Act::Reroute);
    CHECK(WireView(pkt).srh_segments_left() == 0);
    CHECK(WireView(pkt).dst() == A("fd00:b::2"));

    // exhausted list drops and counts
    auto out2 = end_behavior(end, pkt);
    CHECK(out2.act == BehaviorOutcome::Act::Drop);
    CHECK(out2.reason == DropReason::SegmentsExhausted);
    CHECK(end.ctr.drop_segments_exhausted == 1);
}

TEST_CASE("End applied at each SID of a 3-SID list walks the whole chain") {
    BehaviorInstance end;
    end.kind = BehaviorKind::End;
    PacketBuf pkt = inner_packet();
    Ip6Addr segs[3] = {A("fd00:b::2"), A("fdf1::3"), A("fdf1::2")};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    CHECK(WireView(pkt).dst() == A("fdf1::2"));
    REQUIRE(end_behavior(end, pkt).act == BehaviorOutcome::Act::Reroute);
    CHECK(WireView(pkt).dst() == A("fdf1::3"));
    REQUIRE(end_behavior(end, pkt).act == BehaviorOutcome::Act::Reroute);
    CHECK(WireView(pkt).dst() == A("fd00:b::2"));
    CHECK(WireView(pkt).srh_segments_left() == 0);
}

TEST_CASE("End.AD inbound: decap, learn, emit toward the VNF") {
    ProxyRig rig;
    PacketBuf pkt = inner_packet();
    auto inner_before = bytes_of(pkt);
    Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());

    auto out = end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
    CHECK(out.act == BehaviorOutcome::Act::EmitDirect);
    CHECK(out.oif == rig.inst.oif);
    CHECK(bytes_of(pkt) == inner_before);  // inner emitted byte-identical
    CHECK(rig.inst.ctr.cache_writes == 1);

    // the stored headers already point past our SID
    auto hdrs = rig.map.headers(rig.inst.oif);
    REQUIRE(hdrs);
    CHECK(hdrs->size() == 80);
    CHECK((*hdrs)[43] == 0);  // segments_left advanced to 0
    Ip6Addr stored_dst;
    std::memcpy(stored_dst.b.data(), hdrs->data() + 24, 16);
    CHECK(stored_dst == A("fd00:b::2"));
}

TEST_CASE("End.AD inbound: age throttle skips the second write") {
    ProxyRig rig(BehaviorKind::EndAD, 1.0);
    for (int i = 0; i < 2; ++i) {
        PacketBuf pkt = inner_packet();
        Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
        REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
        auto out = end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
        CHECK(out.act == BehaviorOutcome::Act::EmitDirect);
        rig.clock.advance(0.5);
    }
    CHECK(rig.inst.ctr.cache_writes == 1);
    CHECK(rig.inst.ctr.cache_write_skipped == 1);
}

TEST_CASE("End.AD inbound: age 0 writes on every packet") {
    ProxyRig rig(BehaviorKind::EndAD, 0.0);
    for (int i = 0; i < 100; ++i) {
        PacketBuf pkt = inner_packet();
        Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
        REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
        end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
    }
    CHECK(rig.inst.ctr.cache_writes == 100);
}

TEST_CASE("End.AD inbound: drops plain and exhausted packets") {
    ProxyRig rig;
    PacketBuf plain = inner_packet();
    auto out = end_ad_inbound(rig.inst, plain, rig.map, rig.clock);
    CHECK(out.act == BehaviorOutcome::Act::Drop);
    CHECK(out.reason == DropReason::NotEncapsulated);
    CHECK(rig.inst.ctr.drop_not_encapsulated == 1);

    PacketBuf pkt = inner_packet();
    Ip6Addr segs[1] = {rig.inst.sid};  // SL starts at 0
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    out = end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
    CHECK(out.act == BehaviorOutcome::Act::Drop);
    CHECK(out.reason == DropReason::SegmentsExhausted);
}

TEST_CASE("End.AD fromVNF before any inbound drops with NoCacheEntry") {
    ProxyRig rig;
    PacketBuf pkt = inner_packet();
    auto out = end_ad_fromvnf(rig.inst, pkt, rig.inst.oif, rig.map);
    CHECK(out.act == BehaviorOutcome::Act::Drop);
    CHECK(out.reason == DropReason::NoCacheEntry);
    CHECK(rig.inst.ctr.cache_misses == 1);
    CHECK(rig.inst.ctr.drop_no_cache == 1);
}

TEST_CASE("End.AD proxy pair equals End applied at the proxy SID") {
    // the dynamic proxy round trip must be observationally equivalent to End,
    // modulo the VNF detour
    std::mt19937_64 rng{77};
    for (int round = 0; round < 1000; ++round) {
        ProxyRig rig;
        size_t n = 2 + rng() % 4;  // 2..5 SIDs
        std::vector<Ip6Addr> segs(n);
        for (auto& s : segs)
            for (auto& b : s.b) b = uint8_t(rng());
        segs[n - 1] = rig.inst.sid;  // proxy SID active
        std::vector<uint8_t> payload(rng() % 256);
        for (auto& b : payload) b = uint8_t(rng());
        PacketBuf pkt = make_udp_packet(A("fd00:a::1"), segs[0], 5000, 5001, payload);
        REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());

        // oracle: End at the proxy SID
        PacketBuf oracle = PacketBuf::from_bytes(pkt.bytes());
        REQUIRE(advance_segment(oracle).is_ok());

        // proxy route: inbound, VNF pass-through, fromVNF
        auto in = end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
        REQUIRE(in.act == BehaviorOutcome::Act::EmitDirect);
        auto back = end_ad_fromvnf(rig.inst, pkt, rig.inst.oif, rig.map);
        REQUIRE(back.act == BehaviorOutcome::Act::Reroute);

        REQUIRE(bytes_of(pkt) == bytes_of(oracle));
    }
}

TEST_CASE("End.AD fromVNF recomputes the outer payload length for new inner sizes") {
    ProxyRig rig;
    PacketBuf pkt = inner_packet(12);
    Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    REQUIRE(end_ad_inbound(rig.inst, pkt, rig.map, rig.clock).act ==
            BehaviorOutcome::Act::EmitDirect);

    // the VNF answers with a longer packet
    PacketBuf longer = inner_packet(200, 0x11);
    REQUIRE(end_ad_fromvnf(rig.inst, longer, rig.inst.oif, rig.map).act ==
            BehaviorOutcome::Act::Reroute);

    // compare against a fresh encap with the already-advanced SID list
    PacketBuf expect = inner_packet(200, 0x11);
    REQUIRE(encap(expect, segs, A("fd00:a::1")).is_ok());
    REQUIRE(advance_segment(expect).is_ok());
    CHECK(bytes_of(longer) == bytes_of(expect));
    CHECK(validate_frame(longer.bytes()).is_ok());
}

TEST_CASE("End.AS replays configured headers and ignores inbound history") {
    ProxyRig ad_rig;
    // learn headers with the dynamic proxy first
    PacketBuf pkt = inner_packet();
    Ip6Addr segs[2] = {A("fd00:b::2"), ad_rig.inst.sid};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
    REQUIRE(end_ad_inbound(ad_rig.inst, pkt, ad_rig.map, ad_rig.clock).act ==
            BehaviorOutcome::Act::EmitDirect);

    // a static proxy configured with the learned headers behaves identically
    ProxyRig as_rig(BehaviorKind::EndAS);
    as_rig.inst.static_headers = *ad_rig.map.headers(ad_rig.inst.oif);

    PacketBuf from_ad = inner_packet(40, 0x22);
    PacketBuf from_as = inner_packet(40, 0x22);
    REQUIRE(end_ad_fromvnf(ad_rig.inst, from_ad, ad_rig.inst.oif, ad_rig.map).act ==
            BehaviorOutcome::Act::Reroute);
    REQUIRE(end_as_fromvnf(as_rig.inst, from_as).act == BehaviorOutcome::Act::Reroute);
    CHECK(bytes_of(from_ad) == bytes_of(from_as));

    // inbound packets with a different SID list do not change End.AS output
    PacketBuf other = inner_packet();
    Ip6Addr other_segs[2] = {A("fd00:b::2"), A("fdf1::99")};
    REQUIRE(encap(other, other_segs, A("fd00:a::1")).is_ok());
    end_ad_inbound(as_rig.inst, other, as_rig.map, as_rig.clock);  // AS inbound learns nothing

    PacketBuf again = inner_packet(40, 0x22);
    REQUIRE(end_as_fromvnf(as_rig.inst, again).act == BehaviorOutcome::Act::Reroute);
    CHECK(bytes_of(again) == bytes_of(from_as));
    CHECK(as_rig.inst.ctr.cache_writes == 0);
    CHECK(as_rig.inst.ctr.cache_hits == 0);
}

TEST_CASE("End.AS static headers built from a one-SID list") {
    ProxyRig rig(BehaviorKind::EndAS);
    Ip6Addr segs[1] = {A("fd00:b::2")};
    rig.inst.static_headers = make_static_headers(rig.inst.sid, segs);

    PacketBuf p1 = inner_packet(12, 1);
    PacketBuf p2 = inner_packet(12, 1);
    REQUIRE(end_as_fromvnf(rig.inst, p1).act == BehaviorOutcome::Act::Reroute);
    REQUIRE(end_as_fromvnf(rig.inst, p2).act == BehaviorOutcome::Act::Reroute);
    CHECK(bytes_of(p1) == bytes_of(p2));
    WireView w(p1);
    CHECK(w.dst() == A("fd00:b::2"));
    CHECK(w.srh_segments_left() == 0);
    CHECK(validate_frame(p1.bytes()).is_ok());
}

TEST_CASE("End.AM masquerade and demasquerade are stateless and compose") {
    ProxyRig rig(BehaviorKind::EndAM);
    PacketBuf pkt = inner_packet();
    Ip6Addr orig_dst = WireView(pkt).dst();
    Ip6Addr segs[2] = {orig_dst, rig.inst.sid};
    REQUIRE(insert_srh(pkt, segs).is_ok());
    CHECK(WireView(pkt).dst() == rig.inst.sid);

    auto masq = end_am_masquerade(rig.inst, pkt);
    CHECK(masq.act == BehaviorOutcome::Act::EmitDirect);
    CHECK(WireView(pkt).dst() == orig_dst);        // VNF sees the original destination
    CHECK(WireView(pkt).srh_segments_left() == 0);

    auto demasq = end_am_demasquerade(rig.inst, pkt);
    CHECK(demasq.act == BehaviorOutcome::Act::Reroute);
    CHECK(WireView(pkt).dst() == orig_dst);  // terminal segment: forwarding proceeds

    CHECK(rig.inst.ctr.cache_writes == 0);
    CHECK(rig.inst.ctr.cache_hits == 0);
    CHECK(rig.inst.ctr.cache_misses == 0);
    CHECK(rig.map.snapshot().empty());  // truly stateless
}

TEST_CASE("End.AM: longer chain continues to the next SID after demasquerade") {
    ProxyRig rig(BehaviorKind::EndAM);
    PacketBuf pkt = inner_packet();
    Ip6Addr orig_dst = WireView(pkt).dst();
    Ip6Addr segs[3] = {orig_dst, A("fdf1::7"), rig.inst.sid};
    REQUIRE(insert_srh(pkt, segs).is_ok());

    REQUIRE(end_am_masquerade(rig.inst, pkt).act == BehaviorOutcome::Act::EmitDirect);
    CHECK(WireView(pkt).srh_segments_left() == 1);
    CHECK(WireView(pkt).dst() == orig_dst);

    REQUIRE(end_am_demasquerade(rig.inst, pkt).act == BehaviorOutcome::Act::Reroute);
    CHECK(WireView(pkt).dst() == A("fdf1::7"));  // continues to the next SID
}

TEST_CASE("End.AM preserves a TLV blob verbatim") {
    ProxyRig rig(BehaviorKind::EndAM);
    ParsedPacket p;
    p.ip.next_header = kProtoRouting;
    p.ip.src = A("fd00:a::1");
    p.ip.dst = rig.inst.sid;
    SrhHeader srh;
    srh.next_header = kProtoUdp;
    srh.segments = {A("fd00:b::2"), rig.inst.sid};
    srh.segments_left = 1;
    srh.tlv = {1, 2, 3, 4, 5, 6, 7, 8};
    p.srh = srh;
    p.payload = {0xde, 0xad};
    p.ip.payload_length = uint16_t(srh.byte_len() + p.payload.size());
    PacketBuf pkt = PacketBuf::from_bytes(serialize_packet(p));

    REQUIRE(end_am_masquerade(rig.inst, pkt).act == BehaviorOutcome::Act::EmitDirect);
    auto parsed = parse_packet(pkt.bytes());
    REQUIRE(parsed.ok());
    CHECK(parsed.value().srh->tlv == srh.tlv);
}

TEST_CASE("End.AM validates segments_left before writing dst") {
    ProxyRig rig(BehaviorKind::EndAM);
    PacketBuf pkt = inner_packet();
    Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
    REQUIRE(insert_srh(pkt, segs).is_ok());
    // a non-compliant VNF mangles segments_left out of range
    pkt.data()[43] = 7;
    auto out = end_am_demasquerade(rig.inst, pkt);
    CHECK(out.act == BehaviorOutcome::Act::Drop);

    PacketBuf plain = inner_packet();
    CHECK(end_am_masquerade(rig.inst, plain).reason == DropReason::NoSrh);
    CHECK(end_am_demasquerade(rig.inst, plain).reason == DropReason::NoSrh);
}

TEST_CASE("age throttle: writes bounded by floor(S/a)+1") {
    for (double age : {1.0, 2.0, 0.5}) {
        ProxyRig rig(BehaviorKind::EndAD, age);
        const int packets = 1000;
        const double span = 5.0;
        for (int i = 0; i < packets; ++i) {
            rig.clock.set(span * i / packets);
            PacketBuf pkt = inner_packet();
            Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
            REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
            end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);
        }
        CHECK(rig.inst.ctr.cache_writes <= uint64_t(span / age) + 1);
        CHECK(rig.inst.ctr.cache_writes >= 1);
    }
}

TEST_CASE("age semantics: 1000 packets over 5 seconds") {
    ProxyRig rig1(BehaviorKind::EndAD, 1.0);
    ProxyRig rig0(BehaviorKind::EndAD, 0.0);
    for (int i = 0; i < 1000; ++i) {
        double t = 5.0 * i / 1000;
        rig1.clock.set(t);
        rig0.clock.set(t);
        for (ProxyRig* rig : {&rig1, &rig0}) {
            PacketBuf pkt = inner_packet();
            Ip6Addr segs[2] = {A("fd00:b::2"), rig->inst.sid};
            REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());
            end_ad_inbound(rig->inst, pkt, rig->map, rig->clock);
        }
    }
    CHECK(rig1.inst.ctr.cache_writes >= 5);
    CHECK(rig1.inst.ctr.cache_writes <= 6);
    CHECK(rig0.inst.ctr.cache_writes == 1000);
}

TEST_CASE("chain change propagates within age seconds") {
    ProxyRig rig(BehaviorKind::EndAD, 1.0);
    Ip6Addr old_chain[2] = {A("fd00:b::2"), rig.inst.sid};
    Ip6Addr new_chain[3] = {A("fd00:b::2"), A("fdf1::7"), rig.inst.sid};

    PacketBuf pkt = inner_packet();
    REQUIRE(encap(pkt, old_chain, A("fd00:a::1")).is_ok());
    end_ad_inbound(rig.inst, pkt, rig.map, rig.clock);

    // ingress switches the chain; a packet inside the age window keeps the old
    // learned headers
    rig.clock.set(0.4);
    PacketBuf p2 = inner_packet();
    REQUIRE(encap(p2, new_chain, A("fd00:a::1")).is_ok());
    end_ad_inbound(rig.inst, p2, rig.map, rig.clock);
    CHECK(rig.map.headers(rig.inst.oif)->size() == 80);  // still the 2-SID headers

    // the first packet past the age window relearns
    rig.clock.set(1.1);
    PacketBuf p3 = inner_packet();
    REQUIRE(encap(p3, new_chain, A("fd00:a::1")).is_ok());
    end_ad_inbound(rig.inst, p3, rig.map, rig.clock);
    CHECK(rig.map.headers(rig.inst.oif)->size() == 96);  // 3-SID headers now

    // and fromVNF output carries the new chain
    PacketBuf back = inner_packet();
    REQUIRE(end_ad_fromvnf(rig.inst, back, rig.inst.oif, rig.map).act ==
            BehaviorOutcome::Act::Reroute);
    auto parsed = parse_packet(back.bytes());
    REQUIRE(parsed.ok());
    CHECK(parsed.value().srh->segments.size() == 3);
    CHECK(WireView(back).dst() == A("fdf1::7"));
}

TEST_CASE("cache_gc evicts least-recently-written headers beyond the limit") {
    VnfMap map;
    std::vector<uint8_t> hdrs(80, 0xaa);
    map.write_headers(1, hdrs, 1.0);
    map.write_headers(2, hdrs, 2.0);
    map.write_headers(3, hdrs, 3.0);

    CHECK(map.gc_headers(2) == 1);
    CHECK(!map.has_headers(1));  // oldest evicted
    CHECK(map.has_headers(2));
    CHECK(map.has_headers(3));

    CHECK(map.gc_headers(0) == 2);
    CHECK(!map.has_headers(2));
    CHECK(!map.has_headers(3));

    // eviction then fromVNF drops with NoCacheEntry
    ProxyRig rig;
    PacketBuf pkt = inner_packet();
    auto out = end_ad_fromvnf(rig.inst, pkt, 2, map);
    CHECK(out.reason == DropReason::NoCacheEntry);
}

TEST_CASE("cache: one writer, concurrent readers see consistent snapshots") {
    VnfMap map;
    std::vector<uint8_t> short_hdrs(80, 0x11);
    std::vector<uint8_t> long_hdrs(96, 0x22);
    map.write_headers(0, short_hdrs, 0.0);

    std::atomic<bool> stop{false};
    std::atomic<uint64_t> bad{0};
    std::vector<std::thread> readers;
    for (int r = 0; r < 4; ++r) {
        readers.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                auto h = map.headers(0);
                if (!h) continue;
                bool ok = (*h == short_hdrs) || (*h == long_hdrs);
                if (!ok) bad.fetch_add(1);
            }
        });
    }
    for (int i = 0; i < 20000; ++i) map.write_headers(0, i % 2 ? long_hdrs : short_hdrs, double(i));
    stop = true;
    for (auto& t : readers) t.join();
    CHECK(bad.load() == 0);
}

TEST_CASE("run_behavior dispatches on direction for bidirectional instances") {
    ProxyRig rig;
    PacketBuf pkt = inner_packet();
    Ip6Addr segs[2] = {A("fd00:b::2"), rig.inst.sid};
    REQUIRE(encap(pkt, segs, A("fd00:a::1")).is_ok());

    // arriving on a non-VNF interface: inbound processing
    auto out = run_behavior(rig.inst, pkt, /*iif=*/0, rig.map, rig.clock);
    CHECK(out.act == BehaviorOutcome::Act::EmitDirect);

    // arriving on the VNF interface: fromVNF processing
    auto back = run_behavior(rig.inst, pkt, rig.inst.oif, rig.map, rig.clock);
    CHECK(back.act == BehaviorOutcome::Act::Reroute);
}

TEST_CASE("split-chain fromVNF instance discards traffic from other interfaces") {
    ProxyRig rig;
    rig.inst.chain = ChainDir::FromVnf;
    rig.inst.iif = 3;
    PacketBuf pkt = inner_packet();
    auto out = run_behavior(rig.inst, pkt, /*iif=*/5, rig.map, rig.clock);
    CHECK(out.act == BehaviorOutcome::Act::Drop);
    CHECK(out.reason == DropReason::WrongInterface);
    CHECK(rig.inst.ctr.drop_wrong_interface == 1);
}
