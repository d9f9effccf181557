#include "behaviors.hpp"

namespace sr6 {

const char* chain_dir_str(ChainDir d) {
    switch (d) {
        case ChainDir::Bidirectional: return "bidirectional";
        case ChainDir::Inbound: return "inbound";
        case ChainDir::FromVnf: return "fromVNF";
    }
    return "?";
}

const char* drop_reason_str(DropReason r) {
    switch (r) {
        case DropReason::SegmentsExhausted: return "segments_exhausted";
        case DropReason::NotEncapsulated: return "not_encapsulated";
        case DropReason::NoCacheEntry: return "no_cache_entry";
        case DropReason::NoSrh: return "no_srh";
        case DropReason::NoRoute: return "no_route";
        case DropReason::BadFrame: return "bad_frame";
        case DropReason::WrongInterface: return "wrong_interface";
        case DropReason::PipelineLoop: return "pipeline_loop";
        case DropReason::StubNoRoute: return "stub_no_route";
    }
    return "?";
}

std::vector<uint8_t> make_static_headers(const Ip6Addr& outer_src,
                                         std::span<const Ip6Addr> segments) {
    SrhHeader srh;
    srh.next_header = kProtoIpv6;
    srh.segments.assign(segments.begin(), segments.end());
    srh.segments_left = uint8_t(segments.size() - 1);
    Ipv6Header ip;
    ip.next_header = kProtoRouting;
    ip.src = outer_src;
    ip.dst = srh.segments[srh.segments_left];
    ip.payload_length = 0;  // recomputed per packet at replay time
    std::vector<uint8_t> out;
    serialize(ip, out);
    serialize(srh, out);
    return out;
}

BehaviorOutcome end_behavior(BehaviorInstance& inst, PacketBuf& pkt) {
    ++inst.ctr.pkts_in;
    auto st = advance_segment(pkt);
    if (!st) {
        if (st.error() == CodecErr::NoSrh) {
            ++inst.ctr.drop_no_srh;
            return BehaviorOutcome::drop(DropReason::NoSrh);
        }
        ++inst.ctr.drop_segments_exhausted;
        return BehaviorOutcome::drop(DropReason::SegmentsExhausted);
    }
    ++inst.ctr.pkts_out;
    return BehaviorOutcome::reroute();
}

BehaviorOutcome end_ad_inbound(BehaviorInstance& inst, PacketBuf& pkt, VnfMap& map,
                               const Clock& clock) {
    ++inst.ctr.pkts_in;
    WireView w(pkt);
    if (!w.has_srh() || w.srh_next_header() != kProtoIpv6 ||
        pkt.size() < kIpv6HdrLen + w.srh_len() + kIpv6HdrLen) {
        ++inst.ctr.drop_not_encapsulated;
        return BehaviorOutcome::drop(DropReason::NotEncapsulated);
    }
    if (w.srh_segments_left() == 0) {
        ++inst.ctr.drop_segments_exhausted;
        return BehaviorOutcome::drop(DropReason::SegmentsExhausted);
    }
    // Advance past our SID first so the stored headers replay as-is on the
    // fromVNF side.
    advance_segment(pkt);
    size_t hdr_len = kIpv6HdrLen + w.srh_len();
    if (inst.kind == BehaviorKind::EndAD) {
        double now = clock.now();
        if (inst.age == 0.0 || now - map.last_write(inst.oif) >= inst.age) {
            map.write_headers(inst.oif, pkt.bytes().subspan(0, hdr_len), now);
            ++inst.ctr.cache_writes;
        } else {
            ++inst.ctr.cache_write_skipped;
        }
    }
    pkt.pull_front(hdr_len);
    ++inst.ctr.pkts_out;
    return BehaviorOutcome::emit(inst.oif);
}

static BehaviorOutcome replay_headers(BehaviorInstance& inst, PacketBuf& pkt,
                                      std::span<const uint8_t> hdrs) {
    size_t inner_len = pkt.size();
    uint8_t* p = pkt.grow_front(hdrs.size());
    std::memcpy(p, hdrs.data(), hdrs.size());
    WireView w(pkt);
    w.set_payload_length(uint16_t(hdrs.size() - kIpv6HdrLen + inner_len));
    ++inst.ctr.pkts_out;
    return BehaviorOutcome::reroute();
}

BehaviorOutcome end_ad_fromvnf(BehaviorInstance& inst, PacketBuf& pkt, InterfaceId iif, VnfMap& map) {
    ++inst.ctr.pkts_in;
    auto hdrs = map.headers(iif);
    if (!hdrs) {
        ++inst.ctr.cache_misses;
        ++inst.ctr.drop_no_cache;
        return BehaviorOutcome::drop(DropReason::NoCacheEntry);
    }
    ++inst.ctr.cache_hits;
    return replay_headers(inst, pkt, *hdrs);
}

BehaviorOutcome end_as_fromvnf(BehaviorInstance& inst, PacketBuf& pkt) {
    ++inst.ctr.pkts_in;
    return replay_headers(inst, pkt, *inst.static_headers);
}

BehaviorOutcome end_am_masquerade(BehaviorInstance& inst, PacketBuf& pkt) {
    ++inst.ctr.pkts_in;
    WireView w(pkt);
    if (!w.has_srh()) {
        ++inst.ctr.drop_no_srh;
        return BehaviorOutcome::drop(DropReason::NoSrh);
    }
    if (w.srh_segments_left() == 0) {
        ++inst.ctr.drop_segments_exhausted;
        return BehaviorOutcome::drop(DropReason::SegmentsExhausted);
    }
    w.srh_set_segments_left(uint8_t(w.srh_segments_left() - 1));
    w.set_dst(w.srh_segment(0));
    ++inst.ctr.pkts_out;
    return BehaviorOutcome::emit(inst.oif);
}

BehaviorOutcome end_am_demasquerade(BehaviorInstance& inst, PacketBuf& pkt) {
    ++inst.ctr.pkts_in;
    WireView w(pkt);
    if (!w.has_srh()) {
        ++inst.ctr.drop_no_srh;
        return BehaviorOutcome::drop(DropReason::NoSrh);
    }
    uint8_t sl = w.srh_segments_left();
    if (sl > w.srh_last_entry()) {  // mangled by a non-compliant VNF
        ++inst.ctr.drop_no_srh;
        return BehaviorOutcome::drop(DropReason::NoSrh);
    }
    w.set_dst(w.srh_segment(sl));
    ++inst.ctr.pkts_out;
    return BehaviorOutcome::reroute();
}

BehaviorOutcome run_behavior(BehaviorInstance& inst, PacketBuf& pkt, InterfaceId iif, VnfMap& map,
                             const Clock& clock) {
    switch (inst.kind) {
        case BehaviorKind::End:
            return end_behavior(inst, pkt);
        case BehaviorKind::EndAD:
        case BehaviorKind::EndAS: {
            bool from_vnf = inst.chain == ChainDir::FromVnf ||
                            (inst.chain == ChainDir::Bidirectional && iif == inst.oif);
            if (inst.chain == ChainDir::FromVnf && inst.iif != kNoInterface && iif != inst.iif) {
                ++inst.ctr.pkts_in;
                ++inst.ctr.drop_wrong_interface;
                return BehaviorOutcome::drop(DropReason::WrongInterface);
            }
            if (from_vnf)
                return inst.kind == BehaviorKind::EndAS ? end_as_fromvnf(inst, pkt)
                                                        : end_ad_fromvnf(inst, pkt, iif, map);
            return end_ad_inbound(inst, pkt, map, clock);
        }
        case BehaviorKind::EndAM: {
            bool from_vnf = inst.chain == ChainDir::FromVnf ||
                            (inst.chain == ChainDir::Bidirectional && iif == inst.oif);
            return from_vnf ? end_am_demasquerade(inst, pkt) : end_am_masquerade(inst, pkt);
        }
    }
    return BehaviorOutcome::drop(DropReason::NoRoute);
}

}  // namespace sr6
