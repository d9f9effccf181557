#ifndef SR6SFC_BEHAVIORS_HPP
#define SR6SFC_BEHAVIORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clock.hpp"
#include "packet.hpp"
#include "routing.hpp"

namespace sr6 {

enum class ChainDir { Bidirectional, Inbound, FromVnf };
const char* chain_dir_str(ChainDir d);

enum class DropReason {
    SegmentsExhausted,
    NotEncapsulated,
    NoCacheEntry,
    NoSrh,
    NoRoute,
    BadFrame,
    WrongInterface,
    PipelineLoop,
    StubNoRoute,
};
const char* drop_reason_str(DropReason r);

struct BehaviorCounters {
    uint64_t pkts_in = 0;
    uint64_t pkts_out = 0;
    uint64_t drop_segments_exhausted = 0;
    uint64_t drop_not_encapsulated = 0;
    uint64_t drop_no_cache = 0;
    uint64_t drop_no_srh = 0;
    uint64_t drop_wrong_interface = 0;
    uint64_t cache_writes = 0;
    uint64_t cache_write_skipped = 0;
    uint64_t cache_hits = 0;
    uint64_t cache_misses = 0;
};

struct BehaviorInstance {
    BehaviorKind kind = BehaviorKind::End;
    ChainDir chain = ChainDir::Bidirectional;
    Ip6Addr sid{};
    InterfaceId oif = kNoInterface;  // interface toward the VNF
    InterfaceId iif = kNoInterface;  // fromVNF-side guard (split-chain wiring)
    Ip6Addr nh6{};
    double age = 1.0;  // min seconds between learned-header writes; 0 = every packet
    std::optional<std::vector<uint8_t>> static_headers;  // End.AS only
    uint32_t table_id = kMainTable;                      // table holding this instance's route
    BehaviorCounters ctr;
};

// Builds the outer IPv6+SRH bytes replayed by the static proxy. `segments` is
// in SRH order; segments_left is pre-positioned as if the proxy SID were
// already consumed (SL = N-1 of the remaining chain).
std::vector<uint8_t> make_static_headers(const Ip6Addr& outer_src,
                                         std::span<const Ip6Addr> segments);

struct BehaviorOutcome {
    enum class Act { EmitDirect, Reroute, Drop } act = Act::Drop;
    InterfaceId oif = kNoInterface;
    DropReason reason = DropReason::NoRoute;

    static BehaviorOutcome emit(InterfaceId oif) { return {Act::EmitDirect, oif, {}}; }
    static BehaviorOutcome reroute() { return {Act::Reroute, kNoInterface, {}}; }
    static BehaviorOutcome drop(DropReason r) { return {Act::Drop, kNoInterface, r}; }
};

// Executes one behavior on a packet in place. `iif` decides the direction for
// bidirectional proxy instances (packets arriving on the VNF interface take
// the fromVNF path).
BehaviorOutcome run_behavior(BehaviorInstance& inst, PacketBuf& pkt, InterfaceId iif, VnfMap& map,
                             const Clock& clock);

// Individual behavior paths (exposed for direct testing).
BehaviorOutcome end_behavior(BehaviorInstance& inst, PacketBuf& pkt);
BehaviorOutcome end_ad_inbound(BehaviorInstance& inst, PacketBuf& pkt, VnfMap& map,
                               const Clock& clock);
BehaviorOutcome end_ad_fromvnf(BehaviorInstance& inst, PacketBuf& pkt, InterfaceId iif, VnfMap& map);
BehaviorOutcome end_as_fromvnf(BehaviorInstance& inst, PacketBuf& pkt);
BehaviorOutcome end_am_masquerade(BehaviorInstance& inst, PacketBuf& pkt);
BehaviorOutcome end_am_demasquerade(BehaviorInstance& inst, PacketBuf& pkt);

}  // namespace sr6

#endif
