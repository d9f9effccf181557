#ifndef SR6SFC_NODE_HPP
#define SR6SFC_NODE_HPP

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "behaviors.hpp"
#include "clock.hpp"
#include "packet.hpp"
#include "routing.hpp"

namespace sr6 {

enum class NodeMode { Baseline, Policy, ExtRule, Preroute };
const char* node_mode_str(NodeMode m);
std::optional<NodeMode> node_mode_parse(std::string_view s);

enum class Stage : uint8_t { PreRouting, Rpdb, RouteLookup, Behavior, Forward, VnfStub, Drop };
const char* stage_str(Stage s);

// Allocation-free so tracing does not distort wall-clock measurements.
struct PassTrace {
    std::array<Stage, 14> stages{};
    uint8_t n_stages = 0;
    uint32_t rules_examined = 0;
    uint32_t tables_visited = 0;
    uint32_t lpm_bits = 0;
    std::optional<uint32_t> matched_rule_priority;
    int32_t behavior_id = -1;

    void push_stage(Stage s) {
        if (n_stages < stages.size()) stages[n_stages++] = s;
    }
    std::span<const Stage> stage_seq() const { return {stages.data(), n_stages}; }
};

struct PassResult {
    enum class Kind { Emit, Drop } kind = Kind::Drop;
    InterfaceId oif = kNoInterface;
    DropReason reason = DropReason::NoRoute;
    PassTrace trace;
};

struct ProcessResult {
    bool emitted = false;
    InterfaceId oif = kNoInterface;
    DropReason drop_reason = DropReason::NoRoute;
    std::array<PassTrace, 10> passes{};  // SUT passes and VNF stub passes, in order
    uint8_t n_passes = 0;

    void push_pass(const PassTrace& t) {
        if (n_passes < passes.size()) passes[n_passes++] = t;
    }
    std::span<const PassTrace> pass_seq() const { return {passes.data(), n_passes}; }
};

struct NodeCounters {
    uint64_t pkts_in = 0;
    uint64_t pkts_out = 0;
    uint64_t drop_no_route = 0;
    uint64_t drop_bad_frame = 0;
    uint64_t drop_loop = 0;
    uint64_t drop_behavior = 0;
};

// In-process stand-in for the VNF attached to one interface. The legacy kind
// routes the inner packet in its own table and hands it back unchanged; the
// SR-aware kind applies End.
struct VnfStub {
    enum class Kind { Legacy, SrAware } kind = Kind::Legacy;
    RouteTable table;
    BehaviorInstance end;  // SR-aware only
    uint64_t pkts = 0;
    uint64_t drops = 0;
};

class Node {
public:
    Node(std::string name, NodeMode mode, const Clock* clock);

    const std::string& name() const { return name_; }
    NodeMode mode() const { return mode_; }
    void set_clock(const Clock* c) { clock_ = c; }

    InterfaceId add_interface(const std::string& name);
    InterfaceId iface(std::string_view name) const;  // kNoInterface if unknown
    const std::string& iface_name(InterfaceId id) const { return iface_names_[size_t(id)]; }
    size_t iface_count() const { return iface_names_.size(); }

    RoutingTables& tables() { return tables_; }
    const RoutingTables& tables() const { return tables_; }
    Rpdb& rpdb() { return rpdb_; }
    const Rpdb& rpdb() const { return rpdb_; }
    VnfMap& vnfmap() { return vnfmap_; }
    const VnfMap& vnfmap() const { return vnfmap_; }

    int32_t add_behavior(std::unique_ptr<BehaviorInstance> b);
    BehaviorInstance* behavior(int32_t id);
    const BehaviorInstance* behavior(int32_t id) const;
    size_t behavior_count() const;
    void remove_behavior(int32_t id);
    BehaviorKind behavior_kind(int32_t id) const { return behaviors_[size_t(id)]->kind; }

    // Pre-routing capture registry (Preroute mode).
    void srext_register(const Ip6Addr& sid, int32_t behavior_id);
    void srext_unregister(const Ip6Addr& sid);

    VnfStub& attach_stub(InterfaceId iif, VnfStub::Kind kind);
    VnfStub* stub(InterfaceId iif);

    // One traversal of the routing pipeline (no VNF bounce).
    PassResult process_pass(InterfaceId iif, PacketBuf& pkt);
    // Full per-node processing including in-node VNF stub bounces. The packet
    // is left holding the final (emitted) frame when emitted.
    ProcessResult process(InterfaceId iif, PacketBuf& pkt);

    // Routes the inner packet in the stub's table and returns it unchanged
    // (legacy), or applies End (SR-aware).
    bool vnf_stub_process(VnfStub& stub, PacketBuf& pkt, PassTrace& trace);

    NodeCounters& counters() { return ctr_; }
    std::vector<std::pair<std::string, uint64_t>> counters_snapshot() const;

private:
    std::string name_;
    NodeMode mode_;
    const Clock* clock_;
    std::vector<std::string> iface_names_;
    std::unordered_map<std::string, InterfaceId> iface_ids_;
    RoutingTables tables_;
    Rpdb rpdb_;
    VnfMap vnfmap_;
    std::vector<std::unique_ptr<BehaviorInstance>> behaviors_;
    std::unordered_map<Ip6Addr, int32_t, Ip6AddrHash> srext_sids_;
    std::unordered_map<InterfaceId, VnfStub> stubs_;
    NodeCounters ctr_;

    static BehaviorKind kind_of(const void* ctx, int32_t behavior_id);
};

}  // namespace sr6

#endif
