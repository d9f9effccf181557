#ifndef SR6SFC_SIMNET_HPP
#define SR6SFC_SIMNET_HPP

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "node.hpp"

namespace sr6 {

// Standard two-node loop: TGR(sender, receiver) <-> SUT(eth0, eth1) with the
// VNF stubs living on the SUT's veth interfaces.
namespace netplan {
inline constexpr const char* kTgrName = "tgr";
inline constexpr const char* kSutName = "sut";
inline const std::string kSenderIface = "sender";
inline const std::string kReceiverIface = "receiver";
inline const std::string kSutInIface = "eth0";
inline const std::string kSutOutIface = "eth1";
std::string vnf_iface(size_t k);       // veth0, veth1, ...
Ip6Addr tgr_addr();                    // fd00:a::1
Ip6Addr receiver_addr();               // fd00:b::2
Prefix receiver_prefix();              // fd00:b::/64
Ip6Addr vnf_sid(size_t k);             // fdf1::2, fdf1::3, ...
}  // namespace netplan

// Per-packet cost charged against the SUT budget in deterministic mode:
//   pass cost = base + per_rule * rules_examined + per_lpm_bit * bits
// summed over all pipeline and VNF stub passes of the packet.
struct CostModel {
    double base = 1.0;
    double per_rule = 0.0;
    double per_lpm_bit = 0.0;
    double budget = 0.0;  // cost units per second; 0 = unlimited
    size_t queue_len = 512;
};

double pass_cost(const CostModel& cm, const PassTrace& t);

struct Endpoint {
    std::string node;
    std::string iface;
    bool operator==(const Endpoint&) const = default;
};

class Topology {
public:
    Topology();

    Node& add_node(const std::string& name, NodeMode mode);
    Node* node(std::string_view name);
    const Node* node(std::string_view name) const;
    std::vector<std::string> node_names() const;

    // Bidirectional lossless link; an interface appears in at most one link.
    void link(const Endpoint& a, const Endpoint& b);
    size_t link_count() const { return links_.size() / 2; }

    // Marks an interface as a traffic sink: delivered frames are counted (and
    // optionally kept) instead of being processed by the owning node.
    void mark_sink(const Endpoint& e);

    SimClock& sim_clock() { return sim_clock_; }
    void use_wall_clock();
    void use_sim_clock();

    struct Delivery {
        bool delivered = false;         // reached a sink
        Endpoint sink;
        std::vector<PassTrace> passes;  // all SUT/stub passes along the way
        void clear() {
            delivered = false;
            passes.clear();
        }
    };
    // Injects one frame into the link attached to `from` and runs it to
    // completion (sink, drop, or dead end). Returns true when a sink was
    // reached; `d`, when given, collects the trace (reusable across calls).
    bool inject(const Endpoint& from, PacketBuf& pkt, Delivery* d = nullptr);

    uint64_t sink_count(const Endpoint& e) const;
    void set_sink_capture(const Endpoint& e, std::vector<std::vector<uint8_t>>* out);
    void reset_sink_counts();

    struct DropStats {
        uint64_t queue_overflow = 0;
        uint64_t deadline = 0;
        uint64_t pipeline = 0;
        uint64_t no_link = 0;
    };
    DropStats& drops() { return drops_; }

private:
    struct EndpointHash {
        size_t operator()(const Endpoint& e) const {
            return std::hash<std::string>{}(e.node) * 131 + std::hash<std::string>{}(e.iface);
        }
    };
    struct SinkState {
        uint64_t count = 0;
        std::vector<std::vector<uint8_t>>* capture = nullptr;
    };

    std::vector<std::unique_ptr<Node>> nodes_;
    std::unordered_map<std::string, Node*> by_name_;
    std::unordered_map<Endpoint, Endpoint, EndpointHash> links_;
    std::unordered_map<Endpoint, SinkState, EndpointHash> sinks_;
    SimClock sim_clock_;
    SteadyClock wall_clock_;
    DropStats drops_;
};

// ---------------------------------------------------------------------------
// Standard topology builder (the RFC2544 two-port loop).

struct StandardOpts {
    NodeMode mode = NodeMode::ExtRule;
    size_t vnfs = 1;
    size_t target_vnf = size_t(-1);  // VNF the traffic traverses; default last
    double age = 1.0;
    size_t extra_plain_rules = 0;    // non-matching iif rules (policy cost probes)
    bool ext_rule_unbound = false;   // extended rule present with no bindings
    bool skip_vnf_wiring = false;    // plain forwarding SUT (no VNF in path)
};

Topology build_standard_topology(const StandardOpts& opts = {});
size_t standard_target_vnf(const StandardOpts& opts);

// Template frame entering the SUT: inner UDP/IPv6 packet (40 + 8 + payload
// bytes) encapsulated behind [receiver, target SID] unless skip_vnf_wiring,
// in which case it is the bare inner packet.
PacketBuf make_standard_frame(const StandardOpts& opts, size_t payload_bytes = 12,
                              uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Trial engines

struct TrafficSpec {
    double ps = 1000.0;   // offered packets per second
    double duration = 1;  // seconds
    size_t payload_bytes = 12;
    uint64_t seed = 1;
};

struct TrialCounts {
    uint64_t injected = 0;
    uint64_t delivered = 0;
    uint64_t dropped_queue = 0;
    uint64_t dropped_deadline = 0;
    uint64_t dropped_pipeline = 0;
};

// Deterministic single-server drop-tail queue driven by the cost model; the
// simulated clock is advanced to each packet's service start time.
TrialCounts run_cost_trial(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                           const TrafficSpec& spec);

// Wall-clock engine: measures real per-packet pipeline time over a batch.
struct WallClockRun {
    uint64_t injected = 0;
    uint64_t delivered = 0;
    double elapsed_sec = 0;
    double sec_per_pkt() const { return injected ? elapsed_sec / double(injected) : 0; }
};
WallClockRun run_wallclock_batch(Topology& topo, const StandardOpts& opts, size_t packets,
                                 size_t payload_bytes = 12);

}  // namespace sr6

#endif
