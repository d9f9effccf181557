#include "simnet.hpp"

#include <cassert>
#include <cstdio>
#include <deque>

#include "config.hpp"

namespace sr6 {

namespace netplan {

std::string vnf_iface(size_t k) { return "veth" + std::to_string(k); }
Ip6Addr tgr_addr() { return *Ip6Addr::parse("fd00:a::1"); }
Ip6Addr receiver_addr() { return *Ip6Addr::parse("fd00:b::2"); }
Prefix receiver_prefix() { return *Prefix::parse("fd00:b::/64"); }

Ip6Addr vnf_sid(size_t k) {
    Ip6Addr base = *Ip6Addr::parse("fdf1::");
    uint64_t host = 2 + k;
    for (int i = 0; i < 8; ++i) base.b[15 - i] = uint8_t(host >> (8 * i));
    return base;
}

}  // namespace netplan

double pass_cost(const CostModel& cm, const PassTrace& t) {
    return cm.base + cm.per_rule * t.rules_examined + cm.per_lpm_bit * t.lpm_bits;
}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology() = default;

Node& Topology::add_node(const std::string& name, NodeMode mode) {
    auto n = std::make_unique<Node>(name, mode, &sim_clock_);
    Node& ref = *n;
    by_name_[name] = &ref;
    nodes_.push_back(std::move(n));
    return ref;
}

Node* Topology::node(std::string_view name) {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : it->second;
}

const Node* Topology::node(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : it->second;
}

std::vector<std::string> Topology::node_names() const {
    std::vector<std::string> names;
    for (const auto& n : nodes_) names.push_back(n->name());
    return names;
}

void Topology::link(const Endpoint& a, const Endpoint& b) {
    assert(!links_.count(a) && !links_.count(b));
    links_[a] = b;
    links_[b] = a;
}

void Topology::mark_sink(const Endpoint& e) { sinks_[e]; }

void Topology::use_wall_clock() {
    for (auto& n : nodes_) n->set_clock(&wall_clock_);
}

void Topology::use_sim_clock() {
    for (auto& n : nodes_) n->set_clock(&sim_clock_);
}

bool Topology::inject(const Endpoint& from, PacketBuf& pkt, Delivery* d) {
    Endpoint at = from;
    for (int hop = 0; hop < 16; ++hop) {
        auto lk = links_.find(at);
        if (lk == links_.end()) {
            ++drops_.no_link;
            return false;
        }
        const Endpoint& to = lk->second;
        if (auto s = sinks_.find(to); s != sinks_.end()) {
            ++s->second.count;
            if (s->second.capture)
                s->second.capture->emplace_back(pkt.bytes().begin(), pkt.bytes().end());
            if (d) {
                d->delivered = true;
                d->sink = to;
            }
            return true;
        }
        Node* n = node(to.node);
        InterfaceId iif = n ? n->iface(to.iface) : kNoInterface;
        if (iif == kNoInterface) {
            ++drops_.no_link;
            return false;
        }
        ProcessResult r = n->process(iif, pkt);
        if (d)
            for (const auto& p : r.pass_seq()) d->passes.push_back(p);
        if (!r.emitted) {
            ++drops_.pipeline;
            return false;
        }
        at = Endpoint{n->name(), n->iface_name(r.oif)};
    }
    ++drops_.pipeline;
    return false;
}

uint64_t Topology::sink_count(const Endpoint& e) const {
    auto it = sinks_.find(e);
    return it == sinks_.end() ? 0 : it->second.count;
}

void Topology::set_sink_capture(const Endpoint& e, std::vector<std::vector<uint8_t>>* out) {
    sinks_[e].capture = out;
}

void Topology::reset_sink_counts() {
    for (auto& [e, s] : sinks_) s.count = 0;
}

// ---------------------------------------------------------------------------
// Standard topology

size_t standard_target_vnf(const StandardOpts& opts) {
    if (opts.vnfs == 0) return 0;
    return opts.target_vnf == size_t(-1) ? opts.vnfs - 1 : opts.target_vnf;
}

Topology build_standard_topology(const StandardOpts& opts) {
    using namespace netplan;
    Topology topo;
    Node& tgr = topo.add_node(kTgrName, NodeMode::Baseline);
    tgr.add_interface(kSenderIface);
    tgr.add_interface(kReceiverIface);

    Node& sut = topo.add_node(kSutName, opts.mode);
    InterfaceId in = sut.add_interface(kSutInIface);
    InterfaceId out = sut.add_interface(kSutOutIface);
    (void)in;

    topo.link({kTgrName, kSenderIface}, {kSutName, kSutInIface});
    topo.link({kSutName, kSutOutIface}, {kTgrName, kReceiverIface});
    topo.mark_sink({kTgrName, kReceiverIface});

    // Plain forwarding routes of the SUT.
    sut.tables().ensure(kMainTable).add(receiver_prefix(), ForwardTarget{receiver_addr(), out});
    InterfaceId in_id = sut.iface(kSutInIface);
    sut.tables().ensure(kMainTable).add(*Prefix::parse("::/0"), ForwardTarget{tgr_addr(), in_id});

    std::string cfg;
    for (size_t k = 0; k < opts.vnfs && !opts.skip_vnf_wiring; ++k) {
        std::string veth = vnf_iface(k);
        InterfaceId veth_id = sut.add_interface(veth);
        std::string sid = vnf_sid(k).str();
        switch (opts.mode) {
            case NodeMode::Baseline: {
                // SR-aware VNF: plain route toward it, End applied inside.
                cfg += "route add " + sid + "/128 via " + sid + " dev " + veth + "\n";
                VnfStub& stub = sut.attach_stub(veth_id, VnfStub::Kind::SrAware);
                stub.table.add(*Prefix::parse(sid + "/128"), ForwardTarget{vnf_sid(k), veth_id});
                stub.end.kind = BehaviorKind::End;
                stub.end.sid = vnf_sid(k);
                break;
            }
            case NodeMode::Policy: {
                uint32_t table = uint32_t(100 + k);
                cfg += "route add " + sid + "/128 encap seg6local action End.AD chain inbound oif " +
                       veth + " nh6 " + sid + " age " + std::to_string(opts.age) + " dev " + veth +
                       "\n";
                cfg += "rule add iif " + veth + " table " + std::to_string(table) + "\n";
                cfg += "route add default encap seg6local action End.AD chain fromVNF iif " + veth +
                       " dev " + veth + " table " + std::to_string(table) + "\n";
                VnfStub& stub = sut.attach_stub(veth_id, VnfStub::Kind::Legacy);
                stub.table.add(*Prefix::parse("::/0"), ForwardTarget{{}, veth_id});
                break;
            }
            case NodeMode::ExtRule:
            case NodeMode::Preroute: {
                cfg += "route add " + sid + "/128 encap seg6local action End.AD oif " + veth +
                       " nh6 " + sid + " age " + std::to_string(opts.age) + " dev " + veth + "\n";
                VnfStub& stub = sut.attach_stub(veth_id, VnfStub::Kind::Legacy);
                stub.table.add(*Prefix::parse("::/0"), ForwardTarget{{}, veth_id});
                break;
            }
        }
    }
    if (opts.mode == NodeMode::ExtRule && !opts.skip_vnf_wiring && opts.vnfs > 0)
        cfg += "rule add seg6local-behaviour End.AD\n";
    if (opts.ext_rule_unbound) cfg += "rule add seg6local-behaviour End.AD\n";
    for (size_t k = 0; k < opts.extra_plain_rules; ++k) {
        std::string dummy = "ruleif" + std::to_string(k);
        sut.add_interface(dummy);
        cfg += "rule add iif " + dummy + " table " + std::to_string(2000 + k) + "\n";
    }

    auto st = apply_config(sut, cfg);
    if (!st.is_ok()) {
        std::fprintf(stderr, "standard topology config failed at line %d: %s\n", st.error().line,
                     st.error().msg.c_str());
        std::abort();
    }
    return topo;
}

PacketBuf make_standard_frame(const StandardOpts& opts, size_t payload_bytes, uint64_t seed) {
    using namespace netplan;
    std::vector<uint8_t> payload(payload_bytes);
    uint64_t x = seed ? seed : 1;
    for (auto& b : payload) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        b = uint8_t(x);
    }
    PacketBuf pkt = make_udp_packet(tgr_addr(), receiver_addr(), 5000, 5001, payload);
    if (!opts.skip_vnf_wiring && opts.vnfs > 0) {
        Ip6Addr segments[2] = {receiver_addr(), vnf_sid(standard_target_vnf(opts))};
        encap(pkt, segments, tgr_addr());
    }
    return pkt;
}

// ---------------------------------------------------------------------------
// Trial engines

TrialCounts run_cost_trial(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                           const TrafficSpec& spec) {
    using namespace netplan;
    TrialCounts counts;
    topo.use_sim_clock();
    SimClock& clock = topo.sim_clock();
    const double t0 = clock.now();
    const double deadline = t0 + spec.duration;

    PacketBuf frame = make_standard_frame(opts, spec.payload_bytes, spec.seed);
    std::vector<uint8_t> tmpl(frame.bytes().begin(), frame.bytes().end());
    PacketBuf pkt;

    uint64_t p_in = uint64_t(spec.ps * spec.duration + 0.5);
    counts.injected = p_in;
    std::deque<double> in_flight;  // finish times of admitted, unfinished packets
    double last_finish = t0;
    Endpoint src{kTgrName, kSenderIface};
    Topology::Delivery d;

    for (uint64_t i = 0; i < p_in; ++i) {
        double arrival = t0 + double(i) / spec.ps;
        while (!in_flight.empty() && in_flight.front() <= arrival) in_flight.pop_front();
        if (cm.budget > 0 && in_flight.size() >= cm.queue_len) {
            ++counts.dropped_queue;
            continue;
        }
        double start = arrival > last_finish ? arrival : last_finish;
        clock.set(start);
        pkt.assign(tmpl);
        d.clear();
        if (!topo.inject(src, pkt, &d)) {
            ++counts.dropped_pipeline;
            continue;
        }
        double cost = 0;
        for (const auto& p : d.passes) cost += pass_cost(cm, p);
        double finish = cm.budget > 0 ? start + cost / cm.budget : start;
        last_finish = finish;
        in_flight.push_back(finish);
        if (finish <= deadline) {
            ++counts.delivered;
        } else {
            ++counts.dropped_deadline;
            ++topo.drops().deadline;
        }
    }
    topo.drops().queue_overflow += counts.dropped_queue;
    clock.set(deadline > last_finish ? deadline : last_finish);
    return counts;
}

WallClockRun run_wallclock_batch(Topology& topo, const StandardOpts& opts, size_t packets,
                                 size_t payload_bytes) {
    using namespace netplan;
    topo.use_wall_clock();
    PacketBuf frame = make_standard_frame(opts, payload_bytes, 1);
    std::vector<uint8_t> tmpl(frame.bytes().begin(), frame.bytes().end());
    PacketBuf pkt;
    Endpoint src{kTgrName, kSenderIface};

    WallClockRun run;
    run.injected = packets;
    uint64_t before = topo.sink_count({kTgrName, kReceiverIface});
    auto t0 = std::chrono::steady_clock::now();
    for (size_t i = 0; i < packets; ++i) {
        pkt.assign(tmpl);
        topo.inject(src, pkt);
    }
    auto t1 = std::chrono::steady_clock::now();
    run.elapsed_sec = std::chrono::duration<double>(t1 - t0).count();
    run.delivered = topo.sink_count({kTgrName, kReceiverIface}) - before;
    topo.use_sim_clock();
    return run;
}

}  // namespace sr6
