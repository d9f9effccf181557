#include "node.hpp"

#include <algorithm>

namespace sr6 {

const char* node_mode_str(NodeMode m) {
    switch (m) {
        case NodeMode::Baseline: return "baseline";
        case NodeMode::Policy: return "policy";
        case NodeMode::ExtRule: return "extrule";
        case NodeMode::Preroute: return "preroute";
    }
    return "?";
}

std::optional<NodeMode> node_mode_parse(std::string_view s) {
    if (s == "baseline") return NodeMode::Baseline;
    if (s == "policy") return NodeMode::Policy;
    if (s == "extrule") return NodeMode::ExtRule;
    if (s == "preroute") return NodeMode::Preroute;
    return std::nullopt;
}

const char* stage_str(Stage s) {
    switch (s) {
        case Stage::PreRouting: return "prerouting";
        case Stage::Rpdb: return "rpdb";
        case Stage::RouteLookup: return "route_lookup";
        case Stage::Behavior: return "behavior";
        case Stage::Forward: return "forward";
        case Stage::VnfStub: return "vnf_stub";
        case Stage::Drop: return "drop";
    }
    return "?";
}

Node::Node(std::string name, NodeMode mode, const Clock* clock)
    : name_(std::move(name)), mode_(mode), clock_(clock) {}

InterfaceId Node::add_interface(const std::string& name) {
    if (auto it = iface_ids_.find(name); it != iface_ids_.end()) return it->second;
    InterfaceId id = InterfaceId(iface_names_.size());
    iface_names_.push_back(name);
    iface_ids_.emplace(name, id);
    return id;
}

InterfaceId Node::iface(std::string_view name) const {
    auto it = iface_ids_.find(std::string(name));
    return it == iface_ids_.end() ? kNoInterface : it->second;
}

int32_t Node::add_behavior(std::unique_ptr<BehaviorInstance> b) {
    behaviors_.push_back(std::move(b));
    return int32_t(behaviors_.size() - 1);
}

BehaviorInstance* Node::behavior(int32_t id) {
    if (id < 0 || size_t(id) >= behaviors_.size()) return nullptr;
    return behaviors_[size_t(id)].get();
}

const BehaviorInstance* Node::behavior(int32_t id) const {
    if (id < 0 || size_t(id) >= behaviors_.size()) return nullptr;
    return behaviors_[size_t(id)].get();
}

size_t Node::behavior_count() const {
    size_t n = 0;
    for (const auto& b : behaviors_)
        if (b) ++n;
    return n;
}

void Node::remove_behavior(int32_t id) {
    if (id >= 0 && size_t(id) < behaviors_.size()) behaviors_[size_t(id)].reset();
}

void Node::srext_register(const Ip6Addr& sid, int32_t behavior_id) {
    srext_sids_[sid] = behavior_id;
}

void Node::srext_unregister(const Ip6Addr& sid) { srext_sids_.erase(sid); }

VnfStub& Node::attach_stub(InterfaceId iif, VnfStub::Kind kind) {
    VnfStub& s = stubs_[iif];
    s.kind = kind;
    return s;
}

VnfStub* Node::stub(InterfaceId iif) {
    auto it = stubs_.find(iif);
    return it == stubs_.end() ? nullptr : &it->second;
}

BehaviorKind Node::kind_of(const void* ctx, int32_t behavior_id) {
    const Node* n = static_cast<const Node*>(ctx);
    const BehaviorInstance* b = n->behavior(behavior_id);
    return b ? b->kind : BehaviorKind::End;
}

PassResult Node::process_pass(InterfaceId iif, PacketBuf& pkt) {
    PassResult res;
    PassTrace& tr = res.trace;
    ++ctr_.pkts_in;

    if (auto st = validate_frame(pkt.bytes()); !st) {
        ++ctr_.drop_bad_frame;
        tr.push_stage(Stage::Drop);
        res.kind = PassResult::Kind::Drop;
        res.reason = DropReason::BadFrame;
        return res;
    }

    const RouteEntry* entry = nullptr;
    bool captured = false;

    if (mode_ == NodeMode::Preroute) {
        // Pre-routing capture: VNF-bound interfaces and local SIDs are matched
        // before any policy rule or routing table is consulted.
        tr.push_stage(Stage::PreRouting);
        int32_t bid = -1;
        if (auto bound = vnfmap_.binding(iif); bound) {
            auto it = srext_sids_.find(bound->sid);
            if (it != srext_sids_.end()) bid = it->second;
        }
        if (bid < 0) {
            auto it = srext_sids_.find(WireView(pkt).dst());
            if (it != srext_sids_.end()) bid = it->second;
        }
        if (bid >= 0) {
            captured = true;
            tr.push_stage(Stage::Behavior);
            tr.behavior_id = bid;
            BehaviorOutcome out = run_behavior(*behavior(bid), pkt, iif, vnfmap_, *clock_);
            if (out.act == BehaviorOutcome::Act::EmitDirect) {
                ++ctr_.pkts_out;
                res.kind = PassResult::Kind::Emit;
                res.oif = out.oif;
                return res;
            }
            if (out.act == BehaviorOutcome::Act::Drop) {
                ++ctr_.drop_behavior;
                tr.push_stage(Stage::Drop);
                res.kind = PassResult::Kind::Drop;
                res.reason = out.reason;
                return res;
            }
            // Reroute: the outbound forwarding lookup is kept in all modes.
            tr.push_stage(Stage::RouteLookup);
            ++tr.tables_visited;
            uint32_t bits = 0;
            auto looked = tables_.lpm_lookup(kMainTable, WireView(pkt).dst(), &bits);
            tr.lpm_bits += bits;
            entry = looked ? looked.value() : nullptr;
        }
    }

    if (!captured) {
        tr.push_stage(Stage::Rpdb);
        LookupTrace lt;
        entry = rpdb_.lookup({iif, WireView(pkt).dst()}, tables_, vnfmap_, this, &Node::kind_of, lt);
        tr.rules_examined += lt.rules_examined;
        tr.tables_visited += lt.tables_visited;
        tr.lpm_bits += lt.lpm_bits;
        tr.matched_rule_priority = lt.matched_rule_priority;
        tr.push_stage(Stage::RouteLookup);
    }

    if (!entry) {
        ++ctr_.drop_no_route;
        tr.push_stage(Stage::Drop);
        res.kind = PassResult::Kind::Drop;
        res.reason = DropReason::NoRoute;
        return res;
    }

    // Behavior chain: a behavior may re-enter forwarding (End advancing to a
    // local SID again); bound to keep malformed configs from spinning.
    for (int depth = 0; depth < 4; ++depth) {
        if (const auto* fwd = std::get_if<ForwardTarget>(&entry->target)) {
            tr.push_stage(Stage::Forward);
            ++ctr_.pkts_out;
            res.kind = PassResult::Kind::Emit;
            res.oif = fwd->oif;
            return res;
        }
        int32_t bid = std::get<BehaviorTarget>(entry->target).behavior_id;
        tr.push_stage(Stage::Behavior);
        tr.behavior_id = bid;
        BehaviorInstance* b = behavior(bid);
        if (!b) break;
        BehaviorOutcome out = run_behavior(*b, pkt, iif, vnfmap_, *clock_);
        if (out.act == BehaviorOutcome::Act::EmitDirect) {
            ++ctr_.pkts_out;
            res.kind = PassResult::Kind::Emit;
            res.oif = out.oif;
            return res;
        }
        if (out.act == BehaviorOutcome::Act::Drop) {
            ++ctr_.drop_behavior;
            tr.push_stage(Stage::Drop);
            res.kind = PassResult::Kind::Drop;
            res.reason = out.reason;
            return res;
        }
        // Reroute: forwarding lookup on the rewritten destination.
        tr.push_stage(Stage::RouteLookup);
        ++tr.tables_visited;
        uint32_t bits = 0;
        auto looked = tables_.lpm_lookup(kMainTable, WireView(pkt).dst(), &bits);
        tr.lpm_bits += bits;
        entry = looked ? looked.value() : nullptr;
        if (!entry) {
            ++ctr_.drop_no_route;
            tr.push_stage(Stage::Drop);
            res.kind = PassResult::Kind::Drop;
            res.reason = DropReason::NoRoute;
            return res;
        }
    }

    ++ctr_.drop_loop;
    tr.push_stage(Stage::Drop);
    res.kind = PassResult::Kind::Drop;
    res.reason = DropReason::PipelineLoop;
    return res;
}

ProcessResult Node::process(InterfaceId iif, PacketBuf& pkt) {
    ProcessResult out;
    InterfaceId cur = iif;
    for (int hop = 0; hop < 8; ++hop) {
        PassResult pass = process_pass(cur, pkt);
        if (pass.kind == PassResult::Kind::Drop) {
            out.drop_reason = pass.reason;
            out.push_pass(pass.trace);
            return out;
        }
        out.push_pass(pass.trace);
        VnfStub* s = stub(pass.oif);
        if (!s) {
            out.emitted = true;
            out.oif = pass.oif;
            return out;
        }
        PassTrace stub_trace;
        if (!vnf_stub_process(*s, pkt, stub_trace)) {
            out.drop_reason = DropReason::StubNoRoute;
            out.push_pass(stub_trace);
            return out;
        }
        out.push_pass(stub_trace);
        cur = pass.oif;  // the stub answers on its own interface
    }
    ++ctr_.drop_loop;
    out.drop_reason = DropReason::PipelineLoop;
    return out;
}

bool Node::vnf_stub_process(VnfStub& stub, PacketBuf& pkt, PassTrace& trace) {
    trace.push_stage(Stage::VnfStub);
    ++stub.pkts;
    uint32_t bits = 0;
    const RouteEntry* e = stub.table.lookup(WireView(pkt).dst(), &bits);
    ++trace.tables_visited;
    trace.lpm_bits += bits;
    if (!e) {
        ++stub.drops;
        trace.push_stage(Stage::Drop);
        return false;
    }
    if (stub.kind == VnfStub::Kind::SrAware) {
        trace.push_stage(Stage::Behavior);
        auto out = end_behavior(stub.end, pkt);
        if (out.act == BehaviorOutcome::Act::Drop) {
            ++stub.drops;
            trace.push_stage(Stage::Drop);
            return false;
        }
    }
    return true;
}

std::vector<std::pair<std::string, uint64_t>> Node::counters_snapshot() const {
    std::vector<std::pair<std::string, uint64_t>> out;
    auto put = [&](std::string k, uint64_t v) { out.emplace_back(std::move(k), v); };
    put("node.pkts_in", ctr_.pkts_in);
    put("node.pkts_out", ctr_.pkts_out);
    put("node.drop_no_route", ctr_.drop_no_route);
    put("node.drop_bad_frame", ctr_.drop_bad_frame);
    put("node.drop_loop", ctr_.drop_loop);
    put("node.drop_behavior", ctr_.drop_behavior);
    for (const auto& b : behaviors_) {
        if (!b) continue;
        std::string p = std::string("behavior.") + b->sid.str() + "." + behavior_kind_str(b->kind);
        if (b->chain != ChainDir::Bidirectional) p += std::string(".") + chain_dir_str(b->chain);
        put(p + ".pkts_in", b->ctr.pkts_in);
        put(p + ".pkts_out", b->ctr.pkts_out);
        put(p + ".drop_segments_exhausted", b->ctr.drop_segments_exhausted);
        put(p + ".drop_not_encapsulated", b->ctr.drop_not_encapsulated);
        put(p + ".drop_no_cache", b->ctr.drop_no_cache);
        put(p + ".drop_no_srh", b->ctr.drop_no_srh);
        put(p + ".drop_wrong_interface", b->ctr.drop_wrong_interface);
        put(p + ".cache_writes", b->ctr.cache_writes);
        put(p + ".cache_write_skipped", b->ctr.cache_write_skipped);
        put(p + ".cache_hits", b->ctr.cache_hits);
        put(p + ".cache_misses", b->ctr.cache_misses);
    }
    std::vector<InterfaceId> stub_ids;
    for (const auto& [id, s] : stubs_) stub_ids.push_back(id);
    std::sort(stub_ids.begin(), stub_ids.end());
    for (InterfaceId id : stub_ids) {
        const VnfStub& s = stubs_.at(id);
        std::string p = "vnf." + iface_names_[size_t(id)];
        put(p + ".pkts", s.pkts);
        put(p + ".drops", s.drops);
    }
    return out;
}

}  // namespace sr6
