#include "routing.hpp"

#include <algorithm>
#include <mutex>

namespace sr6 {

const char* behavior_kind_str(BehaviorKind k) {
    switch (k) {
        case BehaviorKind::End: return "End";
        case BehaviorKind::EndAD: return "End.AD";
        case BehaviorKind::EndAS: return "End.AS";
        case BehaviorKind::EndAM: return "End.AM";
    }
    return "?";
}

std::optional<BehaviorKind> behavior_kind_parse(std::string_view s) {
    if (s == "End") return BehaviorKind::End;
    if (s == "End.AD") return BehaviorKind::EndAD;
    if (s == "End.AS") return BehaviorKind::EndAS;
    if (s == "End.AM") return BehaviorKind::EndAM;
    return std::nullopt;
}

const char* route_err_str(RouteErr e) {
    switch (e) {
        case RouteErr::DuplicatePrefix: return "DuplicatePrefix";
        case RouteErr::UnknownTable: return "UnknownTable";
        case RouteErr::NoSuchRoute: return "NoSuchRoute";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// RouteTable

Status<RouteErr> RouteTable::add(const Prefix& p, RouteTarget t) {
    auto entry = std::make_unique<RouteEntry>(RouteEntry{p, std::move(t)});
    if (!trie_.insert(p, int32_t(slots_.size()))) return RouteErr::DuplicatePrefix;
    slots_.push_back(std::move(entry));
    return {};
}

Status<RouteErr> RouteTable::del(const Prefix& p) {
    auto v = trie_.erase(p);
    if (!v) return RouteErr::NoSuchRoute;
    slots_[size_t(*v)].reset();
    return {};
}

const RouteEntry* RouteTable::lookup(const Ip6Addr& dst, uint32_t* bits_examined) const {
    auto hit = trie_.lookup(dst, bits_examined);
    if (!hit) return nullptr;
    return slots_[size_t(hit->value)].get();
}

const RouteEntry* RouteTable::exact(const Prefix& p) const {
    auto v = trie_.exact(p);
    return v ? slots_[size_t(*v)].get() : nullptr;
}

std::vector<const RouteEntry*> RouteTable::entries_sorted() const {
    std::vector<const RouteEntry*> out;
    trie_.visit([&](const Prefix&, int32_t v) { out.push_back(slots_[size_t(v)].get()); });
    std::sort(out.begin(), out.end(), [](const RouteEntry* a, const RouteEntry* b) {
        return std::tie(a->prefix.addr.b, a->prefix.len) < std::tie(b->prefix.addr.b, b->prefix.len);
    });
    return out;
}

// ---------------------------------------------------------------------------
// RoutingTables

RouteTable* RoutingTables::find(uint32_t table_id) {
    auto it = tables_.find(table_id);
    return it == tables_.end() ? nullptr : &it->second;
}

const RouteTable* RoutingTables::find(uint32_t table_id) const {
    auto it = tables_.find(table_id);
    return it == tables_.end() ? nullptr : &it->second;
}

Result<const RouteEntry*, RouteErr> RoutingTables::lpm_lookup(uint32_t table_id, const Ip6Addr& dst,
                                                              uint32_t* bits_examined) const {
    const RouteTable* t = find(table_id);
    if (!t) return RouteErr::UnknownTable;
    return t->lookup(dst, bits_examined);
}

std::vector<uint32_t> RoutingTables::table_ids_sorted() const {
    std::vector<uint32_t> ids;
    for (const auto& [id, t] : tables_)
        if (t.size() > 0) ids.push_back(id);
    return ids;
}

void RoutingTables::drop_if_empty(uint32_t table_id) {
    auto it = tables_.find(table_id);
    if (it != tables_.end() && it->second.size() == 0) tables_.erase(it);
}

// ---------------------------------------------------------------------------
// VnfMap

Status<BindErr> VnfMap::bind(InterfaceId iif, const Ip6Addr& sid, uint32_t table_id) {
    std::unique_lock lk(mu_);
    auto& slot = slots_[iif];
    if (slot.binding) return BindErr::DuplicateBinding;
    slot.binding = VnfBinding{sid, table_id};
    return {};
}

Status<BindErr> VnfMap::unbind(InterfaceId iif) {
    std::unique_lock lk(mu_);
    auto it = slots_.find(iif);
    if (it == slots_.end() || !it->second.binding) return BindErr::UnknownBinding;
    slots_.erase(it);
    return {};
}

std::optional<VnfBinding> VnfMap::binding(InterfaceId iif) const {
    std::shared_lock lk(mu_);
    auto it = slots_.find(iif);
    if (it == slots_.end()) return std::nullopt;
    return it->second.binding;
}

VnfMap::Headers VnfMap::headers(InterfaceId iif) const {
    std::shared_lock lk(mu_);
    auto it = slots_.find(iif);
    return it == slots_.end() ? nullptr : it->second.headers;
}

double VnfMap::last_write(InterfaceId iif) const {
    std::shared_lock lk(mu_);
    auto it = slots_.find(iif);
    return it == slots_.end() ? -std::numeric_limits<double>::infinity() : it->second.last_write;
}

void VnfMap::write_headers(InterfaceId iif, std::span<const uint8_t> bytes, double now) {
    auto fresh = std::make_shared<std::vector<uint8_t>>(bytes.begin(), bytes.end());
    std::unique_lock lk(mu_);
    auto& slot = slots_[iif];
    slot.headers = std::move(fresh);
    slot.last_write = now;
}

size_t VnfMap::gc_headers(size_t max_entries) {
    std::unique_lock lk(mu_);
    std::vector<std::pair<double, InterfaceId>> with;
    for (auto& [iif, slot] : slots_)
        if (slot.headers) with.emplace_back(slot.last_write, iif);
    if (with.size() <= max_entries) return 0;
    std::sort(with.begin(), with.end());
    size_t evict = with.size() - max_entries;
    for (size_t i = 0; i < evict; ++i) {
        auto& slot = slots_[with[i].second];
        slot.headers = nullptr;
        slot.last_write = -std::numeric_limits<double>::infinity();
    }
    return evict;
}

size_t VnfMap::binding_count() const {
    std::shared_lock lk(mu_);
    size_t n = 0;
    for (const auto& [iif, slot] : slots_)
        if (slot.binding) ++n;
    return n;
}

std::vector<VnfMap::SlotView> VnfMap::snapshot() const {
    std::shared_lock lk(mu_);
    std::vector<SlotView> out;
    out.reserve(slots_.size());
    for (const auto& [iif, slot] : slots_)
        out.push_back({iif, slot.binding, slot.headers, slot.last_write});
    std::sort(out.begin(), out.end(), [](const SlotView& a, const SlotView& b) { return a.iif < b.iif; });
    return out;
}

// ---------------------------------------------------------------------------
// Rpdb

Rpdb::Rpdb() {
    rules_.push_back(PolicyRule{kDefaultRulePriority, MatchAll{}, kMainTable});
}

Status<RuleErr> Rpdb::add(PolicyRule rule) {
    auto pos = std::lower_bound(rules_.begin(), rules_.end(), rule.priority,
                                [](const PolicyRule& r, uint32_t p) { return r.priority < p; });
    if (pos != rules_.end() && pos->priority == rule.priority) return RuleErr::DuplicatePriority;
    rules_.insert(pos, std::move(rule));
    return {};
}

uint32_t Rpdb::next_auto_priority() const {
    uint32_t p = 100;
    for (const auto& r : rules_)
        if (r.priority >= p && r.priority < kDefaultRulePriority) p = r.priority + 1;
    return p;
}

Status<RuleErr> Rpdb::del_priority(uint32_t priority) {
    if (priority == kDefaultRulePriority) return RuleErr::NoSuchRule;
    auto it = std::find_if(rules_.begin(), rules_.end(),
                           [&](const PolicyRule& r) { return r.priority == priority; });
    if (it == rules_.end()) return RuleErr::NoSuchRule;
    rules_.erase(it);
    return {};
}

std::optional<VnfBinding> extended_rule_eval(const VnfMap& map, InterfaceId iif) {
    return map.binding(iif);
}

const RouteEntry* Rpdb::lookup(const PacketMeta& meta, const RoutingTables& tables,
                               const VnfMap& vnfmap, const void* kind_ctx, BehaviorKindFn kind_fn,
                               LookupTrace& trace) const {
    for (const PolicyRule& r : rules_) {
        ++trace.rules_examined;
        if (std::holds_alternative<IifMatch>(r.selector)) {
            if (std::get<IifMatch>(r.selector).iif != meta.iif) continue;
            const RouteTable* t = tables.find(r.lookup_table);
            if (!t) continue;
            ++trace.tables_visited;
            uint32_t bits = 0;
            const RouteEntry* e = t->lookup(meta.dst, &bits);
            trace.lpm_bits += bits;
            if (!e) continue;
            trace.matched_rule_priority = r.priority;
            return e;
        }
        if (std::holds_alternative<ExtendedSrv6>(r.selector)) {
            auto bound = extended_rule_eval(vnfmap, meta.iif);
            if (!bound) continue;
            const RouteTable* t = tables.find(bound->table_id);
            if (!t) continue;
            ++trace.tables_visited;
            uint32_t bits = 0;
            const RouteEntry* e = t->lookup(bound->sid, &bits);
            trace.lpm_bits += bits;
            if (!e) continue;
            // The extended rule fires only for its own behavior kind.
            const auto* bt = std::get_if<BehaviorTarget>(&e->target);
            if (!bt || !kind_fn ||
                kind_fn(kind_ctx, bt->behavior_id) != std::get<ExtendedSrv6>(r.selector).kind)
                continue;
            trace.matched_rule_priority = r.priority;
            return e;
        }
        // MatchAll (terminal rule)
        const RouteTable* t = tables.find(r.lookup_table);
        if (!t) continue;
        ++trace.tables_visited;
        uint32_t bits = 0;
        const RouteEntry* e = t->lookup(meta.dst, &bits);
        trace.lpm_bits += bits;
        if (!e) continue;
        trace.matched_rule_priority = r.priority;
        return e;
    }
    return nullptr;
}

}  // namespace sr6
