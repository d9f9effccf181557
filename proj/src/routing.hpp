#ifndef SR6SFC_ROUTING_HPP
#define SR6SFC_ROUTING_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "addr.hpp"
#include "result.hpp"
#include "trie.hpp"

namespace sr6 {

using InterfaceId = int32_t;
inline constexpr InterfaceId kNoInterface = -1;

inline constexpr uint32_t kMainTable = 254;
inline constexpr uint32_t kDefaultRulePriority = 32766;
inline constexpr uint32_t kExtRuleDefaultPriority = 1000;

enum class BehaviorKind { End, EndAD, EndAS, EndAM };
const char* behavior_kind_str(BehaviorKind k);
std::optional<BehaviorKind> behavior_kind_parse(std::string_view s);

// ---------------------------------------------------------------------------
// Routes

struct ForwardTarget {
    Ip6Addr next_hop{};
    InterfaceId oif = kNoInterface;
    bool operator==(const ForwardTarget&) const = default;
};
struct BehaviorTarget {
    int32_t behavior_id = -1;
    bool operator==(const BehaviorTarget&) const = default;
};
using RouteTarget = std::variant<ForwardTarget, BehaviorTarget>;

struct RouteEntry {
    Prefix prefix;
    RouteTarget target;
};

enum class RouteErr { DuplicatePrefix, UnknownTable, NoSuchRoute };
const char* route_err_str(RouteErr e);

class RouteTable {
public:
    Status<RouteErr> add(const Prefix& p, RouteTarget t);
    Status<RouteErr> del(const Prefix& p);
    const RouteEntry* lookup(const Ip6Addr& dst, uint32_t* bits_examined = nullptr) const;
    const RouteEntry* exact(const Prefix& p) const;
    std::vector<const RouteEntry*> entries_sorted() const;
    size_t size() const { return trie_.size(); }

private:
    PrefixTrie trie_;
    std::vector<std::unique_ptr<RouteEntry>> slots_;
};

class RoutingTables {
public:
    RouteTable& ensure(uint32_t table_id) { return tables_[table_id]; }
    RouteTable* find(uint32_t table_id);
    const RouteTable* find(uint32_t table_id) const;

    // Longest-prefix-match in one table; UnknownTable if absent.
    Result<const RouteEntry*, RouteErr> lpm_lookup(uint32_t table_id, const Ip6Addr& dst,
                                                   uint32_t* bits_examined = nullptr) const;

    std::vector<uint32_t> table_ids_sorted() const;
    size_t table_count() const { return tables_.size(); }
    void drop_if_empty(uint32_t table_id);

private:
    std::map<uint32_t, RouteTable> tables_;
};

// ---------------------------------------------------------------------------
// VNF interface map: interface -> (SID, SID table) binding plus the learned
// outer headers written by the dynamic proxy. One writer at a time; readers
// take snapshots between writes.

struct VnfBinding {
    Ip6Addr sid{};
    uint32_t table_id = kMainTable;
};

enum class BindErr { DuplicateBinding, UnknownBinding };

class VnfMap {
public:
    Status<BindErr> bind(InterfaceId iif, const Ip6Addr& sid, uint32_t table_id);
    Status<BindErr> unbind(InterfaceId iif);
    std::optional<VnfBinding> binding(InterfaceId iif) const;

    using Headers = std::shared_ptr<const std::vector<uint8_t>>;
    Headers headers(InterfaceId iif) const;
    double last_write(InterfaceId iif) const;  // -inf when never written
    void write_headers(InterfaceId iif, std::span<const uint8_t> bytes, double now);
    bool has_headers(InterfaceId iif) const { return headers(iif) != nullptr; }

    // Evict learned headers (least recently written first) beyond max_entries.
    // Bindings are untouched. Returns the eviction count.
    size_t gc_headers(size_t max_entries);

    size_t binding_count() const;
    struct SlotView {
        InterfaceId iif;
        std::optional<VnfBinding> binding;
        Headers headers;
        double last_write;
    };
    std::vector<SlotView> snapshot() const;

private:
    struct Slot {
        std::optional<VnfBinding> binding;
        Headers headers;
        double last_write = -std::numeric_limits<double>::infinity();
    };
    mutable std::shared_mutex mu_;
    std::unordered_map<InterfaceId, Slot> slots_;
};

// ---------------------------------------------------------------------------
// Policy rules (RPDB)

struct MatchAll {};  // the implicit terminal rule
struct IifMatch {
    InterfaceId iif = kNoInterface;
};
struct ExtendedSrv6 {
    BehaviorKind kind = BehaviorKind::EndAD;
};
using RuleSelector = std::variant<MatchAll, IifMatch, ExtendedSrv6>;

struct PolicyRule {
    uint32_t priority = 0;
    RuleSelector selector;
    uint32_t lookup_table = kMainTable;  // for MatchAll / IifMatch
};

struct LookupTrace {
    uint32_t rules_examined = 0;
    uint32_t tables_visited = 0;
    uint32_t lpm_bits = 0;
    std::optional<uint32_t> matched_rule_priority;
};

enum class RuleErr { DuplicatePriority, NoSuchRule };

// Resolves a behavior id to its kind; lets the RPDB check that an extended
// rule only fires for its own behavior kind.
using BehaviorKindFn = BehaviorKind (*)(const void* ctx, int32_t behavior_id);

class Rpdb {
public:
    Rpdb();  // installs the terminal main-table rule at priority 32766

    Status<RuleErr> add(PolicyRule rule);
    uint32_t next_auto_priority() const;
    Status<RuleErr> del_priority(uint32_t priority);
    const std::vector<PolicyRule>& rules() const { return rules_; }
    size_t user_rule_count() const { return rules_.size() - 1; }

    struct PacketMeta {
        InterfaceId iif = kNoInterface;
        Ip6Addr dst{};
    };
    // Walks rules in priority order; first matching selector whose table
    // lookup resolves wins.
    const RouteEntry* lookup(const PacketMeta& meta, const RoutingTables& tables,
                             const VnfMap& vnfmap, const void* kind_ctx, BehaviorKindFn kind_fn,
                             LookupTrace& trace) const;

private:
    std::vector<PolicyRule> rules_;  // sorted by priority ascending
};

// Constant-time selector of the extended SRv6 rule: incoming interface ->
// (SID, SID table). The SID is then the LPM key.
std::optional<VnfBinding> extended_rule_eval(const VnfMap& map, InterfaceId iif);

}  // namespace sr6

#endif
