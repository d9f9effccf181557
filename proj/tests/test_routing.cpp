#include "doctest.h"

#include <random>
#include <set>

#include "routing.hpp"

using namespace sr6;

namespace {

Ip6Addr A(const char* s) { return *Ip6Addr::parse(s); }
Prefix P(const char* s) { return *Prefix::parse(s); }

// Scan-all-prefixes reference for longest-prefix match.
struct LpmOracle {
    std::vector<std::pair<Prefix, int32_t>> entries;
    std::optional<int32_t> lookup(const Ip6Addr& a) const {
        int best_len = -1;
        int32_t best = -1;
        for (const auto& [p, v] : entries) {
            if (p.contains(a) && int(p.len) > best_len) {
                best_len = p.len;
                best = v;
            }
        }
        return best_len < 0 ? std::nullopt : std::optional<int32_t>(best);
    }
};

BehaviorKind kind_end_ad(const void*, int32_t) { return BehaviorKind::EndAD; }

}  // namespace

TEST_CASE("prefix parsing and canonicalization") {
    CHECK(P("default").len == 0);
    CHECK(P("::/0") == P("default"));
    CHECK(P("fdf1::2/128").len == 128);
    // host bits beyond the length are zeroed
    CHECK(Prefix::of(A("fdf1::ffff"), 64) == P("fdf1::/64"));
    CHECK(P("fdf1::2/64").addr == A("fdf1::"));
    CHECK(!Prefix::parse("fdf1::2/129"));
    CHECK(!Prefix::parse("nonsense"));
}

TEST_CASE("lpm: local SID entry wins over the default route") {
    RouteTable t;
    REQUIRE(t.add(P("fdf1::2/128"), BehaviorTarget{0}).is_ok());
    REQUIRE(t.add(P("::/0"), ForwardTarget{A("fd00::1"), 1}).is_ok());

    const RouteEntry* e = t.lookup(A("fdf1::2"));
    REQUIRE(e);
    CHECK(std::holds_alternative<BehaviorTarget>(e->target));

    // traffic not matching a SID is simply forwarded
    e = t.lookup(A("2000::1"));
    REQUIRE(e);
    CHECK(e->prefix == P("::/0"));
}

TEST_CASE("lpm: /128 wins inside an overlapping /64") {
    RouteTable t;
    REQUIRE(t.add(P("fdf1::/64"), ForwardTarget{{}, 1}).is_ok());
    REQUIRE(t.add(P("fdf1::2/128"), ForwardTarget{{}, 2}).is_ok());
    CHECK(std::get<ForwardTarget>(t.lookup(A("fdf1::2"))->target).oif == 2);
    CHECK(std::get<ForwardTarget>(t.lookup(A("fdf1::3"))->target).oif == 1);
}

TEST_CASE("lpm: equal prefixes are refused at insert time") {
    RouteTable t;
    REQUIRE(t.add(P("fdf1::/64"), ForwardTarget{{}, 1}).is_ok());
    auto st = t.add(P("fdf1::/64"), ForwardTarget{{}, 2});
    REQUIRE(!st.is_ok());
    CHECK(st.error() == RouteErr::DuplicatePrefix);
    CHECK(t.size() == 1);
}

TEST_CASE("lpm: equivalence with the brute-force oracle on random prefix sets") {
    std::mt19937_64 rng{2024};
    auto rand_addr = [&] {
        Ip6Addr a;
        // cluster addresses so prefixes actually overlap
        a.b[0] = 0xfd;
        a.b[1] = uint8_t(rng() % 4);
        for (size_t i = 2; i < 16; ++i) a.b[i] = uint8_t(rng() % 8);
        return a;
    };

    RouteTable t;
    LpmOracle oracle;
    std::set<Prefix> used;
    int32_t next_id = 0;
    for (int i = 0; i < 1000; ++i) {
        Prefix p = Prefix::of(rand_addr(), uint8_t(rng() % 129));
        if (!used.insert(p).second) continue;
        REQUIRE(t.add(p, ForwardTarget{{}, next_id}).is_ok());
        oracle.entries.emplace_back(p, next_id);
        ++next_id;
    }

    for (int q = 0; q < 10000; ++q) {
        Ip6Addr a = rand_addr();
        const RouteEntry* got = t.lookup(a);
        auto want = oracle.lookup(a);
        if (!want) {
            CHECK(got == nullptr);
        } else {
            REQUIRE(got);
            CHECK(std::get<ForwardTarget>(got->target).oif == *want);
        }
    }
}

TEST_CASE("lpm: erase removes exactly the named prefix") {
    RouteTable t;
    REQUIRE(t.add(P("fdf1::/64"), ForwardTarget{{}, 1}).is_ok());
    REQUIRE(t.add(P("fdf1::2/128"), ForwardTarget{{}, 2}).is_ok());
    REQUIRE(t.del(P("fdf1::2/128")).is_ok());
    CHECK(std::get<ForwardTarget>(t.lookup(A("fdf1::2"))->target).oif == 1);
    CHECK(!t.del(P("fdf1::2/128")).is_ok());
    CHECK(t.size() == 1);
}

TEST_CASE("lpm: unknown table is an error") {
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 0});
    CHECK(tables.lpm_lookup(kMainTable, A("::1")).ok());
    auto missing = tables.lpm_lookup(100, A("::1"));
    REQUIRE(!missing.ok());
    CHECK(missing.error() == RouteErr::UnknownTable);
}

TEST_CASE("rpdb: rules are scanned in priority order and the count is exact") {
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 0});
    VnfMap map;
    Rpdb rpdb;
    // 80 iif rules that won't match (interfaces 1000+k), before the default rule
    for (uint32_t k = 0; k < 80; ++k) {
        REQUIRE(rpdb.add({100 + k, IifMatch{InterfaceId(1000 + k)}, 200 + k}).is_ok());
    }
    LookupTrace tr;
    const RouteEntry* e = rpdb.lookup({5, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
    REQUIRE(e);
    CHECK(tr.rules_examined == 81);
    CHECK(tr.matched_rule_priority == kDefaultRulePriority);
}

TEST_CASE("rpdb: empty custom rules resolve via the default rule in one step") {
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{A("fd00::1"), 7});
    VnfMap map;
    Rpdb rpdb;
    LookupTrace tr;
    const RouteEntry* e = rpdb.lookup({0, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
    REQUIRE(e);
    CHECK(std::get<ForwardTarget>(e->target).oif == 7);
    CHECK(tr.rules_examined == 1);
}

TEST_CASE("rpdb: iif rule directs lookup into its table") {
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 0});
    tables.ensure(100).add(P("::/0"), ForwardTarget{{}, 42});
    VnfMap map;
    Rpdb rpdb;
    REQUIRE(rpdb.add({100, IifMatch{3}, 100}).is_ok());

    LookupTrace tr;
    const RouteEntry* e = rpdb.lookup({3, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
    REQUIRE(e);
    CHECK(std::get<ForwardTarget>(e->target).oif == 42);
    CHECK(tr.rules_examined == 1);
    CHECK(tr.matched_rule_priority == 100);

    // a packet from another interface falls through to main
    LookupTrace tr2;
    e = rpdb.lookup({4, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr2);
    REQUIRE(e);
    CHECK(std::get<ForwardTarget>(e->target).oif == 0);
    CHECK(tr2.rules_examined == 2);
}

TEST_CASE("rpdb: duplicate priorities are refused") {
    Rpdb rpdb;
    REQUIRE(rpdb.add({100, IifMatch{1}, 100}).is_ok());
    auto st = rpdb.add({100, IifMatch{2}, 101});
    REQUIRE(!st.is_ok());
    CHECK(st.error() == RuleErr::DuplicatePriority);
}

TEST_CASE("rpdb: first match wins against a naive scan oracle") {
    std::mt19937_64 rng{7};
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 9999});
    for (uint32_t t = 0; t < 20; ++t)
        tables.ensure(300 + t).add(P("::/0"), ForwardTarget{{}, InterfaceId(t)});
    VnfMap map;
    Rpdb rpdb;
    std::vector<PolicyRule> mirror;
    for (int i = 0; i < 50; ++i) {
        PolicyRule r{uint32_t(10 + i * 3), IifMatch{InterfaceId(rng() % 8)},
                     300 + uint32_t(rng() % 20)};
        REQUIRE(rpdb.add(r).is_ok());
        mirror.push_back(r);
    }
    std::sort(mirror.begin(), mirror.end(),
              [](const PolicyRule& a, const PolicyRule& b) { return a.priority < b.priority; });

    for (int q = 0; q < 500; ++q) {
        InterfaceId iif = InterfaceId(rng() % 10);
        LookupTrace tr;
        const RouteEntry* got =
            rpdb.lookup({iif, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
        // oracle: scan the sorted mirror; the first whose selector matches wins
        uint32_t examined = 0;
        const PolicyRule* hit = nullptr;
        for (const auto& r : mirror) {
            ++examined;
            if (std::get<IifMatch>(r.selector).iif == iif) {
                hit = &r;
                break;
            }
        }
        if (!hit) ++examined;  // the terminal main rule
        REQUIRE(got);
        CHECK(tr.rules_examined == examined);
        if (hit)
            CHECK(tr.matched_rule_priority == hit->priority);
        else
            CHECK(tr.matched_rule_priority == kDefaultRulePriority);
    }
}

TEST_CASE("vnf map: register, duplicate, unregister") {
    VnfMap map;
    REQUIRE(map.bind(3, A("fdf1::2"), kMainTable).is_ok());
    auto dup = map.bind(3, A("fdf1::3"), kMainTable);
    REQUIRE(!dup.is_ok());
    CHECK(dup.error() == BindErr::DuplicateBinding);
    CHECK(map.binding(3)->sid == A("fdf1::2"));
    REQUIRE(map.unbind(3).is_ok());
    auto missing = map.unbind(3);
    REQUIRE(!missing.is_ok());
    CHECK(missing.error() == BindErr::UnknownBinding);
    CHECK(!map.binding(3));
}

TEST_CASE("extended rule: hit returns the binding, miss leaves the scan running") {
    VnfMap map;
    REQUIRE(map.bind(0, A("fdf1::2"), kMainTable).is_ok());
    auto hit = extended_rule_eval(map, 0);
    REQUIRE(hit);
    CHECK(hit->sid == A("fdf1::2"));
    CHECK(hit->table_id == kMainTable);
    CHECK(!extended_rule_eval(map, 1));
}

TEST_CASE("extended rule: constant rules_examined regardless of binding count") {
    for (size_t n : {1u, 20u, 40u, 80u, 160u}) {
        RoutingTables tables;
        tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 0});
        VnfMap map;
        for (size_t k = 0; k < n; ++k) {
            Ip6Addr sid = A("fdf1::");
            sid.b[13] = 1;
            sid.b[14] = uint8_t(k >> 8);
            sid.b[15] = uint8_t(k & 0xff);
            REQUIRE(map.bind(InterfaceId(k), sid, kMainTable).is_ok());
            REQUIRE(tables.ensure(kMainTable)
                        .add(Prefix::of(sid, 128), BehaviorTarget{int32_t(k)})
                        .is_ok());
        }
        Rpdb rpdb;
        REQUIRE(rpdb.add({kExtRuleDefaultPriority, ExtendedSrv6{BehaviorKind::EndAD}, 0}).is_ok());

        for (size_t k : {size_t(0), n / 2, n - 1}) {
            LookupTrace tr;
            const RouteEntry* e =
                rpdb.lookup({InterfaceId(k), A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
            REQUIRE(e);
            CHECK(std::holds_alternative<BehaviorTarget>(e->target));
            CHECK(tr.rules_examined == 1);  // the extended rule sits at position 1
        }
    }
}

TEST_CASE("extended rule: only fires for its own behavior kind") {
    RoutingTables tables;
    tables.ensure(kMainTable).add(P("::/0"), ForwardTarget{{}, 0});
    tables.ensure(kMainTable).add(P("fdf1::2/128"), BehaviorTarget{0});
    VnfMap map;
    REQUIRE(map.bind(0, A("fdf1::2"), kMainTable).is_ok());
    Rpdb rpdb;
    REQUIRE(rpdb.add({kExtRuleDefaultPriority, ExtendedSrv6{BehaviorKind::EndAM}, 0}).is_ok());
    LookupTrace tr;
    // the bound behavior is End.AD; the End.AM rule must fall through to main
    const RouteEntry* e = rpdb.lookup({0, A("2000::1")}, tables, map, nullptr, kind_end_ad, tr);
    REQUIRE(e);
    CHECK(std::holds_alternative<ForwardTarget>(e->target));
    CHECK(tr.rules_examined == 2);
}

TEST_CASE("vnf map: random register/unregister state machine") {
    std::mt19937_64 rng{99};
    VnfMap map;
    std::set<InterfaceId> bound;
    for (size_t k = 0; k < 160; ++k) {
        REQUIRE(map.bind(InterfaceId(k), A("fdf1::2"), kMainTable).is_ok());
        bound.insert(InterfaceId(k));
    }
    for (int step = 0; step < 2000; ++step) {
        InterfaceId iif = InterfaceId(rng() % 200);
        if (rng() % 2) {
            auto st = map.bind(iif, A("fdf1::2"), kMainTable);
            CHECK(st.is_ok() == !bound.count(iif));
            bound.insert(iif);
        } else {
            auto st = map.unbind(iif);
            CHECK(st.is_ok() == bound.count(iif));
            bound.erase(iif);
        }
        CHECK(bool(extended_rule_eval(map, iif)) == bound.count(iif));
    }
    CHECK(map.binding_count() == bound.size());
}

TEST_CASE("lpm bit accounting is deterministic and depth-based") {
    RouteTable t;
    REQUIRE(t.add(P("::/0"), ForwardTarget{{}, 0}).is_ok());
    REQUIRE(t.add(P("fdf1::2/128"), ForwardTarget{{}, 1}).is_ok());
    uint32_t bits = 0;
    t.lookup(A("fdf1::2"), &bits);
    CHECK(bits == 128);
    t.lookup(A("2000::1"), &bits);
    CHECK(bits <= 2);  // diverges within the first bits
}
