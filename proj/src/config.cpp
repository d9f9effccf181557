#include "config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sr6 {

namespace {

struct Token {
    std::string text;
    size_t col;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        out.push_back({std::string(line.substr(start, i - start)), start + 1});
    }
    return out;
}

std::string fmt_age(double age) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", age);
    return buf;
}

std::optional<uint32_t> parse_table_id(std::string_view s) {
    if (s == "main") return kMainTable;
    if (s == "local") return 255u;
    uint32_t v = 0;
    if (s.empty()) return std::nullopt;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + uint32_t(c - '0');
    }
    return v;
}

std::string table_name(uint32_t id) { return id == kMainTable ? "main" : std::to_string(id); }

}  // namespace

Result<ConfigCommand, ParseErr> parse_command(std::string_view line) {
    auto toks = tokenize(line);
    size_t i = 0;
    // Paper listings paste directly: tolerate "$ ip -6 route add ...".
    while (i < toks.size() && (toks[i].text == "$" || toks[i].text == "ip" || toks[i].text == "-6"))
        ++i;
    if (i >= toks.size()) return ParseErr{0, "empty command"};

    auto need = [&](const char* what) -> std::optional<ParseErr> {
        if (i < toks.size()) return std::nullopt;
        return ParseErr{line.size() + 1, std::string("missing ") + what};
    };

    ConfigCommand cmd;
    const std::string& head = toks[i].text;

    if (head == "route") {
        ++i;
        if (auto e = need("add|del")) return *e;
        const std::string& op = toks[i].text;
        if (op != "add" && op != "del") return ParseErr{toks[i].col, "expected add or del"};
        cmd.verb = op == "add" ? Verb::RouteAdd : Verb::RouteDel;
        ++i;
        if (auto e = need("prefix")) return *e;
        cmd.kv["prefix"] = toks[i].text;
        ++i;
        if (cmd.verb == Verb::RouteDel) {
            while (i < toks.size()) {
                if (toks[i].text == "table") {
                    ++i;
                    if (auto e = need("table id")) return *e;
                    cmd.kv["table"] = toks[i].text;
                    ++i;
                } else {
                    return ParseErr{toks[i].col, "unknown keyword '" + toks[i].text + "'"};
                }
            }
            return cmd;
        }
        if (i < toks.size() && toks[i].text == "encap") {
            ++i;
            if (auto e = need("seg6local")) return *e;
            if (toks[i].text != "seg6local")
                return ParseErr{toks[i].col, "expected seg6local after encap"};
            ++i;
            if (auto e = need("action")) return *e;
            if (toks[i].text != "action") return ParseErr{toks[i].col, "expected action"};
            ++i;
            if (auto e = need("behavior kind")) return *e;
            if (!behavior_kind_parse(toks[i].text))
                return ParseErr{toks[i].col, "unknown behavior '" + toks[i].text + "'"};
            cmd.kv["form"] = "seg6local";
            cmd.kv["action"] = toks[i].text;
            ++i;
            while (i < toks.size()) {
                const std::string& kw = toks[i].text;
                if (kw == "chain" || kw == "oif" || kw == "iif" || kw == "nh6" || kw == "age" ||
                    kw == "segs" || kw == "table" || kw == "dev") {
                    ++i;
                    if (auto e = need(kw.c_str())) return *e;
                    cmd.kv[kw] = toks[i].text;
                    ++i;
                } else {
                    return ParseErr{toks[i].col, "unknown keyword '" + kw + "'"};
                }
            }
            if (cmd.kv.count("chain")) {
                const std::string& c = cmd.kv["chain"];
                if (c != "inbound" && c != "fromVNF")
                    return ParseErr{0, "chain must be inbound or fromVNF"};
            }
            if (cmd.kv["action"] == "End.AS" && !cmd.kv.count("segs"))
                return ParseErr{0, "End.AS requires segs"};
            return cmd;
        }
        if (i < toks.size() && toks[i].text == "via") {
            ++i;
            if (auto e = need("next hop")) return *e;
            cmd.kv["form"] = "via";
            cmd.kv["via"] = toks[i].text;
            ++i;
            while (i < toks.size()) {
                const std::string& kw = toks[i].text;
                if (kw == "dev" || kw == "table") {
                    ++i;
                    if (auto e = need(kw.c_str())) return *e;
                    cmd.kv[kw] = toks[i].text;
                    ++i;
                } else {
                    return ParseErr{toks[i].col, "unknown keyword '" + kw + "'"};
                }
            }
            if (!cmd.kv.count("dev")) return ParseErr{0, "via route requires dev"};
            return cmd;
        }
        if (i < toks.size()) return ParseErr{toks[i].col, "expected encap or via"};
        return ParseErr{line.size() + 1, "missing encap or via"};
    }

    if (head == "rule") {
        ++i;
        if (auto e = need("add|del")) return *e;
        const std::string& op = toks[i].text;
        if (op != "add" && op != "del") return ParseErr{toks[i].col, "expected add or del"};
        cmd.verb = op == "add" ? Verb::RuleAdd : Verb::RuleDel;
        ++i;
        while (i < toks.size()) {
            const std::string& kw = toks[i].text;
            if (kw == "iif" || kw == "table" || kw == "priority") {
                ++i;
                if (auto e = need(kw.c_str())) return *e;
                cmd.kv[kw] = toks[i].text;
                ++i;
            } else if (kw == "seg6local-behaviour" || kw == "seg6local-behavior") {
                ++i;
                if (auto e = need("behavior kind")) return *e;
                if (!behavior_kind_parse(toks[i].text))
                    return ParseErr{toks[i].col, "unknown behavior '" + toks[i].text + "'"};
                cmd.kv["seg6local-behaviour"] = toks[i].text;
                ++i;
            } else {
                return ParseErr{toks[i].col, "unknown keyword '" + kw + "'"};
            }
        }
        if (cmd.verb == Verb::RuleAdd) {
            bool iif_form = cmd.kv.count("iif");
            bool ext_form = cmd.kv.count("seg6local-behaviour");
            if (iif_form == ext_form)
                return ParseErr{0, "rule add needs either iif+table or seg6local-behaviour"};
            if (iif_form && !cmd.kv.count("table")) return ParseErr{0, "iif rule requires table"};
        } else if (!cmd.kv.count("priority")) {
            return ParseErr{0, "rule del requires priority"};
        }
        return cmd;
    }

    if (head == "vnf-bind") {
        cmd.verb = Verb::VnfBind;
        ++i;
        if (auto e = need("interface")) return *e;
        cmd.kv["iface"] = toks[i].text;
        ++i;
        while (i < toks.size()) {
            const std::string& kw = toks[i].text;
            if (kw == "sid" || kw == "table") {
                ++i;
                if (auto e = need(kw.c_str())) return *e;
                cmd.kv[kw] = toks[i].text;
                ++i;
            } else {
                return ParseErr{toks[i].col, "unknown keyword '" + kw + "'"};
            }
        }
        if (!cmd.kv.count("sid")) return ParseErr{0, "vnf-bind requires sid"};
        return cmd;
    }

    if (head == "show") {
        cmd.verb = Verb::Show;
        ++i;
        if (i < toks.size()) {
            const std::string& s = toks[i].text;
            if (s != "all" && s != "routes" && s != "rules" && s != "bindings" && s != "cache" &&
                s != "counters")
                return ParseErr{toks[i].col, "unknown section '" + s + "'"};
            cmd.kv["section"] = s;
            ++i;
        }
        if (i < toks.size()) return ParseErr{toks[i].col, "trailing tokens after show"};
        return cmd;
    }

    return ParseErr{toks[i].col, "unknown command '" + head + "'"};
}

// ---------------------------------------------------------------------------
// Apply

namespace {

Status<std::string> apply_route_add(Node& node, const ConfigCommand& cmd) {
    auto get = [&](const char* k) -> std::optional<std::string> {
        auto it = cmd.kv.find(k);
        if (it == cmd.kv.end()) return std::nullopt;
        return it->second;
    };

    auto prefix = Prefix::parse(*get("prefix"));
    if (!prefix) return std::string("bad prefix '" + *get("prefix") + "'");
    uint32_t table_id = kMainTable;
    if (auto t = get("table")) {
        auto id = parse_table_id(*t);
        if (!id) return std::string("bad table '" + *t + "'");
        table_id = *id;
    }
    if (const RouteTable* t = node.tables().find(table_id); t && t->exact(*prefix))
        return std::string("route exists: " + prefix->str() + " table " + table_name(table_id));

    if (*get("form") == "via") {
        auto nh = Ip6Addr::parse(*get("via"));
        if (!nh) return std::string("bad next hop '" + *get("via") + "'");
        InterfaceId oif = node.iface(*get("dev"));
        if (oif == kNoInterface) return std::string("unknown interface '" + *get("dev") + "'");
        node.tables().ensure(table_id).add(*prefix, ForwardTarget{*nh, oif});
        return {};
    }

    BehaviorKind kind = *behavior_kind_parse(*get("action"));
    ChainDir chain = ChainDir::Bidirectional;
    if (auto c = get("chain")) chain = *c == "inbound" ? ChainDir::Inbound : ChainDir::FromVnf;

    auto inst = std::make_unique<BehaviorInstance>();
    inst->kind = kind;
    inst->chain = chain;
    inst->sid = prefix->addr;
    inst->table_id = table_id;

    if (auto o = get("oif")) {
        inst->oif = node.iface(*o);
        if (inst->oif == kNoInterface) return std::string("unknown interface '" + *o + "'");
    }
    if (auto o = get("iif")) {
        inst->iif = node.iface(*o);
        if (inst->iif == kNoInterface) return std::string("unknown interface '" + *o + "'");
    }
    if (auto d = get("dev"); d && node.iface(*d) == kNoInterface)
        return std::string("unknown interface '" + *d + "'");
    if (auto n = get("nh6")) {
        auto a = Ip6Addr::parse(*n);
        if (!a) return std::string("bad nh6 '" + *n + "'");
        inst->nh6 = *a;
    }
    if (auto a = get("age")) {
        char* end = nullptr;
        inst->age = std::strtod(a->c_str(), &end);
        if (!end || *end || inst->age < 0) return std::string("bad age '" + *a + "'");
    }
    if (auto s = get("segs")) {
        std::vector<Ip6Addr> traversal;
        size_t start = 0;
        const std::string& str = *s;
        while (start <= str.size()) {
            size_t comma = str.find(',', start);
            size_t end = comma == std::string::npos ? str.size() : comma;
            auto a = Ip6Addr::parse(std::string_view(str).substr(start, end - start));
            if (!a) return std::string("bad segs '" + str + "'");
            traversal.push_back(*a);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (traversal.empty()) return std::string("empty segs");
        std::vector<Ip6Addr> storage(traversal.rbegin(), traversal.rend());
        inst->static_headers = make_static_headers(inst->sid, storage);
    }

    if (kind != BehaviorKind::End) {
        if (chain == ChainDir::Inbound || chain == ChainDir::Bidirectional) {
            if (inst->oif == kNoInterface) return std::string("behavior requires oif");
        } else if (inst->iif == kNoInterface) {
            return std::string("chain fromVNF requires iif");
        }
    }

    bool want_bind = kind != BehaviorKind::End && chain == ChainDir::Bidirectional;
    if (want_bind && node.vnfmap().binding(inst->oif))
        return std::string("interface already bound: " + node.iface_name(inst->oif));

    InterfaceId bind_oif = inst->oif;
    Ip6Addr sid = inst->sid;
    int32_t id = node.add_behavior(std::move(inst));
    node.tables().ensure(table_id).add(*prefix, BehaviorTarget{id});
    if (want_bind) node.vnfmap().bind(bind_oif, sid, table_id);
    if (node.mode() == NodeMode::Preroute) node.srext_register(sid, id);
    return {};
}

Status<std::string> apply_route_del(Node& node, const ConfigCommand& cmd) {
    auto prefix = Prefix::parse(cmd.kv.at("prefix"));
    if (!prefix) return std::string("bad prefix");
    uint32_t table_id = kMainTable;
    if (auto it = cmd.kv.find("table"); it != cmd.kv.end()) {
        auto id = parse_table_id(it->second);
        if (!id) return std::string("bad table '" + it->second + "'");
        table_id = *id;
    }
    RouteTable* t = node.tables().find(table_id);
    const RouteEntry* e = t ? t->exact(*prefix) : nullptr;
    if (!e) return std::string("no such route: " + prefix->str() + " table " + table_name(table_id));

    if (const auto* bt = std::get_if<BehaviorTarget>(&e->target)) {
        BehaviorInstance* b = node.behavior(bt->behavior_id);
        if (b) {
            if (b->oif != kNoInterface) {
                if (auto bound = node.vnfmap().binding(b->oif);
                    bound && bound->sid == b->sid && bound->table_id == b->table_id)
                    node.vnfmap().unbind(b->oif);
            }
            if (node.mode() == NodeMode::Preroute) node.srext_unregister(b->sid);
            node.remove_behavior(bt->behavior_id);
        }
    }
    t->del(*prefix);
    node.tables().drop_if_empty(table_id);
    return {};
}

Status<std::string> apply_rule_add(Node& node, const ConfigCommand& cmd) {
    PolicyRule rule;
    if (auto it = cmd.kv.find("priority"); it != cmd.kv.end()) {
        auto p = parse_table_id(it->second);  // plain unsigned parse
        if (!p) return std::string("bad priority '" + it->second + "'");
        rule.priority = *p;
    } else {
        rule.priority = cmd.kv.count("iif") ? node.rpdb().next_auto_priority()
                                            : kExtRuleDefaultPriority;
    }
    if (auto it = cmd.kv.find("iif"); it != cmd.kv.end()) {
        InterfaceId iif = node.iface(it->second);
        if (iif == kNoInterface) return std::string("unknown interface '" + it->second + "'");
        auto tid = parse_table_id(cmd.kv.at("table"));
        if (!tid) return std::string("bad table '" + cmd.kv.at("table") + "'");
        rule.selector = IifMatch{iif};
        rule.lookup_table = *tid;
    } else {
        BehaviorKind kind = *behavior_kind_parse(cmd.kv.at("seg6local-behaviour"));
        for (const auto& r : node.rpdb().rules())
            if (const auto* e = std::get_if<ExtendedSrv6>(&r.selector); e && e->kind == kind)
                return std::string("extended rule already installed for ") +
                       behavior_kind_str(kind);
        rule.selector = ExtendedSrv6{kind};
    }
    if (auto st = node.rpdb().add(rule); !st)
        return std::string("duplicate rule priority " + std::to_string(rule.priority));
    return {};
}

Status<std::string> apply_rule_del(Node& node, const ConfigCommand& cmd) {
    auto p = parse_table_id(cmd.kv.at("priority"));
    if (!p) return std::string("bad priority");
    if (auto st = node.rpdb().del_priority(*p); !st)
        return std::string("no rule with priority " + std::to_string(*p));
    return {};
}

Status<std::string> apply_vnf_bind(Node& node, const ConfigCommand& cmd) {
    InterfaceId iif = node.iface(cmd.kv.at("iface"));
    if (iif == kNoInterface) return std::string("unknown interface '" + cmd.kv.at("iface") + "'");
    auto sid = Ip6Addr::parse(cmd.kv.at("sid"));
    if (!sid) return std::string("bad sid '" + cmd.kv.at("sid") + "'");
    uint32_t table_id = kMainTable;
    if (auto it = cmd.kv.find("table"); it != cmd.kv.end()) {
        auto t = parse_table_id(it->second);
        if (!t) return std::string("bad table '" + it->second + "'");
        table_id = *t;
    }
    if (auto st = node.vnfmap().bind(iif, *sid, table_id); !st)
        return std::string("interface already bound: " + cmd.kv.at("iface"));
    return {};
}

}  // namespace

Status<std::string> apply_command(Node& node, const ConfigCommand& cmd, std::string* out) {
    switch (cmd.verb) {
        case Verb::RouteAdd: return apply_route_add(node, cmd);
        case Verb::RouteDel: return apply_route_del(node, cmd);
        case Verb::RuleAdd: return apply_rule_add(node, cmd);
        case Verb::RuleDel: return apply_rule_del(node, cmd);
        case Verb::VnfBind: return apply_vnf_bind(node, cmd);
        case Verb::Show: {
            auto it = cmd.kv.find("section");
            std::string s = show_state(node, it == cmd.kv.end() ? "all" : it->second);
            if (out) *out = std::move(s);
            return {};
        }
    }
    return std::string("unhandled verb");
}

Status<ConfigScriptErr> apply_config(Node& node, std::string_view script) {
    int lineno = 0;
    size_t pos = 0;
    while (pos <= script.size()) {
        size_t nl = script.find('\n', pos);
        std::string_view line = script.substr(pos, nl == std::string_view::npos ? script.size() - pos
                                                                                : nl - pos);
        ++lineno;
        pos = nl == std::string_view::npos ? script.size() + 1 : nl + 1;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string_view::npos || line[start] == '#') continue;
        auto parsed = parse_command(line);
        if (!parsed)
            return ConfigScriptErr{lineno, parsed.error().msg +
                                               (parsed.error().column
                                                    ? " (col " + std::to_string(parsed.error().column) + ")"
                                                    : "")};
        if (auto st = apply_command(node, parsed.value()); !st)
            return ConfigScriptErr{lineno, st.error()};
    }
    return {};
}

// ---------------------------------------------------------------------------
// State dump

namespace {

std::vector<Ip6Addr> static_segments_traversal(const std::vector<uint8_t>& hdrs) {
    std::vector<Ip6Addr> out;
    if (hdrs.size() < kIpv6HdrLen + 8) return out;
    size_t n = size_t(hdrs[44]) + 1;
    for (size_t i = 0; i < n && kIpv6HdrLen + 8 + 16 * (i + 1) <= hdrs.size(); ++i) {
        Ip6Addr a;
        std::memcpy(a.b.data(), hdrs.data() + kIpv6HdrLen + 8 + 16 * i, 16);
        out.push_back(a);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

void dump_route_line(std::ostringstream& os, const Node& node, const RouteEntry& e,
                     uint32_t table_id) {
    os << e.prefix.str();
    if (const auto* fwd = std::get_if<ForwardTarget>(&e.target)) {
        os << " via " << fwd->next_hop.str() << " dev " << node.iface_name(fwd->oif);
    } else {
        const BehaviorInstance* b = node.behavior(std::get<BehaviorTarget>(e.target).behavior_id);
        os << " encap seg6local action " << behavior_kind_str(b->kind);
        if (b->chain != ChainDir::Bidirectional) os << " chain " << chain_dir_str(b->chain);
        if (b->oif != kNoInterface) os << " oif " << node.iface_name(b->oif);
        if (b->iif != kNoInterface) os << " iif " << node.iface_name(b->iif);
        if (b->kind == BehaviorKind::EndAD || b->kind == BehaviorKind::EndAS) {
            if (b->nh6 != Ip6Addr{}) os << " nh6 " << b->nh6.str();
            if (b->kind == BehaviorKind::EndAD) os << " age " << fmt_age(b->age);
        }
        if (b->static_headers) {
            auto segs = static_segments_traversal(*b->static_headers);
            os << " segs ";
            for (size_t i = 0; i < segs.size(); ++i) os << (i ? "," : "") << segs[i].str();
        }
    }
    if (table_id != kMainTable) os << " table " << table_id;
    os << "\n";
}

}  // namespace

std::string show_state(const Node& node, std::string_view section) {
    std::ostringstream os;
    bool all = section == "all";

    if (all || section == "routes") {
        os << "routes\n";
        std::vector<uint32_t> ids = node.tables().table_ids_sorted();
        // main first, then ascending
        std::sort(ids.begin(), ids.end(), [](uint32_t a, uint32_t b) {
            if ((a == kMainTable) != (b == kMainTable)) return a == kMainTable;
            return a < b;
        });
        for (uint32_t id : ids) {
            const RouteTable* t = node.tables().find(id);
            for (const RouteEntry* e : t->entries_sorted()) dump_route_line(os, node, *e, id);
        }
    }
    if (all || section == "rules") {
        os << "rules\n";
        for (const auto& r : node.rpdb().rules()) {
            if (std::holds_alternative<MatchAll>(r.selector)) continue;  // implicit terminal rule
            if (const auto* m = std::get_if<IifMatch>(&r.selector))
                os << "iif " << node.iface_name(m->iif) << " table " << r.lookup_table
                   << " priority " << r.priority << "\n";
            else
                os << "seg6local-behaviour "
                   << behavior_kind_str(std::get<ExtendedSrv6>(r.selector).kind) << " priority "
                   << r.priority << "\n";
        }
    }
    if (all || section == "bindings") {
        os << "bindings\n";
        for (const auto& s : node.vnfmap().snapshot())
            if (s.binding)
                os << node.iface_name(s.iif) << " sid " << s.binding->sid.str() << " table "
                   << table_name(s.binding->table_id) << "\n";
    }
    if (all || section == "cache") {
        os << "cache\n";
        for (const auto& s : node.vnfmap().snapshot()) {
            if (!s.headers) continue;
            char t[32];
            std::snprintf(t, sizeof t, "%.3f", s.last_write);
            os << node.iface_name(s.iif) << " last_write " << t << " len " << s.headers->size()
               << " hex " << to_hex(*s.headers) << "\n";
        }
    }
    if (all || section == "counters") {
        os << "counters\n";
        for (const auto& [k, v] : node.counters_snapshot()) os << k << " " << v << "\n";
    }
    return os.str();
}

}  // namespace sr6
