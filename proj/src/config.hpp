#ifndef SR6SFC_CONFIG_HPP
#define SR6SFC_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "node.hpp"
#include "result.hpp"

namespace sr6 {

// iproute2-style configuration commands:
//
//   route add <prefix>|default encap seg6local action {End|End.AD|End.AS|End.AM}
//             [chain {inbound|fromVNF}] [oif I] [iif I] [nh6 A] [age S]
//             [segs S1,S2,...] [table N] [dev I]
//   route add <prefix>|default via <nh6> dev <iface> [table N]
//   route del <prefix>|default [table N]
//   rule add iif <iface> table <N> [priority P]
//   rule add seg6local-behaviour <kind> [priority P]
//   rule del priority <P>
//   vnf-bind <iface> sid <SID> [table N]
//   show [all|routes|rules|bindings|cache|counters]
//
// A leading "$", "ip" and "-6" are tolerated and stripped so listings can be
// pasted verbatim. `segs` lists segments in traversal order.

enum class Verb { RouteAdd, RouteDel, RuleAdd, RuleDel, VnfBind, Show };

struct ConfigCommand {
    Verb verb;
    std::map<std::string, std::string> kv;  // keyword -> value arguments
};

struct ParseErr {
    size_t column = 0;  // 1-based; 0 when not column-specific
    std::string msg;
};

Result<ConfigCommand, ParseErr> parse_command(std::string_view line);

// Applies one parsed command. Commands are atomic: on error the node state is
// unchanged. `out` receives the output of `show`.
Status<std::string> apply_command(Node& node, const ConfigCommand& cmd, std::string* out = nullptr);

struct ConfigScriptErr {
    int line = 0;  // 1-based
    std::string msg;
};

// Applies a whole script, stopping at the first failing command.
Status<ConfigScriptErr> apply_config(Node& node, std::string_view script);

// Stable-format dump. Route and rule lines re-parse as `route add` /
// `rule add` command bodies.
std::string show_state(const Node& node, std::string_view section = "all");

}  // namespace sr6

#endif
