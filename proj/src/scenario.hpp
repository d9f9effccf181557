#ifndef SR6SFC_SCENARIO_HPP
#define SR6SFC_SCENARIO_HPP

#include <string>
#include <vector>

#include "bench.hpp"

namespace sr6 {

// Declarative scenario file. Sections run until a line holding "end":
//
//   scenario <name>
//
//   topology standard
//     mode baseline|policy|extrule|preroute
//     vnfs N
//     [age S] [target_vnf K] [plain_rules N] [ext_rule_unbound] [no_vnf]
//   end
//
//   config <node>          # extra iproute2-style commands, applied in order
//     route add ...
//   end
//
//   costmodel
//     base X  per_rule X  per_lpm_bit X  budget X  queue N   # one per line
//   end
//
//   traffic
//     payload N  duration S  seed N
//   end
//
//   bench
//     engine cost|wallclock
//     threshold 0.005
//     precision P
//     packets N            # wallclock batch size
//     reps N               # wallclock repetitions
//     sweep <rule_count|mode|age> <v1> <v2> ...
//     csv <path>
//     assert decreasing | assert flat [tol] | assert order A >= B >= C
//   end

struct ScenarioAssert {
    enum class Kind { Decreasing, Flat, Order } kind = Kind::Decreasing;
    double tol = 0.0;                        // Flat: allowed (max-min)/max
    std::vector<std::string> order_values;   // Order: value labels, best first
};

struct ScenarioDef {
    std::string name = "scenario";
    StandardOpts topo;
    std::vector<std::pair<std::string, std::string>> configs;  // node -> script
    CostModel cm;
    TrafficSpec traffic;
    BenchEngine engine = BenchEngine::Cost;
    PdrOptions pdr;
    size_t wc_packets = 20000;
    int wc_reps = 15;
    std::optional<SweepVariable> sweep_variable;
    std::vector<std::string> sweep_values;
    std::string csv_path;
    std::vector<ScenarioAssert> asserts;
};

struct ScenarioErr {
    int line = 0;  // 0 when not line-specific
    std::string msg;
};

Result<ScenarioDef, ScenarioErr> parse_scenario(const std::string& text);
Result<ScenarioDef, ScenarioErr> load_scenario(const std::string& path);

struct ScenarioOutcome {
    std::vector<SweepRow> rows;
    bool assertions_ok = true;
    std::vector<std::string> messages;  // one line per assertion
    std::string csv_path;               // empty when no csv requested
};

Result<ScenarioOutcome, ScenarioErr> run_scenario(const ScenarioDef& def,
                                                  const std::string& csv_override = "");

}  // namespace sr6

#endif
