#include "scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "config.hpp"

namespace sr6 {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

bool parse_num(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && !*end;
}

bool parse_count(const std::string& s, size_t& out) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (!end || *end || v < 0) return false;
    out = size_t(v);
    return true;
}

}  // namespace

Result<ScenarioDef, ScenarioErr> parse_scenario(const std::string& text) {
    ScenarioDef def;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string section;       // "", "topology", "config", "costmodel", "traffic", "bench"
    std::string config_node;
    std::string config_body;
    bool have_topology = false;

    auto err = [&](const std::string& msg) { return ScenarioErr{lineno, msg}; };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        auto toks = split_ws(line);
        if (toks.empty()) continue;

        if (section.empty()) {
            if (toks[0] == "scenario" && toks.size() == 2) {
                def.name = toks[1];
            } else if (toks[0] == "topology") {
                if (toks.size() != 2 || toks[1] != "standard")
                    return err("expected: topology standard");
                section = "topology";
                have_topology = true;
            } else if (toks[0] == "config") {
                if (toks.size() != 2) return err("expected: config <node>");
                section = "config";
                config_node = toks[1];
                config_body.clear();
            } else if (toks[0] == "costmodel" || toks[0] == "traffic" || toks[0] == "bench") {
                if (toks.size() != 1) return err("unexpected tokens after section name");
                section = toks[0];
            } else {
                return err("unknown directive '" + toks[0] + "'");
            }
            continue;
        }

        if (toks[0] == "end" && toks.size() == 1) {
            if (section == "config") def.configs.emplace_back(config_node, config_body);
            section.clear();
            continue;
        }

        if (section == "config") {
            config_body += line + "\n";
            continue;
        }

        if (section == "topology") {
            const std::string& k = toks[0];
            if (k == "mode" && toks.size() == 2) {
                auto m = node_mode_parse(toks[1]);
                if (!m) return err("bad mode '" + toks[1] + "'");
                def.topo.mode = *m;
            } else if (k == "vnfs" && toks.size() == 2) {
                if (!parse_count(toks[1], def.topo.vnfs)) return err("bad vnfs");
            } else if (k == "target_vnf" && toks.size() == 2) {
                if (!parse_count(toks[1], def.topo.target_vnf)) return err("bad target_vnf");
            } else if (k == "age" && toks.size() == 2) {
                if (!parse_num(toks[1], def.topo.age)) return err("bad age");
            } else if (k == "plain_rules" && toks.size() == 2) {
                if (!parse_count(toks[1], def.topo.extra_plain_rules)) return err("bad plain_rules");
            } else if (k == "ext_rule_unbound" && toks.size() == 1) {
                def.topo.ext_rule_unbound = true;
            } else if (k == "no_vnf" && toks.size() == 1) {
                def.topo.skip_vnf_wiring = true;
            } else {
                return err("unknown topology key '" + k + "'");
            }
            continue;
        }

        if (section == "costmodel") {
            if (toks.size() != 2) return err("costmodel lines are 'key value'");
            double v;
            if (!parse_num(toks[1], v)) return err("bad number '" + toks[1] + "'");
            if (toks[0] == "base")
                def.cm.base = v;
            else if (toks[0] == "per_rule")
                def.cm.per_rule = v;
            else if (toks[0] == "per_lpm_bit")
                def.cm.per_lpm_bit = v;
            else if (toks[0] == "budget")
                def.cm.budget = v;
            else if (toks[0] == "queue")
                def.cm.queue_len = size_t(v);
            else
                return err("unknown costmodel key '" + toks[0] + "'");
            continue;
        }

        if (section == "traffic") {
            if (toks.size() != 2) return err("traffic lines are 'key value'");
            if (toks[0] == "payload") {
                if (!parse_count(toks[1], def.traffic.payload_bytes)) return err("bad payload");
            } else if (toks[0] == "duration") {
                if (!parse_num(toks[1], def.traffic.duration)) return err("bad duration");
                def.pdr.duration = def.traffic.duration;
            } else if (toks[0] == "ps") {
                if (!parse_num(toks[1], def.traffic.ps)) return err("bad ps");
            } else if (toks[0] == "seed") {
                size_t s;
                if (!parse_count(toks[1], s)) return err("bad seed");
                def.traffic.seed = s;
            } else {
                return err("unknown traffic key '" + toks[0] + "'");
            }
            continue;
        }

        if (section == "bench") {
            const std::string& k = toks[0];
            if (k == "engine" && toks.size() == 2) {
                if (toks[1] == "cost")
                    def.engine = BenchEngine::Cost;
                else if (toks[1] == "wallclock")
                    def.engine = BenchEngine::WallClock;
                else
                    return err("engine must be cost or wallclock");
            } else if (k == "threshold" && toks.size() == 2) {
                auto r = Ratio::parse(toks[1]);
                if (!r) return err("bad threshold '" + toks[1] + "'");
                def.pdr.threshold = *r;
            } else if (k == "precision" && toks.size() == 2) {
                if (!parse_num(toks[1], def.pdr.precision)) return err("bad precision");
            } else if (k == "max_rate" && toks.size() == 2) {
                if (!parse_num(toks[1], def.pdr.max_rate)) return err("bad max_rate");
            } else if (k == "packets" && toks.size() == 2) {
                if (!parse_count(toks[1], def.wc_packets)) return err("bad packets");
            } else if (k == "reps" && toks.size() == 2) {
                size_t r;
                if (!parse_count(toks[1], r)) return err("bad reps");
                def.wc_reps = int(r);
            } else if (k == "sweep") {
                if (toks.size() < 3) return err("sweep needs a variable and values");
                auto v = sweep_variable_parse(toks[1]);
                if (!v) return err("bad sweep variable '" + toks[1] + "'");
                def.sweep_variable = *v;
                def.sweep_values.assign(toks.begin() + 2, toks.end());
            } else if (k == "csv" && toks.size() == 2) {
                def.csv_path = toks[1];
            } else if (k == "assert") {
                if (toks.size() < 2) return err("assert needs a kind");
                ScenarioAssert a;
                if (toks[1] == "decreasing" && toks.size() == 2) {
                    a.kind = ScenarioAssert::Kind::Decreasing;
                } else if (toks[1] == "flat" && toks.size() <= 3) {
                    a.kind = ScenarioAssert::Kind::Flat;
                    if (toks.size() == 3 && !parse_num(toks[2], a.tol)) return err("bad flat tol");
                } else if (toks[1] == "order" && toks.size() >= 4) {
                    a.kind = ScenarioAssert::Kind::Order;
                    for (size_t i = 2; i < toks.size(); ++i) {
                        if (toks[i] == ">=") continue;
                        a.order_values.push_back(toks[i]);
                    }
                    if (a.order_values.size() < 2) return err("order needs two or more values");
                } else {
                    return err("bad assert '" + toks[1] + "'");
                }
                def.asserts.push_back(std::move(a));
            } else {
                return err("unknown bench key '" + k + "'");
            }
            continue;
        }
    }
    if (!section.empty()) return ScenarioErr{lineno, "unterminated section '" + section + "'"};
    if (!have_topology) return ScenarioErr{0, "scenario has no topology section"};
    return def;
}

Result<ScenarioDef, ScenarioErr> load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) return ScenarioErr{0, "cannot open " + path};
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

Result<ScenarioOutcome, ScenarioErr> run_scenario(const ScenarioDef& def,
                                                  const std::string& csv_override) {
    SweepOpts opts;
    opts.scenario_name = def.name;
    opts.engine = def.engine;
    opts.base = def.topo;
    opts.cm = def.cm;
    opts.pdr = def.pdr;
    opts.pdr.payload_bytes = def.traffic.payload_bytes;
    opts.wc_packets = def.wc_packets;
    opts.wc_reps = def.wc_reps;
    if (def.sweep_variable) {
        opts.variable = *def.sweep_variable;
        opts.values = def.sweep_values;
    } else {
        opts.variable = SweepVariable::Mode;
        opts.values = {node_mode_str(def.topo.mode)};
    }
    if (!def.configs.empty()) {
        auto configs = def.configs;
        opts.configure = [configs](Topology& topo) -> Status<std::string> {
            for (const auto& [node_name, script] : configs) {
                Node* n = topo.node(node_name);
                if (!n) return std::string("config section for unknown node '" + node_name + "'");
                if (auto st = apply_config(*n, script); !st)
                    return std::string(node_name + " config line " +
                                       std::to_string(st.error().line) + ": " + st.error().msg);
            }
            return {};
        };
    }

    auto rows = run_sweep(opts);
    if (!rows) return ScenarioErr{0, rows.error()};

    ScenarioOutcome out;
    out.rows = rows.value();

    auto pdr_of = [&](const std::string& value) -> const SweepRow* {
        for (const auto& r : out.rows)
            if (r.value == value) return &r;
        return nullptr;
    };

    for (const auto& a : def.asserts) {
        std::ostringstream msg;
        bool ok = true;
        switch (a.kind) {
            case ScenarioAssert::Kind::Decreasing: {
                for (size_t i = 1; i < out.rows.size(); ++i)
                    if (!(out.rows[i].pdr_pps < out.rows[i - 1].pdr_pps)) ok = false;
                msg << "assert decreasing: " << (ok ? "ok" : "FAILED");
                break;
            }
            case ScenarioAssert::Kind::Flat: {
                double lo = out.rows.empty() ? 0 : out.rows[0].pdr_pps, hi = lo;
                for (const auto& r : out.rows) {
                    lo = std::min(lo, r.pdr_pps);
                    hi = std::max(hi, r.pdr_pps);
                }
                double spread = hi > 0 ? (hi - lo) / hi : 0;
                ok = spread <= a.tol + 1e-12;
                msg << "assert flat " << a.tol << ": " << (ok ? "ok" : "FAILED") << " (spread "
                    << spread << ")";
                break;
            }
            case ScenarioAssert::Kind::Order: {
                for (size_t i = 0; i + 1 < a.order_values.size(); ++i) {
                    const SweepRow* x = pdr_of(a.order_values[i]);
                    const SweepRow* y = pdr_of(a.order_values[i + 1]);
                    if (!x || !y) {
                        ok = false;
                        msg << "assert order: unknown value";
                        break;
                    }
                    if (!(x->pdr_pps >= y->pdr_pps)) ok = false;
                }
                if (msg.str().empty()) {
                    msg << "assert order";
                    for (const auto& v : a.order_values) msg << " " << v;
                    msg << ": " << (ok ? "ok" : "FAILED");
                }
                break;
            }
        }
        if (!ok) out.assertions_ok = false;
        out.messages.push_back(msg.str());
    }

    std::string csv = !csv_override.empty() ? csv_override : def.csv_path;
    if (!csv.empty()) {
        if (auto st = write_csv(csv, out.rows); !st) return ScenarioErr{0, st.error()};
        out.csv_path = csv;
    }
    return out;
}

}  // namespace sr6
