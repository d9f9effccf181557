#include "sr6sfc.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "bench.hpp"
#include "config.hpp"
#include "scenario.hpp"

using namespace sr6;

namespace {

thread_local std::string g_last_error;

sr6sfc_status fail(sr6sfc_status st, std::string msg) {
    g_last_error = std::move(msg);
    return st;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct sr6sfc_node {
    SteadyClock clock;
    Node impl;
    sr6sfc_node(const char* name, NodeMode mode) : impl(name, mode, &clock) {}
};

extern "C" {

const char* sr6sfc_version(void) { return "0.1.0"; }

const char* sr6sfc_status_str(sr6sfc_status st) {
    switch (st) {
        case SR6SFC_OK: return "ok";
        case SR6SFC_ERR_INVALID_ARG: return "invalid argument";
        case SR6SFC_ERR_PARSE: return "parse error";
        case SR6SFC_ERR_CONFIG: return "configuration error";
        case SR6SFC_ERR_STATE: return "invalid state";
        case SR6SFC_ERR_IO: return "i/o error";
        case SR6SFC_ERR_ASSERTION: return "assertion failed";
    }
    return "?";
}

const char* sr6sfc_last_error(void) { return g_last_error.c_str(); }

void sr6sfc_string_free(char* s) { std::free(s); }

sr6sfc_node* sr6sfc_node_create(const char* name, const char* mode) {
    if (!name || !mode) {
        fail(SR6SFC_ERR_INVALID_ARG, "name and mode are required");
        return nullptr;
    }
    auto m = node_mode_parse(mode);
    if (!m) {
        fail(SR6SFC_ERR_INVALID_ARG, std::string("unknown mode '") + mode + "'");
        return nullptr;
    }
    return new sr6sfc_node(name, *m);
}

void sr6sfc_node_destroy(sr6sfc_node* node) { delete node; }

sr6sfc_status sr6sfc_node_add_interface(sr6sfc_node* node, const char* name) {
    if (!node || !name) return fail(SR6SFC_ERR_INVALID_ARG, "node and name are required");
    node->impl.add_interface(name);
    return SR6SFC_OK;
}

sr6sfc_status sr6sfc_node_config_line(sr6sfc_node* node, const char* line) {
    if (!node || !line) return fail(SR6SFC_ERR_INVALID_ARG, "node and line are required");
    auto parsed = parse_command(line);
    if (!parsed) return fail(SR6SFC_ERR_PARSE, parsed.error().msg);
    if (auto st = apply_command(node->impl, parsed.value()); !st)
        return fail(SR6SFC_ERR_CONFIG, st.error());
    return SR6SFC_OK;
}

sr6sfc_status sr6sfc_node_config(sr6sfc_node* node, const char* script) {
    if (!node || !script) return fail(SR6SFC_ERR_INVALID_ARG, "node and script are required");
    if (auto st = apply_config(node->impl, script); !st)
        return fail(SR6SFC_ERR_CONFIG,
                    "line " + std::to_string(st.error().line) + ": " + st.error().msg);
    return SR6SFC_OK;
}

char* sr6sfc_node_show(const sr6sfc_node* node, const char* section) {
    if (!node) return nullptr;
    return dup_string(show_state(node->impl, section ? section : "all"));
}

char* sr6sfc_node_counters(const sr6sfc_node* node) {
    if (!node) return nullptr;
    std::ostringstream os;
    for (const auto& [k, v] : node->impl.counters_snapshot()) os << k << " " << v << "\n";
    return dup_string(os.str());
}

sr6sfc_status sr6sfc_node_process(sr6sfc_node* node, const char* iif, const uint8_t* frame,
                                  size_t len, sr6sfc_emit_cb cb, void* user) {
    if (!node || !iif || !frame) return fail(SR6SFC_ERR_INVALID_ARG, "node, iif, frame required");
    InterfaceId id = node->impl.iface(iif);
    if (id == kNoInterface)
        return fail(SR6SFC_ERR_INVALID_ARG, std::string("unknown interface '") + iif + "'");
    PacketBuf pkt = PacketBuf::from_bytes({frame, len});
    ProcessResult r = node->impl.process(id, pkt);
    if (r.emitted && cb)
        cb(node->impl.iface_name(r.oif).c_str(), pkt.data(), pkt.size(), user);
    return SR6SFC_OK;
}

sr6sfc_status sr6sfc_scenario_run(const char* path, const char* csv_override, char** report_out) {
    if (!path) return fail(SR6SFC_ERR_INVALID_ARG, "path required");
    auto def = load_scenario(path);
    if (!def)
        return fail(def.error().line ? SR6SFC_ERR_PARSE : SR6SFC_ERR_IO,
                    std::string(path) + (def.error().line ? ":" + std::to_string(def.error().line)
                                                          : "") +
                        ": " + def.error().msg);
    auto out = run_scenario(def.value(), csv_override ? csv_override : "");
    if (!out) return fail(SR6SFC_ERR_CONFIG, out.error().msg);

    std::ostringstream os;
    os << sweep_csv(out.value().rows);
    for (const auto& m : out.value().messages) os << m << "\n";
    if (!out.value().csv_path.empty()) os << "csv written to " << out.value().csv_path << "\n";
    if (report_out) *report_out = dup_string(os.str());
    if (!out.value().assertions_ok) return fail(SR6SFC_ERR_ASSERTION, "scenario assertion failed");
    return SR6SFC_OK;
}

void sr6sfc_bench_opts_init(sr6sfc_bench_opts* opts) {
    std::memset(opts, 0, sizeof *opts);
    opts->mode = "extrule";
    opts->rules = 1;
    opts->age = 1.0;
    opts->duration = 1.0;
    opts->reps = 15;
    opts->threshold = "0.005";
    opts->precision = 10.0;
    opts->engine = "cost";
    opts->packets = 20000;
}

sr6sfc_status sr6sfc_bench_run(const sr6sfc_bench_opts* o, char** report_out) {
    if (!o) return fail(SR6SFC_ERR_INVALID_ARG, "opts required");

    SweepOpts sweep;
    sweep.scenario_name = "bench";
    auto mode = node_mode_parse(o->mode ? o->mode : "extrule");
    if (!mode) return fail(SR6SFC_ERR_INVALID_ARG, "bad mode");
    sweep.base.mode = *mode;
    sweep.base.vnfs = o->rules > 0 ? size_t(o->rules) : 1;
    sweep.base.age = o->age;
    sweep.pdr.duration = o->duration > 0 ? o->duration : 1.0;
    sweep.wc_reps = o->reps > 0 ? o->reps : 15;
    sweep.wc_packets = o->packets > 0 ? o->packets : 20000;
    if (o->threshold) {
        auto r = Ratio::parse(o->threshold);
        if (!r) return fail(SR6SFC_ERR_INVALID_ARG, "bad threshold");
        sweep.pdr.threshold = *r;
    }
    if (o->precision > 0) sweep.pdr.precision = o->precision;
    if (o->engine) {
        if (std::string_view(o->engine) == "wallclock")
            sweep.engine = BenchEngine::WallClock;
        else if (std::string_view(o->engine) == "cost")
            sweep.engine = BenchEngine::Cost;
        else
            return fail(SR6SFC_ERR_INVALID_ARG, "engine must be cost or wallclock");
    }
    if (o->cost_model) {
        std::ifstream in(o->cost_model);
        if (!in) return fail(SR6SFC_ERR_IO, std::string("cannot open ") + o->cost_model);
        std::string key;
        double val;
        int lineno = 0;
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
            std::istringstream is(line);
            if (!(is >> key)) continue;
            if (!(is >> val))
                return fail(SR6SFC_ERR_PARSE, std::string(o->cost_model) + ":" +
                                                  std::to_string(lineno) + ": bad value");
            if (key == "base")
                sweep.cm.base = val;
            else if (key == "per_rule")
                sweep.cm.per_rule = val;
            else if (key == "per_lpm_bit")
                sweep.cm.per_lpm_bit = val;
            else if (key == "budget")
                sweep.cm.budget = val;
            else if (key == "queue")
                sweep.cm.queue_len = size_t(val);
            else
                return fail(SR6SFC_ERR_PARSE, std::string(o->cost_model) + ":" +
                                                  std::to_string(lineno) + ": unknown key " + key);
        }
    }

    if (o->sweep && o->values) {
        auto var = sweep_variable_parse(o->sweep);
        if (!var) return fail(SR6SFC_ERR_INVALID_ARG, "bad sweep variable");
        sweep.variable = *var;
        std::string values = o->values;
        size_t start = 0;
        while (start <= values.size()) {
            size_t comma = values.find(',', start);
            size_t end = comma == std::string::npos ? values.size() : comma;
            if (end > start) sweep.values.push_back(values.substr(start, end - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (sweep.values.empty()) return fail(SR6SFC_ERR_INVALID_ARG, "empty sweep values");
    } else {
        sweep.variable = SweepVariable::Mode;
        sweep.values = {node_mode_str(sweep.base.mode)};
    }

    std::ostringstream os;
    if (o->ps > 0 && !o->sweep) {
        // Single trial at a fixed sending rate.
        Topology topo = build_standard_topology(sweep.base);
        TrafficSpec spec;
        spec.ps = o->ps;
        spec.duration = sweep.pdr.duration;
        TrialSummary t = run_trial(topo, sweep.cm, sweep.base, spec, 1);
        os << "ps " << o->ps << " p_in " << t.mean.p_in << " p_out " << t.mean.p_out
           << " throughput " << t.mean.throughput() << " dr " << t.mean.dr() << "\n";
        if (report_out) *report_out = dup_string(os.str());
        return SR6SFC_OK;
    }

    auto rows = run_sweep(sweep);
    if (!rows) return fail(SR6SFC_ERR_CONFIG, rows.error());
    os << sweep_csv(rows.value());
    if (o->csv) {
        if (auto st = write_csv(o->csv, rows.value()); !st)
            return fail(SR6SFC_ERR_IO, st.error());
        os << "csv written to " << o->csv << "\n";
    }
    if (report_out) *report_out = dup_string(os.str());
    return SR6SFC_OK;
}

}  // extern "C"
