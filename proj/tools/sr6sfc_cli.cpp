// sr6sfc command line front end. Links only the public C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sr6sfc.h"

namespace {

int exit_code_for(sr6sfc_status st) {
    if (st == SR6SFC_OK) return 0;
    if (st == SR6SFC_ERR_INVALID_ARG) return 2;
    return 1;
}

void print_error(sr6sfc_status st) {
    std::fprintf(stderr, "error: %s: %s\n", sr6sfc_status_str(st), sr6sfc_last_error());
}

int run_node(const std::string& mode, const std::string& script_path, bool interactive) {
    sr6sfc_node* node = sr6sfc_node_create("node", mode.c_str());
    if (!node) {
        print_error(SR6SFC_ERR_INVALID_ARG);
        return 2;
    }

    auto feed = [&](std::istream& in, bool echo_prompt) -> int {
        std::string line;
        int lineno = 0;
        while ((echo_prompt && (std::cout << "> ", true), std::getline(in, line))) {
            ++lineno;
            size_t start = line.find_first_not_of(" \t\r");
            if (start == std::string::npos || line[start] == '#') continue;
            if (line.substr(start, 4) == "show") {
                // show prints through the dump path
                sr6sfc_status st = sr6sfc_node_config_line(node, line.c_str());
                if (st != SR6SFC_OK) {
                    std::fprintf(stderr, "line %d: %s\n", lineno, sr6sfc_last_error());
                    if (!echo_prompt) return 1;
                    continue;
                }
                std::string section = "all";
                std::istringstream is(line.substr(start + 4));
                std::string s;
                if (is >> s) section = s;
                char* dump = sr6sfc_node_show(node, section.c_str());
                std::fputs(dump, stdout);
                sr6sfc_string_free(dump);
                continue;
            }
            sr6sfc_status st = sr6sfc_node_config_line(node, line.c_str());
            if (st != SR6SFC_OK) {
                std::fprintf(stderr, "line %d: %s\n", lineno, sr6sfc_last_error());
                if (!echo_prompt) return 1;
            }
        }
        return 0;
    };

    int rc = 0;
    if (!script_path.empty()) {
        std::ifstream in(script_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot open %s\n", script_path.c_str());
            sr6sfc_node_destroy(node);
            return 2;
        }
        rc = feed(in, false);
    }
    if (rc == 0 && interactive) rc = feed(std::cin, true);
    if (rc == 0 && script_path.empty() && !interactive) rc = feed(std::cin, false);
    sr6sfc_node_destroy(node);
    return rc;
}

std::string resolve_scenario_path(const std::string& path) {
    std::ifstream probe(path);
    if (probe) return path;
    const char* dir = std::getenv("SR6SFC_SCENARIO_DIR");
    if (dir && *dir) {
        std::string alt = std::string(dir) + "/" + path;
        std::ifstream probe2(alt);
        if (probe2) return alt;
    }
    return path;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sr6sfc - userspace SRv6 service function chaining dataplane"};
    app.require_subcommand(1);

    // node: apply configuration commands from a script or stdin
    auto* node_cmd = app.add_subcommand("node", "configure a node interactively or from a script");
    std::string node_mode = "extrule";
    std::string node_script;
    bool node_interactive = false;
    node_cmd->add_option("--mode", node_mode, "baseline|policy|extrule|preroute");
    node_cmd->add_option("--script", node_script, "command script to apply");
    node_cmd->add_flag("--interactive", node_interactive, "read commands from stdin with a prompt");

    // run: scenario file
    auto* run_cmd = app.add_subcommand("run", "run a scenario file");
    std::string scenario_path;
    std::string run_csv;
    run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
    run_cmd->add_option("--csv", run_csv, "override the scenario's csv output path");

    // bench: direct sweep / pdr flags
    auto* bench_cmd = app.add_subcommand("bench", "measure PDR or run a sweep");
    sr6sfc_bench_opts opts;
    sr6sfc_bench_opts_init(&opts);
    std::string b_mode = "extrule", b_threshold = "0.005", b_engine = "cost";
    std::string b_cost_model, b_sweep, b_values, b_csv;
    int b_rules = 1, b_reps = 15;
    double b_age = 1.0, b_ps = 0, b_duration = 1.0, b_precision = 10.0;
    size_t b_packets = 20000;
    bench_cmd->add_option("--mode", b_mode, "baseline|policy|extrule|preroute");
    bench_cmd->add_option("--rules", b_rules, "VNF / rule count");
    bench_cmd->add_option("--age", b_age, "dynamic proxy age (seconds)");
    bench_cmd->add_option("--ps", b_ps, "single trial at this sending rate (pps)");
    bench_cmd->add_option("--duration", b_duration, "trial duration (seconds)");
    bench_cmd->add_option("--reps", b_reps, "wallclock repetitions");
    bench_cmd->add_option("--threshold", b_threshold, "loss threshold (e.g. 0.005)");
    bench_cmd->add_option("--precision", b_precision, "PDR search precision (pps)");
    bench_cmd->add_option("--engine", b_engine, "cost|wallclock");
    bench_cmd->add_option("--cost-model", b_cost_model, "cost model file");
    bench_cmd->add_option("--sweep", b_sweep, "sweep variable: rule_count|mode|age");
    bench_cmd->add_option("--values", b_values, "comma-separated sweep values");
    bench_cmd->add_option("--csv", b_csv, "CSV output path");
    bench_cmd->add_option("--packets", b_packets, "wallclock batch size");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(node_cmd)) return run_node(node_mode, node_script, node_interactive);

    if (app.got_subcommand(run_cmd)) {
        std::string path = resolve_scenario_path(scenario_path);
        char* report = nullptr;
        sr6sfc_status st = sr6sfc_scenario_run(path.c_str(), run_csv.empty() ? nullptr : run_csv.c_str(),
                                               &report);
        if (report) {
            std::fputs(report, stdout);
            sr6sfc_string_free(report);
        }
        if (st != SR6SFC_OK) print_error(st);
        return exit_code_for(st);
    }

    // bench
    opts.mode = b_mode.c_str();
    opts.rules = b_rules;
    opts.age = b_age;
    opts.ps = b_ps;
    opts.duration = b_duration;
    opts.reps = b_reps;
    opts.threshold = b_threshold.c_str();
    opts.precision = b_precision;
    opts.engine = b_engine.c_str();
    opts.cost_model = b_cost_model.empty() ? nullptr : b_cost_model.c_str();
    opts.sweep = b_sweep.empty() ? nullptr : b_sweep.c_str();
    opts.values = b_values.empty() ? nullptr : b_values.c_str();
    opts.csv = b_csv.empty() ? nullptr : b_csv.c_str();
    opts.packets = b_packets;

    char* report = nullptr;
    sr6sfc_status st = sr6sfc_bench_run(&opts, &report);
    if (report) {
        std::fputs(report, stdout);
        sr6sfc_string_free(report);
    }
    if (st != SR6SFC_OK) print_error(st);
    return exit_code_for(st);
}
