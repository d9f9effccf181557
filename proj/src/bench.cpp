#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace sr6 {

std::optional<Ratio> Ratio::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        uint64_t n = 0, d = 0;
        for (char c : text.substr(0, slash)) {
            if (c < '0' || c > '9') return std::nullopt;
            n = n * 10 + uint64_t(c - '0');
        }
        for (char c : text.substr(slash + 1)) {
            if (c < '0' || c > '9') return std::nullopt;
            d = d * 10 + uint64_t(c - '0');
        }
        if (d == 0) return std::nullopt;
        return Ratio{n, d};
    }
    // decimal: integer part . fraction
    uint64_t num = 0, den = 1;
    bool seen_dot = false, any = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        if (den > UINT64_MAX / 10) return std::nullopt;
        num = num * 10 + uint64_t(c - '0');
        if (seen_dot) den *= 10;
        any = true;
    }
    if (!any) return std::nullopt;
    return Ratio{num, den};
}

std::string Ratio::str() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%llu/%llu", (unsigned long long)num, (unsigned long long)den);
    return buf;
}

bool dr_meets(uint64_t p_out, uint64_t p_in, Ratio threshold) {
    if (p_in == 0) return true;
    // p_out/p_in >= (den-num)/den  <=>  p_out*den >= p_in*(den-num)
    unsigned __int128 lhs = (unsigned __int128)p_out * threshold.den;
    uint64_t keep = threshold.num >= threshold.den ? 0 : threshold.den - threshold.num;
    unsigned __int128 rhs = (unsigned __int128)p_in * keep;
    return lhs >= rhs;
}

TrialSummary run_trial(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                       const TrafficSpec& spec, int reps) {
    TrialSummary sum;
    double dr_acc = 0, dr_sq = 0;
    uint64_t in_acc = 0, out_acc = 0;
    for (int r = 0; r < reps; ++r) {
        TrialCounts c = run_cost_trial(topo, cm, opts, spec);
        TrafficStats st{c.injected, c.delivered, spec.duration, spec.ps};
        dr_acc += st.dr();
        dr_sq += st.dr() * st.dr();
        in_acc += c.injected;
        out_acc += c.delivered;
        sum.reps.push_back(st);
    }
    sum.mean = TrafficStats{in_acc / uint64_t(reps), out_acc / uint64_t(reps), spec.duration, spec.ps};
    sum.dr_mean = dr_acc / reps;
    double var = dr_sq / reps - sum.dr_mean * sum.dr_mean;
    sum.dr_stddev = var > 0 ? std::sqrt(var) : 0;
    return sum;
}

PdrResult pdr_search(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                     const PdrOptions& pdr) {
    PdrResult res;
    res.threshold = pdr.threshold;
    res.precision = pdr.precision;

    auto probe = [&](double rate) -> bool {
        TrafficSpec spec;
        spec.ps = rate;
        spec.duration = pdr.duration;
        spec.payload_bytes = pdr.payload_bytes;
        TrialCounts c = run_cost_trial(topo, cm, opts, spec);
        double dr = c.injected ? double(c.delivered) / double(c.injected) : 1.0;
        res.trials.push_back({rate, dr, c.injected, c.delivered});
        return dr_meets(c.delivered, c.injected, pdr.threshold);
    };

    double rate = pdr.start_rate > 0 ? pdr.start_rate : std::max(pdr.precision, 1.0);
    double lo = 0;  // DR at rate 0 is vacuously 1
    // Exponential ramp-up to find a bracket [lo, hi] with DR(lo) ok, DR(hi) not.
    for (;;) {
        if (rate >= pdr.max_rate) rate = pdr.max_rate;
        bool ok = probe(rate);
        if (ok) {
            lo = rate;
            if (rate >= pdr.max_rate) {
                res.never_drops = true;
                res.rate = rate;
                return res;
            }
            rate *= 2;
            continue;
        }
        break;
    }
    double hi = rate;
    while (hi - lo > pdr.precision) {
        double mid = (lo + hi) / 2;
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.rate = lo;
    return res;
}

WallClockStats measure_wallclock(Topology& topo, const StandardOpts& opts, size_t packets,
                                 int reps, size_t payload_bytes) {
    WallClockStats st;
    // Warm-up pass: page in code paths, learn the proxy headers.
    run_wallclock_batch(topo, opts, std::min<size_t>(packets, 2000), payload_bytes);
    for (int r = 0; r < reps; ++r) {
        WallClockRun run = run_wallclock_batch(topo, opts, packets, payload_bytes);
        st.reps.push_back(run.sec_per_pkt());
        st.delivered += run.delivered;
        st.injected += run.injected;
    }
    std::vector<double> sorted = st.reps;
    std::sort(sorted.begin(), sorted.end());
    st.median_spp = sorted[sorted.size() / 2];
    double acc = 0;
    for (double v : st.reps) acc += v;
    st.mean_spp = acc / double(st.reps.size());
    double var = 0;
    for (double v : st.reps) var += (v - st.mean_spp) * (v - st.mean_spp);
    st.stddev_spp = std::sqrt(var / double(st.reps.size()));
    return st;
}

std::optional<SweepVariable> sweep_variable_parse(std::string_view s) {
    if (s == "rule_count") return SweepVariable::RuleCount;
    if (s == "mode") return SweepVariable::Mode;
    if (s == "age") return SweepVariable::Age;
    return std::nullopt;
}

const char* sweep_variable_str(SweepVariable v) {
    switch (v) {
        case SweepVariable::RuleCount: return "rule_count";
        case SweepVariable::Mode: return "mode";
        case SweepVariable::Age: return "age";
    }
    return "?";
}

Result<std::vector<SweepRow>, std::string> run_sweep(const SweepOpts& opts) {
    std::vector<SweepRow> rows;
    for (const std::string& value : opts.values) {
        StandardOpts point = opts.base;
        switch (opts.variable) {
            case SweepVariable::RuleCount: {
                char* end = nullptr;
                long n = std::strtol(value.c_str(), &end, 10);
                if (!end || *end || n <= 0) return std::string("bad rule_count '" + value + "'");
                point.vnfs = size_t(n);
                point.target_vnf = size_t(-1);
                break;
            }
            case SweepVariable::Mode: {
                auto m = node_mode_parse(value);
                if (!m) return std::string("bad mode '" + value + "'");
                point.mode = *m;
                break;
            }
            case SweepVariable::Age: {
                char* end = nullptr;
                double a = std::strtod(value.c_str(), &end);
                if (!end || *end || a < 0) return std::string("bad age '" + value + "'");
                point.age = a;
                break;
            }
        }
        Topology topo = build_standard_topology(point);
        if (opts.configure) {
            if (auto st = opts.configure(topo); !st) return st.error();
        }
        SweepRow row;
        row.scenario = opts.scenario_name;
        row.variable = sweep_variable_str(opts.variable);
        row.value = value;
        if (opts.engine == BenchEngine::Cost) {
            PdrResult r = pdr_search(topo, opts.cm, point, opts.pdr);
            row.pdr_pps = r.rate;
            row.stddev = 0;
            double dr = 1.0;
            for (const auto& t : r.trials)
                if (t.ps == r.rate) dr = t.dr;
            row.dr_at_pdr = dr;
        } else {
            WallClockStats w = measure_wallclock(topo, point, opts.wc_packets, opts.wc_reps);
            row.pdr_pps = w.throughput_pps();
            // stddev of per-rep throughput estimates
            double acc = 0, sq = 0;
            for (double spp : w.reps) {
                double pps = spp > 0 ? 1.0 / spp : 0;
                acc += pps;
                sq += pps * pps;
            }
            double mean = acc / double(w.reps.size());
            double var = sq / double(w.reps.size()) - mean * mean;
            row.stddev = var > 0 ? std::sqrt(var) : 0;
            row.dr_at_pdr = w.injected ? double(w.delivered) / double(w.injected) : 1.0;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "scenario,variable,value,pdr_pps,stddev,dr_at_pdr\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.3f,%.3f,%.6f\n", r.scenario.c_str(),
                      r.variable.c_str(), r.value.c_str(), r.pdr_pps, r.stddev, r.dr_at_pdr);
        out += buf;
    }
    return out;
}

Status<std::string> write_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) return std::string("cannot write " + path);
    out << sweep_csv(rows);
    return {};
}

}  // namespace sr6
