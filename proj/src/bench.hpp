#ifndef SR6SFC_BENCH_HPP
#define SR6SFC_BENCH_HPP

#include <functional>
#include <string>
#include <vector>

#include "simnet.hpp"

namespace sr6 {

// Loss threshold as an exact rational so the DR comparison never flaps on
// floating point (PDR@0.5% -> 5/1000).
struct Ratio {
    uint64_t num = 5;
    uint64_t den = 1000;
    static std::optional<Ratio> parse(std::string_view text);  // "0.005", "5/1000"
    double value() const { return den ? double(num) / double(den) : 0; }
    std::string str() const;
};

// p_out/p_in >= 1 - threshold, evaluated on integers.
bool dr_meets(uint64_t p_out, uint64_t p_in, Ratio threshold);

struct TrafficStats {
    uint64_t p_in = 0;
    uint64_t p_out = 0;
    double duration = 0;
    double ps = 0;
    double throughput() const { return duration > 0 ? double(p_out) / duration : 0; }
    double dr() const { return p_in ? double(p_out) / double(p_in) : 1.0; }
};

struct TrialSummary {
    TrafficStats mean;                               // averaged counts
    double dr_mean = 1.0;
    double dr_stddev = 0.0;
    std::vector<TrafficStats> reps;
};

TrialSummary run_trial(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                       const TrafficSpec& spec, int reps = 1);

// ---------------------------------------------------------------------------
// PDR search: double the rate until the threshold fails, then bisect the
// bracket down to `precision`.

struct PdrOptions {
    Ratio threshold{5, 1000};
    double precision = 10;   // pps
    double duration = 1;     // simulated seconds per trial
    double start_rate = 0;   // 0 = max(precision, 1)
    double max_rate = 2e6;   // pps; threshold never failing up to here => NeverDrops
    size_t payload_bytes = 12;
};

struct PdrTrialPoint {
    double ps;
    double dr;
    uint64_t p_in;
    uint64_t p_out;
};

struct PdrResult {
    Ratio threshold;
    double rate = 0;
    double precision = 0;
    bool never_drops = false;
    std::vector<PdrTrialPoint> trials;
};

PdrResult pdr_search(Topology& topo, const CostModel& cm, const StandardOpts& opts,
                     const PdrOptions& pdr);

// ---------------------------------------------------------------------------
// Wall-clock engine: real per-packet pipeline time.

struct WallClockStats {
    double median_spp = 0;  // seconds per packet
    double mean_spp = 0;
    double stddev_spp = 0;
    std::vector<double> reps;
    uint64_t delivered = 0;
    uint64_t injected = 0;
    double throughput_pps() const { return median_spp > 0 ? 1.0 / median_spp : 0; }
};

WallClockStats measure_wallclock(Topology& topo, const StandardOpts& opts, size_t packets,
                                 int reps, size_t payload_bytes = 12);

// ---------------------------------------------------------------------------
// Sweeps

enum class BenchEngine { Cost, WallClock };
enum class SweepVariable { RuleCount, Mode, Age };
std::optional<SweepVariable> sweep_variable_parse(std::string_view s);
const char* sweep_variable_str(SweepVariable v);

struct SweepOpts {
    std::string scenario_name = "sweep";
    BenchEngine engine = BenchEngine::Cost;
    SweepVariable variable = SweepVariable::RuleCount;
    std::vector<std::string> values;
    StandardOpts base;
    CostModel cm;
    PdrOptions pdr;
    size_t wc_packets = 20000;
    int wc_reps = 15;
    // Extra per-topology configuration; a failure aborts the whole sweep.
    std::function<Status<std::string>(Topology&)> configure;
};

struct SweepRow {
    std::string scenario;
    std::string variable;
    std::string value;
    double pdr_pps = 0;
    double stddev = 0;
    double dr_at_pdr = 1.0;
};

Result<std::vector<SweepRow>, std::string> run_sweep(const SweepOpts& opts);

std::string sweep_csv(const std::vector<SweepRow>& rows);
Status<std::string> write_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace sr6

#endif
