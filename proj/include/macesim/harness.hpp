#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "macesim/config.hpp"
#include "macesim/metrics.hpp"
#include "macesim/rng.hpp"

namespace macesim {

enum class StatsSource { true_stats, tracked };

StatsSource stats_source_from_string(const std::string& name);
const char* to_string(StatsSource s);

struct ExperimentSpec {
    SimConfig base;
    std::string sweep_param = "tau_p";
    std::vector<double> sweep_values;  // empty -> single point at the base value
    int realizations = 50;
    StatsSource stats_source = StatsSource::tracked;
    std::string out_prefix = "results";
    std::string dump_prefix;  // when set, dump tracked matrices for debugging

    void validate() const;
};

struct ResultRow {
    std::string scheme;
    std::string param;
    double value = 0.0;
    double nmse = 0.0;
    double nmse_db = 0.0;
    double nmse_theory = 0.0;
    long fronthaul = 0;
    int inv_dim = 0;
    int realizations = 0;
    int blocks = 0;
    std::uint64_t seed = 0;
};

// One (sweep value, realization, UE) NMSE sample, indexed by Scheme.
struct PairSample {
    double value = 0.0;
    int realization = 0;
    int ue = 0;
    std::array<double, 3> nmse{};
    std::array<double, 3> theory{};
};

struct RunResult {
    std::vector<ResultRow> rows;
    std::vector<PairSample> samples;
};

// Per-UE NMSE of one network realization (empirical and closed-form).
struct RealizationResult {
    std::vector<std::array<double, 3>> nmse;    // [ue][scheme]
    std::vector<std::array<double, 3>> theory;  // [ue][scheme]
};

// The sweep root stream is RngStream(seed); realization r uses
// substream(kTagRealization, r), independent of the sweep value so sweep
// points share network layouts.
RealizationResult run_realization(const SimConfig& cfg, StatsSource source,
                                  RngStream realization_root,
                                  const std::string& dump_prefix = {});

RunResult run(const ExperimentSpec& spec);

// UTF-8 CSV with header
// scheme,param,value,nmse,nmse_db,nmse_theory,fronthaul,inv_dim,realizations,blocks,seed
// and locale-independent shortest-round-trip number formatting.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

// Per-scheme "<prefix>_<scheme>.dat" series (value, nmse_db) sorted by value
// plus a "<prefix>.plot" gnuplot stub.  Rows must come from a single sweep.
void emit_plot_data(const std::vector<ResultRow>& rows, const std::string& prefix);

// key = value text config mirroring SimConfig/ExperimentSpec field names.
void apply_config_file(ExperimentSpec& spec, const std::string& path);
void apply_preset(ExperimentSpec& spec, const std::string& name);   // fig1 | fig2
void apply_sweep_string(ExperimentSpec& spec, const std::string& s);  // "tau_p=3,5,7,9"

}  // namespace macesim
