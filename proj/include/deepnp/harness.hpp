#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deepnp/ge_channel.hpp"
#include "deepnp/neural.hpp"
#include "deepnp/protocol.hpp"

namespace deepnp {

enum class PredictorKind { Stat, DeepNP, Genie, Mean };

const char* to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(const std::string& name);

// One experiment: a channel, a session template, a predictor, an optional
// one-parameter sweep, and a repetition count. Loaded from a JSON document
// with the same field names.
struct ExperimentSpec {
    GEParams channel;
    SessionConfig session;
    PredictorKind predictor = PredictorKind::Stat;
    TrainConfig train;
    std::size_t m = 5;  // feedback bits fed to the trained predictor

    struct SweepParam {
        std::string name;  // e.g. "session.rtt" or "channel.q"
        std::vector<double> values;
    };
    std::vector<SweepParam> sweep;  // at most one parameter
    std::size_t repetitions = 5;
    std::string output_dir = ".";
};

ExperimentSpec load_experiment_spec(const std::string& path);

// Applies one sweep value; name must be one of the session.* / channel.*
// numeric fields.
void set_param(ExperimentSpec& spec, const std::string& name, double value);

// A realization long enough that the session runs on the final
// total_slots slots while the predictor trains on everything before them.
struct PreparedTrace {
    ErasureTrace full;                    // length ceil(total_slots / (1 - split))
    ErasureTrace segment;                 // final total_slots slots
    std::vector<std::uint8_t> feedback;   // full trace as delivery bits
    std::size_t prefix = 0;               // slots before the segment
};

PreparedTrace prepare_trace(const GEParams& channel, std::size_t total_slots, double split,
                            std::uint64_t seed);

struct ResultRow {
    std::string sweep_param;  // empty when no sweep
    double sweep_value = 0.0;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string predictor;
    double eta = 0.0;
    double delay_mean = 0.0;
    double delay_max = 0.0;
    std::size_t delivered = 0;
    std::size_t transmissions = 0;
    double mae = 0.0;  // NaN where the predictor has no count estimate
    bool failed = false;
};

struct ExperimentResults {
    std::vector<ResultRow> rows;
};

// Runs every sweep point and repetition; deterministic per (seed, point,
// repetition). A training divergence marks its row failed and the sweep
// carries on.
ExperimentResults run_experiment(const ExperimentSpec& spec);

void write_results_csv(const std::string& path, const ExperimentResults& results);

// One CSV per metric (x, series, mean, stderr), rows ordered by x then
// series; failed rows are excluded.
void emit_plotdata(const ExperimentResults& results, const std::string& out_dir);

}  // namespace deepnp
