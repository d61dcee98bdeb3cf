#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deepnp/rng.hpp"

namespace deepnp {

// Two-state Gilbert-Elliott erasure channel. q is the good->bad transition
// probability, s the bad->good one; e_g/e_b are the per-state erasure
// probabilities.
struct GEParams {
    double e_g = 0.0;
    double e_b = 0.0;
    double q = 0.5;
    double s = 0.5;
};

// Throws std::invalid_argument unless e_g,e_b in [0,1], e_g <= e_b and
// q,s in (0,1).
void validate(const GEParams& params);

// (pi_good, pi_bad) = (s/(s+q), q/(s+q)).
std::pair<double, double> stationary_distribution(const GEParams& params);

// pi_good*e_g + pi_bad*e_b.
double steady_state_erasure(const GEParams& params);

// Slot erasure flags, 1 = erased.
using ErasureTrace = std::vector<std::uint8_t>;

class GEChannel {
public:
    // The initial state is drawn from the stationary distribution, so short
    // runs carry no burn-in bias.
    GEChannel(GEParams params, std::uint64_t seed);

    // Draws this slot's erasure from the current state, then transitions.
    // Exactly two generator words per call, whatever the parameters, so
    // streams stay aligned across configs with a shared seed.
    bool step();

    const GEParams& params() const { return params_; }
    bool in_bad_state() const { return bad_; }

private:
    GEParams params_;
    Rng rng_;
    bool bad_;
};

// length slots from a fresh channel; element t is slot t's erasure flag.
ErasureTrace generate_trace(const GEParams& params, std::size_t length, std::uint64_t seed);

// Trace files hold one ASCII character per slot: '1' = delivered,
// '0' = erased (the feedback-bit convention), optional trailing newline.
void write_trace_file(const std::string& path, const ErasureTrace& trace);
ErasureTrace read_trace_file(const std::string& path);

}  // namespace deepnp
