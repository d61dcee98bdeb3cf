#include "deepnp/ge_channel.hpp"

#include <fstream>
#include <stdexcept>

namespace deepnp {

void validate(const GEParams& p) {
    if (!(p.e_g >= 0.0 && p.e_g <= 1.0) || !(p.e_b >= 0.0 && p.e_b <= 1.0)) {
        throw std::invalid_argument("GEParams: erasure probabilities must lie in [0,1]");
    }
    if (p.e_g > p.e_b) {
        throw std::invalid_argument("GEParams: e_g must not exceed e_b");
    }
    if (!(p.q > 0.0 && p.q < 1.0) || !(p.s > 0.0 && p.s < 1.0)) {
        throw std::invalid_argument("GEParams: transition probabilities must lie in (0,1)");
    }
}

std::pair<double, double> stationary_distribution(const GEParams& p) {
    validate(p);
    double denom = p.s + p.q;
    return {p.s / denom, p.q / denom};
}

double steady_state_erasure(const GEParams& p) {
    auto [pi_g, pi_b] = stationary_distribution(p);
    return pi_g * p.e_g + pi_b * p.e_b;
}

GEChannel::GEChannel(GEParams params, std::uint64_t seed)
    : params_(params), rng_(seed) {
    validate(params_);
    auto [pi_g, pi_b] = stationary_distribution(params_);
    (void)pi_g;
    bad_ = uniform01(rng_) < pi_b;
}

bool GEChannel::step() {
    bool erased = uniform01(rng_) < (bad_ ? params_.e_b : params_.e_g);
    double u = uniform01(rng_);
    bad_ = bad_ ? !(u < params_.s) : (u < params_.q);
    return erased;
}

ErasureTrace generate_trace(const GEParams& params, std::size_t length, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("generate_trace: length must be >= 1");
    GEChannel channel(params, seed);
    ErasureTrace trace(length);
    for (auto& slot : trace) {
        slot = channel.step() ? 1 : 0;
    }
    return trace;
}

void write_trace_file(const std::string& path, const ErasureTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_trace_file: cannot open " + path);
    std::string line;
    line.reserve(trace.size() + 1);
    for (auto erased : trace) {
        line.push_back(erased ? '0' : '1');
    }
    line.push_back('\n');
    out << line;
}

ErasureTrace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_trace_file: cannot open " + path);
    ErasureTrace trace;
    char c;
    while (in.get(c)) {
        if (c == '\n' || c == '\r') continue;
        if (c == '0') {
            trace.push_back(1);
        } else if (c == '1') {
            trace.push_back(0);
        } else {
            throw std::runtime_error("read_trace_file: unexpected character in " + path);
        }
    }
    return trace;
}

}  // namespace deepnp
