#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "deepnp/gf256.hpp"
#include "deepnp/rng.hpp"

namespace deepnp {

// One coded packet: a random linear combination of the source packets
// with indices w_min..w_max. coeffs[i] multiplies packet w_min + i.
struct CodedCombination {
    std::uint64_t w_min = 0;
    std::uint64_t w_max = 0;
    std::vector<FieldElement> coeffs;
};

// Fresh coefficients for a window of `span` packets. Every entry is drawn
// uniformly from the 255 nonzero elements: a zero entry would silently drop
// a packet from the combination, and the protocol relies on every coded
// packet covering its whole window.
std::vector<FieldElement> random_coefficients(std::size_t span, Rng& g);

// Incremental reduced-row-echelon form over packet indices. Rows are keyed
// by pivot; a row whose tail is a single 1 pins down exactly one packet.
// Payloads are never tracked: rank bookkeeping alone decides decodability.
class DecoderMatrix {
public:
    explicit DecoderMatrix(std::uint64_t base_index = 0);

    // Eliminates comb against the stored rows. Returns true when a nonzero
    // residual remains (rank grew), false for a dependent combination.
    // Throws std::invalid_argument if comb starts below base_index or is
    // all-zero.
    bool absorb(const CodedCombination& comb);

    // First packet index not yet decodable: all packets below it are pinned
    // by unit rows. Monotone nondecreasing across absorb calls.
    std::uint64_t decoded_prefix() const { return decoded_prefix_; }

    std::uint64_t base_index() const { return base_; }
    std::size_t rank() const { return rows_.size(); }

private:
    // pivot -> tail; tail[0] is always 1 and multiplies the pivot packet.
    std::map<std::uint64_t, std::vector<FieldElement>> rows_;
    std::uint64_t base_;
    std::uint64_t decoded_prefix_;
};

}  // namespace deepnp
