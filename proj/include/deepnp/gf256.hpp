#pragma once

#include <cstdint>

namespace deepnp {

// GF(2^8) element, reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B).
using FieldElement = std::uint8_t;

inline FieldElement gf_add(FieldElement a, FieldElement b) {
    return a ^ b;
}

// Table-based product (log/antilog over the generator 0x03).
FieldElement gf_mul(FieldElement a, FieldElement b);

// Multiplicative inverse; throws std::invalid_argument for 0.
FieldElement gf_inv(FieldElement a);

}  // namespace deepnp
