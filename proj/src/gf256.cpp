#include "deepnp/gf256.hpp"

#include <array>
#include <stdexcept>

namespace deepnp {

namespace {

struct Tables {
    std::array<std::uint8_t, 256> log{};
    std::array<std::uint8_t, 510> exp{};
};

// 0x03 generates the multiplicative group, so log/exp cover all 255
// nonzero elements. exp is doubled to skip the mod-255 on lookups.
constexpr Tables build_tables() {
    Tables t{};
    std::uint16_t x = 1;
    for (int i = 0; i < 255; ++i) {
        t.exp[i] = static_cast<std::uint8_t>(x);
        t.exp[i + 255] = static_cast<std::uint8_t>(x);
        t.log[x] = static_cast<std::uint8_t>(i);
        // multiply by 0x03 = x * 2 + x, reduced mod 0x11B
        std::uint16_t x2 = x << 1;
        if (x2 & 0x100) x2 ^= 0x11B;
        x = x2 ^ x;
    }
    return t;
}

constexpr Tables tables = build_tables();

}  // namespace

FieldElement gf_mul(FieldElement a, FieldElement b) {
    if (a == 0 || b == 0) return 0;
    return tables.exp[tables.log[a] + tables.log[b]];
}

FieldElement gf_inv(FieldElement a) {
    if (a == 0) throw std::invalid_argument("gf_inv: zero has no inverse");
    return tables.exp[255 - tables.log[a]];
}

}  // namespace deepnp
