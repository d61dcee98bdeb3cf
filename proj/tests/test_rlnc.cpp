#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <vector>

#include "deepnp/gf256.hpp"
#include "deepnp/rlnc.hpp"
#include "deepnp/rng.hpp"

using namespace deepnp;

namespace {

// Dense Gaussian elimination oracle over a fixed universe of `n` packets.
// Rebuilt from scratch after every absorb, so it shares no state or
// shortcuts with the incremental decoder.
struct DenseOracle {
    std::size_t n;
    std::vector<std::vector<FieldElement>> rows;  // echelon form, dense

    explicit DenseOracle(std::size_t packets) : n(packets) {}

    static std::vector<FieldElement> densify(const CodedCombination& c, std::size_t n) {
        std::vector<FieldElement> v(n, 0);
        for (std::size_t i = 0; i < c.coeffs.size(); ++i) v[c.w_min + i] = c.coeffs[i];
        return v;
    }

    // Eliminates v against the stored rows; true when the rank grew.
    bool absorb_dense(std::vector<FieldElement> v) {
        for (const auto& r : rows) {
            std::size_t pivot = 0;
            while (pivot < n && r[pivot] == 0) ++pivot;
            if (pivot < n && v[pivot] != 0) {
                FieldElement factor = v[pivot];  // r[pivot] == 1 after normalization
                for (std::size_t j = 0; j < n; ++j) {
                    v[j] = gf_add(v[j], gf_mul(factor, r[j]));
                }
            }
        }
        std::size_t pivot = 0;
        while (pivot < n && v[pivot] == 0) ++pivot;
        if (pivot == n) return false;
        FieldElement inv = gf_inv(v[pivot]);
        for (std::size_t j = 0; j < n; ++j) v[j] = gf_mul(v[j], inv);
        rows.push_back(std::move(v));
        // Keep rows sorted by pivot so elimination above stays triangular.
        std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
            std::size_t pa = 0, pb = 0;
            while (pa < a.size() && a[pa] == 0) ++pa;
            while (pb < b.size() && b[pb] == 0) ++pb;
            return pa < pb;
        });
        return true;
    }

    std::size_t rank() const { return rows.size(); }

    // Largest p such that unit vectors e_0..e_{p-1} all lie in the row span:
    // adding e_i to the matrix must not increase the rank.
    std::size_t decoded_prefix() const {
        for (std::size_t p = 0; p < n; ++p) {
            DenseOracle probe = *this;
            std::vector<FieldElement> unit(n, 0);
            unit[p] = 1;
            if (probe.absorb_dense(std::move(unit))) return p;
        }
        return n;
    }
};

CodedCombination make_comb(std::uint64_t w_min, std::uint64_t w_max, Rng& g) {
    CodedCombination c;
    c.w_min = w_min;
    c.w_max = w_max;
    c.coeffs = random_coefficients(static_cast<std::size_t>(w_max - w_min + 1), g);
    return c;
}

}  // namespace

TEST_CASE("random_coefficients basics") {
    Rng g(7);
    CHECK_THROWS_AS(random_coefficients(0, g), std::invalid_argument);

    auto one = random_coefficients(1, g);
    CHECK(one.size() == 1);
    CHECK(one[0] != 0);

    Rng g1(42), g2(42);
    CHECK(random_coefficients(16, g1) == random_coefficients(16, g2));

    for (int i = 0; i < 1000; ++i) {
        for (FieldElement c : random_coefficients(8, g)) CHECK(c != 0);
    }
}

TEST_CASE("random_coefficients draws uniformly over the nonzero elements") {
    Rng g(0xc01dbeefu);
    std::vector<std::size_t> counts(256, 0);
    const std::size_t draws = 255 * 80;
    for (std::size_t i = 0; i < draws; ++i) counts[random_coefficients(1, g)[0]]++;
    CHECK(counts[0] == 0);
    // Pearson chi-square against uniform over 255 cells (254 dof, mean 254,
    // sd ~22.5; 360 is far beyond any plausible statistical fluctuation).
    double expected = static_cast<double>(draws) / 255.0;
    double chi2 = 0.0;
    for (int v = 1; v < 256; ++v) {
        double d = static_cast<double>(counts[v]) - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 360.0);
}

TEST_CASE("absorb validates its input") {
    Rng g(3);
    DecoderMatrix m(5);

    CodedCombination below = make_comb(4, 6, g);
    CHECK_THROWS_AS(m.absorb(below), std::invalid_argument);

    CodedCombination zero;
    zero.w_min = 5;
    zero.w_max = 6;
    zero.coeffs = {0, 0};
    CHECK_THROWS_AS(m.absorb(zero), std::invalid_argument);

    CodedCombination malformed;
    malformed.w_min = 5;
    malformed.w_max = 6;
    malformed.coeffs = {1};  // span 2, one coefficient
    CHECK_THROWS_AS(m.absorb(malformed), std::invalid_argument);
}

TEST_CASE("duplicate combination is dependent") {
    Rng g(11);
    DecoderMatrix m;
    CodedCombination c = make_comb(0, 3, g);
    CHECK(m.absorb(c));
    CHECK_FALSE(m.absorb(c));
    CHECK(m.rank() == 1);
}

TEST_CASE("unit combinations advance the decoded prefix from a nonzero base") {
    DecoderMatrix m(1);
    CHECK(m.decoded_prefix() == 1);
    for (std::uint64_t p = 1; p <= 3; ++p) {
        CodedCombination unit;
        unit.w_min = p;
        unit.w_max = p;
        unit.coeffs = {1};
        CHECK(m.absorb(unit));
        CHECK(m.decoded_prefix() == p + 1);
    }
    CHECK(m.rank() == 3);
}

TEST_CASE("prefix waits for the missing packet") {
    Rng g(19);
    DecoderMatrix m;
    // Combinations covering packets 1..3 pin nothing in order while
    // packet 0 is missing.
    CHECK(m.absorb(make_comb(1, 3, g)));
    CHECK(m.absorb(make_comb(1, 3, g)));
    CHECK(m.absorb(make_comb(1, 3, g)));
    CHECK(m.decoded_prefix() == 0);
    CHECK(m.rank() == 3);
    // A combination reaching packet 0 completes a full-rank system on 0..3.
    CHECK(m.absorb(make_comb(0, 3, g)));
    CHECK(m.decoded_prefix() == 4);
}

TEST_CASE("incremental rank and prefix match the dense oracle") {
    Rng g(0x5eedu);
    std::size_t dependent = 0, absorbs = 0;
    for (int instance = 0; instance < 300; ++instance) {
        std::size_t n = 2 + static_cast<std::size_t>(g() % 5);  // 2..6 packets
        DecoderMatrix inc;
        DenseOracle oracle(n);
        std::size_t shots = 1 + static_cast<std::size_t>(g() % 10);
        for (std::size_t s = 0; s < shots; ++s) {
            std::uint64_t a = g() % n;
            std::uint64_t b = g() % n;
            CodedCombination c = make_comb(std::min(a, b), std::max(a, b), g);
            bool inc_grew = inc.absorb(c);
            bool dense_grew = oracle.absorb_dense(DenseOracle::densify(c, n));
            ++absorbs;
            if (!inc_grew) ++dependent;
            CAPTURE(instance);
            CAPTURE(s);
            REQUIRE(inc_grew == dense_grew);
            REQUIRE(inc.rank() == oracle.rank());
            REQUIRE(inc.decoded_prefix() == oracle.decoded_prefix());
        }
    }
    // Both branches must be exercised; the run is deterministic, so the
    // observed 40% dependent rate is stable and both bounds are safe.
    CHECK(dependent > 100);
    CHECK(static_cast<double>(dependent) / static_cast<double>(absorbs) < 0.5);
}

TEST_CASE("full-window combinations are independent with overwhelming probability") {
    Rng g(0xfeedu);
    std::size_t dependent = 0, absorbs = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        DecoderMatrix m;
        for (int s = 0; s < 6; ++s) {
            ++absorbs;
            if (!m.absorb(make_comb(0, 5, g))) ++dependent;
        }
    }
    // Expected dependence rate is about 1/256 on the last draw only.
    CHECK(static_cast<double>(dependent) / static_cast<double>(absorbs) < 0.01);
}
