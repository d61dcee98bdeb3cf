#include "deepnp/rlnc.hpp"

#include <algorithm>
#include <stdexcept>

namespace deepnp {

namespace {

void trim_trailing_zeros(std::vector<FieldElement>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

}  // namespace

std::vector<FieldElement> random_coefficients(std::size_t span, Rng& g) {
    if (span == 0) throw std::invalid_argument("random_coefficients: span must be >= 1");
    std::vector<FieldElement> coeffs(span);
    for (auto& c : coeffs) {
        c = static_cast<FieldElement>(g() % 255 + 1);
    }
    return coeffs;
}

DecoderMatrix::DecoderMatrix(std::uint64_t base_index)
    : base_(base_index), decoded_prefix_(base_index) {}

bool DecoderMatrix::absorb(const CodedCombination& comb) {
    if (comb.w_min < base_) {
        throw std::invalid_argument("DecoderMatrix::absorb: window starts below base index");
    }
    if (comb.w_min > comb.w_max || comb.coeffs.size() != comb.w_max - comb.w_min + 1) {
        throw std::invalid_argument("DecoderMatrix::absorb: malformed combination");
    }
    if (std::all_of(comb.coeffs.begin(), comb.coeffs.end(),
                    [](FieldElement c) { return c == 0; })) {
        throw std::invalid_argument("DecoderMatrix::absorb: all-zero combination");
    }

    std::uint64_t start = comb.w_min;
    std::vector<FieldElement> vec = comb.coeffs;

    auto strip_front = [&] {
        std::size_t lead = 0;
        while (lead < vec.size() && vec[lead] == 0) ++lead;
        vec.erase(vec.begin(), vec.begin() + static_cast<std::ptrdiff_t>(lead));
        start += lead;
    };
    strip_front();

    // Forward elimination against existing pivots.
    while (!vec.empty()) {
        auto it = rows_.find(start);
        if (it == rows_.end()) break;
        const auto& row = it->second;
        if (vec.size() < row.size()) vec.resize(row.size(), 0);
        FieldElement factor = vec[0];
        for (std::size_t i = 0; i < row.size(); ++i) {
            vec[i] = gf_add(vec[i], gf_mul(factor, row[i]));
        }
        strip_front();
    }
    trim_trailing_zeros(vec);
    if (vec.empty()) return false;

    // Normalize so the pivot coefficient is 1.
    FieldElement inv = gf_inv(vec[0]);
    for (auto& c : vec) c = gf_mul(c, inv);

    // Reduce the tail against pivots beyond the insertion point, otherwise
    // the stored row is only in echelon form and never collapses to a unit.
    for (std::size_t i = 1; i < vec.size(); ++i) {
        if (vec[i] == 0) continue;
        auto it = rows_.find(start + i);
        if (it == rows_.end()) continue;
        const auto& row = it->second;
        FieldElement factor = vec[i];
        std::size_t need = i + row.size();
        if (vec.size() < need) vec.resize(need, 0);
        for (std::size_t j = 0; j < row.size(); ++j) {
            vec[i + j] = gf_add(vec[i + j], gf_mul(factor, row[j]));
        }
    }
    trim_trailing_zeros(vec);

    auto [pos, inserted] = rows_.emplace(start, std::move(vec));
    const auto& pivot_row = pos->second;

    // Back-substitute the new pivot out of rows above it. Unit rows below
    // decoded_prefix_ cannot reach this column, so start the scan there.
    for (auto it = rows_.lower_bound(decoded_prefix_); it->first < start; ++it) {
        auto& row = it->second;
        std::uint64_t col = start - it->first;
        if (col >= row.size() || row[col] == 0) continue;
        FieldElement factor = row[col];
        std::size_t need = static_cast<std::size_t>(col) + pivot_row.size();
        if (row.size() < need) row.resize(need, 0);
        for (std::size_t i = 0; i < pivot_row.size(); ++i) {
            row[col + i] = gf_add(row[col + i], gf_mul(factor, pivot_row[i]));
        }
        trim_trailing_zeros(row);
    }

    while (true) {
        auto it = rows_.find(decoded_prefix_);
        if (it == rows_.end() || it->second.size() != 1) break;
        ++decoded_prefix_;
    }
    return true;
}

}  // namespace deepnp
