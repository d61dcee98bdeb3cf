#include "deepnp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace deepnp {

double stat_estimate(const FeedbackHistory& history) {
    const auto& bits = history.bits;
    if (bits.empty()) throw std::invalid_argument("stat_estimate: empty history");
    if (history.rtt == 0) throw std::invalid_argument("stat_estimate: rtt must be >= 1");

    double total = static_cast<double>(std::accumulate(bits.begin(), bits.end(), std::size_t{0}));
    double mean_all = total / static_cast<double>(bits.size());

    // For 0/1 bits the population variance reduces to p(1-p) over the window.
    std::size_t window = std::min(history.rtt, bits.size());
    double window_sum = static_cast<double>(
        std::accumulate(bits.end() - static_cast<std::ptrdiff_t>(window), bits.end(), std::size_t{0}));
    double p = window_sum / static_cast<double>(window);
    double variance = p * (1.0 - p);

    double eps = 1.0 - mean_all + std::sqrt(variance) / static_cast<double>(history.rtt);
    return std::clamp(eps, 0.0, 1.0);
}

double mean_estimate(const FeedbackHistory& history) {
    const auto& bits = history.bits;
    if (bits.empty()) throw std::invalid_argument("mean_estimate: empty history");
    double total = static_cast<double>(std::accumulate(bits.begin(), bits.end(), std::size_t{0}));
    return static_cast<double>(history.rtt) * total / static_cast<double>(bits.size());
}

double genie_estimate(const std::vector<std::uint8_t>& delivered_window) {
    if (delivered_window.empty()) {
        throw std::invalid_argument("genie_estimate: empty window");
    }
    std::size_t erased = 0;
    for (auto d : delivered_window) {
        if (!d) ++erased;
    }
    return static_cast<double>(erased) / static_cast<double>(delivered_window.size());
}

}  // namespace deepnp
