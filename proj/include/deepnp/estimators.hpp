#pragma once

#include <cstdint>
#include <vector>

namespace deepnp {

// Feedback bits as the sender has received them, oldest first. bits[j] is
// f for the j-th acknowledged transmission, 1 = delivered. Feedback lags
// the channel by one round trip, so the newest entry describes a slot
// roughly rtt slots in the past.
struct FeedbackHistory {
    std::vector<std::uint8_t> bits;
    std::size_t rtt = 1;
};

// Statistic-based erasure estimate: one minus the running delivery mean,
// plus a variance safety margin sqrt(V)/rtt where V is the empirical
// variance of the last rtt bits (all bits when fewer are available).
// Clamped to [0,1]. Throws std::invalid_argument on empty history.
double stat_estimate(const FeedbackHistory& history);

// Expected deliveries per round trip: rtt times the running delivery mean.
// Throws std::invalid_argument on empty history.
double mean_estimate(const FeedbackHistory& history);

// Exact erasure fraction of a window of delivery flags (1 = delivered).
// Simulator-only reference: a real sender never sees these in time.
double genie_estimate(const std::vector<std::uint8_t>& delivered_window);

}  // namespace deepnp
