#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "deepnp/estimators.hpp"
#include "deepnp/ge_channel.hpp"
#include "deepnp/neural.hpp"
#include "deepnp/rlnc.hpp"
#include "deepnp/rng.hpp"

namespace deepnp {

// One slot of forward delay (t_d = 1), so propagation each way is
// (rtt - 1) / 2 slots and feedback for slot t reaches the sender at
// t + rtt - 1.
struct SessionConfig {
    std::size_t rtt = 5;
    double th = 0.0;          // retransmission threshold offset
    std::size_t k = 5;        // new transmissions per scheduled-redundancy period
    std::size_t w = 10;       // maximum window span
    std::size_t total_slots = 1000;
    std::uint64_t seed = 0;
};

void validate(const SessionConfig& config);

inline double propagation_delay(const SessionConfig& config) {
    return (static_cast<double>(config.rtt) - 1.0) / 2.0;
}

// Rate gap between estimated missing and delivered degrees of freedom:
// (md + eps*c_new) / (ad + (1-eps)*c_same) - 1 - th. A positive value calls
// for a retransmission. Zero denominator: +inf when the numerator is
// positive, -1-th when both vanish.
double compute_delta(std::size_t md_nack, std::size_t ad_ack, std::size_t c_new,
                     std::size_t c_same, double eps_hat, double th);

enum class SlotAction { New, Repeat, Fec };
const char* to_string(SlotAction action);

struct SlotRecord {
    std::size_t slot = 0;
    SlotAction action = SlotAction::New;
    std::uint64_t w_min = 0;
    std::uint64_t w_max = 0;
    bool erased = false;
    std::uint8_t feedback_bit = 0;  // delivery bit for this slot's transmission
    double delta = 0.0;
    double eps_hat = 0.0;
};

using SlotTrace = std::vector<SlotRecord>;

struct SessionMetrics {
    double eta = 0.0;
    double delay_mean = std::numeric_limits<double>::quiet_NaN();
    double delay_max = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_packet_delay;
    std::size_t transmissions = 0;
    std::size_t delivered_packets = 0;
    // eta = 0 with nothing delivered is the one tolerated boundary case;
    // this flag marks it for downstream consumers.
    bool no_deliveries = false;
};

struct SessionResult {
    SessionMetrics metrics;
    SlotTrace trace;
};

// Per-slot erasure-rate estimate fed to the sender. history holds the
// feedback bits ingested so far (delayed by one round trip); slot is the
// current slot index, which only the genie uses.
class ErasureRateProvider {
public:
    virtual ~ErasureRateProvider() = default;
    virtual double estimate(const FeedbackHistory& history, std::size_t slot) = 0;
};

// Statistic-based estimate; 0.5 prior until the first feedback arrives.
class StatProvider : public ErasureRateProvider {
public:
    double estimate(const FeedbackHistory& history, std::size_t slot) override;
};

// Running-mean estimate turned into an erasure rate; 0.5 prior when empty.
class MeanProvider : public ErasureRateProvider {
public:
    double estimate(const FeedbackHistory& history, std::size_t slot) override;
};

// Non-causal reference: exact erasure fraction of the in-flight window
// (slot - rtt, slot], read straight from the realization trace.
class GenieProvider : public ErasureRateProvider {
public:
    GenieProvider(const ErasureTrace& erasures, std::size_t rtt);
    double estimate(const FeedbackHistory& history, std::size_t slot) override;

private:
    const ErasureTrace& erasures_;
    std::size_t rtt_;
};

// Trained predictor over the last m feedback bits; 0.5 prior until m bits
// have arrived.
class DeepNPProvider : public ErasureRateProvider {
public:
    explicit DeepNPProvider(PredictorParams params);
    double estimate(const FeedbackHistory& history, std::size_t slot) override;

private:
    PredictorParams params_;
    ForwardCache cache_;
};

// Sender bookkeeping. The window is [w_min, w_max]; packets below w_min are
// known (after one round trip) to be decoded in order.
struct SenderState {
    std::uint64_t w_min = 0;
    std::uint64_t next_packet = 0;  // w_max + 1; window empty iff == w_min
    std::size_t md_nack = 0;        // NACKed transmissions still covering the window
    std::size_t ad_ack = 0;         // ACKed repeats still covering the window
    std::size_t c_new = 0;          // in-flight new-information transmissions
    std::size_t c_same = 0;         // in-flight repeats
    std::size_t new_since_fec = 0;
    std::size_t fec_budget = 0;  // scheduled repeats still owed by the open round
    FeedbackHistory feedback_history;
    std::map<std::uint64_t, std::size_t> first_tx_time;
};

class Sender {
public:
    explicit Sender(const SessionConfig& config);

    // Feedback bit for the transmission emitted at tx_slot. Must be called
    // in transmission order.
    void ingest_feedback(std::size_t tx_slot, bool delivered);

    struct Emission {
        CodedCombination comb;
        SlotAction action = SlotAction::New;
        double delta = 0.0;
    };

    // Chooses this slot's action (window limit, then scheduled redundancy,
    // then the rate-gap test) and draws fresh coefficients for the window.
    Emission emit(std::size_t slot, double eps_hat, Rng& g);

    const SenderState& state() const { return st_; }

private:
    struct SentRecord {
        CodedCombination comb;
        bool is_new = false;
    };

    SessionConfig config_;
    SenderState st_;
    // Mirror of the receiver's decoder, fed by acknowledged combinations;
    // its decoded prefix tells the sender how far w_min may slide.
    DecoderMatrix mirror_;
    std::vector<SentRecord> sent_;       // indexed by slot
    std::deque<std::uint64_t> md_ends_;  // w_max per NACK, retired once below w_min
    std::deque<std::uint64_t> ad_ends_;  // w_max per ACKed repeat
    bool fec_round_open_ = false;        // scheduled-redundancy round in progress
    std::size_t fec_sent_round_ = 0;     // repeats already sent in that round
};

struct ReceiverState {
    DecoderMatrix matrix;
    std::uint64_t delivered = 0;  // in-order decoded packets
    std::map<std::uint64_t, double> decode_time;
};

class Receiver {
public:
    explicit Receiver(double t_prop);

    // comb is null for an erased slot. Returns the feedback bit.
    std::uint8_t receive(std::size_t slot, const CodedCombination* comb);

    const ReceiverState& state() const { return st_; }

private:
    double t_prop_;
    ReceiverState st_;
};

// Per-slot hook for tests and tracing; called after the slot completes.
using SlotObserver =
    std::function<void(const Sender&, const Receiver&, const SlotRecord&)>;

// Runs total_slots slots against a fixed erasure realization (element t is
// slot t's erasure flag). Feedback reaches the sender max(rtt-1, 1) slots
// after transmission.
SessionResult run_session(const SessionConfig& config, const ErasureTrace& erasures,
                          ErasureRateProvider& provider,
                          const SlotObserver& observer = nullptr);

// Convenience overload: draws the realization from the channel first (the
// genie needs it whole), then runs on it.
SessionResult run_session(const SessionConfig& config, GEChannel& channel,
                          ErasureRateProvider& provider);

void write_slot_trace_csv(const std::string& path, const SlotTrace& trace);
void write_metrics_csv(const std::string& path, const SessionMetrics& metrics);

}  // namespace deepnp
