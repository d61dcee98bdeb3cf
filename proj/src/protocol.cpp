#include "deepnp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "deepnp/util.hpp"

namespace deepnp {

void validate(const SessionConfig& config) {
    if (config.rtt == 0) throw std::invalid_argument("SessionConfig: rtt must be >= 1");
    if (config.k == 0) throw std::invalid_argument("SessionConfig: k must be >= 1");
    if (config.w == 0) throw std::invalid_argument("SessionConfig: w must be >= 1");
    if (config.th < 0.0) throw std::invalid_argument("SessionConfig: th must be >= 0");
    if (config.total_slots == 0) {
        throw std::invalid_argument("SessionConfig: total_slots must be >= 1");
    }
}

double compute_delta(std::size_t md_nack, std::size_t ad_ack, std::size_t c_new,
                     std::size_t c_same, double eps_hat, double th) {
    double num = static_cast<double>(md_nack) + eps_hat * static_cast<double>(c_new);
    double den = static_cast<double>(ad_ack) + (1.0 - eps_hat) * static_cast<double>(c_same);
    if (den == 0.0) {
        if (num > 0.0) return std::numeric_limits<double>::infinity();
        return -1.0 - th;
    }
    return num / den - 1.0 - th;
}

const char* to_string(SlotAction action) {
    switch (action) {
        case SlotAction::New: return "new";
        case SlotAction::Repeat: return "repeat";
        case SlotAction::Fec: return "fec";
    }
    return "?";
}

double StatProvider::estimate(const FeedbackHistory& history, std::size_t) {
    if (history.bits.empty()) return 0.5;
    return stat_estimate(history);
}

double MeanProvider::estimate(const FeedbackHistory& history, std::size_t) {
    if (history.bits.empty()) return 0.5;
    return clamp01(1.0 - mean_estimate(history) / static_cast<double>(history.rtt));
}

GenieProvider::GenieProvider(const ErasureTrace& erasures, std::size_t rtt)
    : erasures_(erasures), rtt_(rtt) {
    if (rtt_ == 0) throw std::invalid_argument("GenieProvider: rtt must be >= 1");
}

double GenieProvider::estimate(const FeedbackHistory&, std::size_t slot) {
    if (slot >= erasures_.size()) {
        throw std::out_of_range("GenieProvider: slot beyond the realization trace");
    }
    std::size_t lo = slot + 1 >= rtt_ ? slot + 1 - rtt_ : 0;
    std::vector<std::uint8_t> delivered;
    delivered.reserve(slot - lo + 1);
    for (std::size_t t = lo; t <= slot; ++t) {
        delivered.push_back(erasures_[t] ? 0 : 1);
    }
    return genie_estimate(delivered);
}

DeepNPProvider::DeepNPProvider(PredictorParams params) : params_(std::move(params)) {}

double DeepNPProvider::estimate(const FeedbackHistory& history, std::size_t) {
    if (history.bits.size() < params_.m) return 0.5;
    std::span<const std::uint8_t> tail{history.bits.data() + history.bits.size() - params_.m,
                                       params_.m};
    forward(params_, tail, cache_);
    double delivered = 0.0;
    for (double p : cache_.y) delivered += round_half_up(p);
    return 1.0 - delivered / static_cast<double>(params_.rtt);
}

Sender::Sender(const SessionConfig& config) : config_(config) {
    validate(config_);
    st_.feedback_history.rtt = config_.rtt;
}

void Sender::ingest_feedback(std::size_t tx_slot, bool delivered) {
    if (tx_slot >= sent_.size()) {
        throw std::invalid_argument("Sender::ingest_feedback: unknown transmission slot");
    }
    const SentRecord& rec = sent_[tx_slot];
    st_.feedback_history.bits.push_back(delivered ? 1 : 0);
    if (rec.is_new) {
        --st_.c_new;
    } else {
        --st_.c_same;
    }
    if (delivered) {
        // Replays the receiver's absorb in the same order, so the mirror's
        // decoded prefix equals the receiver's as of the feedback horizon.
        mirror_.absorb(rec.comb);
        if (!rec.is_new) {
            ++st_.ad_ack;
            ad_ends_.push_back(rec.comb.w_max);
        }
    } else if (rec.is_new) {
        // Only a lost new-information transmission adds to the window's
        // deficit; a lost repeat was pure redundancy and already stopped
        // counting when it left c_same.
        ++st_.md_nack;
        md_ends_.push_back(rec.comb.w_max);
    }

    std::uint64_t prefix = mirror_.decoded_prefix();
    if (prefix > st_.w_min) {
        st_.w_min = prefix;
        // The scheduled-redundancy round was sized for the window as it
        // stood; once the window advances the remainder is stale debt.
        st_.fec_budget = 0;
        fec_round_open_ = false;
    }

    // Retire counters whose window has been decoded, including an entry
    // pushed just now for a transmission the window already slid past.
    // Entries arrive in slot order and w_max never decreases, so the stale
    // ones sit at the front.
    while (!md_ends_.empty() && md_ends_.front() < st_.w_min) {
        md_ends_.pop_front();
        --st_.md_nack;
    }
    while (!ad_ends_.empty() && ad_ends_.front() < st_.w_min) {
        ad_ends_.pop_front();
        --st_.ad_ack;
    }
}

Sender::Emission Sender::emit(std::size_t slot, double eps_hat, Rng& g) {
    std::uint64_t span = st_.next_packet - st_.w_min;
    double delta = compute_delta(st_.md_nack, st_.ad_ack, st_.c_new, st_.c_same, eps_hat,
                                 config_.th);

    // The scheduled redundancy owed by an open round tracks the estimate at
    // each transmission instant, so a round shrinks (or grows) with eps_hat
    // instead of spending a count fixed when the round opened.
    if (fec_round_open_) {
        std::size_t target = static_cast<std::size_t>(
            round_half_up(eps_hat * static_cast<double>(config_.k)));
        if (target > fec_sent_round_) {
            st_.fec_budget = target - fec_sent_round_;
        } else {
            st_.fec_budget = 0;
            fec_round_open_ = false;
        }
    }

    SlotAction action;
    if (span == 0) {
        // Everything sent so far is decoded; only new data can help.
        action = SlotAction::New;
    } else if (span >= config_.w) {
        action = SlotAction::Repeat;
    } else if (st_.fec_budget > 0) {
        --st_.fec_budget;
        ++fec_sent_round_;
        action = SlotAction::Fec;
    } else if (delta > 0.0) {
        action = SlotAction::Repeat;
    } else {
        action = SlotAction::New;
    }

    if (action == SlotAction::New) {
        std::uint64_t pkt = st_.next_packet++;
        st_.first_tx_time.emplace(pkt, slot);
        ++st_.new_since_fec;
        if (st_.new_since_fec >= config_.k) {
            st_.fec_budget = static_cast<std::size_t>(
                round_half_up(eps_hat * static_cast<double>(config_.k)));
            fec_round_open_ = st_.fec_budget > 0;
            fec_sent_round_ = 0;
            st_.new_since_fec = 0;
        }
    }

    CodedCombination comb;
    comb.w_min = st_.w_min;
    comb.w_max = st_.next_packet - 1;
    comb.coeffs = random_coefficients(st_.next_packet - st_.w_min, g);

    sent_.push_back({comb, action == SlotAction::New});
    if (action == SlotAction::New) {
        ++st_.c_new;
    } else {
        ++st_.c_same;
    }
    return {std::move(comb), action, delta};
}

Receiver::Receiver(double t_prop) : t_prop_(t_prop) {}

std::uint8_t Receiver::receive(std::size_t slot, const CodedCombination* comb) {
    if (comb == nullptr) return 0;
    std::uint64_t before = st_.matrix.decoded_prefix();
    st_.matrix.absorb(*comb);
    std::uint64_t after = st_.matrix.decoded_prefix();
    for (std::uint64_t p = before; p < after; ++p) {
        st_.decode_time.emplace(p, static_cast<double>(slot) + t_prop_);
    }
    st_.delivered = after;
    return 1;
}

SessionResult run_session(const SessionConfig& config, const ErasureTrace& erasures,
                          ErasureRateProvider& provider, const SlotObserver& observer) {
    validate(config);
    if (erasures.size() < config.total_slots) {
        throw std::invalid_argument("run_session: erasure trace shorter than the session");
    }

    Rng coeff_rng(config.seed);
    Sender sender(config);
    Receiver receiver(propagation_delay(config));
    std::size_t fb_delay = std::max<std::size_t>(config.rtt - 1, 1);

    SessionResult result;
    result.trace.reserve(config.total_slots);
    std::vector<std::uint8_t> delivery_bits(config.total_slots, 0);

    for (std::size_t slot = 0; slot < config.total_slots; ++slot) {
        if (slot >= fb_delay) {
            std::size_t tx_slot = slot - fb_delay;
            sender.ingest_feedback(tx_slot, delivery_bits[tx_slot] != 0);
        }
        double eps_hat = provider.estimate(sender.state().feedback_history, slot);
        Sender::Emission emission = sender.emit(slot, eps_hat, coeff_rng);
        bool erased = erasures[slot] != 0;
        std::uint8_t fb = receiver.receive(slot, erased ? nullptr : &emission.comb);
        delivery_bits[slot] = fb;

        SlotRecord record{slot,  emission.action, emission.comb.w_min, emission.comb.w_max,
                          erased, fb,             emission.delta,      eps_hat};
        result.trace.push_back(record);
        if (observer) observer(sender, receiver, record);
    }

    SessionMetrics& metrics = result.metrics;
    metrics.transmissions = config.total_slots;
    metrics.delivered_packets = receiver.state().delivered;
    metrics.eta = static_cast<double>(metrics.delivered_packets) /
                  static_cast<double>(metrics.transmissions);
    metrics.no_deliveries = metrics.delivered_packets == 0;

    const auto& first_tx = sender.state().first_tx_time;
    const auto& decode_time = receiver.state().decode_time;
    metrics.per_packet_delay.reserve(metrics.delivered_packets);
    for (std::uint64_t p = 0; p < metrics.delivered_packets; ++p) {
        double delay = decode_time.at(p) - static_cast<double>(first_tx.at(p));
        metrics.per_packet_delay.push_back(delay);
    }
    if (!metrics.per_packet_delay.empty()) {
        double sum = 0.0;
        double mx = 0.0;
        for (double d : metrics.per_packet_delay) {
            sum += d;
            mx = std::max(mx, d);
        }
        metrics.delay_mean = sum / static_cast<double>(metrics.per_packet_delay.size());
        metrics.delay_max = mx;
    }
    return result;
}

SessionResult run_session(const SessionConfig& config, GEChannel& channel,
                          ErasureRateProvider& provider) {
    validate(config);
    ErasureTrace erasures(config.total_slots);
    for (auto& slot : erasures) slot = channel.step() ? 1 : 0;
    return run_session(config, erasures, provider);
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

}  // namespace

void write_slot_trace_csv(const std::string& path, const SlotTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_slot_trace_csv: cannot open " + path);
    out << "slot,action,w_min,w_max,erased,feedback_bit,delta,eps_hat\n";
    for (const auto& r : trace) {
        out << r.slot << ',' << to_string(r.action) << ',' << r.w_min << ',' << r.w_max << ','
            << (r.erased ? 1 : 0) << ',' << static_cast<int>(r.feedback_bit) << ','
            << format_double(r.delta) << ',' << format_double(r.eps_hat) << '\n';
    }
}

void write_metrics_csv(const std::string& path, const SessionMetrics& metrics) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path);
    out << "eta,delay_mean,delay_max,delivered,transmissions\n";
    out << format_double(metrics.eta) << ',' << format_double(metrics.delay_mean) << ','
        << format_double(metrics.delay_max) << ',' << metrics.delivered_packets << ','
        << metrics.transmissions << '\n';
}

}  // namespace deepnp
