#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepnp/rng.hpp"

namespace deepnp {

// Hidden width of every LSTM cell.
inline constexpr std::size_t kHidden = 4;

// One LSTM cell: gate weights over the (m+1)-wide input (the m feedback
// bits plus the previous block's output), recurrent weights over the
// hidden state, and gate biases. All matrices row-major.
struct LSTMCellParams {
    std::vector<double> w_i, w_f, w_o, w_c;  // kHidden x (m+1)
    std::vector<double> u_i, u_f, u_o, u_c;  // kHidden x kHidden
    std::vector<double> b_i, b_f, b_o, b_c;  // kHidden
};

// Cell plus the affine-sigmoid head that turns the hidden state into one
// delivery probability. head_b is kept as a one-element vector so all
// parameter arrays can be walked uniformly.
struct BlockParams {
    LSTMCellParams cell;
    std::vector<double> head_w;  // kHidden
    std::vector<double> head_b;  // 1
};

// The unrolled predictor: rtt chained blocks. Block j receives the m
// feedback bits plus block j-1's output, and hidden/cell state flow down
// the chain. With tied=true a single block is reused at every position.
struct PredictorParams {
    std::size_t m = 0;
    std::size_t rtt = 0;
    bool tied = false;
    std::vector<BlockParams> blocks;

    const BlockParams& block(std::size_t j) const { return tied ? blocks[0] : blocks[j]; }
    BlockParams& block(std::size_t j) { return tied ? blocks[0] : blocks[j]; }
    std::size_t block_count() const { return tied ? 1 : rtt; }
};

// Walks every parameter array of every block in a fixed order. Gradients,
// optimizer moments and serialization all reuse this traversal.
template <class Params, class F>
void for_each_param(Params&& p, F&& f) {
    for (auto&& b : p.blocks) {
        f(b.cell.w_i); f(b.cell.w_f); f(b.cell.w_o); f(b.cell.w_c);
        f(b.cell.u_i); f(b.cell.u_f); f(b.cell.u_o); f(b.cell.u_c);
        f(b.cell.b_i); f(b.cell.b_f); f(b.cell.b_o); f(b.cell.b_c);
        f(b.head_w); f(b.head_b);
    }
}

// All-zero parameters with the right shapes.
PredictorParams make_params(std::size_t m, std::size_t rtt, bool tied = false);

// Random init: every weight uniform in [-1/sqrt(kHidden), 1/sqrt(kHidden)],
// then the forget-gate bias overwritten to +1 so early training does not
// flush the cell state.
PredictorParams init_params(std::size_t m, std::size_t rtt, Rng& g, bool tied = false);

// Intermediate activations of one forward pass, kept for backprop.
struct ForwardCache {
    std::vector<double> gi, gf, go, gg;  // gate activations, rtt * kHidden
    std::vector<double> c, tc, h;        // cell, tanh(cell), hidden
    std::vector<double> y;               // block outputs p-hat
    std::vector<double> y_in;            // previous-output input per block
};

// Runs the chain on m feedback bits; returns the rtt delivery
// probabilities and fills the cache.
void forward(const PredictorParams& params, std::span<const std::uint8_t> f_vec,
             ForwardCache& cache);

// Convenience overload without cache reuse.
std::vector<double> forward(const PredictorParams& params, std::span<const std::uint8_t> f_vec);

// Training loss over one window: sqrt of the summed squared error plus
// lambda times the position-weighted binary cross entropy, weight
// ln(rtt - i + 1) for position i counted from 1 (earliest). Probabilities
// are clamped to [1e-7, 1 - 1e-7] inside the cross entropy.
double loss(const std::vector<double>& p_hat, std::span<const std::uint8_t> f_true,
            double lambda);

// Analytic gradient of loss(forward(f_vec), f_true) accumulated (+=) into
// grads, which must have the same shapes as params. Returns the loss.
double backward(const PredictorParams& params, std::span<const std::uint8_t> f_vec,
                std::span<const std::uint8_t> f_true, double lambda,
                ForwardCache& cache, PredictorParams& grads);

// Adam moments; t counts completed steps for bias correction.
struct AdamState {
    PredictorParams m1, m2;
    std::size_t t = 0;
};

AdamState make_adam_state(const PredictorParams& like);

void adam_step(PredictorParams& params, const PredictorParams& grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// One supervised example: m feedback bits ending at the feedback horizon,
// and the rtt delivery bits that follow them.
struct Example {
    std::vector<std::uint8_t> f_vec;
    std::vector<std::uint8_t> target;
};

// Sliding-window examples over a feedback trace (1 = delivered), in
// chronological order. Examples before split_index train; the rest are
// held out.
struct Dataset {
    std::vector<Example> examples;
    std::size_t split_index = 0;

    std::span<const Example> train() const {
        return {examples.data(), split_index};
    }
    std::span<const Example> heldout() const {
        return {examples.data() + split_index, examples.size() - split_index};
    }
};

Dataset make_dataset(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                     std::size_t rtt, double split = 0.6);

struct TrainConfig {
    double lambda = 1.0;
    double learning_rate = 1e-4;
    std::size_t batch_size = 100;
    double split = 0.6;
    std::size_t max_epochs = 50;
    std::size_t patience = 5;     // epochs without validation improvement
    std::uint64_t seed = 0;
    bool tied = false;
    // Batches between validation probes. The hard-decision error dips well
    // inside the first epochs before the chain saturates, so the stopper
    // has to look more often than once per epoch to catch the best model.
    std::size_t eval_every = 25;
};

struct TrainReport {
    std::vector<double> epoch_train_loss;
    // (global batch index, validation MAE) at every probe
    std::vector<std::pair<std::size_t, double>> val_mae_curve;
    double best_val_mae = std::numeric_limits<double>::infinity();
    std::size_t best_batch = 0;
    std::size_t epochs_run = 0;
    bool diverged = false;
};

struct TrainResult {
    PredictorParams params;
    TrainReport report;
};

// Minibatch Adam on the windowed loss over the chronological train split,
// early-stopped on held-out MAE with best-checkpoint restore.
// Deterministic for a fixed config.
TrainResult train(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                  std::size_t rtt, const TrainConfig& config);

// Erasure-rate estimate from hard decisions: 1 - (1/rtt) * sum of rounded
// probabilities, ties rounding up.
double predict_epsilon(const PredictorParams& params, std::span<const std::uint8_t> f_vec);

// Mean absolute error between the hard-decision delivery count and the true
// count, averaged over the given examples.
double mae_per_rtt(const PredictorParams& params, std::span<const Example> examples);

// Error of the running-mean baseline on the same held-out examples: for the
// example at horizon t the baseline predicts rtt times the delivery mean of
// all bits before t.
double naive_mean_mae(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                      std::size_t rtt, double split = 0.6);

// JSON round-trip of trained parameters (versioned container).
void save_params(const std::string& path, const PredictorParams& params);
PredictorParams load_params(const std::string& path);

}  // namespace deepnp
