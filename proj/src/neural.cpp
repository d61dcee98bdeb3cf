#include "deepnp/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "deepnp/util.hpp"

namespace deepnp {

namespace {

constexpr double kProbClamp = 1e-7;

double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<std::vector<double>*> param_arrays(PredictorParams& p) {
    std::vector<std::vector<double>*> out;
    for_each_param(p, [&](std::vector<double>& v) { out.push_back(&v); });
    return out;
}

std::vector<const std::vector<double>*> param_arrays(const PredictorParams& p) {
    std::vector<const std::vector<double>*> out;
    for_each_param(p, [&](const std::vector<double>& v) { out.push_back(&v); });
    return out;
}

}  // namespace

PredictorParams make_params(std::size_t m, std::size_t rtt, bool tied) {
    if (m == 0 || rtt == 0) {
        throw std::invalid_argument("make_params: m and rtt must be >= 1");
    }
    BlockParams proto;
    for (auto* w : {&proto.cell.w_i, &proto.cell.w_f, &proto.cell.w_o, &proto.cell.w_c}) {
        w->assign(kHidden * (m + 1), 0.0);
    }
    for (auto* u : {&proto.cell.u_i, &proto.cell.u_f, &proto.cell.u_o, &proto.cell.u_c}) {
        u->assign(kHidden * kHidden, 0.0);
    }
    for (auto* b : {&proto.cell.b_i, &proto.cell.b_f, &proto.cell.b_o, &proto.cell.b_c}) {
        b->assign(kHidden, 0.0);
    }
    proto.head_w.assign(kHidden, 0.0);
    proto.head_b.assign(1, 0.0);

    PredictorParams p;
    p.m = m;
    p.rtt = rtt;
    p.tied = tied;
    p.blocks.assign(tied ? 1 : rtt, proto);
    return p;
}

PredictorParams init_params(std::size_t m, std::size_t rtt, Rng& g, bool tied) {
    PredictorParams p = make_params(m, rtt, tied);
    double lim = 1.0 / std::sqrt(static_cast<double>(kHidden));
    for_each_param(p, [&](std::vector<double>& v) {
        for (auto& x : v) x = uniform_range(g, -lim, lim);
    });
    for (auto& b : p.blocks) {
        std::fill(b.cell.b_f.begin(), b.cell.b_f.end(), 1.0);
    }
    return p;
}

void forward(const PredictorParams& params, std::span<const std::uint8_t> f_vec,
             ForwardCache& cache) {
    const std::size_t m = params.m;
    const std::size_t rtt = params.rtt;
    const std::size_t H = kHidden;
    const std::size_t in = m + 1;
    if (f_vec.size() != m) {
        throw std::invalid_argument("forward: feedback vector length mismatch");
    }

    cache.gi.resize(rtt * H);
    cache.gf.resize(rtt * H);
    cache.go.resize(rtt * H);
    cache.gg.resize(rtt * H);
    cache.c.resize(rtt * H);
    cache.tc.resize(rtt * H);
    cache.h.resize(rtt * H);
    cache.y.resize(rtt);
    cache.y_in.resize(rtt);

    double h_prev[kHidden] = {};
    double c_prev[kHidden] = {};
    double y_prev = 0.5;

    for (std::size_t j = 0; j < rtt; ++j) {
        const BlockParams& blk = params.block(j);
        cache.y_in[j] = y_prev;
        double* gi = &cache.gi[j * H];
        double* gf = &cache.gf[j * H];
        double* go = &cache.go[j * H];
        double* gg = &cache.gg[j * H];
        double* cc = &cache.c[j * H];
        double* tc = &cache.tc[j * H];
        double* hh = &cache.h[j * H];

        for (std::size_t r = 0; r < H; ++r) {
            double zi = blk.cell.b_i[r];
            double zf = blk.cell.b_f[r];
            double zo = blk.cell.b_o[r];
            double zc = blk.cell.b_c[r];
            const double* wi = &blk.cell.w_i[r * in];
            const double* wf = &blk.cell.w_f[r * in];
            const double* wo = &blk.cell.w_o[r * in];
            const double* wc = &blk.cell.w_c[r * in];
            for (std::size_t k = 0; k < m; ++k) {
                double xk = static_cast<double>(f_vec[k]);
                zi += wi[k] * xk;
                zf += wf[k] * xk;
                zo += wo[k] * xk;
                zc += wc[k] * xk;
            }
            zi += wi[m] * y_prev;
            zf += wf[m] * y_prev;
            zo += wo[m] * y_prev;
            zc += wc[m] * y_prev;
            const double* ui = &blk.cell.u_i[r * H];
            const double* uf = &blk.cell.u_f[r * H];
            const double* uo = &blk.cell.u_o[r * H];
            const double* uc = &blk.cell.u_c[r * H];
            for (std::size_t k = 0; k < H; ++k) {
                double hk = h_prev[k];
                zi += ui[k] * hk;
                zf += uf[k] * hk;
                zo += uo[k] * hk;
                zc += uc[k] * hk;
            }
            double iv = sigmoid(zi);
            double fv = sigmoid(zf);
            double ov = sigmoid(zo);
            double gv = std::tanh(zc);
            double cv = fv * c_prev[r] + iv * gv;
            double tcv = std::tanh(cv);
            gi[r] = iv;
            gf[r] = fv;
            go[r] = ov;
            gg[r] = gv;
            cc[r] = cv;
            tc[r] = tcv;
            hh[r] = ov * tcv;
        }

        double z = blk.head_b[0];
        for (std::size_t r = 0; r < H; ++r) z += blk.head_w[r] * hh[r];
        double y = sigmoid(z);
        cache.y[j] = y;

        for (std::size_t r = 0; r < H; ++r) {
            h_prev[r] = hh[r];
            c_prev[r] = cc[r];
        }
        y_prev = y;
    }
}

std::vector<double> forward(const PredictorParams& params, std::span<const std::uint8_t> f_vec) {
    ForwardCache cache;
    forward(params, f_vec, cache);
    return cache.y;
}

double loss(const std::vector<double>& p_hat, std::span<const std::uint8_t> f_true,
            double lambda) {
    if (p_hat.empty() || p_hat.size() != f_true.size()) {
        throw std::invalid_argument("loss: length mismatch");
    }
    std::size_t rtt = p_hat.size();
    double ss = 0.0;
    for (std::size_t j = 0; j < rtt; ++j) {
        double d = p_hat[j] - static_cast<double>(f_true[j]);
        ss += d * d;
    }
    double total = std::sqrt(ss);
    for (std::size_t j = 0; j < rtt; ++j) {
        double weight = std::log(static_cast<double>(rtt - j));
        double pc = std::clamp(p_hat[j], kProbClamp, 1.0 - kProbClamp);
        double f = static_cast<double>(f_true[j]);
        double hb = -(f * std::log(pc) + (1.0 - f) * std::log(1.0 - pc));
        total += lambda * weight * hb;
    }
    return total;
}

double backward(const PredictorParams& params, std::span<const std::uint8_t> f_vec,
                std::span<const std::uint8_t> f_true, double lambda,
                ForwardCache& cache, PredictorParams& grads) {
    const std::size_t m = params.m;
    const std::size_t rtt = params.rtt;
    const std::size_t H = kHidden;
    const std::size_t in = m + 1;
    if (f_true.size() != rtt) {
        throw std::invalid_argument("backward: target length mismatch");
    }

    forward(params, f_vec, cache);
    double loss_value = loss(cache.y, f_true, lambda);

    // dL/dp_j from both loss terms. The clamp inside the cross entropy has
    // zero slope outside its range, which only triggers when the sigmoid
    // saturates to an exact 0 or 1 in double precision.
    std::vector<double> dy(rtt);
    double ss = 0.0;
    for (std::size_t j = 0; j < rtt; ++j) {
        double d = cache.y[j] - static_cast<double>(f_true[j]);
        ss += d * d;
    }
    double rmse = std::sqrt(ss);
    for (std::size_t j = 0; j < rtt; ++j) {
        double p = cache.y[j];
        double f = static_cast<double>(f_true[j]);
        double g = rmse > 0.0 ? (p - f) / rmse : 0.0;
        if (p > kProbClamp && p < 1.0 - kProbClamp) {
            double weight = std::log(static_cast<double>(rtt - j));
            g += lambda * weight * (p - f) / (p * (1.0 - p));
        }
        dy[j] = g;
    }

    double dh_next[kHidden] = {};
    double dc_next[kHidden] = {};
    double dy_total = dy[rtt - 1];

    for (std::size_t j = rtt; j-- > 0;) {
        const BlockParams& blk = params.block(j);
        BlockParams& grd = grads.block(j);
        const double* iv = &cache.gi[j * H];
        const double* fv = &cache.gf[j * H];
        const double* ov = &cache.go[j * H];
        const double* gv = &cache.gg[j * H];
        const double* tcv = &cache.tc[j * H];
        const double* hh = &cache.h[j * H];
        const double* c_prev = j > 0 ? &cache.c[(j - 1) * H] : nullptr;
        const double* h_prev = j > 0 ? &cache.h[(j - 1) * H] : nullptr;
        double y_prev = cache.y_in[j];

        // head
        double y = cache.y[j];
        double dz = dy_total * y * (1.0 - y);
        double dh[kHidden];
        for (std::size_t r = 0; r < H; ++r) {
            grd.head_w[r] += dz * hh[r];
            dh[r] = dh_next[r] + dz * blk.head_w[r];
        }
        grd.head_b[0] += dz;

        // cell
        double dpre_i[kHidden], dpre_f[kHidden], dpre_o[kHidden], dpre_c[kHidden];
        for (std::size_t r = 0; r < H; ++r) {
            double cp = c_prev ? c_prev[r] : 0.0;
            double dov = dh[r] * tcv[r];
            double dcv = dc_next[r] + dh[r] * ov[r] * (1.0 - tcv[r] * tcv[r]);
            double div = dcv * gv[r];
            double dgv = dcv * iv[r];
            double dfv = dcv * cp;
            dc_next[r] = dcv * fv[r];
            dpre_i[r] = div * iv[r] * (1.0 - iv[r]);
            dpre_f[r] = dfv * fv[r] * (1.0 - fv[r]);
            dpre_o[r] = dov * ov[r] * (1.0 - ov[r]);
            dpre_c[r] = dgv * (1.0 - gv[r] * gv[r]);
        }

        double dy_prev = 0.0;
        double dh_prev[kHidden] = {};
        for (std::size_t r = 0; r < H; ++r) {
            double* gwi = &grd.cell.w_i[r * in];
            double* gwf = &grd.cell.w_f[r * in];
            double* gwo = &grd.cell.w_o[r * in];
            double* gwc = &grd.cell.w_c[r * in];
            const double* wi = &blk.cell.w_i[r * in];
            const double* wf = &blk.cell.w_f[r * in];
            const double* wo = &blk.cell.w_o[r * in];
            const double* wc = &blk.cell.w_c[r * in];
            for (std::size_t k = 0; k < m; ++k) {
                double xk = static_cast<double>(f_vec[k]);
                gwi[k] += dpre_i[r] * xk;
                gwf[k] += dpre_f[r] * xk;
                gwo[k] += dpre_o[r] * xk;
                gwc[k] += dpre_c[r] * xk;
            }
            gwi[m] += dpre_i[r] * y_prev;
            gwf[m] += dpre_f[r] * y_prev;
            gwo[m] += dpre_o[r] * y_prev;
            gwc[m] += dpre_c[r] * y_prev;
            dy_prev += wi[m] * dpre_i[r] + wf[m] * dpre_f[r] + wo[m] * dpre_o[r] +
                       wc[m] * dpre_c[r];

            double* gui = &grd.cell.u_i[r * H];
            double* guf = &grd.cell.u_f[r * H];
            double* guo = &grd.cell.u_o[r * H];
            double* guc = &grd.cell.u_c[r * H];
            const double* ui = &blk.cell.u_i[r * H];
            const double* uf = &blk.cell.u_f[r * H];
            const double* uo = &blk.cell.u_o[r * H];
            const double* uc = &blk.cell.u_c[r * H];
            for (std::size_t k = 0; k < H; ++k) {
                double hk = h_prev ? h_prev[k] : 0.0;
                gui[k] += dpre_i[r] * hk;
                guf[k] += dpre_f[r] * hk;
                guo[k] += dpre_o[r] * hk;
                guc[k] += dpre_c[r] * hk;
                dh_prev[k] += ui[k] * dpre_i[r] + uf[k] * dpre_f[r] + uo[k] * dpre_o[r] +
                              uc[k] * dpre_c[r];
            }
            grd.cell.b_i[r] += dpre_i[r];
            grd.cell.b_f[r] += dpre_f[r];
            grd.cell.b_o[r] += dpre_o[r];
            grd.cell.b_c[r] += dpre_c[r];
        }

        if (j > 0) {
            dy_total = dy[j - 1] + dy_prev;
            for (std::size_t r = 0; r < H; ++r) dh_next[r] = dh_prev[r];
        }
    }
    return loss_value;
}

AdamState make_adam_state(const PredictorParams& like) {
    AdamState s;
    s.m1 = make_params(like.m, like.rtt, like.tied);
    s.m2 = make_params(like.m, like.rtt, like.tied);
    s.t = 0;
    return s;
}

void adam_step(PredictorParams& params, const PredictorParams& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
    auto tp = param_arrays(params);
    auto tg = param_arrays(grads);
    auto t1 = param_arrays(state.m1);
    auto t2 = param_arrays(state.m2);
    if (tp.size() != tg.size() || tp.size() != t1.size() || tp.size() != t2.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    state.t += 1;
    double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t a = 0; a < tp.size(); ++a) {
        auto& p = *tp[a];
        const auto& g = *tg[a];
        auto& m1 = *t1[a];
        auto& m2 = *t2[a];
        if (p.size() != g.size()) throw std::invalid_argument("adam_step: shape mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m1[i] = beta1 * m1[i] + (1.0 - beta1) * g[i];
            m2[i] = beta2 * m2[i] + (1.0 - beta2) * g[i] * g[i];
            double mhat = m1[i] / c1;
            double vhat = m2[i] / c2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

Dataset make_dataset(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                     std::size_t rtt, double split) {
    if (m == 0 || rtt == 0) throw std::invalid_argument("make_dataset: m and rtt must be >= 1");
    if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("make_dataset: split must lie in (0,1)");
    if (feedback_trace.size() < m + rtt) {
        throw std::invalid_argument("make_dataset: trace shorter than m + rtt");
    }
    std::size_t n = feedback_trace.size() - m - rtt + 1;
    Dataset ds;
    ds.examples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Example ex;
        ex.f_vec.assign(feedback_trace.begin() + static_cast<std::ptrdiff_t>(i),
                        feedback_trace.begin() + static_cast<std::ptrdiff_t>(i + m));
        ex.target.assign(feedback_trace.begin() + static_cast<std::ptrdiff_t>(i + m),
                         feedback_trace.begin() + static_cast<std::ptrdiff_t>(i + m + rtt));
        ds.examples.push_back(std::move(ex));
    }
    ds.split_index = static_cast<std::size_t>(split * static_cast<double>(n));
    return ds;
}

TrainResult train(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                  std::size_t rtt, const TrainConfig& config) {
    if (config.batch_size == 0 || config.max_epochs == 0 || config.eval_every == 0) {
        throw std::invalid_argument("train: batch_size, max_epochs and eval_every must be >= 1");
    }
    if (!(config.learning_rate > 0.0) || config.lambda < 0.0) {
        throw std::invalid_argument("train: bad learning_rate or lambda");
    }
    Dataset ds = make_dataset(feedback_trace, m, rtt, config.split);
    auto train_ex = ds.train();
    auto val_ex = ds.heldout();
    if (train_ex.empty() || val_ex.empty()) {
        throw std::invalid_argument("train: split leaves an empty side");
    }

    Rng g(config.seed);
    PredictorParams params = init_params(m, rtt, g, config.tied);
    PredictorParams grads = make_params(m, rtt, config.tied);
    AdamState adam = make_adam_state(params);
    ForwardCache cache;

    TrainResult result;
    TrainReport& report = result.report;
    result.params = params;
    report.best_val_mae = mae_per_rtt(params, val_ex);
    report.best_batch = 0;
    report.val_mae_curve.emplace_back(0, report.best_val_mae);

    std::vector<std::size_t> order(train_ex.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::size_t global_batch = 0;
    std::size_t last_improve_epoch = 0;
    bool stop = false;

    for (std::size_t epoch = 0; epoch < config.max_epochs && !stop; ++epoch) {
        std::shuffle(order.begin(), order.end(), g);
        double epoch_loss = 0.0;
        std::size_t epoch_examples = 0;

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t count = std::min(config.batch_size, order.size() - start);
            for_each_param(grads, [](std::vector<double>& v) {
                std::fill(v.begin(), v.end(), 0.0);
            });
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < count; ++b) {
                const Example& ex = train_ex[order[start + b]];
                batch_loss += backward(params, ex.f_vec, ex.target, config.lambda, cache, grads);
            }
            if (!std::isfinite(batch_loss)) {
                report.diverged = true;
                stop = true;
                break;
            }
            double inv = 1.0 / static_cast<double>(count);
            for_each_param(grads, [&](std::vector<double>& v) {
                for (auto& x : v) x *= inv;
            });
            adam_step(params, grads, adam, config.learning_rate);
            ++global_batch;
            epoch_loss += batch_loss;
            epoch_examples += count;

            if (global_batch % config.eval_every == 0) {
                double v = mae_per_rtt(params, val_ex);
                report.val_mae_curve.emplace_back(global_batch, v);
                // Ties move the checkpoint forward (the later model has seen
                // more data) but only strict improvement resets the stopper,
                // so a flat error curve still terminates.
                if (v <= report.best_val_mae) {
                    if (v < report.best_val_mae) last_improve_epoch = epoch;
                    report.best_val_mae = v;
                    report.best_batch = global_batch;
                    result.params = params;
                }
            }
        }

        report.epoch_train_loss.push_back(
            epoch_examples > 0 ? epoch_loss / static_cast<double>(epoch_examples) : 0.0);
        report.epochs_run = epoch + 1;
        if (!stop && epoch >= last_improve_epoch + config.patience) {
            stop = true;
        }
    }
    return result;
}

double predict_epsilon(const PredictorParams& params, std::span<const std::uint8_t> f_vec) {
    ForwardCache cache;
    forward(params, f_vec, cache);
    double delivered = 0.0;
    for (double p : cache.y) delivered += round_half_up(p);
    return 1.0 - delivered / static_cast<double>(params.rtt);
}

double mae_per_rtt(const PredictorParams& params, std::span<const Example> examples) {
    if (examples.empty()) throw std::invalid_argument("mae_per_rtt: empty evaluation set");
    ForwardCache cache;
    double total = 0.0;
    for (const auto& ex : examples) {
        forward(params, ex.f_vec, cache);
        double predicted = 0.0;
        for (double p : cache.y) predicted += round_half_up(p);
        double actual = 0.0;
        for (auto f : ex.target) actual += static_cast<double>(f);
        total += std::fabs(predicted - actual);
    }
    return total / static_cast<double>(examples.size());
}

double naive_mean_mae(const std::vector<std::uint8_t>& feedback_trace, std::size_t m,
                      std::size_t rtt, double split) {
    if (feedback_trace.size() < m + rtt) {
        throw std::invalid_argument("naive_mean_mae: trace shorter than m + rtt");
    }
    std::size_t n = feedback_trace.size() - m - rtt + 1;
    std::size_t split_index = static_cast<std::size_t>(split * static_cast<double>(n));
    if (split_index >= n) throw std::invalid_argument("naive_mean_mae: empty held-out side");

    std::vector<double> cum(feedback_trace.size() + 1, 0.0);
    for (std::size_t i = 0; i < feedback_trace.size(); ++i) {
        cum[i + 1] = cum[i] + static_cast<double>(feedback_trace[i]);
    }
    double total = 0.0;
    for (std::size_t i = split_index; i < n; ++i) {
        std::size_t horizon = i + m;  // bits available before the target window
        double mean = cum[horizon] / static_cast<double>(horizon);
        double predicted = static_cast<double>(rtt) * mean;
        double actual = cum[horizon + rtt] - cum[horizon];
        total += std::fabs(predicted - actual);
    }
    return total / static_cast<double>(n - split_index);
}

void save_params(const std::string& path, const PredictorParams& params) {
    nlohmann::json j;
    j["format"] = "deepnp-params";
    j["version"] = 1;
    j["m"] = params.m;
    j["rtt"] = params.rtt;
    j["tied"] = params.tied;
    j["hidden"] = kHidden;
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : params.blocks) {
        nlohmann::json jb;
        jb["w_i"] = b.cell.w_i;
        jb["w_f"] = b.cell.w_f;
        jb["w_o"] = b.cell.w_o;
        jb["w_c"] = b.cell.w_c;
        jb["u_i"] = b.cell.u_i;
        jb["u_f"] = b.cell.u_f;
        jb["u_o"] = b.cell.u_o;
        jb["u_c"] = b.cell.u_c;
        jb["b_i"] = b.cell.b_i;
        jb["b_f"] = b.cell.b_f;
        jb["b_o"] = b.cell.b_o;
        jb["b_c"] = b.cell.b_c;
        jb["head_w"] = b.head_w;
        jb["head_b"] = b.head_b;
        blocks.push_back(std::move(jb));
    }
    j["blocks"] = std::move(blocks);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_params: cannot open " + path);
    out << j.dump(2) << '\n';
}

PredictorParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_params: cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "deepnp-params" || j.value("version", 0) != 1) {
        throw std::runtime_error("load_params: unrecognized parameter file " + path);
    }
    if (j.value("hidden", std::size_t{0}) != kHidden) {
        throw std::runtime_error("load_params: hidden width mismatch in " + path);
    }
    PredictorParams p = make_params(j.at("m").get<std::size_t>(), j.at("rtt").get<std::size_t>(),
                                    j.at("tied").get<bool>());
    const auto& blocks = j.at("blocks");
    if (blocks.size() != p.blocks.size()) {
        throw std::runtime_error("load_params: block count mismatch in " + path);
    }
    auto fill = [&](std::vector<double>& dst, const nlohmann::json& src) {
        auto v = src.get<std::vector<double>>();
        if (v.size() != dst.size()) {
            throw std::runtime_error("load_params: array size mismatch in " + path);
        }
        dst = std::move(v);
    };
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const auto& jb = blocks[b];
        fill(p.blocks[b].cell.w_i, jb.at("w_i"));
        fill(p.blocks[b].cell.w_f, jb.at("w_f"));
        fill(p.blocks[b].cell.w_o, jb.at("w_o"));
        fill(p.blocks[b].cell.w_c, jb.at("w_c"));
        fill(p.blocks[b].cell.u_i, jb.at("u_i"));
        fill(p.blocks[b].cell.u_f, jb.at("u_f"));
        fill(p.blocks[b].cell.u_o, jb.at("u_o"));
        fill(p.blocks[b].cell.u_c, jb.at("u_c"));
        fill(p.blocks[b].cell.b_i, jb.at("b_i"));
        fill(p.blocks[b].cell.b_f, jb.at("b_f"));
        fill(p.blocks[b].cell.b_o, jb.at("b_o"));
        fill(p.blocks[b].cell.b_c, jb.at("b_c"));
        fill(p.blocks[b].head_w, jb.at("head_w"));
        fill(p.blocks[b].head_b, jb.at("head_b"));
    }
    return p;
}

}  // namespace deepnp
