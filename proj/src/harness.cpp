#include "deepnp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace deepnp {

const char* to_string(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::Stat: return "stat";
        case PredictorKind::DeepNP: return "deepnp";
        case PredictorKind::Genie: return "genie";
        case PredictorKind::Mean: return "mean";
    }
    return "?";
}

PredictorKind parse_predictor_kind(const std::string& name) {
    if (name == "stat") return PredictorKind::Stat;
    if (name == "deepnp") return PredictorKind::DeepNP;
    if (name == "genie") return PredictorKind::Genie;
    if (name == "mean") return PredictorKind::Mean;
    throw std::invalid_argument("unknown predictor kind: " + name);
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string spec_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    j["channel"] = {{"e_g", spec.channel.e_g},
                    {"e_b", spec.channel.e_b},
                    {"q", spec.channel.q},
                    {"s", spec.channel.s}};
    j["session"] = {{"rtt", spec.session.rtt},     {"th", spec.session.th},
                    {"k", spec.session.k},         {"w", spec.session.w},
                    {"total_slots", spec.session.total_slots},
                    {"seed", spec.session.seed}};
    j["predictor"] = to_string(spec.predictor);
    j["m"] = spec.m;
    j["train"] = {{"lambda", spec.train.lambda},
                  {"learning_rate", spec.train.learning_rate},
                  {"batch_size", spec.train.batch_size},
                  {"split", spec.train.split},
                  {"max_epochs", spec.train.max_epochs},
                  {"patience", spec.train.patience},
                  {"seed", spec.train.seed},
                  {"tied", spec.train.tied},
                  {"eval_every", spec.train.eval_every}};
    nlohmann::json sweeps = nlohmann::json::array();
    for (const auto& s : spec.sweep) {
        sweeps.push_back({{"param", s.name}, {"values", s.values}});
    }
    j["sweep"] = std::move(sweeps);
    j["repetitions"] = spec.repetitions;
    return j.dump();
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_experiment_spec: cannot open " + path);
    nlohmann::json j;
    in >> j;

    ExperimentSpec spec;
    const auto& jc = j.at("channel");
    spec.channel.e_g = jc.at("e_g").get<double>();
    spec.channel.e_b = jc.at("e_b").get<double>();
    spec.channel.q = jc.at("q").get<double>();
    spec.channel.s = jc.at("s").get<double>();

    const auto& js = j.at("session");
    spec.session.rtt = js.at("rtt").get<std::size_t>();
    spec.session.th = js.value("th", 0.0);
    spec.session.k = js.at("k").get<std::size_t>();
    spec.session.w = js.at("w").get<std::size_t>();
    spec.session.total_slots = js.at("total_slots").get<std::size_t>();
    spec.session.seed = js.value("seed", std::uint64_t{1});

    spec.predictor = parse_predictor_kind(j.value("predictor", std::string{"stat"}));
    spec.m = j.value("m", std::size_t{5});

    if (j.contains("train")) {
        const auto& jt = j.at("train");
        spec.train.lambda = jt.value("lambda", spec.train.lambda);
        spec.train.learning_rate = jt.value("learning_rate", spec.train.learning_rate);
        spec.train.batch_size = jt.value("batch_size", spec.train.batch_size);
        spec.train.split = jt.value("split", spec.train.split);
        spec.train.max_epochs = jt.value("max_epochs", spec.train.max_epochs);
        spec.train.patience = jt.value("patience", spec.train.patience);
        spec.train.seed = jt.value("seed", spec.train.seed);
        spec.train.tied = jt.value("tied", spec.train.tied);
        spec.train.eval_every = jt.value("eval_every", spec.train.eval_every);
    }

    if (j.contains("sweep")) {
        for (const auto& s : j.at("sweep")) {
            ExperimentSpec::SweepParam p;
            p.name = s.at("param").get<std::string>();
            p.values = s.at("values").get<std::vector<double>>();
            spec.sweep.push_back(std::move(p));
        }
    }
    spec.repetitions = j.value("repetitions", std::size_t{5});
    spec.output_dir = j.value("output_dir", std::string{"."});

    if (spec.repetitions == 0) {
        throw std::invalid_argument("load_experiment_spec: repetitions must be >= 1");
    }
    if (spec.sweep.size() > 1) {
        throw std::invalid_argument("load_experiment_spec: at most one sweep parameter");
    }
    validate(spec.channel);
    validate(spec.session);
    return spec;
}

void set_param(ExperimentSpec& spec, const std::string& name, double value) {
    if (name == "session.rtt") {
        spec.session.rtt = static_cast<std::size_t>(value);
    } else if (name == "session.th") {
        spec.session.th = value;
    } else if (name == "session.k") {
        spec.session.k = static_cast<std::size_t>(value);
    } else if (name == "session.w") {
        spec.session.w = static_cast<std::size_t>(value);
    } else if (name == "session.total_slots") {
        spec.session.total_slots = static_cast<std::size_t>(value);
    } else if (name == "channel.e_g") {
        spec.channel.e_g = value;
    } else if (name == "channel.e_b") {
        spec.channel.e_b = value;
    } else if (name == "channel.q") {
        spec.channel.q = value;
    } else if (name == "channel.s") {
        spec.channel.s = value;
    } else {
        throw std::invalid_argument("set_param: unknown parameter " + name);
    }
}

PreparedTrace prepare_trace(const GEParams& channel, std::size_t total_slots, double split,
                            std::uint64_t seed) {
    if (!(split > 0.0 && split < 1.0)) {
        throw std::invalid_argument("prepare_trace: split must lie in (0,1)");
    }
    std::size_t length = static_cast<std::size_t>(
        std::ceil(static_cast<double>(total_slots) / (1.0 - split)));
    PreparedTrace out;
    out.full = generate_trace(channel, length, seed);
    out.prefix = length - total_slots;
    out.segment.assign(out.full.begin() + static_cast<std::ptrdiff_t>(out.prefix),
                       out.full.end());
    out.feedback.resize(out.full.size());
    for (std::size_t i = 0; i < out.full.size(); ++i) {
        out.feedback[i] = out.full[i] ? 0 : 1;
    }
    return out;
}

ExperimentResults run_experiment(const ExperimentSpec& spec) {
    if (spec.repetitions == 0) {
        throw std::invalid_argument("run_experiment: repetitions must be >= 1");
    }
    if (spec.sweep.size() > 1) {
        throw std::invalid_argument("run_experiment: at most one sweep parameter");
    }

    std::string hash = fnv1a_hex(spec_json(spec));
    std::vector<double> sweep_values;
    std::string sweep_name;
    if (!spec.sweep.empty()) {
        sweep_name = spec.sweep[0].name;
        sweep_values = spec.sweep[0].values;
    } else {
        sweep_values.push_back(0.0);
    }

    ExperimentResults results;
    for (std::size_t si = 0; si < sweep_values.size(); ++si) {
        ExperimentSpec point = spec;
        if (!sweep_name.empty()) set_param(point, sweep_name, sweep_values[si]);
        validate(point.channel);
        validate(point.session);

        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
            std::uint64_t row_seed = derive_seed(spec.session.seed, si, rep);

            ResultRow row;
            row.sweep_param = sweep_name;
            row.sweep_value = sweep_name.empty() ? 0.0 : sweep_values[si];
            row.repetition = rep;
            row.seed = row_seed;
            row.config_hash = hash;
            row.predictor = to_string(spec.predictor);
            row.mae = std::numeric_limits<double>::quiet_NaN();

            PreparedTrace trace = prepare_trace(point.channel, point.session.total_slots,
                                                point.train.split, derive_seed(row_seed, 1));

            std::unique_ptr<ErasureRateProvider> provider;
            switch (spec.predictor) {
                case PredictorKind::Stat:
                    provider = std::make_unique<StatProvider>();
                    break;
                case PredictorKind::Mean:
                    provider = std::make_unique<MeanProvider>();
                    row.mae = naive_mean_mae(trace.feedback, point.m, point.session.rtt,
                                             point.train.split);
                    break;
                case PredictorKind::Genie:
                    provider = std::make_unique<GenieProvider>(trace.segment, point.session.rtt);
                    break;
                case PredictorKind::DeepNP: {
                    TrainConfig tc = point.train;
                    tc.seed = derive_seed(row_seed, 3);
                    TrainResult trained = train(trace.feedback, point.m, point.session.rtt, tc);
                    if (trained.report.diverged) {
                        row.failed = true;
                        results.rows.push_back(std::move(row));
                        continue;
                    }
                    row.mae = trained.report.best_val_mae;
                    provider = std::make_unique<DeepNPProvider>(std::move(trained.params));
                    break;
                }
            }

            SessionConfig sc = point.session;
            sc.seed = derive_seed(row_seed, 2);
            SessionResult session = run_session(sc, trace.segment, *provider);

            row.eta = session.metrics.eta;
            row.delay_mean = session.metrics.delay_mean;
            row.delay_max = session.metrics.delay_max;
            row.delivered = session.metrics.delivered_packets;
            row.transmissions = session.metrics.transmissions;
            results.rows.push_back(std::move(row));
        }
    }
    return results;
}

void write_results_csv(const std::string& path, const ExperimentResults& results) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
    out << "sweep_param,sweep_value,repetition,seed,config_hash,predictor,"
           "eta,delay_mean,delay_max,delivered,transmissions,mae,failed\n";
    for (const auto& r : results.rows) {
        out << r.sweep_param << ',' << format_double(r.sweep_value) << ',' << r.repetition << ','
            << r.seed << ',' << r.config_hash << ',' << r.predictor << ','
            << format_double(r.eta) << ',' << format_double(r.delay_mean) << ','
            << format_double(r.delay_max) << ',' << r.delivered << ',' << r.transmissions << ','
            << format_double(r.mae) << ',' << (r.failed ? 1 : 0) << '\n';
    }
}

void emit_plotdata(const ExperimentResults& results, const std::string& out_dir) {
    if (results.rows.empty()) {
        throw std::invalid_argument("emit_plotdata: empty results table");
    }
    std::filesystem::create_directories(out_dir);

    struct MetricSpec {
        const char* file;
        double ResultRow::*field;
    };
    const MetricSpec metrics[] = {
        {"plot_eta.csv", &ResultRow::eta},
        {"plot_delay_mean.csv", &ResultRow::delay_mean},
        {"plot_delay_max.csv", &ResultRow::delay_max},
        {"plot_mae.csv", &ResultRow::mae},
    };

    for (const auto& metric : metrics) {
        // (x, series) -> samples, ordered for stable output
        std::map<std::pair<double, std::string>, std::vector<double>> groups;
        for (const auto& r : results.rows) {
            if (r.failed) continue;
            double v = r.*(metric.field);
            if (std::isnan(v)) continue;
            groups[{r.sweep_value, r.predictor}].push_back(v);
        }
        std::filesystem::path path = std::filesystem::path(out_dir) / metric.file;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("emit_plotdata: cannot open " + path.string());
        out << "x,series,mean,stderr\n";
        for (const auto& [key, samples] : groups) {
            double n = static_cast<double>(samples.size());
            double mean = 0.0;
            for (double v : samples) mean += v;
            mean /= n;
            double stderr_value = 0.0;
            if (samples.size() > 1) {
                double ss = 0.0;
                for (double v : samples) ss += (v - mean) * (v - mean);
                stderr_value = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
            out << format_double(key.first) << ',' << key.second << ',' << format_double(mean)
                << ',' << format_double(stderr_value) << '\n';
        }
    }
}

}  // namespace deepnp
