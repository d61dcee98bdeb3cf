#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "deepnp/harness.hpp"

namespace fs = std::filesystem;
using namespace deepnp;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string predictor;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_predictor) {
    cmd->add_option("--config", args.config_path, "experiment JSON file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: spec output_dir)");
    cmd->add_option("--seed", args.seed, "override the base seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    if (with_predictor) {
        cmd->add_option("--predictor", args.predictor,
                        "override the predictor: stat|deepnp|genie|mean");
    }
}

ExperimentSpec load_spec(const CommonArgs& args) {
    ExperimentSpec spec = load_experiment_spec(args.config_path);
    if (args.seed_set) spec.session.seed = args.seed;
    if (!args.predictor.empty()) spec.predictor = parse_predictor_kind(args.predictor);
    if (!args.out_dir.empty()) spec.output_dir = args.out_dir;
    return spec;
}

// One session at the config's base point, training first when needed.
int cmd_simulate(const CommonArgs& args, const std::string& params_path) {
    ExperimentSpec spec = load_spec(args);
    fs::create_directories(spec.output_dir);

    std::uint64_t row_seed = derive_seed(spec.session.seed, 0, 0);
    PreparedTrace trace = prepare_trace(spec.channel, spec.session.total_slots,
                                        spec.train.split, derive_seed(row_seed, 1));

    std::unique_ptr<ErasureRateProvider> provider;
    switch (spec.predictor) {
        case PredictorKind::Stat:
            provider = std::make_unique<StatProvider>();
            break;
        case PredictorKind::Mean:
            provider = std::make_unique<MeanProvider>();
            break;
        case PredictorKind::Genie:
            provider = std::make_unique<GenieProvider>(trace.segment, spec.session.rtt);
            break;
        case PredictorKind::DeepNP: {
            PredictorParams params;
            if (!params_path.empty()) {
                params = load_params(params_path);
                if (params.rtt != spec.session.rtt || params.m != spec.m) {
                    std::cerr << "parameter file dims (m=" << params.m << ", rtt=" << params.rtt
                              << ") do not match the config (m=" << spec.m
                              << ", rtt=" << spec.session.rtt << ")\n";
                    return 1;
                }
            } else {
                TrainConfig tc = spec.train;
                tc.seed = derive_seed(row_seed, 3);
                TrainResult trained = train(trace.feedback, spec.m, spec.session.rtt, tc);
                if (trained.report.diverged) {
                    std::cerr << "training diverged\n";
                    return 1;
                }
                std::cout << "trained: held-out MAE " << trained.report.best_val_mae << "\n";
                params = std::move(trained.params);
                save_params((fs::path(spec.output_dir) / "params.json").string(), params);
            }
            provider = std::make_unique<DeepNPProvider>(std::move(params));
            break;
        }
    }

    SessionConfig sc = spec.session;
    sc.seed = derive_seed(row_seed, 2);
    SessionResult result = run_session(sc, trace.segment, *provider);

    write_slot_trace_csv((fs::path(spec.output_dir) / "slot_trace.csv").string(), result.trace);
    write_metrics_csv((fs::path(spec.output_dir) / "metrics.csv").string(), result.metrics);

    std::cout << "predictor " << to_string(spec.predictor) << ": eta " << result.metrics.eta
              << ", delay mean " << result.metrics.delay_mean << ", delay max "
              << result.metrics.delay_max << ", delivered " << result.metrics.delivered_packets
              << "/" << result.metrics.transmissions << "\n";
    if (result.metrics.no_deliveries) {
        std::cout << "warning: no packets delivered\n";
    }
    return 0;
}

int cmd_train(const CommonArgs& args) {
    ExperimentSpec spec = load_spec(args);
    fs::create_directories(spec.output_dir);

    std::uint64_t row_seed = derive_seed(spec.session.seed, 0, 0);
    PreparedTrace trace = prepare_trace(spec.channel, spec.session.total_slots,
                                        spec.train.split, derive_seed(row_seed, 1));
    TrainConfig tc = spec.train;
    tc.seed = derive_seed(row_seed, 3);
    TrainResult trained = train(trace.feedback, spec.m, spec.session.rtt, tc);
    if (trained.report.diverged) {
        std::cerr << "training diverged\n";
        return 1;
    }
    save_params((fs::path(spec.output_dir) / "params.json").string(), trained.params);

    std::ofstream curve((fs::path(spec.output_dir) / "train_report.csv"));
    curve << "batch,val_mae\n";
    for (const auto& [batch, mae] : trained.report.val_mae_curve) {
        curve << batch << ',' << mae << '\n';
    }

    double naive = naive_mean_mae(trace.feedback, spec.m, spec.session.rtt, spec.train.split);
    std::cout << "held-out MAE " << trained.report.best_val_mae << " (best at batch "
              << trained.report.best_batch << ", " << trained.report.epochs_run
              << " epochs), running-mean baseline " << naive << "\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::string& params_path) {
    ExperimentSpec spec = load_spec(args);

    std::uint64_t row_seed = derive_seed(spec.session.seed, 0, 0);
    PreparedTrace trace = prepare_trace(spec.channel, spec.session.total_slots,
                                        spec.train.split, derive_seed(row_seed, 1));
    PredictorParams params = load_params(params_path);
    Dataset ds = make_dataset(trace.feedback, params.m, params.rtt, spec.train.split);
    double mae = mae_per_rtt(params, ds.heldout());
    double naive = naive_mean_mae(trace.feedback, params.m, params.rtt, spec.train.split);
    std::cout << "held-out MAE " << mae << ", running-mean baseline " << naive << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    ExperimentSpec spec = load_spec(args);
    fs::create_directories(spec.output_dir);
    ExperimentResults results = run_experiment(spec);
    write_results_csv((fs::path(spec.output_dir) / "results.csv").string(), results);
    emit_plotdata(results, spec.output_dir);
    std::size_t failed = 0;
    for (const auto& r : results.rows) {
        if (r.failed) ++failed;
    }
    std::cout << results.rows.size() << " rows written to " << spec.output_dir;
    if (failed > 0) std::cout << " (" << failed << " failed)";
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive causal RLNC simulator with a learned noise predictor"};
    app.require_subcommand(1);

    CommonArgs sim_args, train_args, eval_args, sweep_args;
    std::string sim_params, eval_params;

    CLI::App* sim = app.add_subcommand("simulate", "run one protocol session");
    add_common(sim, sim_args, true);
    sim->add_option("--params", sim_params, "trained parameter file (skips training)");

    CLI::App* trn = app.add_subcommand("train", "train the predictor only");
    add_common(trn, train_args, false);

    CLI::App* eva = app.add_subcommand("evaluate", "held-out MAE of a trained predictor");
    add_common(eva, eval_args, false);
    eva->add_option("--params", eval_params, "trained parameter file")->required();

    CLI::App* swp = app.add_subcommand("sweep", "full experiment over the sweep grid");
    add_common(swp, sweep_args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_args, sim_params);
        if (trn->parsed()) return cmd_train(train_args);
        if (eva->parsed()) return cmd_evaluate(eval_args, eval_params);
        if (swp->parsed()) return cmd_sweep(sweep_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
