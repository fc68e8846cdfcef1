#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "exwave/checkpoint.hpp"
#include "exwave/config.hpp"
#include "exwave/pgm.hpp"
#include "exwave/training.hpp"
#include "fetch.hpp"

namespace fs = std::filesystem;
using namespace exwave;

namespace {

/// Flags shared by the training-style subcommands. Values set on the command
/// line win over the config file.
struct CommonFlags {
    std::string config_path;
    std::optional<std::string> dataset, mode;
    std::optional<int> layers, side, epochs, batch_size, threads;
    std::optional<int64_t> seed, train_samples, test_samples;
    std::optional<double> learning_rate;
    std::optional<std::string> out_dir, data_dir;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key = value sections)");
        cmd->add_option("--dataset", dataset, "mnist or fashion")
            ->check(CLI::IsMember({"mnist", "fashion"}));
        cmd->add_option("--mode", mode, "full, shift_only, express_only, neither or dense")
            ->check(CLI::IsMember({"full", "shift_only", "express_only", "neither", "dense"}));
        cmd->add_option("--layers", layers, "diffractive layer count");
        cmd->add_option("--side", side, "layer side length in pixels");
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--batch-size", batch_size, "samples per optimizer step");
        cmd->add_option("--lr", learning_rate, "Adam learning rate");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
        cmd->add_option("--train-samples", train_samples, "cap on training samples (0 = all)");
        cmd->add_option("--test-samples", test_samples, "cap on test samples (0 = all)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--data-dir", data_dir, "directory with the IDX files");
    }

    RunConfig resolve() const {
        RunConfig rc;
        if (!config_path.empty()) rc = parse_config_file(config_path);
        if (dataset) apply_config_entry(rc, "train", "dataset", *dataset);
        if (mode) apply_config_entry(rc, "train", "mode", *mode);
        if (layers) rc.train.layer_count = *layers;
        if (side) rc.train.side = *side;
        if (epochs) rc.train.epochs = *epochs;
        if (batch_size) rc.train.batch_size = *batch_size;
        if (learning_rate) rc.train.learning_rate = *learning_rate;
        if (seed) rc.train.master_seed = static_cast<uint64_t>(*seed);
        if (threads) rc.train.threads = *threads;
        if (train_samples) rc.train.train_limit = static_cast<size_t>(*train_samples);
        if (test_samples) rc.train.test_limit = static_cast<size_t>(*test_samples);
        if (out_dir) rc.out_dir = *out_dir;
        if (data_dir) rc.data_dir = *data_dir;
        return rc;
    }
};

struct LoadedSplits {
    Dataset train, test;
};

LoadedSplits load_splits(const RunConfig& rc) {
    const IdxFileNames names = idx_file_names();
    const fs::path dir = rc.data_dir;
    try {
        LoadedSplits s;
        s.train = load_idx(find_idx_file(dir, names.train_images),
                           find_idx_file(dir, names.train_labels));
        s.test = load_idx(find_idx_file(dir, names.test_images),
                          find_idx_file(dir, names.test_labels));
        return s;
    } catch (const std::exception& e) {
        throw std::runtime_error(
            std::string(e.what()) + "\nexpected the four IDX files (optionally .gz) under " +
            dir.string() + ":\n  " + names.train_images + "  " + names.train_labels + "\n  " +
            names.test_images + "  " + names.test_labels +
            "\nfetch them with: exwave fetch <mnist|fashion> --out " + dir.string());
    }
}

void render_network(const Network& net, const fs::path& dir) {
    fs::create_directories(dir);
    for (int l = 0; l < net.layer_count(); ++l) {
        const auto pixels = render_phase_map(net.layers[l]);
        write_pgm(dir / ("layer_" + std::to_string(l) + ".pgm"), pixels, net.side, net.side);
    }
}

int cmd_train(const CommonFlags& flags, bool render_phases) {
    RunConfig rc = flags.resolve();
    if (render_phases) rc.render_phases = true;
    TrainConfig config = rc.resolved_train();
    config.validate();

    const LoadedSplits splits = load_splits(rc);
    fs::create_directories(rc.out_dir);
    write_resolved_config(rc.out_dir / "config.resolved", rc);

    NetworkSpec spec;
    spec.side = config.side;
    spec.layer_count = config.layer_count;
    spec.mode = config.mode;
    spec.geometry = config.geometry;
    spec.master_seed = config.master_seed;
    Network net = Network::build(spec);
    if (net.kernel->geometry().under_sampled()) {
        std::cerr << "warning: spacing < pitch; the hop is shorter than one pixel\n";
    }

    TrainState state;
    state.adam = AdamState::for_params(net.params());
    ThreadPool pool(config.threads > 0 ? config.threads
                                       : static_cast<int>(std::thread::hardware_concurrency()));

    if (rc.render_phases) render_network(net, rc.out_dir / "phase_maps" / "epoch0");
    std::cout << "training " << mode_name(config.mode) << " L=" << config.layer_count
              << " n=" << config.side << " params=" << net.param_count() << "\n";

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        train_epoch(net, splits.train, state, config, epoch, pool);
        EpochMetrics& row = state.history.back();
        row.test_accuracy = evaluate(net, splits.test, config.side, pool, config.test_limit);
        write_metrics_csv(rc.out_dir / "metrics.csv", state.history);
        std::cout << "epoch " << epoch << ": loss " << format_g9(row.train_loss)
                  << " accuracy " << format_g9(row.test_accuracy) << "\n";
        if (rc.render_phases && (epoch == 10 || epoch == 20)) {
            render_network(net, rc.out_dir / "phase_maps" / ("epoch" + std::to_string(epoch)));
        }
    }
    const fs::path ckpt =
        rc.checkpoint.empty() ? rc.out_dir / "checkpoint.bin" : rc.checkpoint;
    save_checkpoint(ckpt, net);
    if (!state.first_epoch_norm_ratios.empty()) {
        std::cout << "first-epoch grad-norm ratio (last/first layer), median over batches: "
                  << format_g9(state.first_epoch_ratio_median()) << "\n";
    }
    std::cout << "wrote " << (rc.out_dir / "metrics.csv").string() << " and " << ckpt.string()
              << "\n";
    return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& checkpoint) {
    RunConfig rc = flags.resolve();
    Network net = load_checkpoint(checkpoint);
    const LoadedSplits splits = load_splits(rc);
    ThreadPool pool(rc.train.threads > 0
                        ? rc.train.threads
                        : static_cast<int>(std::thread::hardware_concurrency()));
    const double acc = evaluate(net, splits.test, net.side, pool, rc.train.test_limit);
    std::cout << "accuracy " << format_g9(acc) << " on " << dataset_name(rc.train.dataset)
              << " test split\n";
    return 0;
}

int cmd_ablate(const CommonFlags& flags) {
    RunConfig rc = flags.resolve();
    TrainConfig base = rc.resolved_train();
    base.validate();
    const LoadedSplits splits = load_splits(rc);
    fs::create_directories(rc.out_dir);
    write_resolved_config(rc.out_dir / "config.resolved", rc);

    const auto rows = run_ablation(base, splits.train, splits.test);
    std::ofstream table(rc.out_dir / "ablation.csv");
    table << "mode,accuracy\n";
    for (const auto& row : rows) {
        table << mode_name(row.mode) << "," << format_g9(row.accuracy) << "\n";
        write_metrics_csv(rc.out_dir / ("metrics_" + std::string(mode_name(row.mode)) + ".csv"),
                          row.state.history);
        std::cout << mode_name(row.mode) << ": " << format_g9(row.accuracy) << "\n";
    }
    std::cout << "wrote " << (rc.out_dir / "ablation.csv").string() << "\n";
    return 0;
}

int cmd_render(const std::string& checkpoint, const std::string& out_dir) {
    const Network net = load_checkpoint(checkpoint);
    render_network(net, out_dir);
    std::cout << "wrote " << net.layer_count() << " phase maps to " << out_dir << "\n";
    return 0;
}

int cmd_gradcheck(int side, int layers, uint64_t seed, const std::string& mode_str,
                  bool inject_fault) {
    NetworkSpec spec;
    spec.side = side;
    spec.layer_count = layers;
    spec.mode = mode_from_name(mode_str);
    spec.master_seed = seed;
    Network net = Network::build(spec);

    Rng rng(derive_stream(seed, "gradcheck-input", 0));
    ComplexField input(side);
    for (size_t i = 0; i < input.size(); ++i) input[i] = cdouble{rng.uniform01(), 0.0};
    const int label = static_cast<int>(rng.below(10));

    const GradCheckReport report = grad_check(net, input, label, 1e-5, 1e-4, 1e-8, 1e-6,
                                              inject_fault);
    std::cout << "gradcheck: " << report.checked << " parameters, max relative error "
              << format_g9(report.max_rel_error) << ", worst " << report.worst_param << " -> "
              << (report.pass ? "PASS" : "FAIL") << "\n";
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Express Wavenet optical diffractive network simulator"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    bool train_render = false;
    auto* train = app.add_subcommand("train", "train a network and write metrics/checkpoint");
    train_flags.attach(train);
    train->add_flag("--render-phases", train_render,
                    "write phase-map PGMs at epochs 0, 10 and 20");

    CommonFlags eval_flags;
    std::string eval_checkpoint;
    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on the test split");
    eval_flags.attach(evaluate);
    evaluate->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();

    CommonFlags ablate_flags;
    auto* ablate = app.add_subcommand("ablate", "train the four-mode comparison table");
    ablate_flags.attach(ablate);

    std::string render_checkpoint, render_out = "phase_maps";
    auto* render = app.add_subcommand("render", "write per-layer phase maps from a checkpoint");
    render->add_option("--checkpoint", render_checkpoint, "model checkpoint")->required();
    render->add_option("--out", render_out, "output directory");

    int gc_side = 8, gc_layers = 2;
    int64_t gc_seed = 7;
    std::string gc_mode = "full";
    bool gc_inject = false;
    auto* gradcheck =
        app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
    gradcheck->add_option("--side", gc_side, "layer side (small)");
    gradcheck->add_option("--layers", gc_layers, "layer count");
    gradcheck->add_option("--seed", gc_seed, "seed");
    gradcheck->add_option("--mode", gc_mode, "network mode");
    gradcheck->add_flag("--inject-sign-flip", gc_inject)->group("");  // test-only

    std::string fetch_dataset_name, fetch_out = "data";
    auto* fetch = app.add_subcommand("fetch", "download a dataset's IDX files");
    fetch->add_option("dataset", fetch_dataset_name, "mnist or fashion")
        ->required()
        ->check(CLI::IsMember({"mnist", "fashion"}));
    fetch->add_option("--out", fetch_out, "target directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_flags, train_render);
        if (evaluate->parsed()) return cmd_evaluate(eval_flags, eval_checkpoint);
        if (ablate->parsed()) return cmd_ablate(ablate_flags);
        if (render->parsed()) return cmd_render(render_checkpoint, render_out);
        if (gradcheck->parsed()) {
            return cmd_gradcheck(gc_side, gc_layers, static_cast<uint64_t>(gc_seed), gc_mode,
                                 gc_inject);
        }
        if (fetch->parsed()) {
            exwave::fetch_dataset(dataset_from_name(fetch_dataset_name), fetch_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
