#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exwave/data.hpp"
#include "exwave/network.hpp"
#include "exwave/thread_pool.hpp"

namespace exwave {

enum class DatasetKind { mnist, fashion_mnist };
const char* dataset_name(DatasetKind k);
DatasetKind dataset_from_name(const std::string& name);

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    uint64_t master_seed = 1;
    AblationMode mode = AblationMode::full;
    DatasetKind dataset = DatasetKind::mnist;
    int layer_count = 5;
    int side = 56;
    int threads = 0;          // 0 = hardware concurrency
    size_t train_limit = 0;   // 0 = whole split
    size_t test_limit = 0;
    PropagationGeometry geometry;  // side 0 = defaults for `side`

    void validate() const;  // throws on violated invariants
};

/// softmax over max-shifted scores; returns (loss, d loss / d score).
std::pair<double, std::array<double, 10>> softmax_cross_entropy(
    const std::array<double, 10>& scores, int label);

struct AdamHyper {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First/second moments per parameter vector plus the shared step counter.
struct AdamState {
    std::vector<std::vector<double>> m, v;
    int64_t step = 0;

    static AdamState for_params(const std::vector<std::vector<double>*>& params);
};

/// One bias-corrected Adam update over a group of parameter vectors.
/// Non-finite gradients abort with the offending parameter named.
void adam_step(const std::vector<std::vector<double>*>& params,
               const std::vector<std::vector<double>>& grads, AdamState& state,
               const AdamHyper& hyper,
               const std::vector<std::string>& group_names = {});

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    std::vector<double> layer_grad_norms;  // L2 per layer, averaged over batches
    std::vector<double> express_weights;   // snapshot after the epoch
};

struct TrainState {
    AdamState adam;
    std::vector<EpochMetrics> history;
    /// last-layer / first-layer gradient-norm ratio, one entry per batch of
    /// the first epoch (the vanishing-gradient observable).
    std::vector<double> first_epoch_norm_ratios;

    double first_epoch_ratio_median() const;
};

/// One pass over the training set in seeded shuffled order. Appends a metric
/// row (test_accuracy left NaN for the caller to fill).
void train_epoch(Network& net, const Dataset& train, TrainState& state,
                 const TrainConfig& config, int epoch, ThreadPool& pool);

/// Fraction of samples whose argmax detector score equals the label; ties
/// break toward the lowest class index. Side-effect free.
double evaluate(const Network& net, const Dataset& data, int side, ThreadPool& pool,
                size_t limit = 0);

struct TrainResult {
    Network net;
    TrainState state;
};

/// Full training run: build the network from the config, then epochs of
/// train_epoch + evaluate. Deterministic in (config, data).
TrainResult train_run(const TrainConfig& config, const Dataset& train, const Dataset& test);

struct AblationRow {
    AblationMode mode;
    double accuracy = 0.0;
    TrainState state;
};

/// The four-mode comparison, identical seed and data order across modes.
std::vector<AblationRow> run_ablation(const TrainConfig& base, const Dataset& train,
                                      const Dataset& test);

struct GradCheckReport {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::string worst_param;
    size_t checked = 0;
    bool pass = false;
};

/// Central-difference check of every parameter gradient of the full loss on
/// one sample. rel_tol applies when the larger of the two magnitudes exceeds
/// floor_threshold, otherwise the absolute floor applies. inject_fault flips
/// the sign of one analytic gradient (fault injection for the CLI's
/// self-test; must make the check fail).
GradCheckReport grad_check(Network& net, const ComplexField& input, int label,
                           double fd_step = 1e-5, double rel_tol = 1e-4,
                           double abs_floor = 1e-8, double floor_threshold = 1e-6,
                           bool inject_fault = false);

/// metrics.csv writer: header + one row per epoch, 9-significant-digit
/// decimals throughout.
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<EpochMetrics>& history);

std::string format_g9(double v);

}  // namespace exwave
