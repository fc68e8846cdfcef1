#include "exwave/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace exwave {

const char* dataset_name(DatasetKind k) {
    return k == DatasetKind::mnist ? "mnist" : "fashion_mnist";
}

DatasetKind dataset_from_name(const std::string& name) {
    if (name == "mnist") return DatasetKind::mnist;
    if (name == "fashion" || name == "fashion_mnist" || name == "fashion-mnist") {
        return DatasetKind::fashion_mnist;
    }
    throw std::invalid_argument("unknown dataset: " + name);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("config: learning_rate must be > 0");
    if (layer_count < 1) throw std::invalid_argument("config: layers must be >= 1");
    if (side < 8) throw std::invalid_argument("config: side must be >= 8 (detector layout)");
}

std::pair<double, std::array<double, 10>> softmax_cross_entropy(
    const std::array<double, 10>& scores, int label) {
    if (label < 0 || label > 9) throw std::invalid_argument("label outside 0..9");
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("non-finite score");
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    std::array<double, 10> p{};
    double denom = 0.0;
    for (int i = 0; i < 10; ++i) {
        p[i] = std::exp(scores[i] - top);
        denom += p[i];
    }
    for (double& v : p) v /= denom;
    const double loss = -std::log(p[label]);
    p[label] -= 1.0;  // p - one_hot
    return {loss, p};
}

AdamState AdamState::for_params(const std::vector<std::vector<double>*>& params) {
    AdamState state;
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const auto* p : params) {
        state.m.emplace_back(p->size(), 0.0);
        state.v.emplace_back(p->size(), 0.0);
    }
    return state;
}

void adam_step(const std::vector<std::vector<double>*>& params,
               const std::vector<std::vector<double>>& grads, AdamState& state,
               const AdamHyper& hyper, const std::vector<std::string>& group_names) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient group mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
    for (size_t g = 0; g < params.size(); ++g) {
        std::vector<double>& p = *params[g];
        const std::vector<double>& grad = grads[g];
        if (p.size() != grad.size()) {
            throw std::invalid_argument("adam_step: shape mismatch in group " +
                                        std::to_string(g));
        }
        for (size_t i = 0; i < p.size(); ++i) {
            if (!std::isfinite(grad[i])) {
                const std::string name =
                    g < group_names.size() ? group_names[g] : "group" + std::to_string(g);
                throw std::runtime_error("adam_step: non-finite gradient at " + name + "[" +
                                         std::to_string(i) + "]");
            }
            double& m = state.m[g][i];
            double& v = state.v[g][i];
            m = hyper.beta1 * m + (1.0 - hyper.beta1) * grad[i];
            v = hyper.beta2 * v + (1.0 - hyper.beta2) * grad[i] * grad[i];
            const double mhat = m / bc1;
            const double vhat = v / bc2;
            p[i] -= hyper.learning_rate * mhat / (std::sqrt(vhat) + hyper.eps);
        }
    }
}

double TrainState::first_epoch_ratio_median() const {
    if (first_epoch_norm_ratios.empty()) return std::nan("");
    std::vector<double> sorted = first_epoch_norm_ratios;
    std::sort(sorted.begin(), sorted.end());
    const size_t mid = sorted.size() / 2;
    if (sorted.size() % 2 == 1) return sorted[mid];
    return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

namespace {

double vector_l2(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

Gradients zero_gradients_like(const Network& net) {
    Gradients g;
    g.layer_phase.reserve(net.layers.size());
    for (const auto& layer : net.layers) g.layer_phase.emplace_back(layer.param_count(), 0.0);
    if (net.express_enabled) g.express.assign(net.layers.size(), 0.0);
    return g;
}

int resolve_threads(int configured) {
    if (configured > 0) return configured;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

void train_epoch(Network& net, const Dataset& train, TrainState& state,
                 const TrainConfig& config, int epoch, ThreadPool& pool) {
    if (train.count() == 0) throw std::invalid_argument("train_epoch: empty dataset");
    const size_t count =
        config.train_limit == 0 ? train.count() : std::min(train.count(), config.train_limit);

    const auto batch_list = batches(count, config.batch_size, config.master_seed, epoch);
    const AdamHyper hyper{config.learning_rate, config.adam_beta1, config.adam_beta2,
                          config.adam_eps};
    const auto group_names = net.param_group_names();
    const int layer_count = net.layer_count();
    const bool first_epoch = state.history.empty();

    double loss_sum = 0.0;
    std::vector<double> norm_sums(layer_count, 0.0);

    std::vector<double> sample_loss;
    std::vector<Gradients> sample_grads;
    for (size_t b = 0; b < batch_list.size(); ++b) {
        const auto& batch = batch_list[b];
        try {
            sample_loss.assign(batch.size(), 0.0);
            sample_grads.assign(batch.size(), Gradients{});
            pool.parallel_for(batch.size(), [&](size_t i) {
                const uint32_t idx = batch[i];
                const ComplexField field = encode_sample(train, idx, net.side);
                ForwardCache cache;
                const auto scores = forward(net, field, &cache);
                auto [loss, score_grads] = softmax_cross_entropy(scores, train.labels[idx]);
                sample_loss[i] = loss;
                sample_grads[i] = backward(net, cache, score_grads);
            });

            // Reduce in batch order: results do not depend on the worker count.
            Gradients total = zero_gradients_like(net);
            for (size_t i = 0; i < batch.size(); ++i) {
                total.add(sample_grads[i]);
                loss_sum += sample_loss[i];
            }
            total.scale(1.0 / static_cast<double>(batch.size()));

            std::vector<double> norms(layer_count);
            for (int l = 0; l < layer_count; ++l) {
                norms[l] = vector_l2(total.layer_phase[l]);
                norm_sums[l] += norms[l];
            }
            if (first_epoch && norms.front() > 0.0) {
                state.first_epoch_norm_ratios.push_back(norms.back() / norms.front());
            }

            std::vector<std::vector<double>> grad_groups = std::move(total.layer_phase);
            if (net.express_enabled) grad_groups.push_back(std::move(total.express));
            adam_step(net.params(), grad_groups, state.adam, hyper, group_names);
            net.revision += 1;
        } catch (const std::exception& e) {
            throw std::runtime_error("epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(b) + ": " + e.what());
        }
    }

    EpochMetrics row;
    row.epoch = epoch;
    row.train_loss = loss_sum / static_cast<double>(count);
    row.test_accuracy = std::nan("");
    row.layer_grad_norms.resize(layer_count);
    for (int l = 0; l < layer_count; ++l) {
        row.layer_grad_norms[l] = norm_sums[l] / static_cast<double>(batch_list.size());
    }
    if (net.express_enabled) row.express_weights = net.express_weights;
    state.history.push_back(std::move(row));
}

double evaluate(const Network& net, const Dataset& data, int side, ThreadPool& pool,
                size_t limit) {
    if (data.count() == 0) throw std::invalid_argument("evaluate: empty dataset");
    const size_t count = limit == 0 ? data.count() : std::min(data.count(), limit);
    std::vector<uint8_t> correct(count, 0);
    pool.parallel_for(count, [&](size_t i) {
        const ComplexField field = encode_sample(data, i, side);
        const auto scores = forward(net, field);
        int best = 0;
        for (int c = 1; c < 10; ++c) {
            if (scores[c] > scores[best]) best = c;  // ties keep the lowest index
        }
        correct[i] = (best == data.labels[i]) ? 1 : 0;
    });
    size_t hits = 0;
    for (uint8_t c : correct) hits += c;
    return static_cast<double>(hits) / static_cast<double>(count);
}

TrainResult train_run(const TrainConfig& config, const Dataset& train, const Dataset& test) {
    config.validate();
    NetworkSpec spec;
    spec.side = config.side;
    spec.layer_count = config.layer_count;
    spec.mode = config.mode;
    spec.geometry = config.geometry;
    spec.master_seed = config.master_seed;

    TrainResult result{Network::build(spec), TrainState{}};
    result.state.adam = AdamState::for_params(result.net.params());

    ThreadPool pool(resolve_threads(config.threads));
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        train_epoch(result.net, train, result.state, config, epoch, pool);
        result.state.history.back().test_accuracy =
            evaluate(result.net, test, config.side, pool, config.test_limit);
    }
    return result;
}

std::vector<AblationRow> run_ablation(const TrainConfig& base, const Dataset& train,
                                      const Dataset& test) {
    // Table order: full, shift only, express only, neither.
    const AblationMode modes[] = {AblationMode::full, AblationMode::shift_only,
                                  AblationMode::express_only, AblationMode::neither};
    std::vector<AblationRow> rows;
    for (AblationMode mode : modes) {
        TrainConfig config = base;
        config.mode = mode;
        TrainResult result = train_run(config, train, test);
        rows.push_back({mode, result.state.history.back().test_accuracy,
                        std::move(result.state)});
    }
    return rows;
}

GradCheckReport grad_check(Network& net, const ComplexField& input, int label, double fd_step,
                           double rel_tol, double abs_floor, double floor_threshold,
                           bool inject_fault) {
    GradCheckReport report;
    const auto names = net.param_group_names();

    ForwardCache cache;
    const auto scores = forward(net, input, &cache);
    auto [loss0, score_grads] = softmax_cross_entropy(scores, label);
    (void)loss0;
    Gradients analytic = backward(net, cache, score_grads);
    if (inject_fault && !analytic.layer_phase.empty() && !analytic.layer_phase[0].empty()) {
        analytic.layer_phase[0][0] = -analytic.layer_phase[0][0];
    }

    auto loss_at = [&]() {
        const auto s = forward(net, input);
        return softmax_cross_entropy(s, label).first;
    };

    auto groups = net.params();
    std::vector<const std::vector<double>*> analytic_groups;
    for (const auto& g : analytic.layer_phase) analytic_groups.push_back(&g);
    if (net.express_enabled) analytic_groups.push_back(&analytic.express);

    report.pass = true;
    for (size_t g = 0; g < groups.size(); ++g) {
        std::vector<double>& vec = *groups[g];
        for (size_t i = 0; i < vec.size(); ++i) {
            const double orig = vec[i];
            vec[i] = orig + fd_step;
            net.revision += 1;
            const double up = loss_at();
            vec[i] = orig - fd_step;
            net.revision += 1;
            const double down = loss_at();
            vec[i] = orig;
            net.revision += 1;
            const double fd = (up - down) / (2.0 * fd_step);
            const double a = (*analytic_groups[g])[i];
            const double mag = std::max(std::abs(a), std::abs(fd));
            const double abs_err = std::abs(a - fd);
            report.checked += 1;

            bool ok;
            double rel = 0.0;
            if (mag < floor_threshold) {
                ok = abs_err < abs_floor;
            } else {
                rel = abs_err / mag;
                ok = rel < rel_tol;
            }
            if (rel > report.max_rel_error || abs_err > report.max_abs_error) {
                if (rel > report.max_rel_error) report.max_rel_error = rel;
                if (abs_err > report.max_abs_error) report.max_abs_error = abs_err;
                report.worst_param = names[g] + "[" + std::to_string(i) + "]";
            }
            if (!ok) report.pass = false;
        }
    }
    return report;
}

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<EpochMetrics>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const size_t layer_count = history.empty() ? 0 : history.front().layer_grad_norms.size();
    const size_t express_count = history.empty() ? 0 : history.front().express_weights.size();
    out << "epoch,train_loss,test_accuracy";
    for (size_t l = 1; l <= layer_count; ++l) out << ",grad_norm_l" << l;
    for (size_t l = 1; l <= express_count; ++l) out << ",express_w" << l;
    out << "\n";
    for (const auto& row : history) {
        out << row.epoch << "," << format_g9(row.train_loss) << ","
            << format_g9(row.test_accuracy);
        for (double n : row.layer_grad_norms) out << "," << format_g9(n);
        for (double w : row.express_weights) out << "," << format_g9(w);
        out << "\n";
    }
}

}  // namespace exwave
