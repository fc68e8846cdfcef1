#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "exwave/diffraction.hpp"
#include "exwave/field.hpp"
#include "exwave/wavelet.hpp"

namespace exwave {

/// Ten disjoint square readout windows in the output plane, one per class.
/// Two rows of five, row centers at 1/3 and 2/3 of the height, column
/// centers at odd multiples of a tenth of the width.
struct DetectorLayout {
    struct Region {
        int x0 = 0, y0 = 0;
    };
    int side = 0;
    int region_size = 0;
    std::array<Region, 10> regions{};

    static DetectorLayout standard(int side);
};

std::array<double, 10> detector_readout(const ComplexField& f, const DetectorLayout& d);

/// Phase-only pixel modulation: out_p = f_p * exp(j * phi_p).
ComplexField modulate(const ComplexField& f, const WaveletLayer& layer);

enum class AblationMode { full, shift_only, express_only, neither, dense_baseline };

bool mode_uses_shift(AblationMode m);
bool mode_uses_express(AblationMode m);
bool mode_uses_dense(AblationMode m);
const char* mode_name(AblationMode m);
AblationMode mode_from_name(const std::string& name);

struct NetworkSpec {
    int side = 56;
    int layer_count = 5;
    AblationMode mode = AblationMode::full;
    PropagationGeometry geometry;  // side is overwritten from `side`
    uint64_t master_seed = 1;
};

/// The layer stack plus output accumulation. Parameters (layer phases and
/// accumulation weights) are mutated in place by the optimizer through
/// params(); every mutation must bump `revision` so stale forward caches are
/// rejected by backward().
struct Network {
    int side = 0;
    bool express_enabled = false;
    std::vector<WaveletLayer> layers;
    std::vector<double> express_weights;  // layer_count entries when enabled
    std::shared_ptr<const RsKernel> kernel;
    DetectorLayout detector;
    uint64_t master_seed = 0;
    uint64_t revision = 0;

    static Network build(const NetworkSpec& spec);

    size_t param_count() const;
    int layer_count() const { return static_cast<int>(layers.size()); }

    /// Mutable views of every learnable vector, layers first, then the
    /// accumulation weights (when enabled). Order matches Gradients.
    std::vector<std::vector<double>*> params();
    std::vector<std::string> param_group_names() const;
};

/// Everything backward() needs from the matching forward() call.
struct ForwardCache {
    uint64_t revision = 0;
    int side = 0;
    ComplexField input{1};
    std::vector<ComplexField> pre_mod;    // z^l, one per layer
    std::vector<ComplexField> post_mod;   // h^l, one per layer
    std::vector<ComplexField> hops;       // propagate(h^l) per layer (express only)
    ComplexField output{1};
    std::array<double, 10> scores{};
};

std::array<double, 10> forward(const Network& net, const ComplexField& input,
                               ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<std::vector<double>> layer_phase;  // per layer, circle- or pixel-sized
    std::vector<double> express;                   // empty when express is disabled

    void add(const Gradients& other);
    void scale(double s);
};

/// Exact reverse-mode gradients of a scalar loss through readout,
/// accumulation, modulation and propagation, given d(loss)/d(score).
Gradients backward(const Network& net, const ForwardCache& cache,
                   const std::array<double, 10>& score_grads);

}  // namespace exwave
