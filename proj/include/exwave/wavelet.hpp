#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "exwave/rng.hpp"

namespace exwave {

/// Per-pixel circle index for one layer: pixels sharing an L1 distance to the
/// fixed point q share an index. Indices are dense ranks of the distinct
/// distance values, ascending, so the parameter vector has no holes.
struct CircleMap {
    int side = 0;
    int qx = 0, qy = 0;                // 1-based, as in the pixel coordinates
    std::vector<int32_t> circle_of;    // row-major, side*side entries
    int num_circles = 0;
};

/// q uniform over {1..n}^2 when shift is on, otherwise the fixed center
/// (ceil(n/2), ceil(n/2)).
std::pair<int, int> sample_fixed_point(Rng& rng, int side, bool shift);

CircleMap build_circle_map(int side, int qx, int qy);

/// One random value in (0, 2*pi) per circle.
std::vector<double> init_wavelet_phases(Rng& rng, const CircleMap& map);

/// Dense baseline: one random value in (0, 2*pi) per pixel.
std::vector<double> init_dense_phases(Rng& rng, int side);

enum class PhaseMode { wavelet, dense };

/// One diffractive layer's learnable phases. In wavelet mode `phases` holds
/// one value per circle; in dense mode one value per pixel and `map` is
/// unused. Phases live on the whole real line once training starts.
struct WaveletLayer {
    PhaseMode mode = PhaseMode::wavelet;
    int side = 0;
    CircleMap map;               // wavelet mode only
    std::vector<double> phases;  // num_circles or side*side values

    size_t param_count() const { return phases.size(); }
};

WaveletLayer make_wavelet_layer(CircleMap map, std::vector<double> phases);
WaveletLayer make_dense_layer(int side, std::vector<double> phases);

/// Parameter-to-pixel expansion: grid[p] = phases[circle_of[p]] (wavelet) or
/// the stored grid itself (dense).
std::vector<double> expand_phases(const WaveletLayer& layer);

/// Adjoint of expand_phases: circle gradient = sum of its pixels' gradients.
std::vector<double> reduce_phase_grad(const std::vector<double>& pixel_grad,
                                      const WaveletLayer& layer);

/// 8-bit rendering of sin(phi_p) mapped from [-1, 1] onto [0, 255],
/// rounded half up.
std::vector<uint8_t> render_phase_map(const WaveletLayer& layer);

}  // namespace exwave
