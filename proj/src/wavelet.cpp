#include "exwave/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace exwave {

std::pair<int, int> sample_fixed_point(Rng& rng, int side, bool shift) {
    if (!shift) {
        const int c = (side + 1) / 2;  // ceil(side/2)
        return {c, c};
    }
    const int qx = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(side)));
    const int qy = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(side)));
    return {qx, qy};
}

CircleMap build_circle_map(int side, int qx, int qy) {
    if (side < 1) throw std::invalid_argument("build_circle_map: side must be >= 1");
    if (qx < 1 || qx > side || qy < 1 || qy > side) {
        throw std::invalid_argument("build_circle_map: q=(" + std::to_string(qx) + "," +
                                    std::to_string(qy) + ") outside 1.." +
                                    std::to_string(side));
    }

    CircleMap map;
    map.side = side;
    map.qx = qx;
    map.qy = qy;
    map.circle_of.resize(static_cast<size_t>(side) * side);

    std::vector<int> distances(map.circle_of.size());
    std::vector<char> seen(2 * static_cast<size_t>(side), 0);
    for (int y = 1; y <= side; ++y) {
        for (int x = 1; x <= side; ++x) {
            const int d = std::abs(x - qx) + std::abs(y - qy);
            distances[static_cast<size_t>(y - 1) * side + (x - 1)] = d;
            seen[d] = 1;
        }
    }
    // Rank the distinct distances ascending. For an in-grid q the distance
    // set is contiguous, but ranking keeps the parameter vector dense either
    // way.
    std::vector<int32_t> rank(seen.size(), -1);
    int32_t next = 0;
    for (size_t d = 0; d < seen.size(); ++d) {
        if (seen[d]) rank[d] = next++;
    }
    map.num_circles = next;
    for (size_t i = 0; i < distances.size(); ++i) {
        map.circle_of[i] = rank[distances[i]];
    }
    return map;
}

std::vector<double> init_wavelet_phases(Rng& rng, const CircleMap& map) {
    std::vector<double> phases(map.num_circles);
    for (double& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return phases;
}

std::vector<double> init_dense_phases(Rng& rng, int side) {
    std::vector<double> phases(static_cast<size_t>(side) * side);
    for (double& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return phases;
}

WaveletLayer make_wavelet_layer(CircleMap map, std::vector<double> phases) {
    if (phases.size() != static_cast<size_t>(map.num_circles)) {
        throw std::invalid_argument("make_wavelet_layer: expected " +
                                    std::to_string(map.num_circles) + " phases, got " +
                                    std::to_string(phases.size()));
    }
    WaveletLayer layer;
    layer.mode = PhaseMode::wavelet;
    layer.side = map.side;
    layer.map = std::move(map);
    layer.phases = std::move(phases);
    return layer;
}

WaveletLayer make_dense_layer(int side, std::vector<double> phases) {
    if (phases.size() != static_cast<size_t>(side) * side) {
        throw std::invalid_argument("make_dense_layer: expected " +
                                    std::to_string(static_cast<size_t>(side) * side) +
                                    " phases, got " + std::to_string(phases.size()));
    }
    WaveletLayer layer;
    layer.mode = PhaseMode::dense;
    layer.side = side;
    layer.phases = std::move(phases);
    return layer;
}

std::vector<double> expand_phases(const WaveletLayer& layer) {
    if (layer.mode == PhaseMode::dense) return layer.phases;
    std::vector<double> grid(layer.map.circle_of.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        grid[i] = layer.phases[layer.map.circle_of[i]];
    }
    return grid;
}

std::vector<double> reduce_phase_grad(const std::vector<double>& pixel_grad,
                                      const WaveletLayer& layer) {
    const size_t pixels = static_cast<size_t>(layer.side) * layer.side;
    if (pixel_grad.size() != pixels) {
        throw std::invalid_argument("reduce_phase_grad: expected " + std::to_string(pixels) +
                                    " pixel gradients, got " +
                                    std::to_string(pixel_grad.size()));
    }
    if (layer.mode == PhaseMode::dense) return pixel_grad;
    std::vector<double> grad(layer.map.num_circles, 0.0);
    for (size_t i = 0; i < pixel_grad.size(); ++i) {
        grad[layer.map.circle_of[i]] += pixel_grad[i];
    }
    return grad;
}

std::vector<uint8_t> render_phase_map(const WaveletLayer& layer) {
    const std::vector<double> grid = expand_phases(layer);
    std::vector<uint8_t> image(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        const double v = (std::sin(grid[i]) + 1.0) / 2.0 * 255.0;
        image[i] = static_cast<uint8_t>(std::lround(v));
    }
    return image;
}

}  // namespace exwave
