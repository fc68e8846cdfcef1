#include "exwave/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace exwave {

DetectorLayout DetectorLayout::standard(int side) {
    DetectorLayout d;
    d.side = side;
    d.region_size = std::max(1, side / 8);
    const double s = d.region_size;
    int idx = 0;
    for (double frac : {1.0 / 3.0, 2.0 / 3.0}) {
        const double yc = frac * side;
        for (int c = 0; c < 5; ++c) {
            const double xc = (2 * c + 1) * side / 10.0;
            int x0 = static_cast<int>(std::lround(xc - s / 2.0));
            int y0 = static_cast<int>(std::lround(yc - s / 2.0));
            x0 = std::clamp(x0, 0, side - d.region_size);
            y0 = std::clamp(y0, 0, side - d.region_size);
            d.regions[idx++] = {x0, y0};
        }
    }
    // Disjointness: regions live on a 5x2 grid of centers; overlap can only
    // happen when side is too small for ten separated windows.
    std::set<std::pair<int, int>> occupied;
    for (const auto& r : d.regions) {
        for (int y = r.y0; y < r.y0 + d.region_size; ++y) {
            for (int x = r.x0; x < r.x0 + d.region_size; ++x) {
                if (!occupied.emplace(x, y).second) {
                    throw std::invalid_argument(
                        "DetectorLayout: overlapping regions at side " + std::to_string(side));
                }
            }
        }
    }
    return d;
}

std::array<double, 10> detector_readout(const ComplexField& f, const DetectorLayout& d) {
    if (f.side() != d.side) {
        throw std::invalid_argument("detector_readout: field side mismatch");
    }
    std::array<double, 10> scores{};
    for (int c = 0; c < 10; ++c) {
        const auto& r = d.regions[c];
        double sum = 0.0;
        for (int y = r.y0; y < r.y0 + d.region_size; ++y) {
            for (int x = r.x0; x < r.x0 + d.region_size; ++x) {
                sum += std::norm(f.at(x, y));
            }
        }
        scores[c] = sum;
    }
    return scores;
}

ComplexField modulate(const ComplexField& f, const WaveletLayer& layer) {
    if (f.side() != layer.side) {
        throw std::invalid_argument("modulate: field side " + std::to_string(f.side()) +
                                    " != layer side " + std::to_string(layer.side));
    }
    const std::vector<double> phi = expand_phases(layer);
    ComplexField out(f.side());
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = f[i] * std::polar(1.0, phi[i]);
    }
    return out;
}

bool mode_uses_shift(AblationMode m) {
    return m == AblationMode::full || m == AblationMode::shift_only;
}

bool mode_uses_express(AblationMode m) {
    return m == AblationMode::full || m == AblationMode::express_only;
}

bool mode_uses_dense(AblationMode m) { return m == AblationMode::dense_baseline; }

const char* mode_name(AblationMode m) {
    switch (m) {
        case AblationMode::full: return "full";
        case AblationMode::shift_only: return "shift_only";
        case AblationMode::express_only: return "express_only";
        case AblationMode::neither: return "neither";
        case AblationMode::dense_baseline: return "dense_baseline";
    }
    return "?";
}

AblationMode mode_from_name(const std::string& name) {
    if (name == "full") return AblationMode::full;
    if (name == "shift_only") return AblationMode::shift_only;
    if (name == "express_only") return AblationMode::express_only;
    if (name == "neither") return AblationMode::neither;
    if (name == "dense" || name == "dense_baseline") return AblationMode::dense_baseline;
    throw std::invalid_argument("unknown mode: " + name);
}

Network Network::build(const NetworkSpec& spec) {
    Network net;
    net.side = spec.side;
    net.express_enabled = mode_uses_express(spec.mode);
    net.master_seed = spec.master_seed;

    PropagationGeometry g = spec.geometry;
    if (g.side == 0) g = PropagationGeometry::with_defaults(spec.side);
    if (g.side != spec.side) {
        g = PropagationGeometry(spec.side, g.pitch, g.wavelength, g.spacing);
    }
    net.kernel = build_rs_kernel(g);
    net.detector = DetectorLayout::standard(spec.side);

    const bool dense = mode_uses_dense(spec.mode);
    const bool shift = mode_uses_shift(spec.mode);
    net.layers.reserve(spec.layer_count);
    for (int l = 0; l < spec.layer_count; ++l) {
        Rng phase_rng(derive_stream(spec.master_seed, "layer-phase", l));
        if (dense) {
            net.layers.push_back(
                make_dense_layer(spec.side, init_dense_phases(phase_rng, spec.side)));
        } else {
            Rng q_rng(derive_stream(spec.master_seed, "layer-q", l));
            auto [qx, qy] = sample_fixed_point(q_rng, spec.side, shift);
            CircleMap map = build_circle_map(spec.side, qx, qy);
            std::vector<double> phases = init_wavelet_phases(phase_rng, map);
            net.layers.push_back(make_wavelet_layer(std::move(map), std::move(phases)));
        }
    }
    if (net.express_enabled) {
        net.express_weights.assign(spec.layer_count, 1.0 / spec.layer_count);
    }
    return net;
}

size_t Network::param_count() const {
    size_t count = express_enabled ? layers.size() : 0;
    for (const auto& layer : layers) count += layer.param_count();
    return count;
}

std::vector<std::vector<double>*> Network::params() {
    std::vector<std::vector<double>*> refs;
    refs.reserve(layers.size() + 1);
    for (auto& layer : layers) refs.push_back(&layer.phases);
    if (express_enabled) refs.push_back(&express_weights);
    return refs;
}

std::vector<std::string> Network::param_group_names() const {
    std::vector<std::string> names;
    for (size_t l = 0; l < layers.size(); ++l) names.push_back("layer" + std::to_string(l) + ".phase");
    if (express_enabled) names.push_back("express");
    return names;
}

std::array<double, 10> forward(const Network& net, const ComplexField& input,
                               ForwardCache* cache) {
    if (input.side() != net.side) {
        throw std::invalid_argument("forward: input side " + std::to_string(input.side()) +
                                    " != network side " + std::to_string(net.side));
    }
    const RsKernel& kernel = *net.kernel;
    const int layer_count = net.layer_count();

    if (cache) {
        cache->revision = net.revision;
        cache->side = net.side;
        cache->input = input;
        cache->pre_mod.clear();
        cache->post_mod.clear();
        cache->hops.clear();
    }

    ComplexField h = input;
    std::vector<ComplexField> post;  // kept locally for the express hops
    post.reserve(layer_count);
    for (int l = 0; l < layer_count; ++l) {
        ComplexField z = propagate(h, kernel);
        h = modulate(z, net.layers[l]);
        if (cache) cache->pre_mod.push_back(std::move(z));
        post.push_back(h);
    }

    ComplexField output(net.side);
    if (net.express_enabled) {
        bool first = true;
        for (int l = 0; l < layer_count; ++l) {
            ComplexField hop = propagate(post[l], kernel);
            const double w = net.express_weights[l];
            if (w != 0.0) {
                if (first) {
                    for (size_t i = 0; i < output.size(); ++i) output[i] = w * hop[i];
                    first = false;
                } else {
                    for (size_t i = 0; i < output.size(); ++i) output[i] += w * hop[i];
                }
            }
            if (cache) cache->hops.push_back(std::move(hop));
        }
    } else {
        output = propagate(post.back(), kernel);
    }

    std::array<double, 10> scores = detector_readout(output, net.detector);
    if (cache) {
        cache->post_mod = std::move(post);
        cache->output = std::move(output);
        cache->scores = scores;
    }
    return scores;
}

void Gradients::add(const Gradients& other) {
    for (size_t l = 0; l < layer_phase.size(); ++l) {
        for (size_t i = 0; i < layer_phase[l].size(); ++i) {
            layer_phase[l][i] += other.layer_phase[l][i];
        }
    }
    for (size_t i = 0; i < express.size(); ++i) express[i] += other.express[i];
}

void Gradients::scale(double s) {
    for (auto& g : layer_phase) {
        for (double& v : g) v *= s;
    }
    for (double& v : express) v *= s;
}

namespace {

/// d(loss)/d(phi_p) for h = z * exp(j phi): Im(conj(h_p) * g_p), with g in
/// the d/dRe + j d/dIm convention.
std::vector<double> phase_pixel_grad(const ComplexField& h, const ComplexField& g) {
    std::vector<double> pg(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
        pg[i] = std::imag(std::conj(h[i]) * g[i]);
    }
    return pg;
}

}  // namespace

Gradients backward(const Network& net, const ForwardCache& cache,
                   const std::array<double, 10>& score_grads) {
    const int layer_count = net.layer_count();
    if (cache.side != net.side || cache.revision != net.revision ||
        static_cast<int>(cache.pre_mod.size()) != layer_count) {
        throw std::invalid_argument(
            "backward: cache does not match the network (stale or foreign cache)");
    }
    const RsKernel& kernel = *net.kernel;

    Gradients grads;
    grads.layer_phase.resize(layer_count);
    if (net.express_enabled) grads.express.assign(layer_count, 0.0);

    // Readout adjoint: scores are sums of |f_p|^2 over regions.
    ComplexField g_out(net.side);
    for (int c = 0; c < 10; ++c) {
        const auto& r = net.detector.regions[c];
        for (int y = r.y0; y < r.y0 + net.detector.region_size; ++y) {
            for (int x = r.x0; x < r.x0 + net.detector.region_size; ++x) {
                g_out.at(x, y) = 2.0 * score_grads[c] * cache.output.at(x, y);
            }
        }
    }

    ComplexField chain_grad(net.side);  // gradient flowing into h^l from layer l+1
    ComplexField express_adjoint(net.side);
    if (net.express_enabled) {
        // All hops to the output plane share the kernel, so one adjoint
        // propagation serves every layer, scaled by its weight.
        express_adjoint = propagate_adjoint(g_out, kernel);
        for (int l = 0; l < layer_count; ++l) {
            grads.express[l] = std::real(inner_product(g_out, cache.hops[l]));
        }
    }

    for (int l = layer_count - 1; l >= 0; --l) {
        ComplexField g_h(net.side);
        if (l == layer_count - 1) {
            if (net.express_enabled) {
                const double w = net.express_weights[l];
                for (size_t i = 0; i < g_h.size(); ++i) g_h[i] = w * express_adjoint[i];
            } else {
                g_h = propagate_adjoint(g_out, kernel);
            }
        } else {
            g_h = std::move(chain_grad);
            if (net.express_enabled) {
                const double w = net.express_weights[l];
                for (size_t i = 0; i < g_h.size(); ++i) g_h[i] += w * express_adjoint[i];
            }
        }

        grads.layer_phase[l] =
            reduce_phase_grad(phase_pixel_grad(cache.post_mod[l], g_h), net.layers[l]);

        if (l > 0) {
            // Through the modulation: g_z = conj(t) .* g_h, then one adjoint hop.
            const std::vector<double> phi = expand_phases(net.layers[l]);
            ComplexField g_z(net.side);
            for (size_t i = 0; i < g_z.size(); ++i) {
                g_z[i] = g_h[i] * std::polar(1.0, -phi[i]);
            }
            chain_grad = propagate_adjoint(g_z, kernel);
        }
    }
    return grads;
}

}  // namespace exwave
