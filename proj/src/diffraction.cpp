#include "exwave/diffraction.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace exwave {

PropagationGeometry::PropagationGeometry(int side, double pitch, double wavelength,
                                         double spacing)
    : side(side), pitch(pitch), wavelength(wavelength), spacing(spacing) {
    if (side < 1) throw std::invalid_argument("geometry: side must be >= 1");
    if (!(pitch > 0.0) || !(wavelength > 0.0) || !(spacing > 0.0)) {
        throw std::invalid_argument("geometry: pitch, wavelength and spacing must be > 0");
    }
}

PropagationGeometry PropagationGeometry::with_defaults(int side) {
    return PropagationGeometry(side, kDefaultPitchFactor * kDefaultWavelength,
                               kDefaultWavelength,
                               kDefaultSpacingFactor * kDefaultWavelength);
}

namespace {

// FFTW planning (and plan destruction) is not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Per-thread transform workspace, one per padded size. Buffers come from
// fftw_malloc so every plan sees the same alignment.
struct FftWorkspace {
    int pad = 0;
    fftw_complex* a = nullptr;
    fftw_complex* b = nullptr;
    fftw_plan fwd = nullptr;  // a -> b
    fftw_plan inv = nullptr;  // b -> a

    explicit FftWorkspace(int p) : pad(p) {
        const size_t count = static_cast<size_t>(p) * p;
        a = fftw_alloc_complex(count);
        b = fftw_alloc_complex(count);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft_2d(p, p, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
        inv = fftw_plan_dft_2d(p, p, b, a, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fftw_free(a);
        fftw_free(b);
    }

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
};

FftWorkspace& workspace_for(int pad) {
    thread_local std::unordered_map<int, std::unique_ptr<FftWorkspace>> cache;
    auto& slot = cache[pad];
    if (!slot) slot = std::make_unique<FftWorkspace>(pad);
    return *slot;
}

inline cdouble* as_cdouble(fftw_complex* p) { return reinterpret_cast<cdouble*>(p); }

}  // namespace

RsKernel::RsKernel(const PropagationGeometry& g) : geom_(g), pad_(2 * g.side) {
    const int n = g.side;
    const int p = pad_;
    FftWorkspace& ws = workspace_for(p);
    cdouble* in = as_cdouble(ws.a);
    std::fill(in, in + static_cast<size_t>(p) * p, cdouble{0.0, 0.0});

    // Kernel support is [-(n-1), n-1] in both axes, wrapped onto the padded
    // grid so circular convolution reproduces the linear sum on the window.
    for (int dy = -(n - 1); dy <= n - 1; ++dy) {
        for (int dx = -(n - 1); dx <= n - 1; ++dx) {
            const cdouble w = value(dx, dy);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
                throw std::runtime_error("RsKernel: non-finite kernel entry at offset (" +
                                         std::to_string(dx) + "," + std::to_string(dy) + ")");
            }
            const int ix = (dx + p) % p;
            const int iy = (dy + p) % p;
            in[static_cast<size_t>(iy) * p + ix] = w;
        }
    }
    fftw_execute(ws.fwd);
    const cdouble* out = as_cdouble(ws.b);
    spectrum_.assign(out, out + static_cast<size_t>(p) * p);
}

cdouble RsKernel::value(int dx, int dy) const {
    using std::numbers::pi;
    const double lambda = geom_.wavelength;
    const double dz = geom_.spacing;
    const double x = dx * geom_.pitch;
    const double y = dy * geom_.pitch;
    const double r = std::sqrt(x * x + y * y + dz * dz);
    // Axial obliquity factor dz/r^2, amplitude term 1/(2*pi*r) + 1/(j*lambda),
    // spherical carrier, and the pitch^2 area element of the discrete sum.
    const cdouble amplitude = cdouble{1.0 / (2.0 * pi * r), 0.0} +
                              cdouble{0.0, -1.0 / lambda};  // 1/(j*lambda)
    const cdouble carrier = std::polar(1.0, 2.0 * pi * r / lambda);
    return (dz / (r * r)) * amplitude * carrier * (geom_.pitch * geom_.pitch);
}

std::shared_ptr<const RsKernel> build_rs_kernel(const PropagationGeometry& g) {
    using Key = std::tuple<int, double, double, double>;
    static std::mutex cache_mutex;
    static std::map<Key, std::shared_ptr<const RsKernel>> cache;

    const Key key{g.side, g.pitch, g.wavelength, g.spacing};
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto kernel = std::make_shared<const RsKernel>(g);
    cache.emplace(key, kernel);
    return kernel;
}

static void require_field_matches(const ComplexField& f, const RsKernel& k, const char* op) {
    if (f.side() != k.geometry().side) {
        throw std::invalid_argument(std::string(op) + ": field side " +
                                    std::to_string(f.side()) + " != kernel side " +
                                    std::to_string(k.geometry().side));
    }
}

ComplexField propagate(const ComplexField& f, const RsKernel& k) {
    require_field_matches(f, k, "propagate");
    const int n = f.side();
    const int p = k.pad();
    FftWorkspace& ws = workspace_for(p);

    cdouble* a = as_cdouble(ws.a);
    std::fill(a, a + static_cast<size_t>(p) * p, cdouble{0.0, 0.0});
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) a[static_cast<size_t>(y) * p + x] = f.at(x, y);
    }
    fftw_execute(ws.fwd);

    cdouble* b = as_cdouble(ws.b);
    const std::vector<cdouble>& spec = k.spectrum();
    const double scale = 1.0 / (static_cast<double>(p) * p);  // FFTW leaves FFTs unscaled
    for (size_t i = 0; i < spec.size(); ++i) b[i] *= spec[i] * scale;
    fftw_execute(ws.inv);

    ComplexField out(n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) out.at(x, y) = a[static_cast<size_t>(y) * p + x];
    }
    return out;
}

ComplexField propagate_direct(const ComplexField& f, const RsKernel& k) {
    require_field_matches(f, k, "propagate_direct");
    const int n = f.side();
    ComplexField out(n);
    for (int yi = 0; yi < n; ++yi) {
        for (int xi = 0; xi < n; ++xi) {
            cdouble sum{0.0, 0.0};
            for (int yk = 0; yk < n; ++yk) {
                for (int xk = 0; xk < n; ++xk) {
                    sum += k.value(xi - xk, yi - yk) * f.at(xk, yk);
                }
            }
            out.at(xi, yi) = sum;
        }
    }
    return out;
}

ComplexField propagate_adjoint(const ComplexField& grad_out, const RsKernel& k) {
    require_field_matches(grad_out, k, "propagate_adjoint");
    ComplexField conj_in(grad_out.side());
    for (size_t i = 0; i < grad_out.size(); ++i) conj_in[i] = std::conj(grad_out[i]);
    ComplexField propagated = propagate(conj_in, k);
    for (size_t i = 0; i < propagated.size(); ++i) propagated[i] = std::conj(propagated[i]);
    return propagated;
}

}  // namespace exwave
