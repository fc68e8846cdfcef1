#pragma once

#include <memory>
#include <vector>

#include "exwave/field.hpp"

namespace exwave {

/// Physical sampling of the layer stack. All layers share one geometry.
struct PropagationGeometry {
    int side = 0;             // pixels per edge
    double pitch = 0.0;       // pixel side length [m]
    double wavelength = 0.0;  // [m]
    double spacing = 0.0;     // inter-layer distance [m]

    PropagationGeometry() = default;
    PropagationGeometry(int side, double pitch, double wavelength, double spacing);

    /// spacing < pitch means the hop is shorter than one pixel; flagged as a
    /// warning at construction, not an error.
    bool under_sampled() const { return spacing < pitch; }

    /// 632.8 nm HeNe line, pixel pitch of one wavelength, hop of 40
    /// wavelengths. One free-space hop then keeps a centered beam's energy
    /// inside the window to a fraction of a percent at side >= 32.
    static PropagationGeometry with_defaults(int side);

    bool operator==(const PropagationGeometry&) const = default;
};

inline constexpr double kDefaultWavelength = 632.8e-9;
inline constexpr double kDefaultPitchFactor = 1.0;    // pitch = factor * wavelength
inline constexpr double kDefaultSpacingFactor = 40.0; // spacing = factor * wavelength

/// Free-space transfer operator between adjacent planes: the spatial kernel
/// w(dx, dy) evaluated on a (2n-1)-support grid and stored as its transform
/// on the zero-padded grid, ready for linear FFT convolution.
class RsKernel {
public:
    explicit RsKernel(const PropagationGeometry& g);

    const PropagationGeometry& geometry() const { return geom_; }
    int pad() const { return pad_; }
    const std::vector<cdouble>& spectrum() const { return spectrum_; }

    /// Spatial kernel value at pixel offset (dx, dy), computed from the
    /// closed form (not from the stored spectrum).
    cdouble value(int dx, int dy) const;

private:
    PropagationGeometry geom_;
    int pad_;
    std::vector<cdouble> spectrum_;
};

/// Shared, memoized kernel; one entry per distinct geometry serves every
/// layer and batch.
std::shared_ptr<const RsKernel> build_rs_kernel(const PropagationGeometry& g);

/// One free-space hop via padded FFT convolution.
ComplexField propagate(const ComplexField& f, const RsKernel& k);

/// Literal double summation z_i = sum_k w(p_i - p_k) h_k. O(n^4); the test
/// oracle for the FFT path.
ComplexField propagate_direct(const ComplexField& f, const RsKernel& k);

/// Conjugate-transpose of the propagation operator. The kernel matrix is
/// symmetric (w depends on |dx|,|dy| only), so the adjoint is convolution
/// with the conjugated kernel: P†x = conj(P conj(x)).
ComplexField propagate_adjoint(const ComplexField& grad_out, const RsKernel& k);

}  // namespace exwave
