#pragma once

#include <complex>
#include <vector>

namespace exwave {

using cdouble = std::complex<double>;

/// Square grid of complex amplitudes: one monochromatic wavefront sampled on
/// an n-by-n plane. Row-major, index = y * n + x, 0-based internally.
/// Treated as immutable once handed to another module.
class ComplexField {
public:
    explicit ComplexField(int side, cdouble fill = cdouble{0.0, 0.0});

    int side() const { return side_; }
    size_t size() const { return data_.size(); }

    cdouble& operator[](size_t i) { return data_[i]; }
    const cdouble& operator[](size_t i) const { return data_[i]; }

    cdouble& at(int x, int y) { return data_[static_cast<size_t>(y) * side_ + x]; }
    const cdouble& at(int x, int y) const { return data_[static_cast<size_t>(y) * side_ + x]; }

    cdouble* data() { return data_.data(); }
    const cdouble* data() const { return data_.data(); }

    bool all_finite() const;

private:
    int side_;
    std::vector<cdouble> data_;
};

ComplexField make_field(int side, cdouble fill = cdouble{0.0, 0.0});

/// Sum of |f_p|^2 over the plane.
double total_intensity(const ComplexField& f);

/// Elementwise complex product. Throws on dimension mismatch.
ComplexField hadamard(const ComplexField& a, const ComplexField& b);

/// Hermitian inner product sum(conj(a_p) * b_p).
cdouble inner_product(const ComplexField& a, const ComplexField& b);

}  // namespace exwave
