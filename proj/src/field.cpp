#include "exwave/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exwave {

ComplexField::ComplexField(int side, cdouble fill) : side_(side) {
    if (side < 1) {
        throw std::invalid_argument("ComplexField: side must be >= 1, got " +
                                    std::to_string(side));
    }
    data_.assign(static_cast<size_t>(side) * side, fill);
}

bool ComplexField::all_finite() const {
    for (const cdouble& v : data_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

ComplexField make_field(int side, cdouble fill) { return ComplexField(side, fill); }

double total_intensity(const ComplexField& f) {
    double sum = 0.0;
    for (size_t i = 0; i < f.size(); ++i) sum += std::norm(f[i]);
    return sum;
}

static void require_same_side(const ComplexField& a, const ComplexField& b, const char* op) {
    if (a.side() != b.side()) {
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.side()) + " vs " +
                                    std::to_string(b.side()) + ")");
    }
}

ComplexField hadamard(const ComplexField& a, const ComplexField& b) {
    require_same_side(a, b, "hadamard");
    ComplexField out(a.side());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

cdouble inner_product(const ComplexField& a, const ComplexField& b) {
    require_same_side(a, b, "inner_product");
    cdouble sum{0.0, 0.0};
    for (size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
    return sum;
}

}  // namespace exwave
