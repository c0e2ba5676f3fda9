#include "tagnn/array.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

namespace tagnn {

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ',';
        os << s[i];
    }
    os << ']';
    return os.str();
}

static std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (auto e : s) n *= e;
    return s.empty() ? 0 : n;
}

Array::Array(Shape shape) : shape_(std::move(shape)), data_(shape_numel(shape_), 0.0) {}

Array::Array(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_numel(shape_) != data_.size()) {
        throw StructuralError("array: shape " + tagnn::shape_str(shape_) + " does not match " +
                              std::to_string(data_.size()) + " values");
    }
}

Array Array::full(Shape shape, double v) {
    Array a(std::move(shape));
    a.fill(v);
    return a;
}

Array Array::row(std::vector<double> v) {
    Shape s{1, v.size()};
    return Array(std::move(s), std::move(v));
}

std::size_t Array::cols() const {
    if (shape_.size() < 2) return shape_.empty() ? 0 : 1;
    std::size_t c = 1;
    for (std::size_t i = 1; i < shape_.size(); ++i) c *= shape_[i];
    return c;
}

void Array::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Array::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x)) return false;
    return true;
}

// Register-friendly ikj kernel; the contiguous inner loop over n vectorizes.
void matmul_acc(const double* a, const double* b, double* out,
                std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* c = out + i * n;
        const double* arow = a + i * k;
        std::size_t kk = 0;
        for (; kk + 4 <= k; kk += 4) {
            const double a0 = arow[kk], a1 = arow[kk + 1], a2 = arow[kk + 2], a3 = arow[kk + 3];
            const double* b0 = b + kk * n;
            const double* b1 = b0 + n;
            const double* b2 = b1 + n;
            const double* b3 = b2 + n;
            for (std::size_t j = 0; j < n; ++j)
                c[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
        }
        for (; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) c[j] += av * brow[j];
        }
    }
}

Array matmul(const Array& a, const Array& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.extent(1) != b.extent(0)) {
        throw StructuralError("matmul: incompatible shapes " + a.shape_str() + " x " +
                              b.shape_str());
    }
    Array out({a.extent(0), b.extent(1)});
    matmul_acc(a.data(), b.data(), out.data(), a.extent(0), a.extent(1), b.extent(1));
    return out;
}

Array transpose(const Array& a) {
    if (a.ndim() != 2) throw StructuralError("transpose: need 2-d array, got " + a.shape_str());
    const std::size_t m = a.extent(0), n = a.extent(1);
    Array out({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.data()[j * m + i] = a.data()[i * n + j];
    return out;
}

}  // namespace tagnn
