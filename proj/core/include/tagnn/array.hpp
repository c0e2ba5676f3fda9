#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "tagnn/errors.hpp"

namespace tagnn {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

// Dense row-major array of doubles. All arithmetic runs in 64-bit; 32-bit
// floats exist only inside checkpoint payloads.
class Array {
public:
    Array() = default;
    explicit Array(Shape shape);
    Array(Shape shape, std::vector<double> data);

    static Array zeros(Shape shape) { return Array(std::move(shape)); }
    static Array full(Shape shape, double v);
    static Array scalar(double v) { return Array({1}, {v}); }
    static Array row(std::vector<double> v);

    std::size_t ndim() const { return shape_.size(); }
    const Shape& shape() const { return shape_; }
    std::size_t extent(std::size_t i) const { return shape_[i]; }
    std::size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& vec() { return data_; }
    const std::vector<double>& vec() const { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    bool same_shape(const Array& o) const { return shape_ == o.shape_; }
    std::string shape_str() const { return tagnn::shape_str(shape_); }

    // rows() / cols() treat the array as 2-D: leading extent x product of the rest.
    std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
    std::size_t cols() const;

    void fill(double v);
    bool all_finite() const;

private:
    Shape shape_;
    std::vector<double> data_;
};

// out = a * b for row-major a [M,K], b [K,N]. Checks inner extents.
Array matmul(const Array& a, const Array& b);

// out += a * b into preallocated out [M,N].
void matmul_acc(const double* a, const double* b, double* out,
                std::size_t m, std::size_t k, std::size_t n);

Array transpose(const Array& a);

}  // namespace tagnn
