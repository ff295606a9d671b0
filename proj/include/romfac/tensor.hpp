#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace romfac::diffcore {

using Shape = std::vector<int>;

inline int shape_size(const Shape& shape) {
    int n = 1;
    for (int d : shape) {
        if (d < 0) throw std::invalid_argument("tensor dimension must be non-negative");
        n *= d;
    }
    return n;
}

// Dense row-major tensor of doubles. Rank is 1 or 2 everywhere in this
// project; the shape stays general so tests can build odd cases.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (static_cast<int>(data.size()) != shape_size(shape))
            throw std::invalid_argument("tensor data length does not match shape");
    }

    static Tensor zeros(Shape s) {
        const int n = shape_size(s);
        return Tensor(std::move(s), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    }
    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor vector(std::vector<double> d) {
        const int n = static_cast<int>(d.size());
        return Tensor({n}, std::move(d));
    }

    int size() const { return static_cast<int>(data.size()); }
    bool is_scalar() const { return size() == 1; }

    double& operator[](int i) { return data[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return data[static_cast<std::size_t>(i)]; }

    // 2-D access, row-major
    double& at(int row, int col) {
        return data[static_cast<std::size_t>(row * shape.at(1) + col)];
    }
    double at(int row, int col) const {
        return data[static_cast<std::size_t>(row * shape.at(1) + col)];
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

inline std::string shape_string(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace romfac::diffcore
