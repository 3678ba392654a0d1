#pragma once

#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tqsvd/errors.hpp"

namespace tqsvd {

using cd = std::complex<double>;
using Tube = std::vector<double>;   // one mode-3 fiber
using CTube = std::vector<cd>;

// Dense tensor, column-major with mode 1 fastest: linear index of
// (i1,...,ip) is i1 + N1*(i2 + N2*(i3 + ...)).  Frontal slices of an
// order-3 tensor are therefore contiguous blocks of N1*N2 scalars.
template <typename T>
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> d) : dims(std::move(d)) {
        data.assign(size(), T{});
    }
    Tensor(std::size_t n1, std::size_t n2, std::size_t n3)
        : Tensor(std::vector<std::size_t>{n1, n2, n3}) {}

    std::size_t order() const { return dims.size(); }
    std::size_t dim(std::size_t m) const { return dims[m]; }  // m is 0-based
    std::size_t size() const {
        std::size_t s = 1;
        for (std::size_t d : dims) s *= d;
        return s;
    }

    // order-3 accessors
    T& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[i + dims[0] * (j + dims[1] * k)];
    }
    T at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[i + dims[0] * (j + dims[1] * k)];
    }

    T* slice_ptr(std::size_t k) { return data.data() + k * dims[0] * dims[1]; }
    const T* slice_ptr(std::size_t k) const { return data.data() + k * dims[0] * dims[1]; }

    // frontal slice as an Eigen matrix view (order 3, slice index k)
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> slice(std::size_t k) {
        return {slice_ptr(k), static_cast<Eigen::Index>(dims[0]),
                static_cast<Eigen::Index>(dims[1])};
    }
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>> slice(std::size_t k) const {
        return {slice_ptr(k), static_cast<Eigen::Index>(dims[0]),
                static_cast<Eigen::Index>(dims[1])};
    }
};

using DenseTensor = Tensor<double>;
using ComplexTensor = Tensor<cd>;

inline double frobenius_norm(const DenseTensor& a) {
    double s = 0.0;
    for (double x : a.data) s += x * x;
    return std::sqrt(s);
}

inline double frobenius_norm(const ComplexTensor& a) {
    double s = 0.0;
    for (const cd& x : a.data) s += std::norm(x);
    return std::sqrt(s);
}

inline ComplexTensor to_complex(const DenseTensor& a) {
    ComplexTensor c(a.dims);
    for (std::size_t i = 0; i < a.data.size(); ++i) c.data[i] = cd(a.data[i], 0.0);
    return c;
}

// Drop imaginary parts that are pure round-off.  An imaginary residue above
// rel_tol * ||A||_F means the caller's algebra was not actually real-valued,
// which we treat as a bug, not something to silently truncate.
inline DenseTensor to_real_checked(const ComplexTensor& a, double rel_tol = 1e-10) {
    double imag2 = 0.0;
    for (const cd& x : a.data) imag2 += x.imag() * x.imag();
    double n = frobenius_norm(a);
    if (std::sqrt(imag2) > rel_tol * std::max(n, 1e-300))
        throw numeric_error("imaginary residue " + std::to_string(std::sqrt(imag2)) +
                            " exceeds " + std::to_string(rel_tol) + " * ||A||_F");
    DenseTensor r(a.dims);
    for (std::size_t i = 0; i < a.data.size(); ++i) r.data[i] = a.data[i].real();
    return r;
}

inline bool same_dims(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return a == b;
}

}  // namespace tqsvd
