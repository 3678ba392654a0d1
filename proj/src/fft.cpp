#include "tqsvd/fft.hpp"

#include <cmath>

#include "tqsvd/kernels.hpp"

namespace tqsvd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place.
void fft_pow2(cd* x, std::size_t n, int sign) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {  // bit-reversal permutation
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * kTwoPi / static_cast<double>(len);
        cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cd a = x[i + k];
                cd b = x[i + k + len / 2] * w;
                x[i + k] = a + b;
                x[i + k + len / 2] = a - b;
                w *= wlen;
            }
        }
    }
}

void dft_naive(cd* x, std::size_t n, int sign) {
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sign * kTwoPi * static_cast<double>(j * k % n) / static_cast<double>(n);
            acc += x[j] * cd(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) x[k] = out[k];
}

}  // namespace

void dft_line(cd* buf, std::size_t n, int sign, double scale) {
    if (n == 0) return;
    if (is_pow2(n))
        fft_pow2(buf, n, sign);
    else
        dft_naive(buf, n, sign);
    if (scale != 1.0)
        for (std::size_t i = 0; i < n; ++i) buf[i] *= scale;
}

namespace {

ComplexTensor transform_trailing(ComplexTensor a, std::size_t first_mode, int sign,
                                 bool unit_scale_inverse) {
    if (first_mode < 3 || first_mode > a.order())
        throw std::invalid_argument("first_mode must satisfy 3 <= first_mode <= order");
    for (std::size_t m = first_mode - 1; m < a.order(); ++m) {
        double scale = unit_scale_inverse ? 1.0 / static_cast<double>(a.dim(m)) : 1.0;
        kernels::transform_mode(a, m, sign, scale);
    }
    return a;
}

}  // namespace

ComplexTensor fft_trailing_modes(const DenseTensor& a, std::size_t first_mode) {
    return transform_trailing(to_complex(a), first_mode, -1, false);
}

ComplexTensor fft_trailing_modes(const ComplexTensor& a, std::size_t first_mode) {
    return transform_trailing(a, first_mode, -1, false);
}

ComplexTensor ifft_trailing_modes(const ComplexTensor& a, std::size_t first_mode) {
    return transform_trailing(a, first_mode, +1, true);
}

ComplexTensor unitary_hat_slices(const DenseTensor& a) {
    return unitary_hat_slices(to_complex(a));
}

ComplexTensor unitary_hat_slices(const ComplexTensor& a) {
    if (a.order() != 3) throw std::invalid_argument("unitary_hat_slices expects order 3");
    ComplexTensor r = a;
    kernels::transform_mode(r, 2, +1, 1.0 / std::sqrt(static_cast<double>(a.dim(2))));
    return r;
}

ComplexTensor unitary_unhat_slices(const ComplexTensor& a) {
    if (a.order() != 3) throw std::invalid_argument("unitary_unhat_slices expects order 3");
    ComplexTensor r = a;
    kernels::transform_mode(r, 2, -1, 1.0 / std::sqrt(static_cast<double>(a.dim(2))));
    return r;
}

}  // namespace tqsvd
