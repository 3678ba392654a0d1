#pragma once

#include "tqsvd/tensor.hpp"

namespace tqsvd {

// One-dimensional DFT of a contiguous buffer:
//   out[k] = scale * sum_j exp(sign * 2*pi*i * j*k / n) * buf[j]
// Radix-2 when n is a power of two, direct O(n^2) sum otherwise (desk scale).
void dft_line(cd* buf, std::size_t n, int sign, double scale);

// MATLAB-style transforms along modes first_mode..p (1-based, first_mode >= 3):
// forward is unnormalized with kernel e^{-2*pi*i*jk/n}, inverse carries 1/n.
ComplexTensor fft_trailing_modes(const DenseTensor& a, std::size_t first_mode = 3);
ComplexTensor fft_trailing_modes(const ComplexTensor& a, std::size_t first_mode = 3);
ComplexTensor ifft_trailing_modes(const ComplexTensor& a, std::size_t first_mode = 3);

// Unitary-convention hat slices used by the quantum-facing modules:
//   Ahat^(m) = (1/sqrt(N3)) * sum_k omega^{+k*m} A^(k),  omega = e^{2*pi*i/N3}.
// Note the positive kernel sign: for real A this equals the conjugate of the
// MATLAB-convention hat slice divided by sqrt(N3).
ComplexTensor unitary_hat_slices(const DenseTensor& a);
ComplexTensor unitary_hat_slices(const ComplexTensor& a);
ComplexTensor unitary_unhat_slices(const ComplexTensor& a);  // inverse of the above

}  // namespace tqsvd
