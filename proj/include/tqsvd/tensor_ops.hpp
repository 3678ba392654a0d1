#pragma once

#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Circulant of u: column j is u cyclically shifted down by j,
// i.e. entry (i, j) = u[(i - j) mod n].
Eigen::MatrixXd circ_vector(const Tube& u);

// Cyclic convolution circ(u) * v, computed through the DFT diagonalization.
Tube cyclic_convolve(const Tube& u, const Tube& v);

// Block circulant of an order-3 tensor: (N1*N3) x (N2*N3), block (i, j) is
// frontal slice (i - j) mod N3.
Eigen::MatrixXd circ_tensor(const DenseTensor& b);

// Frontal slices stacked vertically: (N1*N3) x N2.
Eigen::MatrixXd unfold_slices(const DenseTensor& a);
DenseTensor fold_slices(const Eigen::MatrixXd& m, std::size_t n1, std::size_t n2, std::size_t n3);

// t-product of M (N1 x N2 x N3) and N (N2 x N4 x N3): tube (i, j) is the sum
// over k of the cyclic convolutions M(i,k,:) (*) N(k,j,:).  Computed in the
// hat domain (per-slice matrix products), which is the fast path; the block
// circulant definition is used as the test oracle.
DenseTensor t_product(const DenseTensor& m, const DenseTensor& n);

// Transpose every frontal slice, then reverse the order of slices 2..N3.
DenseTensor t_transpose(const DenseTensor& a);

// First frontal slice is the n x n identity, the rest are zero.
DenseTensor identity_tensor(std::size_t n, std::size_t n3);

// Q^T * Q and Q * Q^T both within tol of the identity tensor (Frobenius).
bool is_orthogonal_tensor(const DenseTensor& q, double tol);

}  // namespace tqsvd
