#pragma once

#include <string>
#include <vector>

#include "tqsvd/kernels.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Full orthogonal factors of the tensor SVD: A = U * S * V^T with U, V
// orthogonal tensors and S f-diagonal (each hat slice rectangular diagonal
// with nonnegative descending entries; the spatial-domain S tubes are left
// exactly as the inverse transform produces them).
struct TSvdFactors {
    DenseTensor u;  // N1 x N1 x N3
    DenseTensor s;  // N1 x N2 x N3
    DenseTensor v;  // N2 x N2 x N3
};

enum class FftConvention { unnormalized, unitary };

// Per-slice SVDs of the transform-domain slices.  For order > 3 the slice
// index flattens the trailing modes with mode 3 most significant.
struct SliceSvdSet {
    std::size_t n1 = 0, n2 = 0;
    FftConvention convention = FftConvention::unnormalized;
    std::vector<std::size_t> trailing_dims;
    std::vector<kernels::SliceSvd> slices;

    std::size_t slice_count() const { return slices.size(); }
    double slice_fro(std::size_t m) const { return slices[m].sigma.norm(); }
};

using MultiRank = std::vector<std::size_t>;

TSvdFactors tsvd(const DenseTensor& a);

// Hat-domain per-slice SVDs without forming spatial factors.
SliceSvdSet slice_svds(const DenseTensor& a, FftConvention conv);
SliceSvdSet tsvd_order_p(const DenseTensor& a);  // order >= 3, unnormalized convention

// Best multi-rank-k approximation (top k triples in every hat slice).
DenseTensor truncate_k(const DenseTensor& a, std::size_t k);

// ||A - truncate_k(A, k)||_F computed from the hat spectra alone.
double truncation_error(const DenseTensor& a, std::size_t k);

// Rebuild hat slices keeping only triples with sigma >= threshold (ties kept).
// thresholds has one entry per slice.
ComplexTensor threshold_truncate_slices(const SliceSvdSet& svds,
                                        const std::vector<double>& thresholds);

// Tensor nuclear norm: sum of hat-slice nuclear norms (unnormalized fft).
double tnn(const DenseTensor& a);

// Per-slice numerical ranks of the hat slices: entry m counts singular values
// exceeding rank_tol * (largest singular value of that slice).
MultiRank multi_rank(const DenseTensor& a, double rank_tol = 1e-10);

// Matrix-level helpers shared with the recommendation pipeline.
double tail_norm(const Eigen::VectorXd& sigma, std::size_t k);  // sqrt(sum_{i>=k} sigma_i^2)
Eigen::MatrixXcd threshold_truncate_matrix(const Eigen::MatrixXcd& m, double threshold);

// Factor serialization: one TNS1 file per factor plus a JSON manifest.
void save_factors(const std::string& dir, const TSvdFactors& f);
TSvdFactors load_factors(const std::string& dir);

}  // namespace tqsvd
