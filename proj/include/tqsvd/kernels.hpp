#pragma once

#include <vector>

#include "tqsvd/tensor.hpp"

// Data-parallel inner loops, each in two variants: a plain serial reference
// and an OpenMP version.  The public entry point dispatches to the OpenMP
// variant; tests compare the two, and bench/ times them side by side.  Every
// kernel is an independent-output map (no cross-iteration reductions), so the
// variants produce bit-identical results.

namespace tqsvd::kernels {

// DFT applied along one mode (0-based) of a complex tensor, one line at a
// time.  sign/scale as in dft_line.
void transform_mode_serial(ComplexTensor& a, std::size_t mode, int sign, double scale);
void transform_mode_parallel(ComplexTensor& a, std::size_t mode, int sign, double scale);
void transform_mode(ComplexTensor& a, std::size_t mode, int sign, double scale);

struct SliceSvd {
    Eigen::MatrixXcd u;       // N1 x r
    Eigen::VectorXd sigma;    // r, descending
    Eigen::MatrixXcd v;       // N2 x r
};

// Thin SVD of every frontal slice of a complex order-3 tensor (r = min(N1,N2)),
// with a deterministic phase convention: the first nonvanishing component of
// each right singular vector is made real positive.
std::vector<SliceSvd> batch_svd_serial(const ComplexTensor& hat);
std::vector<SliceSvd> batch_svd_parallel(const ComplexTensor& hat);
std::vector<SliceSvd> batch_svd(const ComplexTensor& hat);

SliceSvd svd_with_phase_convention(const Eigen::MatrixXcd& m);

// Full-basis variant: u is N1 x N1 and v is N2 x N2 (null-space columns
// included, each phase-fixed the same way); sigma still has min(N1, N2)
// entries.
SliceSvd svd_full_with_phase_convention(const Eigen::MatrixXcd& m);

// State-vector update: applies a dim x dim unitary to the "mid" axis of a
// state reshaped as (outer, dim, inner); each (outer, inner) pair is an
// independent matrix-vector product.  Used by the register simulator.
void apply_mid_unitary_serial(cd* amps, std::size_t outer, std::size_t dim,
                              std::size_t inner, const Eigen::MatrixXcd& u);
void apply_mid_unitary_parallel(cd* amps, std::size_t outer, std::size_t dim,
                                std::size_t inner, const Eigen::MatrixXcd& u);
void apply_mid_unitary(cd* amps, std::size_t outer, std::size_t dim,
                       std::size_t inner, const Eigen::MatrixXcd& u);

}  // namespace tqsvd::kernels
