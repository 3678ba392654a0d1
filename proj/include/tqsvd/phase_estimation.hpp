#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tqsvd/rng.hpp"

namespace tqsvd {

// Exact t-bit phase-estimation outcome amplitudes for an eigenvalue e^{i*theta}:
//   kappa(c) = (1/T) sum_{x=0}^{T-1} e^{i x (theta - 2*pi*c/T)},   T = 2^t.
// On-grid phases collapse to a single deterministic outcome.
Eigen::VectorXcd phase_kernel_amplitudes(double theta, std::size_t t);
Eigen::VectorXd phase_estimate_distribution(double theta, std::size_t t);

// Textbook phase estimation applied to a verified eigenstate of u (residual
// checked at rel tol 1e-8, violation -> numeric_error).
Eigen::VectorXd phase_estimate(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& eigenstate,
                               std::size_t t);

// Aggregation of repeated estimates on the Z_{2^t} circle: recenter every
// outcome on the modal value, take the lower median of the signed deviations.
std::size_t circular_median(const std::vector<std::size_t>& outcomes, std::size_t t);

// Draw `repeats` outcomes from a distribution over 2^t grid points and fold
// them with circular_median.
std::size_t sample_phase_median(const Eigen::VectorXd& dist, std::size_t repeats, Rng& rng);

}  // namespace tqsvd
