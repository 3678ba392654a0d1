#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tqsvd/qsim.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

// The two state-preparation isometries of the singular-value-estimation walk
// for one (generally complex) matrix A:
//   P: column i = e_i (x) conj(A_i)/||A_i||     (rows, conjugated entries)
//   Q: column j = rho (x) e_j,  rho_i = ||A_i|| / ||A||_F
// They satisfy P^dag P = I, Q^dag Q = I and P^dag Q = A / ||A||_F.  Zero rows
// contribute a fixed basis column with zero weight; the zero matrix is refused.
struct IsometrySet {
    Eigen::MatrixXcd p;  // (n1*n2) x n1
    Eigen::MatrixXcd q;  // (n1*n2) x n2
    double fro = 0.0;
};
IsometrySet build_isometries(const Eigen::MatrixXcd& a);

// W = (2 P P^dag - I)(2 Q Q^dag - I) with an orthonormal eigenbasis attached.
// On span{P u_l, Q v_l} the phases come in pairs e^{+-i theta_l} with
// cos(theta_l / 2) = sigma_l / ||A||_F.
struct WalkOperator {
    Eigen::MatrixXcd w;
    Eigen::MatrixXcd eigenbasis;  // unitary; column l is an eigenvector
    Eigen::VectorXd phases;       // theta_l in [0, 2*pi)
};
WalkOperator build_walk(const IsometrySet& iso);

// Conversions between singular values, walk phases, and the t-bit phase grid.
double sigma_to_phase(double sigma, double fro);          // theta = 2*acos(sigma/fro)
double phase_to_sigma(double theta, double fro);          // fro * cos(theta/2)
std::size_t phase_to_grid(double theta, std::size_t t);   // c = round(2^t * theta / 2pi) mod 2^t
std::size_t fold_grid(std::size_t c, std::size_t t);      // min(c, 2^t - c): merges the +-theta pair
double grid_to_sigma(std::size_t c, std::size_t t, double fro);  // fro * cos(pi*c/2^t)
double sve_error_bound(double fro, std::size_t t);               // pi * fro / 2^t

// Deterministic singular-value estimation: exact spectra rounded to the grid.
// The estimates land within half a grid step, strictly inside sve_error_bound.
struct OracleSve {
    Eigen::VectorXd sigma;           // exact singular values, descending
    std::vector<std::size_t> grid;   // folded grid code per value
    Eigen::VectorXd estimate;        // grid_to_sigma(code)
    double fro = 0.0;
};
OracleSve qsve_oracle(const Eigen::MatrixXcd& a, std::size_t t);

// Full circuit simulation of one estimation round on `input` (a vector in the
// column space C^{n2}): prepare with the Q isometry, phase-estimate the walk,
// fold the +-theta outcomes into an estimate register, uncompute, postselect
// the ancilla and phase registers back to zero.  On-grid spectra succeed with
// probability one and a deterministic outcome; off-grid the modal outcome
// equals the oracle rounding.
struct CircuitSve {
    Eigen::VectorXd outcome_distribution;  // over folded codes, given success
    double success_probability = 0.0;
    std::size_t modal = 0;
    double modal_sigma = 0.0;
};
CircuitSve qsve_circuit(const Eigen::MatrixXcd& a, std::size_t t, const Eigen::VectorXcd& input);

// Context-controlled estimation oracle shared by the spectral pipelines: for
// every context value m, rotate d into the right singular basis of hat slice m,
// XOR each basis vector's folded grid code into b, rotate back.  Self-inverse.
// A zero slice carrying state amplitude is a numeric_error.
void controlled_sve_xor(StateVector& s, const std::string& d_reg, const std::string& e_reg,
                        const std::string& b_reg, const ComplexTensor& unitary_hat,
                        std::size_t t);

// Spectral decomposition pipeline over a full order-3 tensor: prepare |A> on
// registers (c, d, e), rotate e into the transform domain, run the controlled
// estimation into a fresh register b, rotate e back.  The result entangles
// every transform-domain singular triple with its t-bit estimate.
StateVector quantum_tsvd(const DenseTensor& a, std::size_t t_bits);

}  // namespace tqsvd
