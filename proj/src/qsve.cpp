#include "tqsvd/qsve.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "tqsvd/errors.hpp"
#include "tqsvd/fft.hpp"
#include "tqsvd/kernels.hpp"

namespace tqsvd {

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Extend an isometry (orthonormal columns) to a square unitary whose leading
// columns are exactly the isometry.
Eigen::MatrixXcd complete_isometry(const Eigen::MatrixXcd& iso) {
    const Eigen::Index n = iso.rows(), k = iso.cols();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(iso);
    Eigen::MatrixXcd full = qr.householderQ();
    Eigen::MatrixXcd u(n, n);
    u.leftCols(k) = iso;
    u.rightCols(n - k) = full.rightCols(n - k);
    Eigen::MatrixXcd g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    if (g.norm() > 1e-10 * std::sqrt(static_cast<double>(n)))
        throw numeric_error("failed to complete an isometry to a unitary");
    return u;
}

}  // namespace

IsometrySet build_isometries(const Eigen::MatrixXcd& a) {
    const Eigen::Index n1 = a.rows(), n2 = a.cols();
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("empty matrix");
    IsometrySet iso;
    iso.fro = a.norm();
    if (iso.fro == 0.0) throw std::invalid_argument("the zero matrix has no isometry pair");
    iso.p = Eigen::MatrixXcd::Zero(n1 * n2, n1);
    iso.q = Eigen::MatrixXcd::Zero(n1 * n2, n2);
    for (Eigen::Index i = 0; i < n1; ++i) {
        const double rn = a.row(i).norm();
        if (rn > 0.0) {
            for (Eigen::Index j = 0; j < n2; ++j)
                iso.p(i * n2 + j, i) = std::conj(a(i, j)) / rn;
        } else {
            iso.p(i * n2 + 0, i) = 1.0;  // fixed basis column, weight zero below
        }
        for (Eigen::Index j = 0; j < n2; ++j) iso.q(i * n2 + j, j) = rn / iso.fro;
    }
    return iso;
}

WalkOperator build_walk(const IsometrySet& iso) {
    const Eigen::Index n = iso.p.rows();
    Eigen::MatrixXcd refl_p = 2.0 * iso.p * iso.p.adjoint() - Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd refl_q = 2.0 * iso.q * iso.q.adjoint() - Eigen::MatrixXcd::Identity(n, n);
    WalkOperator walk;
    walk.w = refl_p * refl_q;
    // W is unitary, hence normal: its Schur form is diagonal and the Schur
    // basis is an orthonormal eigenbasis even inside degenerate clusters.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(walk.w, /*computeU=*/true);
    if (schur.info() != Eigen::Success) throw numeric_error("walk Schur decomposition failed");
    Eigen::MatrixXcd t = schur.matrixT();
    walk.eigenbasis = schur.matrixU();
    Eigen::MatrixXcd off = t;
    off.diagonal().setZero();
    if (off.norm() > 1e-8 * static_cast<double>(n))
        throw numeric_error("walk operator is not normal to working precision");
    walk.phases.resize(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const cd lambda = t(l, l);
        if (std::abs(std::abs(lambda) - 1.0) > 1e-8)
            throw numeric_error("walk eigenvalue is off the unit circle");
        double theta = std::arg(lambda);
        if (theta < 0.0) theta += 2.0 * M_PI;
        walk.phases[l] = theta;
    }
    return walk;
}

double sigma_to_phase(double sigma, double fro) {
    if (fro <= 0.0) throw std::invalid_argument("needs a positive Frobenius norm");
    const double ratio = std::min(1.0, std::max(0.0, sigma / fro));
    return 2.0 * std::acos(ratio);
}

double phase_to_sigma(double theta, double fro) { return fro * std::cos(theta / 2.0); }

std::size_t phase_to_grid(double theta, std::size_t t) {
    const double big_t = static_cast<double>(std::size_t{1} << t);
    double x = theta * big_t / (2.0 * M_PI);
    auto c = static_cast<long long>(std::llround(x));
    const auto mod = static_cast<long long>(std::size_t{1} << t);
    return static_cast<std::size_t>(((c % mod) + mod) % mod);
}

std::size_t fold_grid(std::size_t c, std::size_t t) {
    const std::size_t big_t = std::size_t{1} << t;
    c %= big_t;
    return std::min(c, (big_t - c) % big_t);
}

double grid_to_sigma(std::size_t c, std::size_t t, double fro) {
    const double big_t = static_cast<double>(std::size_t{1} << t);
    return fro * std::cos(M_PI * static_cast<double>(c) / big_t);
}

double sve_error_bound(double fro, std::size_t t) {
    return M_PI * fro / static_cast<double>(std::size_t{1} << t);
}

OracleSve qsve_oracle(const Eigen::MatrixXcd& a, std::size_t t) {
    OracleSve out;
    out.fro = a.norm();
    if (out.fro == 0.0) throw std::invalid_argument("the zero matrix has no spectrum to estimate");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    out.sigma = svd.singularValues();
    out.grid.resize(static_cast<std::size_t>(out.sigma.size()));
    out.estimate.resize(out.sigma.size());
    for (Eigen::Index l = 0; l < out.sigma.size(); ++l) {
        const std::size_t c = fold_grid(phase_to_grid(sigma_to_phase(out.sigma[l], out.fro), t), t);
        out.grid[static_cast<std::size_t>(l)] = c;
        out.estimate[l] = grid_to_sigma(c, t, out.fro);
    }
    return out;
}

CircuitSve qsve_circuit(const Eigen::MatrixXcd& a, std::size_t t, const Eigen::VectorXcd& input) {
    const auto n1 = static_cast<std::size_t>(a.rows());
    const auto n2 = static_cast<std::size_t>(a.cols());
    if (!power_of_two(n1) || !power_of_two(n2))
        throw std::invalid_argument("circuit estimation needs power-of-two dimensions");
    if (input.size() != a.cols()) throw std::invalid_argument("input vector does not match columns");
    if (input.norm() == 0.0) throw std::invalid_argument("zero input vector");
    const auto q_anc = static_cast<std::size_t>(std::countr_zero(n1));
    const auto q_d = static_cast<std::size_t>(std::countr_zero(n2));
    const std::size_t need = q_anc + q_d + 2 * t;
    if (need > RegisterLayout::qubit_cap())
        throw qubit_cap_error(
            "circuit estimation needs " + std::to_string(need) + " qubits but the cap is " +
            std::to_string(RegisterLayout::qubit_cap()) +
            "; use the deterministic oracle estimator or raise TQSVD_QUBIT_CAP");

    IsometrySet iso = build_isometries(a);
    WalkOperator walk = build_walk(iso);
    Eigen::MatrixXcd uq = complete_isometry(iso.q);
    const std::vector<std::string> walk_space{"anc", "d"};

    RegisterLayout layout({{"anc", q_anc}, {"d", q_d}, {"pe", t}, {"b", t}});
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    Eigen::VectorXcd x = input / input.norm();
    const std::size_t pe_b = std::size_t{1} << (2 * t);
    for (std::size_t j = 0; j < n2; ++j)
        amp[static_cast<Eigen::Index>(j * pe_b)] = x[static_cast<Eigen::Index>(j)];
    StateVector s = StateVector::from_amplitudes(layout, std::move(amp));

    const Eigen::MatrixXcd basis_adj = walk.eigenbasis.adjoint();
    const std::size_t walk_dim = n1 * n2;
    auto select_phase = [&](int sign) {
        // Diagonal of Sum_x |x><x| (x) W^x in the rotated (pe, eigenbasis) frame.
        s.apply_unitary(walk_space, basis_adj);
        s.apply_diagonal({"pe", "anc", "d"}, [&](std::size_t g) {
            const std::size_t x_val = g / walk_dim;
            const std::size_t l = g % walk_dim;
            return std::exp(cd(0.0, sign * static_cast<double>(x_val) *
                                        walk.phases[static_cast<Eigen::Index>(l)]));
        });
        s.apply_unitary(walk_space, walk.eigenbasis);
    };

    s.apply_unitary(walk_space, uq);
    // Phase estimation of the walk.
    s.apply_qft("pe", +1);
    select_phase(+1);
    s.apply_qft("pe", -1);
    // Fold the +-theta grid pair into the estimate register.
    const std::size_t big_t = std::size_t{1} << t;
    s.apply_permutation({"pe", "b"}, [&](std::size_t g) {
        const std::size_t c = g >> t, y = g & (big_t - 1);
        return (c << t) | (y ^ fold_grid(c, t));
    });
    // Uncompute the estimation and the preparation.
    s.apply_qft("pe", +1);
    select_phase(-1);
    s.apply_qft("pe", -1);
    s.apply_unitary(walk_space, uq.adjoint());

    CircuitSve out;
    const double p_pe = s.postselect("pe", 0);
    const double p_anc = s.postselect("anc", 0);
    out.success_probability = p_pe * p_anc;
    out.outcome_distribution = s.probabilities({"b"});
    Eigen::Index modal = 0;
    out.outcome_distribution.maxCoeff(&modal);
    out.modal = static_cast<std::size_t>(modal);
    out.modal_sigma = grid_to_sigma(out.modal, t, iso.fro);
    return out;
}

void controlled_sve_xor(StateVector& s, const std::string& d_reg, const std::string& e_reg,
                        const std::string& b_reg, const ComplexTensor& unitary_hat,
                        std::size_t t) {
    if (unitary_hat.order() != 3) throw std::invalid_argument("expected an order-3 slice stack");
    const std::size_t n2 = unitary_hat.dim(1), n3 = unitary_hat.dim(2);
    if (s.layout().dim(d_reg) != n2 || s.layout().dim(e_reg) != n3 ||
        s.layout().dim(b_reg) != (std::size_t{1} << t))
        throw std::invalid_argument("register dimensions do not match the slice stack");

    Eigen::VectorXd e_mass = s.probabilities({e_reg});
    std::vector<Eigen::MatrixXcd> v_full(n3);
    std::vector<std::vector<std::size_t>> codes(n3, std::vector<std::size_t>(n2, 0));
    for (std::size_t m = 0; m < n3; ++m) {
        const double fro = unitary_hat.slice(m).norm();
        if (fro == 0.0) {
            if (e_mass[static_cast<Eigen::Index>(m)] > 1e-12)
                throw numeric_error("state has amplitude on a zero transform slice " +
                                    std::to_string(m));
            continue;  // identity action on an unpopulated context value
        }
        kernels::SliceSvd svd = kernels::svd_full_with_phase_convention(unitary_hat.slice(m));
        v_full[m] = svd.v;
        for (std::size_t j = 0; j < n2; ++j) {
            const double sigma = j < static_cast<std::size_t>(svd.sigma.size())
                                     ? svd.sigma[static_cast<Eigen::Index>(j)]
                                     : 0.0;
            codes[m][j] = fold_grid(phase_to_grid(sigma_to_phase(sigma, fro), t), t);
        }
    }

    // Rotate d into the conjugated right singular basis of its context's slice.
    for (std::size_t m = 0; m < n3; ++m)
        if (v_full[m].size() != 0)
            s.apply_controlled_unitary(e_reg, m, {d_reg}, v_full[m].transpose());
    const std::size_t big_t = std::size_t{1} << t;
    s.apply_permutation({e_reg, d_reg, b_reg}, [&](std::size_t g) {
        const std::size_t x = g % big_t;
        const std::size_t j = (g / big_t) % n2;
        const std::size_t m = g / (big_t * n2);
        return (g - x) | (x ^ codes[m][j]);
    });
    for (std::size_t m = 0; m < n3; ++m)
        if (v_full[m].size() != 0)
            s.apply_controlled_unitary(e_reg, m, {d_reg}, v_full[m].conjugate());
}

StateVector quantum_tsvd(const DenseTensor& a, std::size_t t_bits) {
    if (a.order() != 3) throw std::invalid_argument("expected an order-3 tensor");
    StateVector s = prepare_tensor_state(a, {"c", "d", "e"});
    s.append_register("b", t_bits);
    s.apply_qft("e", +1);
    controlled_sve_xor(s, "d", "e", "b", unitary_hat_slices(a), t_bits);
    s.apply_qft("e", -1);
    return s;
}

}  // namespace tqsvd
