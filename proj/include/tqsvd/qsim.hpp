#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "tqsvd/rng.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Named qubit registers packed into one basis index.  The FIRST register in
// the list is the MOST significant block of the index; zero-qubit registers
// are legal (dimension 1) so degenerate problem sizes keep the same code path.
class RegisterLayout {
  public:
    RegisterLayout() = default;
    RegisterLayout(std::initializer_list<std::pair<std::string, std::size_t>> regs);
    explicit RegisterLayout(std::vector<std::pair<std::string, std::size_t>> regs);

    static std::size_t qubit_cap();  // TQSVD_QUBIT_CAP env var, default 22

    std::size_t register_count() const { return names_.size(); }
    const std::string& name(std::size_t r) const { return names_[r]; }
    std::size_t index_of(const std::string& name) const;  // throws on unknown name
    std::size_t qubits(const std::string& name) const { return qubits_[index_of(name)]; }
    std::size_t dim(const std::string& name) const { return std::size_t{1} << qubits(name); }
    std::size_t shift(const std::string& name) const { return shifts_[index_of(name)]; }
    std::size_t total_qubits() const { return total_qubits_; }
    std::size_t total_dim() const { return std::size_t{1} << total_qubits_; }

    std::size_t value_of(std::size_t basis_index, const std::string& name) const {
        std::size_t r = index_of(name);
        return (basis_index >> shifts_[r]) & ((std::size_t{1} << qubits_[r]) - 1);
    }

    RegisterLayout without(const std::string& name) const;

    bool operator==(const RegisterLayout& o) const {
        return names_ == o.names_ && qubits_ == o.qubits_;
    }

    nlohmann::json to_json() const;
    static RegisterLayout from_json(const nlohmann::json& j);

  private:
    void finish();  // compute shifts, enforce the cap
    std::vector<std::string> names_;
    std::vector<std::size_t> qubits_;
    std::vector<std::size_t> shifts_;  // shift from the least significant end
    std::size_t total_qubits_ = 0;
};

// Dense state vector over a register layout.  All mutating operations verify
// their inputs (unitarity, normalization, bijectivity) so a silent physics
// violation cannot slip through a test.
class StateVector {
  public:
    StateVector() = default;
    static StateVector zero_state(RegisterLayout layout);
    static StateVector basis_state(RegisterLayout layout, std::size_t basis_index);
    static StateVector from_amplitudes(RegisterLayout layout, Eigen::VectorXcd amp,
                                       double norm_tol = 1e-10);

    const RegisterLayout& layout() const { return layout_; }
    const Eigen::VectorXcd& amplitudes() const { return amp_; }
    cd amplitude(std::size_t basis_index) const { return amp_[static_cast<Eigen::Index>(basis_index)]; }
    double norm() const { return amp_.norm(); }

    // Apply a unitary to one register (hot path) or to the joint space of
    // several registers (first listed is most significant inside the matrix
    // index).  Optional control: act only where control_reg holds control_value.
    void apply_unitary(const std::string& reg, const Eigen::MatrixXcd& u);
    void apply_unitary(const std::vector<std::string>& regs, const Eigen::MatrixXcd& u);
    void apply_controlled_unitary(const std::string& control_reg, std::size_t control_value,
                                  const std::vector<std::string>& regs,
                                  const Eigen::MatrixXcd& u);

    // Classical reversible map on the joint computational basis of the listed
    // registers; fn must be a bijection on [0, joint_dim) and is verified.
    void apply_permutation(const std::vector<std::string>& regs,
                           const std::function<std::size_t(std::size_t)>& fn);

    // Diagonal unitary: multiply each joint basis state of the listed registers
    // by phase(g); every value must have unit modulus (checked at 1e-10).
    void apply_diagonal(const std::vector<std::string>& regs,
                        const std::function<cd(std::size_t)>& phase);

    // Adjoin a fresh |0> register at the least significant end of the layout.
    void append_register(const std::string& name, std::size_t qubits);

    // QFT on one register: sign +1 applies the e^{+2*pi*i*jk/N}/sqrt(N) kernel,
    // sign -1 its inverse.
    void apply_qft(const std::string& reg, int sign = +1);

    // Project onto reg == value, renormalize, drop the register from the
    // layout.  Returns the branch probability; below 1e-14 -> postselection_error.
    double postselect(const std::string& reg, std::size_t value);

    // Remove an unentangled register (rank-1 check at rel tol 1e-10 across the
    // reg/rest bipartition); entanglement is a loud numeric_error, never a trace-out.
    void discard(const std::string& reg, double rel_tol = 1e-10);

    // Marginal distribution over the listed registers, first listed most
    // significant in the outcome index.
    Eigen::VectorXd probabilities(const std::vector<std::string>& regs) const;
    std::vector<std::size_t> measure(const std::vector<std::string>& regs, std::size_t shots,
                                     std::uint64_t seed) const;

    nlohmann::json to_json() const;
    static StateVector from_json(const nlohmann::json& j);

  private:
    RegisterLayout layout_;
    Eigen::VectorXcd amp_;
};

// |T> with one register per mode, mode 1 most significant: the amplitude of
// basis index ((i*N2)+j)*N3+k is T(i,j,k)/||T||_F.  Dims must be powers of two.
StateVector prepare_tensor_state(const DenseTensor& t, const std::vector<std::string>& reg_names);
StateVector prepare_matrix_state(const Eigen::MatrixXcd& m, const std::string& row_reg,
                                 const std::string& col_reg);

}  // namespace tqsvd
