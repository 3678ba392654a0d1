#include "tqsvd/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "tqsvd/errors.hpp"
#include "tqsvd/kernels.hpp"

namespace tqsvd {

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_unitary(const Eigen::MatrixXcd& u, std::size_t dim, const char* what) {
    if (u.rows() != static_cast<Eigen::Index>(dim) || u.cols() != static_cast<Eigen::Index>(dim))
        throw std::invalid_argument(std::string(what) + ": matrix does not match register dimension");
    Eigen::MatrixXcd g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    if (g.norm() > 1e-10 * std::sqrt(static_cast<double>(dim)))
        throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
}

}  // namespace

// ---- RegisterLayout --------------------------------------------------------

RegisterLayout::RegisterLayout(std::initializer_list<std::pair<std::string, std::size_t>> regs)
    : RegisterLayout(std::vector<std::pair<std::string, std::size_t>>(regs)) {}

RegisterLayout::RegisterLayout(std::vector<std::pair<std::string, std::size_t>> regs) {
    names_.reserve(regs.size());
    qubits_.reserve(regs.size());
    for (auto& [n, q] : regs) {
        names_.push_back(std::move(n));
        qubits_.push_back(q);
    }
    finish();
}

void RegisterLayout::finish() {
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (names_[i] == names_[j])
                throw std::invalid_argument("duplicate register name: " + names_[i]);
    total_qubits_ = 0;
    for (std::size_t q : qubits_) total_qubits_ += q;
    if (total_qubits_ > qubit_cap())
        throw qubit_cap_error("layout needs " + std::to_string(total_qubits_) +
                              " qubits but the cap is " + std::to_string(qubit_cap()) +
                              " (set TQSVD_QUBIT_CAP to raise it)");
    shifts_.assign(names_.size(), 0);
    for (std::size_t r = names_.size(); r-- > 1;)
        shifts_[r - 1] = shifts_[r] + qubits_[r];
}

std::size_t RegisterLayout::qubit_cap() {
    if (const char* env = std::getenv("TQSVD_QUBIT_CAP")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 22;
}

std::size_t RegisterLayout::index_of(const std::string& name) const {
    for (std::size_t r = 0; r < names_.size(); ++r)
        if (names_[r] == name) return r;
    throw std::invalid_argument("unknown register: " + name);
}

RegisterLayout RegisterLayout::without(const std::string& name) const {
    std::size_t drop = index_of(name);
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (std::size_t r = 0; r < names_.size(); ++r)
        if (r != drop) kept.emplace_back(names_[r], qubits_[r]);
    return RegisterLayout(std::move(kept));
}

nlohmann::json RegisterLayout::to_json() const {
    nlohmann::json regs = nlohmann::json::array();
    for (std::size_t r = 0; r < names_.size(); ++r)
        regs.push_back({{"name", names_[r]}, {"qubits", qubits_[r]}});
    return {{"registers", regs}};
}

RegisterLayout RegisterLayout::from_json(const nlohmann::json& j) {
    std::vector<std::pair<std::string, std::size_t>> regs;
    for (const auto& r : j.at("registers"))
        regs.emplace_back(r.at("name").get<std::string>(), r.at("qubits").get<std::size_t>());
    return RegisterLayout(std::move(regs));
}

// ---- StateVector -----------------------------------------------------------

StateVector StateVector::zero_state(RegisterLayout layout) {
    return basis_state(std::move(layout), 0);
}

StateVector StateVector::basis_state(RegisterLayout layout, std::size_t basis_index) {
    if (basis_index >= layout.total_dim())
        throw std::invalid_argument("basis index out of range");
    StateVector s;
    s.layout_ = std::move(layout);
    s.amp_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.layout_.total_dim()));
    s.amp_[static_cast<Eigen::Index>(basis_index)] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(RegisterLayout layout, Eigen::VectorXcd amp,
                                         double norm_tol) {
    if (amp.size() != static_cast<Eigen::Index>(layout.total_dim()))
        throw std::invalid_argument("amplitude vector does not match layout dimension");
    if (std::abs(amp.norm() - 1.0) > norm_tol)
        throw numeric_error("state vector is not normalized");
    StateVector s;
    s.layout_ = std::move(layout);
    s.amp_ = std::move(amp);
    return s;
}

void StateVector::apply_unitary(const std::string& reg, const Eigen::MatrixXcd& u) {
    const std::size_t dim = layout_.dim(reg);
    validate_unitary(u, dim, "apply_unitary");
    const std::size_t inner = std::size_t{1} << layout_.shift(reg);
    const std::size_t outer = layout_.total_dim() / (dim * inner);
    kernels::apply_mid_unitary(amp_.data(), outer, dim, inner, u);
}

namespace {

// Offsets of every joint basis value of a register group (first listed most
// significant), plus base offsets of every assignment to the other registers.
struct GroupPlan {
    std::vector<std::size_t> offs;
    std::vector<std::size_t> rest_bases;
    std::vector<std::size_t> rest_control_value;  // empty unless a control is set
};

GroupPlan plan_group(const RegisterLayout& layout, const std::vector<std::string>& regs,
                     const std::string* control_reg) {
    if (regs.empty()) throw std::invalid_argument("empty register group");
    for (std::size_t i = 0; i < regs.size(); ++i)
        for (std::size_t j = i + 1; j < regs.size(); ++j)
            if (regs[i] == regs[j]) throw std::invalid_argument("repeated register in group");
    std::vector<std::size_t> gshift, gdim;
    std::size_t joint = 1;
    for (const auto& r : regs) {
        if (control_reg && r == *control_reg)
            throw std::invalid_argument("control register cannot be a target");
        gshift.push_back(layout.shift(r));
        gdim.push_back(layout.dim(r));
        joint *= layout.dim(r);
    }

    GroupPlan plan;
    plan.offs.resize(joint);
    for (std::size_t g = 0; g < joint; ++g) {
        std::size_t rem = g, off = 0;
        for (std::size_t r = regs.size(); r-- > 0;) {
            off += (rem % gdim[r]) << gshift[r];
            rem /= gdim[r];
        }
        plan.offs[g] = off;
    }

    std::vector<std::size_t> rshift, rdim;
    std::size_t rest = 1;
    std::size_t control_pos = static_cast<std::size_t>(-1);
    for (std::size_t r = 0; r < layout.register_count(); ++r) {
        const std::string& name = layout.name(r);
        if (std::find(regs.begin(), regs.end(), name) != regs.end()) continue;
        if (control_reg && name == *control_reg) control_pos = rshift.size();
        rshift.push_back(layout.shift(name));
        rdim.push_back(std::size_t{1} << (layout.qubits(name)));
        rest *= rdim.back();
    }
    if (control_reg && control_pos == static_cast<std::size_t>(-1))
        throw std::invalid_argument("unknown control register: " + *control_reg);

    plan.rest_bases.resize(rest);
    if (control_reg) plan.rest_control_value.resize(rest);
    for (std::size_t rl = 0; rl < rest; ++rl) {
        std::size_t rem = rl, base = 0;
        for (std::size_t r = rshift.size(); r-- > 0;) {
            const std::size_t val = rem % rdim[r];
            base += val << rshift[r];
            rem /= rdim[r];
            if (control_reg && r == control_pos) plan.rest_control_value[rl] = val;
        }
        plan.rest_bases[rl] = base;
    }
    return plan;
}

}  // namespace

void StateVector::apply_unitary(const std::vector<std::string>& regs, const Eigen::MatrixXcd& u) {
    if (regs.size() == 1) {
        apply_unitary(regs[0], u);
        return;
    }
    GroupPlan plan = plan_group(layout_, regs, nullptr);
    const std::size_t joint = plan.offs.size();
    validate_unitary(u, joint, "apply_unitary");
    const auto nrest = static_cast<std::ptrdiff_t>(plan.rest_bases.size());
#pragma omp parallel
    {
        Eigen::VectorXcd x(static_cast<Eigen::Index>(joint));
#pragma omp for schedule(static)
        for (std::ptrdiff_t rl = 0; rl < nrest; ++rl) {
            const std::size_t base = plan.rest_bases[static_cast<std::size_t>(rl)];
            for (std::size_t g = 0; g < joint; ++g)
                x[static_cast<Eigen::Index>(g)] = amp_[static_cast<Eigen::Index>(base + plan.offs[g])];
            Eigen::VectorXcd y = u * x;
            for (std::size_t g = 0; g < joint; ++g)
                amp_[static_cast<Eigen::Index>(base + plan.offs[g])] = y[static_cast<Eigen::Index>(g)];
        }
    }
}

void StateVector::apply_controlled_unitary(const std::string& control_reg,
                                           std::size_t control_value,
                                           const std::vector<std::string>& regs,
                                           const Eigen::MatrixXcd& u) {
    if (control_value >= layout_.dim(control_reg))
        throw std::invalid_argument("control value out of range");
    GroupPlan plan = plan_group(layout_, regs, &control_reg);
    const std::size_t joint = plan.offs.size();
    validate_unitary(u, joint, "apply_controlled_unitary");
    const auto nrest = static_cast<std::ptrdiff_t>(plan.rest_bases.size());
#pragma omp parallel
    {
        Eigen::VectorXcd x(static_cast<Eigen::Index>(joint));
#pragma omp for schedule(static)
        for (std::ptrdiff_t rl = 0; rl < nrest; ++rl) {
            if (plan.rest_control_value[static_cast<std::size_t>(rl)] != control_value) continue;
            const std::size_t base = plan.rest_bases[static_cast<std::size_t>(rl)];
            for (std::size_t g = 0; g < joint; ++g)
                x[static_cast<Eigen::Index>(g)] = amp_[static_cast<Eigen::Index>(base + plan.offs[g])];
            Eigen::VectorXcd y = u * x;
            for (std::size_t g = 0; g < joint; ++g)
                amp_[static_cast<Eigen::Index>(base + plan.offs[g])] = y[static_cast<Eigen::Index>(g)];
        }
    }
}

void StateVector::apply_permutation(const std::vector<std::string>& regs,
                                    const std::function<std::size_t(std::size_t)>& fn) {
    GroupPlan plan = plan_group(layout_, regs, nullptr);
    const std::size_t joint = plan.offs.size();
    std::vector<std::size_t> perm(joint);
    std::vector<char> seen(joint, 0);
    for (std::size_t g = 0; g < joint; ++g) {
        const std::size_t img = fn(g);
        if (img >= joint || seen[img])
            throw std::invalid_argument("apply_permutation: map is not a bijection on the group");
        seen[img] = 1;
        perm[g] = img;
    }
    const auto nrest = static_cast<std::ptrdiff_t>(plan.rest_bases.size());
#pragma omp parallel
    {
        Eigen::VectorXcd x(static_cast<Eigen::Index>(joint));
#pragma omp for schedule(static)
        for (std::ptrdiff_t rl = 0; rl < nrest; ++rl) {
            const std::size_t base = plan.rest_bases[static_cast<std::size_t>(rl)];
            for (std::size_t g = 0; g < joint; ++g)
                x[static_cast<Eigen::Index>(g)] = amp_[static_cast<Eigen::Index>(base + plan.offs[g])];
            for (std::size_t g = 0; g < joint; ++g)
                amp_[static_cast<Eigen::Index>(base + plan.offs[perm[g]])] = x[static_cast<Eigen::Index>(g)];
        }
    }
}

void StateVector::apply_diagonal(const std::vector<std::string>& regs,
                                 const std::function<cd(std::size_t)>& phase) {
    GroupPlan plan = plan_group(layout_, regs, nullptr);
    const std::size_t joint = plan.offs.size();
    std::vector<cd> table(joint);
    for (std::size_t g = 0; g < joint; ++g) {
        table[g] = phase(g);
        if (std::abs(std::abs(table[g]) - 1.0) > 1e-10)
            throw std::invalid_argument("apply_diagonal: phase factor is not unit modulus");
    }
    const auto nrest = static_cast<std::ptrdiff_t>(plan.rest_bases.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t rl = 0; rl < nrest; ++rl) {
        const std::size_t base = plan.rest_bases[static_cast<std::size_t>(rl)];
        for (std::size_t g = 0; g < joint; ++g)
            amp_[static_cast<Eigen::Index>(base + plan.offs[g])] *= table[g];
    }
}

void StateVector::append_register(const std::string& name, std::size_t qubits) {
    std::vector<std::pair<std::string, std::size_t>> regs;
    for (std::size_t r = 0; r < layout_.register_count(); ++r)
        regs.emplace_back(layout_.name(r), layout_.qubits(layout_.name(r)));
    regs.emplace_back(name, qubits);
    RegisterLayout grown(std::move(regs));  // re-checks names and the cap
    const std::size_t block = std::size_t{1} << qubits;
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grown.total_dim()));
    for (Eigen::Index i = 0; i < amp_.size(); ++i)
        amp[i * static_cast<Eigen::Index>(block)] = amp_[i];
    layout_ = std::move(grown);
    amp_ = std::move(amp);
}

void StateVector::apply_qft(const std::string& reg, int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("qft sign must be +1 or -1");
    const std::size_t dim = layout_.dim(reg);
    if (dim == 1) return;
    const std::size_t shift = layout_.shift(reg);
    const std::size_t inner = std::size_t{1} << shift;
    const std::size_t outer = layout_.total_dim() / (dim * inner);

    // Radix-2 lines along the register axis; a dense matvec per line would
    // dominate the whole circuit once the register passes ~6 qubits.
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < dim) ++bits;
    std::vector<std::size_t> rev(dim, 0);
    for (std::size_t i = 1; i < dim; ++i)
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (bits - 1));
    std::vector<cd> twiddle(dim / 2);  // exact table, no accumulated roundoff
    for (std::size_t j = 0; j < dim / 2; ++j) {
        const double ang = sign * 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(dim);
        twiddle[j] = cd(std::cos(ang), std::sin(ang));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

    std::vector<cd> line(dim);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = ((o * dim) << shift) | in;
            for (std::size_t l = 0; l < dim; ++l)
                line[l] = amp_[static_cast<Eigen::Index>(base + (rev[l] << shift))];
            for (std::size_t len = 2; len <= dim; len <<= 1) {
                const std::size_t stride = dim / len;
                for (std::size_t start = 0; start < dim; start += len)
                    for (std::size_t j = 0; j < len / 2; ++j) {
                        const cd w = twiddle[j * stride];
                        const cd a = line[start + j];
                        const cd b = line[start + j + len / 2] * w;
                        line[start + j] = a + b;
                        line[start + j + len / 2] = a - b;
                    }
            }
            for (std::size_t l = 0; l < dim; ++l)
                amp_[static_cast<Eigen::Index>(base + (l << shift))] = scale * line[l];
        }
}

double StateVector::postselect(const std::string& reg, std::size_t value) {
    const std::size_t dim = layout_.dim(reg);
    if (value >= dim) throw std::invalid_argument("postselect value out of range");
    const std::size_t shift = layout_.shift(reg);
    const std::size_t low_mask = (std::size_t{1} << shift) - 1;
    const std::size_t rest = layout_.total_dim() / dim;
    Eigen::VectorXcd kept(static_cast<Eigen::Index>(rest));
    for (std::size_t j = 0; j < rest; ++j) {
        const std::size_t high = j >> shift, low = j & low_mask;
        const std::size_t idx = (((high * dim) + value) << shift) | low;
        kept[static_cast<Eigen::Index>(j)] = amp_[static_cast<Eigen::Index>(idx)];
    }
    const double prob = kept.squaredNorm();
    if (prob < 1e-14)
        throw postselection_error("postselecting " + reg + "=" + std::to_string(value) +
                                  " has vanishing probability");
    amp_ = kept / std::sqrt(prob);
    layout_ = layout_.without(reg);
    return prob;
}

void StateVector::discard(const std::string& reg, double rel_tol) {
    const std::size_t dim = layout_.dim(reg);
    const std::size_t shift = layout_.shift(reg);
    const std::size_t low_mask = (std::size_t{1} << shift) - 1;
    const std::size_t rest = layout_.total_dim() / dim;
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rest));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t j = 0; j < rest; ++j) {
            const std::size_t idx = (((j >> shift) * dim + r) << shift) | (j & low_mask);
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
                amp_[static_cast<Eigen::Index>(idx)];
        }
    if (dim > 1 && rest > 1) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        const auto& sv = svd.singularValues();
        if (sv.size() > 1 && sv[1] > rel_tol * sv[0])
            throw numeric_error("discard of register " + reg +
                                " would trace out entanglement (sigma ratio " +
                                std::to_string(sv[1] / sv[0]) + ")");
    }
    Eigen::Index best = 0;
    m.rowwise().norm().maxCoeff(&best);
    Eigen::VectorXcd row = m.row(best).transpose();
    amp_ = row / row.norm();
    layout_ = layout_.without(reg);
}

Eigen::VectorXd StateVector::probabilities(const std::vector<std::string>& regs) const {
    std::size_t out_dim = 1;
    for (const auto& r : regs) out_dim *= layout_.dim(r);
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim));
    const std::size_t total = layout_.total_dim();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t o = 0;
        for (const auto& r : regs) o = o * layout_.dim(r) + layout_.value_of(idx, r);
        probs[static_cast<Eigen::Index>(o)] += std::norm(amp_[static_cast<Eigen::Index>(idx)]);
    }
    return probs;
}

std::vector<std::size_t> StateVector::measure(const std::vector<std::string>& regs,
                                              std::size_t shots, std::uint64_t seed) const {
    Eigen::VectorXd probs = probabilities(regs);
    std::vector<double> cum(static_cast<std::size_t>(probs.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        acc += probs[static_cast<Eigen::Index>(i)];
        cum[i] = acc;
    }
    Rng rng(seed);
    std::vector<std::size_t> counts(cum.size(), 0);
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        const std::size_t pos = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        ++counts[std::min(pos, counts.size() - 1)];
    }
    return counts;
}

nlohmann::json StateVector::to_json() const {
    nlohmann::json j = layout_.to_json();
    j["format"] = "TQSV1";
    nlohmann::json amps = nlohmann::json::array();
    for (Eigen::Index i = 0; i < amp_.size(); ++i) {
        amps.push_back(amp_[i].real());
        amps.push_back(amp_[i].imag());
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

StateVector StateVector::from_json(const nlohmann::json& j) {
    RegisterLayout layout = RegisterLayout::from_json(j);
    const auto& amps = j.at("amplitudes");
    if (amps.size() != 2 * layout.total_dim())
        throw std::invalid_argument("amplitude list does not match layout dimension");
    Eigen::VectorXcd amp(static_cast<Eigen::Index>(layout.total_dim()));
    for (std::size_t i = 0; i < layout.total_dim(); ++i)
        amp[static_cast<Eigen::Index>(i)] =
            cd(amps[2 * i].get<double>(), amps[2 * i + 1].get<double>());
    return from_amplitudes(std::move(layout), std::move(amp));
}

// ---- state preparation -------------------------------------------------------

StateVector prepare_tensor_state(const DenseTensor& t, const std::vector<std::string>& reg_names) {
    if (reg_names.size() != t.order())
        throw std::invalid_argument("need one register name per tensor mode");
    std::vector<std::pair<std::string, std::size_t>> regs;
    for (std::size_t m = 0; m < t.order(); ++m) {
        if (!power_of_two(t.dim(m)))
            throw std::invalid_argument("tensor dimensions must be powers of two");
        regs.emplace_back(reg_names[m], static_cast<std::size_t>(std::countr_zero(t.dim(m))));
    }
    const double n = frobenius_norm(t);
    if (n == 0.0) throw std::invalid_argument("cannot prepare a state from the zero tensor");
    RegisterLayout layout(std::move(regs));
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    // Mode 1 most significant: basis = ((i1*N2)+i2)*N3+...; walk memory order.
    std::vector<std::size_t> idx(t.order(), 0);
    for (std::size_t mem = 0; mem < t.data.size(); ++mem) {
        std::size_t basis = idx[0];
        for (std::size_t m = 1; m < t.order(); ++m) basis = basis * t.dim(m) + idx[m];
        amp[static_cast<Eigen::Index>(basis)] = t.data[mem] / n;
        for (std::size_t m = 0; m < t.order(); ++m) {  // column-major increment
            if (++idx[m] < t.dim(m)) break;
            idx[m] = 0;
        }
    }
    return StateVector::from_amplitudes(std::move(layout), std::move(amp));
}

StateVector prepare_matrix_state(const Eigen::MatrixXcd& m, const std::string& row_reg,
                                 const std::string& col_reg) {
    const auto rows = static_cast<std::size_t>(m.rows());
    const auto cols = static_cast<std::size_t>(m.cols());
    if (!power_of_two(rows) || !power_of_two(cols))
        throw std::invalid_argument("matrix dimensions must be powers of two");
    const double n = m.norm();
    if (n == 0.0) throw std::invalid_argument("cannot prepare a state from the zero matrix");
    RegisterLayout layout({{row_reg, static_cast<std::size_t>(std::countr_zero(rows))},
                           {col_reg, static_cast<std::size_t>(std::countr_zero(cols))}});
    Eigen::VectorXcd amp(static_cast<Eigen::Index>(rows * cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            amp[static_cast<Eigen::Index>(i * cols + j)] =
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / n;
    return StateVector::from_amplitudes(std::move(layout), std::move(amp));
}

}  // namespace tqsvd
