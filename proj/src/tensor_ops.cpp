#include "tqsvd/tensor_ops.hpp"

#include "tqsvd/fft.hpp"

namespace tqsvd {

Eigen::MatrixXd circ_vector(const Tube& u) {
    if (u.empty()) throw std::invalid_argument("circ_vector: empty tube");
    const std::size_t n = u.size();
    Eigen::MatrixXd m(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = u[(i + n - j) % n];
    return m;
}

Tube cyclic_convolve(const Tube& u, const Tube& v) {
    if (u.size() != v.size()) throw std::invalid_argument("cyclic_convolve: length mismatch");
    if (u.empty()) throw std::invalid_argument("cyclic_convolve: empty tube");
    const std::size_t n = u.size();
    std::vector<cd> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = u[i];
        b[i] = v[i];
    }
    dft_line(a.data(), n, -1, 1.0);
    dft_line(b.data(), n, -1, 1.0);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
    dft_line(a.data(), n, +1, 1.0 / static_cast<double>(n));
    Tube out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
    return out;
}

Eigen::MatrixXd circ_tensor(const DenseTensor& b) {
    if (b.order() != 3) throw std::invalid_argument("circ_tensor expects order 3");
    const std::size_t n1 = b.dim(0), n2 = b.dim(1), n3 = b.dim(2);
    Eigen::MatrixXd m(n1 * n3, n2 * n3);
    for (std::size_t bj = 0; bj < n3; ++bj)
        for (std::size_t bi = 0; bi < n3; ++bi)
            m.block(bi * n1, bj * n2, n1, n2) = b.slice((bi + n3 - bj) % n3);
    return m;
}

Eigen::MatrixXd unfold_slices(const DenseTensor& a) {
    if (a.order() != 3) throw std::invalid_argument("unfold_slices expects order 3");
    Eigen::MatrixXd m(a.dim(0) * a.dim(2), a.dim(1));
    for (std::size_t k = 0; k < a.dim(2); ++k) m.block(k * a.dim(0), 0, a.dim(0), a.dim(1)) = a.slice(k);
    return m;
}

DenseTensor fold_slices(const Eigen::MatrixXd& m, std::size_t n1, std::size_t n2, std::size_t n3) {
    if (static_cast<std::size_t>(m.rows()) != n1 * n3 || static_cast<std::size_t>(m.cols()) != n2)
        throw std::invalid_argument("fold_slices: shape mismatch");
    DenseTensor a(n1, n2, n3);
    for (std::size_t k = 0; k < n3; ++k) a.slice(k) = m.block(k * n1, 0, n1, n2);
    return a;
}

DenseTensor t_product(const DenseTensor& m, const DenseTensor& n) {
    if (m.order() != 3 || n.order() != 3) throw std::invalid_argument("t_product expects order 3");
    if (m.dim(1) != n.dim(0) || m.dim(2) != n.dim(2))
        throw std::invalid_argument("t_product: inner or tube dimension mismatch");
    ComplexTensor mh = fft_trailing_modes(m);
    ComplexTensor nh = fft_trailing_modes(n);
    ComplexTensor ph(m.dim(0), n.dim(1), m.dim(2));
    const std::ptrdiff_t n3 = static_cast<std::ptrdiff_t>(m.dim(2));
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n3; ++k)
        ph.slice(k) = mh.slice(k) * nh.slice(k);
    return to_real_checked(ifft_trailing_modes(ph));
}

DenseTensor t_transpose(const DenseTensor& a) {
    if (a.order() != 3) throw std::invalid_argument("t_transpose expects order 3");
    const std::size_t n3 = a.dim(2);
    DenseTensor b(a.dim(1), a.dim(0), n3);
    b.slice(0) = a.slice(0).transpose();
    for (std::size_t k = 1; k < n3; ++k) b.slice(k) = a.slice(n3 - k).transpose();
    return b;
}

DenseTensor identity_tensor(std::size_t n, std::size_t n3) {
    if (n == 0 || n3 == 0) throw std::invalid_argument("identity_tensor: zero dimension");
    DenseTensor e(n, n, n3);
    for (std::size_t i = 0; i < n; ++i) e.at(i, i, 0) = 1.0;
    return e;
}

bool is_orthogonal_tensor(const DenseTensor& q, double tol) {
    if (q.order() != 3 || q.dim(0) != q.dim(1)) return false;
    DenseTensor e = identity_tensor(q.dim(0), q.dim(2));
    DenseTensor qt = t_transpose(q);
    auto dist = [&](const DenseTensor& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.data.size(); ++i) {
            double d = x.data[i] - e.data[i];
            s += d * d;
        }
        return std::sqrt(s);
    };
    return dist(t_product(qt, q)) <= tol && dist(t_product(q, qt)) <= tol;
}

}  // namespace tqsvd
