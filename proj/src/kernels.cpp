#include "tqsvd/kernels.hpp"

#include <Eigen/SVD>

#include "tqsvd/fft.hpp"

namespace tqsvd::kernels {

namespace {

// Lines along `mode` form a (inner, L, outer) reshape of the flat array:
// element t of line (o, i) sits at o*inner*L + t*inner + i.
struct LineGeom {
    std::size_t inner, len, outer;
};

LineGeom line_geom(const ComplexTensor& a, std::size_t mode) {
    LineGeom g{1, a.dim(mode), 1};
    for (std::size_t m = 0; m < mode; ++m) g.inner *= a.dim(m);
    for (std::size_t m = mode + 1; m < a.order(); ++m) g.outer *= a.dim(m);
    return g;
}

void transform_one_line(ComplexTensor& a, const LineGeom& g, std::size_t line, int sign,
                        double scale, std::vector<cd>& scratch) {
    std::size_t o = line / g.inner, i = line % g.inner;
    cd* base = a.data.data() + o * g.inner * g.len + i;
    for (std::size_t t = 0; t < g.len; ++t) scratch[t] = base[t * g.inner];
    dft_line(scratch.data(), g.len, sign, scale);
    for (std::size_t t = 0; t < g.len; ++t) base[t * g.inner] = scratch[t];
}

}  // namespace

void transform_mode_serial(ComplexTensor& a, std::size_t mode, int sign, double scale) {
    LineGeom g = line_geom(a, mode);
    std::vector<cd> scratch(g.len);
    for (std::size_t line = 0; line < g.inner * g.outer; ++line)
        transform_one_line(a, g, line, sign, scale, scratch);
}

void transform_mode_parallel(ComplexTensor& a, std::size_t mode, int sign, double scale) {
    LineGeom g = line_geom(a, mode);
    const std::ptrdiff_t nlines = static_cast<std::ptrdiff_t>(g.inner * g.outer);
#pragma omp parallel
    {
        std::vector<cd> scratch(g.len);
#pragma omp for schedule(static)
        for (std::ptrdiff_t line = 0; line < nlines; ++line)
            transform_one_line(a, g, static_cast<std::size_t>(line), sign, scale, scratch);
    }
}

void transform_mode(ComplexTensor& a, std::size_t mode, int sign, double scale) {
    transform_mode_parallel(a, mode, sign, scale);
}

namespace {

// Phase convention: first component of each v column with magnitude > 1e-12
// is made real positive; for columns paired with a singular value, u absorbs
// the opposite phase so u*s*v^H is unchanged.  Unpaired (null-space) columns
// of u and v are phase-fixed independently.
void fix_phases(SliceSvd& out) {
    auto leading_phase = [](const Eigen::MatrixXcd& m, Eigen::Index c) -> cd {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (std::abs(m(r, c)) > 1e-12) return m(r, c) / std::abs(m(r, c));
        return cd(1.0, 0.0);
    };
    const Eigen::Index paired = out.sigma.size();
    for (Eigen::Index c = 0; c < out.v.cols(); ++c) {
        // v.col *= conj(ph) makes the leading entry real positive; the
        // adjoint in u*s*v^H contributes ph back, so u.col takes conj(ph) too.
        cd ph = leading_phase(out.v, c);
        out.v.col(c) *= std::conj(ph);
        if (c < paired && c < out.u.cols()) out.u.col(c) *= std::conj(ph);
    }
    for (Eigen::Index c = paired; c < out.u.cols(); ++c)
        out.u.col(c) *= std::conj(leading_phase(out.u, c));
}

}  // namespace

SliceSvd svd_with_phase_convention(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SliceSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    fix_phases(out);
    return out;
}

SliceSvd svd_full_with_phase_convention(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SliceSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    fix_phases(out);
    return out;
}

std::vector<SliceSvd> batch_svd_serial(const ComplexTensor& hat) {
    std::vector<SliceSvd> out(hat.dim(2));
    for (std::size_t k = 0; k < hat.dim(2); ++k)
        out[k] = svd_with_phase_convention(hat.slice(k));
    return out;
}

std::vector<SliceSvd> batch_svd_parallel(const ComplexTensor& hat) {
    std::vector<SliceSvd> out(hat.dim(2));
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(hat.dim(2));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k)
        out[k] = svd_with_phase_convention(hat.slice(static_cast<std::size_t>(k)));
    return out;
}

std::vector<SliceSvd> batch_svd(const ComplexTensor& hat) { return batch_svd_parallel(hat); }

namespace {

void apply_mid_block(cd* amps, std::size_t dim, std::size_t inner,
                     const Eigen::MatrixXcd& u, std::size_t o, std::size_t i,
                     std::vector<cd>& scratch) {
    cd* base = amps + o * dim * inner + i;
    for (std::size_t r = 0; r < dim; ++r) {
        cd acc(0.0, 0.0);
        for (std::size_t c = 0; c < dim; ++c) acc += u(r, c) * base[c * inner];
        scratch[r] = acc;
    }
    for (std::size_t r = 0; r < dim; ++r) base[r * inner] = scratch[r];
}

}  // namespace

void apply_mid_unitary_serial(cd* amps, std::size_t outer, std::size_t dim,
                              std::size_t inner, const Eigen::MatrixXcd& u) {
    std::vector<cd> scratch(dim);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) apply_mid_block(amps, dim, inner, u, o, i, scratch);
}

void apply_mid_unitary_parallel(cd* amps, std::size_t outer, std::size_t dim,
                                std::size_t inner, const Eigen::MatrixXcd& u) {
    const std::ptrdiff_t nblocks = static_cast<std::ptrdiff_t>(outer * inner);
#pragma omp parallel
    {
        std::vector<cd> scratch(dim);
#pragma omp for schedule(static)
        for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
            std::size_t o = static_cast<std::size_t>(b) / inner;
            std::size_t i = static_cast<std::size_t>(b) % inner;
            apply_mid_block(amps, dim, inner, u, o, i, scratch);
        }
    }
}

void apply_mid_unitary(cd* amps, std::size_t outer, std::size_t dim,
                       std::size_t inner, const Eigen::MatrixXcd& u) {
    apply_mid_unitary_parallel(amps, outer, dim, inner, u);
}

}  // namespace tqsvd::kernels
