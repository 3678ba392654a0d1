#include "tqsvd/tsvd.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tqsvd/fft.hpp"
#include "tqsvd/tensor_io.hpp"

namespace tqsvd {

namespace {

kernels::SliceSvd conj_svd(const kernels::SliceSvd& s) {
    return {s.u.conjugate(), s.sigma, s.v.conjugate()};
}

// Hat slices of a real tensor come in conjugate pairs (m, N3-m).  Computing
// one member of each pair and mirroring the other keeps the factor tensors
// exactly conjugate-symmetric, so their inverse transforms are real to
// machine precision even when singular values are degenerate.
std::vector<kernels::SliceSvd> mirrored_slice_svds(const ComplexTensor& hat, bool full) {
    const std::size_t n3 = hat.dim(2);
    std::vector<kernels::SliceSvd> out(n3);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n3 / 2);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t m = 0; m <= half; ++m) {
        out[m] = full ? kernels::svd_full_with_phase_convention(hat.slice(m))
                      : kernels::svd_with_phase_convention(hat.slice(m));
    }
    for (std::size_t m = n3 / 2 + 1; m < n3; ++m) out[m] = conj_svd(out[n3 - m]);
    return out;
}

void require_order3(const DenseTensor& a, const char* who) {
    if (a.order() != 3) throw std::invalid_argument(std::string(who) + " expects order 3");
}

}  // namespace

TSvdFactors tsvd(const DenseTensor& a) {
    require_order3(a, "tsvd");
    const std::size_t n1 = a.dim(0), n2 = a.dim(1), n3 = a.dim(2);
    ComplexTensor hat = fft_trailing_modes(a);
    std::vector<kernels::SliceSvd> svds = mirrored_slice_svds(hat, /*full=*/true);
    ComplexTensor uh(n1, n1, n3), sh(n1, n2, n3), vh(n2, n2, n3);
    for (std::size_t m = 0; m < n3; ++m) {
        uh.slice(m) = svds[m].u;
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n1, n2);
        for (Eigen::Index i = 0; i < svds[m].sigma.size(); ++i) s(i, i) = svds[m].sigma[i];
        sh.slice(m) = s;
        vh.slice(m) = svds[m].v;
    }
    return {to_real_checked(ifft_trailing_modes(uh)), to_real_checked(ifft_trailing_modes(sh)),
            to_real_checked(ifft_trailing_modes(vh))};
}

SliceSvdSet slice_svds(const DenseTensor& a, FftConvention conv) {
    require_order3(a, "slice_svds");
    ComplexTensor hat =
        conv == FftConvention::unnormalized ? fft_trailing_modes(a) : unitary_hat_slices(a);
    SliceSvdSet set;
    set.n1 = a.dim(0);
    set.n2 = a.dim(1);
    set.convention = conv;
    set.trailing_dims = {a.dim(2)};
    set.slices = mirrored_slice_svds(hat, /*full=*/false);
    return set;
}

SliceSvdSet tsvd_order_p(const DenseTensor& a) {
    if (a.order() < 3) throw std::invalid_argument("tsvd_order_p expects order >= 3");
    const std::size_t n1 = a.dims[0], n2 = a.dims[1];
    ComplexTensor hat = fft_trailing_modes(a, 3);

    std::vector<std::size_t> trail(a.dims.begin() + 2, a.dims.end());
    std::size_t count = 1;
    for (std::size_t d : trail) count *= d;

    // The flat slice index puts mode 3 most significant; memory order puts
    // mode 3 fastest.  mem_of maps the flat index to the contiguous block.
    auto mem_of = [&](std::size_t flat) {
        std::vector<std::size_t> idx(trail.size());
        for (std::size_t m = trail.size(); m-- > 0;) {
            idx[m] = flat % trail[m];
            flat /= trail[m];
        }
        std::size_t mem = 0;
        for (std::size_t m = trail.size(); m-- > 0;) mem = mem * trail[m] + idx[m];
        return mem;
    };
    auto mirror_of = [&](std::size_t flat) {
        std::vector<std::size_t> idx(trail.size());
        for (std::size_t m = trail.size(); m-- > 0;) {
            idx[m] = flat % trail[m];
            flat /= trail[m];
        }
        std::size_t mir = 0;
        for (std::size_t m = 0; m < trail.size(); ++m)
            mir = mir * trail[m] + (trail[m] - idx[m]) % trail[m];
        return mir;
    };

    SliceSvdSet set;
    set.n1 = n1;
    set.n2 = n2;
    set.convention = FftConvention::unnormalized;
    set.trailing_dims = trail;
    set.slices.resize(count);
    std::vector<std::ptrdiff_t> canonical;
    for (std::size_t f = 0; f < count; ++f)
        if (f <= mirror_of(f)) canonical.push_back(static_cast<std::ptrdiff_t>(f));
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ci = 0; ci < static_cast<std::ptrdiff_t>(canonical.size()); ++ci) {
        std::size_t f = static_cast<std::size_t>(canonical[ci]);
        Eigen::Map<const Eigen::MatrixXcd> slice(hat.data.data() + mem_of(f) * n1 * n2,
                                                 static_cast<Eigen::Index>(n1),
                                                 static_cast<Eigen::Index>(n2));
        set.slices[f] = kernels::svd_with_phase_convention(slice);
    }
    for (std::size_t f = 0; f < count; ++f)
        if (f > mirror_of(f)) set.slices[f] = conj_svd(set.slices[mirror_of(f)]);
    return set;
}

DenseTensor truncate_k(const DenseTensor& a, std::size_t k) {
    require_order3(a, "truncate_k");
    const std::size_t r = std::min(a.dim(0), a.dim(1));
    if (k < 1 || k > r) throw std::invalid_argument("truncate_k: k must satisfy 1 <= k <= min(N1,N2)");
    ComplexTensor hat = fft_trailing_modes(a);
    std::vector<kernels::SliceSvd> svds = mirrored_slice_svds(hat, /*full=*/false);
    ComplexTensor trunc(a.dim(0), a.dim(1), a.dim(2));
    for (std::size_t m = 0; m < a.dim(2); ++m) {
        const auto& s = svds[m];
        trunc.slice(m) = s.u.leftCols(k) * s.sigma.head(k).asDiagonal() *
                         s.v.leftCols(k).adjoint();
    }
    return to_real_checked(ifft_trailing_modes(trunc));
}

double truncation_error(const DenseTensor& a, std::size_t k) {
    require_order3(a, "truncation_error");
    const std::size_t r = std::min(a.dim(0), a.dim(1));
    if (k < 1 || k > r)
        throw std::invalid_argument("truncation_error: k must satisfy 1 <= k <= min(N1,N2)");
    SliceSvdSet set = slice_svds(a, FftConvention::unnormalized);
    // Parseval: the spatial S tubes satisfy ||S(i,i,:)||_2^2 = (1/N3) sum_m sigma_i^(m)^2.
    double total = 0.0;
    for (const auto& s : set.slices) {
        double t = tail_norm(s.sigma, k);
        total += t * t;
    }
    return std::sqrt(total / static_cast<double>(a.dim(2)));
}

ComplexTensor threshold_truncate_slices(const SliceSvdSet& svds,
                                        const std::vector<double>& thresholds) {
    if (thresholds.size() != svds.slice_count())
        throw std::invalid_argument("threshold_truncate_slices: one threshold per slice required");
    ComplexTensor out(svds.n1, svds.n2, svds.slice_count());
    for (std::size_t m = 0; m < svds.slice_count(); ++m) {
        const auto& s = svds.slices[m];
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(svds.n1, svds.n2);
        for (Eigen::Index i = 0; i < s.sigma.size(); ++i)
            if (s.sigma[i] >= thresholds[m])
                acc += s.sigma[i] * s.u.col(i) * s.v.col(i).adjoint();
        out.slice(m) = acc;
    }
    return out;
}

double tnn(const DenseTensor& a) {
    SliceSvdSet set = slice_svds(a, FftConvention::unnormalized);
    double total = 0.0;
    for (const auto& s : set.slices) total += s.sigma.sum();
    return total;
}

MultiRank multi_rank(const DenseTensor& a, double rank_tol) {
    SliceSvdSet set = slice_svds(a, FftConvention::unnormalized);
    MultiRank r(set.slice_count());
    for (std::size_t m = 0; m < set.slice_count(); ++m) {
        const auto& sig = set.slices[m].sigma;
        double top = sig.size() ? sig[0] : 0.0;
        std::size_t cnt = 0;
        for (Eigen::Index i = 0; i < sig.size(); ++i)
            if (sig[i] > rank_tol * top) ++cnt;
        r[m] = cnt;
    }
    return r;
}

double tail_norm(const Eigen::VectorXd& sigma, std::size_t k) {
    double s = 0.0;
    for (Eigen::Index i = static_cast<Eigen::Index>(k); i < sigma.size(); ++i)
        s += sigma[i] * sigma[i];
    return std::sqrt(s);
}

Eigen::MatrixXcd threshold_truncate_matrix(const Eigen::MatrixXcd& m, double threshold) {
    kernels::SliceSvd s = kernels::svd_with_phase_convention(m);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i)
        if (s.sigma[i] >= threshold) acc += s.sigma[i] * s.u.col(i) * s.v.col(i).adjoint();
    return acc;
}

void save_factors(const std::string& dir, const TSvdFactors& f) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_tns_file((fs::path(dir) / "u.tns").string(), f.u);
    write_tns_file((fs::path(dir) / "s.tns").string(), f.s);
    write_tns_file((fs::path(dir) / "v.tns").string(), f.v);
    nlohmann::json manifest = {
        {"format", "TNS1"},
        {"transform", "fft over mode 3, unnormalized forward, 1/N inverse"},
        {"factors", {{"u", "u.tns"}, {"s", "s.tns"}, {"v", "v.tns"}}},
        {"dims", {{"n1", f.u.dim(0)}, {"n2", f.v.dim(0)}, {"n3", f.u.dim(2)}}},
        {"imag_residue_rel_tol", 1e-10},
    };
    std::ofstream os(fs::path(dir) / "manifest.json");
    os << manifest.dump(2) << "\n";
}

TSvdFactors load_factors(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw std::runtime_error("load_factors: missing manifest.json in " + dir);
    nlohmann::json manifest = nlohmann::json::parse(is);
    auto file = [&](const char* key) {
        return (fs::path(dir) / manifest.at("factors").at(key).get<std::string>()).string();
    };
    return {read_tns_file(file("u")), read_tns_file(file("s")), read_tns_file(file("v"))};
}

}  // namespace tqsvd
