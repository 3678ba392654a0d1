#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "tqsvd/fft.hpp"
#include "tqsvd/rng.hpp"
#include "tqsvd/tensor_io.hpp"
#include "tqsvd/tensor_ops.hpp"

using namespace tqsvd;

namespace {

// ---- independent oracles -------------------------------------------------
// Everything below recomputes expectations from first principles (naive DFT
// sums, explicit circulant matrices, tube-by-tube convolution loops) so the
// production FFT path is checked against code that shares nothing with it.

CTube naive_dft(const CTube& x, int sign, double scale) {
    const std::size_t n = x.size();
    CTube out(n, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sign * 2.0 * M_PI * double(j) * double(k) / double(n);
            out[k] += x[j] * cd(std::cos(ang), std::sin(ang));
        }
    for (auto& v : out) v *= scale;
    return out;
}

Tube convolve_by_circulant(const Tube& u, const Tube& v) {
    Eigen::MatrixXd c = circ_vector(u);
    Eigen::VectorXd vv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) vv[i] = v[i];
    Eigen::VectorXd r = c * vv;
    Tube out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = r[i];
    return out;
}

// Definition-level t-product: every output tube is a sum of tube convolutions.
DenseTensor t_product_bruteforce(const DenseTensor& m, const DenseTensor& n) {
    DenseTensor out(m.dim(0), n.dim(1), m.dim(2));
    for (std::size_t i = 0; i < m.dim(0); ++i)
        for (std::size_t j = 0; j < n.dim(1); ++j) {
            Tube acc(m.dim(2), 0.0);
            for (std::size_t k = 0; k < m.dim(1); ++k) {
                Tube mu(m.dim(2)), nv(m.dim(2));
                for (std::size_t t = 0; t < m.dim(2); ++t) {
                    mu[t] = m.at(i, k, t);
                    nv[t] = n.at(k, j, t);
                }
                Tube c = convolve_by_circulant(mu, nv);
                for (std::size_t t = 0; t < m.dim(2); ++t) acc[t] += c[t];
            }
            for (std::size_t t = 0; t < m.dim(2); ++t) out.at(i, j, t) = acc[t];
        }
    return out;
}

DenseTensor random_tensor(Rng& rng, std::size_t n1, std::size_t n2, std::size_t n3) {
    DenseTensor a(n1, n2, n3);
    for (double& v : a.data) v = rng.next_gaussian();
    return a;
}

double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("circ_vector fixed examples") {
    Eigen::MatrixXd c = circ_vector({1, 2, 3});
    Eigen::MatrixXd want(3, 3);
    want << 1, 3, 2, 2, 1, 3, 3, 2, 1;
    CHECK((c - want).norm() == 0.0);

    Eigen::MatrixXd c1 = circ_vector({5});
    CHECK(c1.rows() == 1);
    CHECK(c1(0, 0) == 5.0);

    Eigen::MatrixXd c2 = circ_vector({1, 2});
    Eigen::MatrixXd want2(2, 2);
    want2 << 1, 2, 2, 1;
    CHECK((c2 - want2).norm() == 0.0);
}

TEST_CASE("cyclic_convolve fixed examples") {
    Tube r = cyclic_convolve({1, 2}, {3, 4});
    CHECK(r[0] == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(10.0).epsilon(1e-12));

    // impulse is the identity for convolution
    Tube e = {1, 0, 0, 0, 0};
    Tube v = {2, -1, 0.5, 3, 7};
    Tube id = cyclic_convolve(e, v);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(id[i] == doctest::Approx(v[i]).epsilon(1e-12));
}

TEST_CASE("convolution theorem: fft path vs circulant path, many lengths") {
    Rng rng(20260819);
    for (std::size_t len : {2, 3, 4, 5, 7, 8, 12, 16, 31, 32, 48, 64}) {
        for (int rep = 0; rep < 20; ++rep) {
            Tube u(len), v(len);
            for (auto& x : u) x = rng.next_gaussian();
            for (auto& x : v) x = rng.next_gaussian();
            Tube fast = cyclic_convolve(u, v);
            Tube slow = convolve_by_circulant(u, v);
            double scale = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                scale = std::max(scale, std::abs(slow[i]));
                diff = std::max(diff, std::abs(fast[i] - slow[i]));
            }
            CHECK(diff <= 1e-10 * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("dft_line agrees with the naive DFT sum in all four conventions") {
    Rng rng(7);
    for (std::size_t n : {2, 3, 4, 6, 8, 16, 27}) {
        CTube x(n);
        for (auto& v : x) v = cd(rng.next_gaussian(), rng.next_gaussian());
        for (int sign : {-1, +1}) {
            for (double scale : {1.0, 1.0 / double(n), 1.0 / std::sqrt(double(n))}) {
                CTube got = x;
                dft_line(got.data(), n, sign, scale);
                CTube want = naive_dft(x, sign, scale);
                for (std::size_t i = 0; i < n; ++i)
                    CHECK(std::abs(got[i] - want[i]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("fft_trailing_modes basics") {
    // tube [1,0] -> [1,1] in the hat domain
    DenseTensor a(1, 1, 2);
    a.at(0, 0, 0) = 1.0;
    ComplexTensor h = fft_trailing_modes(a);
    CHECK(std::abs(h.at(0, 0, 0) - cd(1, 0)) <= 1e-15);
    CHECK(std::abs(h.at(0, 0, 1) - cd(1, 0)) <= 1e-15);

    // round trip at 4x4x4
    Rng rng(11);
    DenseTensor b = random_tensor(rng, 4, 4, 4);
    DenseTensor back = to_real_checked(ifft_trailing_modes(fft_trailing_modes(b)));
    CHECK(max_abs_diff(b, back) <= 1e-12);

    // constant hat tube -> impulse
    ComplexTensor ch(1, 1, 5);
    for (std::size_t k = 0; k < 5; ++k) ch.at(0, 0, k) = cd(3.5, 0);
    ComplexTensor imp = ifft_trailing_modes(ch);
    CHECK(std::abs(imp.at(0, 0, 0) - cd(3.5, 0)) <= 1e-12);
    for (std::size_t k = 1; k < 5; ++k) CHECK(std::abs(imp.at(0, 0, k)) <= 1e-12);
}

TEST_CASE("hat slices of a real tensor are conjugate-symmetric") {
    Rng rng(13);
    for (std::size_t n3 : {2, 3, 4, 5, 8}) {
        DenseTensor a = random_tensor(rng, 3, 2, n3);
        ComplexTensor h = fft_trailing_modes(a);
        double norm = frobenius_norm(h);
        for (std::size_t m = 0; m < n3; ++m) {
            std::size_t mm = (n3 - m) % n3;
            double diff = (h.slice(m).conjugate() - h.slice(mm)).norm();
            CHECK(diff <= 1e-12 * norm);
        }
    }
}

TEST_CASE("unitary hat slices: positive kernel and 1/sqrt(N) scale") {
    Rng rng(17);
    DenseTensor a = random_tensor(rng, 3, 3, 4);
    ComplexTensor qh = unitary_hat_slices(a);
    ComplexTensor ch = fft_trailing_modes(a);
    const double root = std::sqrt(4.0);
    // positive-sign kernel: unitary slice m equals conj of the MATLAB slice m
    // (real input), i.e. the MATLAB slice at index (N3 - m) % N3, over sqrt(N3).
    for (std::size_t m = 0; m < 4; ++m) {
        double diff = (qh.slice(m) - ch.slice((4 - m) % 4) / root).norm();
        CHECK(diff <= 1e-12 * frobenius_norm(ch));
        double diff2 = (qh.slice(m) - ch.slice(m).conjugate() / root).norm();
        CHECK(diff2 <= 1e-12 * frobenius_norm(ch));
    }
    // Parseval under the unitary convention
    CHECK(frobenius_norm(qh) == doctest::Approx(frobenius_norm(a)).epsilon(1e-12));
    DenseTensor back = to_real_checked(unitary_unhat_slices(qh));
    CHECK(max_abs_diff(a, back) <= 1e-12);
}

TEST_CASE("t_product against the block-circulant and definition oracles") {
    SUBCASE("identity is neutral") {
        Rng rng(19);
        DenseTensor a = random_tensor(rng, 3, 4, 5);
        DenseTensor e = identity_tensor(3, 5);
        CHECK(max_abs_diff(t_product(e, a), a) <= 1e-12);
    }
    SUBCASE("1x1xN tubes multiply by cyclic convolution") {
        DenseTensor u(1, 1, 3), v(1, 1, 3);
        u.data = {1, 2, 3};
        v.data = {4, 5, 6};
        DenseTensor p = t_product(u, v);
        Tube wanted = convolve_by_circulant({1, 2, 3}, {4, 5, 6});
        for (std::size_t t = 0; t < 3; ++t)
            CHECK(p.at(0, 0, t) == doctest::Approx(wanted[t]).epsilon(1e-12));
    }
    SUBCASE("random instances vs both oracles") {
        Rng rng(23);
        for (int rep = 0; rep < 10; ++rep) {
            DenseTensor m = random_tensor(rng, 2, 3, 4);
            DenseTensor n = random_tensor(rng, 3, 2, 4);
            DenseTensor fast = t_product(m, n);
            DenseTensor brute = t_product_bruteforce(m, n);
            CHECK(max_abs_diff(fast, brute) <= 1e-10);
            // circ(M) * unfold(N) == unfold(M * N)
            Eigen::MatrixXd lhs = circ_tensor(m) * unfold_slices(n);
            Eigen::MatrixXd rhs = unfold_slices(fast);
            CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
        }
    }
    SUBCASE("hat-domain slices of the product are slice products") {
        Rng rng(29);
        DenseTensor m = random_tensor(rng, 3, 3, 8);
        DenseTensor n = random_tensor(rng, 3, 3, 8);
        ComplexTensor mh = fft_trailing_modes(m), nh = fft_trailing_modes(n);
        ComplexTensor ph = fft_trailing_modes(t_product(m, n));
        for (std::size_t k = 0; k < 8; ++k) {
            double diff = (ph.slice(k) - mh.slice(k) * nh.slice(k)).norm();
            CHECK(diff <= 1e-10 * std::max(1.0, frobenius_norm(ph)));
        }
    }
    SUBCASE("dimension mismatch throws") {
        DenseTensor a(2, 3, 4), b(2, 2, 4), c(3, 2, 5);
        CHECK_THROWS_AS(t_product(a, b), std::invalid_argument);
        CHECK_THROWS_AS(t_product(a, c), std::invalid_argument);
    }
}

TEST_CASE("circ_tensor fixed examples") {
    DenseTensor e = identity_tensor(2, 2);
    Eigen::MatrixXd c = circ_tensor(e);
    CHECK((c - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

    DenseTensor tube(1, 1, 3);
    tube.data = {1, 2, 3};
    CHECK((circ_tensor(tube) - circ_vector({1, 2, 3})).norm() == 0.0);
}

TEST_CASE("t_transpose") {
    SUBCASE("slice layout: transpose all, reverse slices 2..N3") {
        Rng rng(31);
        DenseTensor a = random_tensor(rng, 2, 3, 4);
        DenseTensor at = t_transpose(a);
        CHECK((at.slice(0) - a.slice(0).transpose()).norm() == 0.0);
        for (std::size_t k = 1; k < 4; ++k)
            CHECK((at.slice(k) - a.slice(4 - k).transpose()).norm() == 0.0);
        CHECK(max_abs_diff(t_transpose(at), a) == 0.0);
    }
    SUBCASE("N3 = 1 is the matrix transpose") {
        Rng rng(37);
        DenseTensor a = random_tensor(rng, 3, 2, 1);
        DenseTensor at = t_transpose(a);
        CHECK((at.slice(0) - a.slice(0).transpose()).norm() == 0.0);
    }
    SUBCASE("anti-homomorphism: (M*N)^T == N^T * M^T") {
        Rng rng(41);
        DenseTensor m = random_tensor(rng, 2, 3, 5);
        DenseTensor n = random_tensor(rng, 3, 4, 5);
        DenseTensor lhs = t_transpose(t_product(m, n));
        DenseTensor rhs = t_product(t_transpose(n), t_transpose(m));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
    }
    SUBCASE("identity is self-transpose") {
        DenseTensor e = identity_tensor(3, 4);
        CHECK(max_abs_diff(t_transpose(e), e) == 0.0);
    }
}

TEST_CASE("identity tensor and orthogonality") {
    DenseTensor e = identity_tensor(2, 2);
    CHECK(frobenius_norm(e) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(is_orthogonal_tensor(e, 1e-12));

    DenseTensor z(2, 2, 2);
    CHECK_FALSE(is_orthogonal_tensor(z, 1e-12));
}

TEST_CASE("frobenius norm oracles") {
    DenseTensor z(3, 2, 4);
    CHECK(frobenius_norm(z) == 0.0);
    Rng rng(43);
    DenseTensor a = random_tensor(rng, 3, 2, 4);
    double direct = 0.0;
    for (double v : a.data) direct += v * v;
    CHECK(frobenius_norm(a) == doctest::Approx(std::sqrt(direct)).epsilon(1e-15));
    // Parseval: unnormalized hat norm is sqrt(N3) times the spatial norm
    CHECK(frobenius_norm(fft_trailing_modes(a)) ==
          doctest::Approx(2.0 * frobenius_norm(a)).epsilon(1e-12));
}

TEST_CASE("imaginary-residue policing") {
    ComplexTensor bad(1, 1, 2);
    bad.at(0, 0, 0) = cd(1.0, 0.5);
    CHECK_THROWS_AS(to_real_checked(bad), numeric_error);
    ComplexTensor ok(1, 1, 2);
    ok.at(0, 0, 0) = cd(1.0, 1e-14);
    CHECK(to_real_checked(ok).at(0, 0, 0) == 1.0);
}

TEST_CASE("TNS round trip is bit exact") {
    Rng rng(47);
    DenseTensor a = random_tensor(rng, 3, 4, 2);
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    write_tns(ss, a);
    DenseTensor b = read_tns(ss);
    REQUIRE(b.dims == a.dims);
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);

    ComplexTensor c(2, 2, 3);
    for (auto& v : c.data) v = cd(rng.next_gaussian(), rng.next_gaussian());
    std::stringstream sc(std::ios::in | std::ios::out | std::ios::binary);
    write_tns(sc, c);
    ComplexTensor d = read_tns_complex(sc);
    REQUIRE(d.dims == c.dims);
    for (std::size_t i = 0; i < c.data.size(); ++i) CHECK(c.data[i] == d.data[i]);
}

TEST_CASE("TNS rejects bad headers") {
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    ss.write("BOGUS!!!", 8);
    CHECK_THROWS(read_tns(ss));
}

TEST_CASE("text importer") {
    std::stringstream ss;
    ss << "1, 2, 3\n4,5,6\n\n7, 8, 9\n10, 11, 12\n";
    DenseTensor a = read_tensor_text(ss);
    REQUIRE(a.dims == std::vector<std::size_t>{2, 3, 2});
    CHECK(a.at(0, 0, 0) == 1.0);
    CHECK(a.at(1, 2, 0) == 6.0);
    CHECK(a.at(0, 1, 1) == 8.0);
    CHECK(a.at(1, 2, 1) == 12.0);

    std::stringstream ragged;
    ragged << "1,2\n3\n";
    CHECK_THROWS(read_tensor_text(ragged));

    std::stringstream junk;
    junk << "1,zz\n";
    CHECK_THROWS(read_tensor_text(junk));
}
