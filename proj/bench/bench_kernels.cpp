// Timing harness for the three hot kernels, serial reference vs OpenMP
// parallel.  Outputs must agree bit for bit — the parallel variants only
// distribute independent lines/slices, they never reassociate arithmetic —
// so this doubles as an equivalence check (exit 1 on any mismatch).
//
//   --quick   small shapes, one reset; used as a ctest smoke test

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tqsvd/kernels.hpp"
#include "tqsvd/rng.hpp"
#include "tqsvd/tensor.hpp"

using namespace tqsvd;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

ComplexTensor random_stack(Rng& rng, std::size_t n1, std::size_t n2, std::size_t n3) {
    ComplexTensor a(n1, n2, n3);
    for (cd& x : a.data) x = cd(rng.next_gaussian(), rng.next_gaussian());
    return a;
}

bool bit_equal(const std::vector<cd>& a, const std::vector<cd>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(cd)) == 0;
}

struct Row {
    std::string name;
    double serial = 0.0, parallel = 0.0;
    bool identical = false;
};

void print_row(const Row& r) {
    std::cout << r.name << ": serial " << r.serial << " s, parallel " << r.parallel
              << " s, speedup " << (r.parallel > 0 ? r.serial / r.parallel : 0.0)
              << "x, outputs " << (r.identical ? "identical" : "DIFFER") << "\n";
}

template <typename F>
double best_of(std::size_t reps, F f) {
    double best = 1e300;
    for (std::size_t i = 0; i < reps; ++i) {
        const double t0 = now_seconds();
        f();
        best = std::min(best, now_seconds() - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") quick = true;

    Rng rng(2024);
    const std::size_t reps = quick ? 1 : 5;
    std::vector<Row> rows;

    {  // DFT lines along mode 3
        const std::size_t n = quick ? 16 : 64;
        ComplexTensor base = random_stack(rng, n, n, n);
        ComplexTensor s = base, p = base;
        Row r{"transform_mode", 0, 0, false};
        r.serial = best_of(reps, [&] {
            s = base;
            kernels::transform_mode_serial(s, 2, -1, 1.0);
        });
        r.parallel = best_of(reps, [&] {
            p = base;
            kernels::transform_mode_parallel(p, 2, -1, 1.0);
        });
        r.identical = bit_equal(s.data, p.data);
        rows.push_back(r);
    }

    {  // per-slice SVDs
        const std::size_t n = quick ? 8 : 48, n3 = quick ? 6 : 32;
        ComplexTensor hat = random_stack(rng, n, n, n3);
        std::vector<kernels::SliceSvd> s, p;
        Row r{"batch_svd", 0, 0, false};
        r.serial = best_of(reps, [&] { s = kernels::batch_svd_serial(hat); });
        r.parallel = best_of(reps, [&] { p = kernels::batch_svd_parallel(hat); });
        bool same = s.size() == p.size();
        for (std::size_t m = 0; same && m < s.size(); ++m)
            same = s[m].sigma == p[m].sigma && s[m].u == p[m].u && s[m].v == p[m].v;
        r.identical = same;
        rows.push_back(r);
    }

    {  // mid-axis unitary on a long state
        const std::size_t outer = quick ? 1u << 4 : 1u << 8;
        const std::size_t dim = quick ? 16 : 64;
        const std::size_t inner = quick ? 1u << 4 : 1u << 6;
        std::vector<cd> base(outer * dim * inner);
        for (cd& x : base) x = cd(rng.next_gaussian(), rng.next_gaussian());
        Eigen::MatrixXcd u(dim, dim);
        for (Eigen::Index j = 0; j < u.cols(); ++j)
            for (Eigen::Index i = 0; i < u.rows(); ++i)
                u(i, j) = cd(rng.next_gaussian(), rng.next_gaussian());
        std::vector<cd> s = base, p = base;
        Row r{"apply_mid_unitary", 0, 0, false};
        r.serial = best_of(reps, [&] {
            s = base;
            kernels::apply_mid_unitary_serial(s.data(), outer, dim, inner, u);
        });
        r.parallel = best_of(reps, [&] {
            p = base;
            kernels::apply_mid_unitary_parallel(p.data(), outer, dim, inner, u);
        });
        r.identical = bit_equal(s, p);
        rows.push_back(r);
    }

    bool all_ok = true;
    for (const Row& r : rows) {
        print_row(r);
        all_ok = all_ok && r.identical;
    }
    if (!all_ok) {
        std::cout << "KERNEL OUTPUTS DIFFER\n";
        return 1;
    }
    return 0;
}
