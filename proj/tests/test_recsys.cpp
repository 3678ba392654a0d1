#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "tqsvd/errors.hpp"
#include "tqsvd/fft.hpp"
#include "tqsvd/generators.hpp"
#include "tqsvd/qsim.hpp"
#include "tqsvd/recsys.hpp"
#include "tqsvd/rng.hpp"
#include "tqsvd/tsvd.hpp"

using namespace tqsvd;

namespace {

DenseTensor random_tensor(std::size_t n1, std::size_t n2, std::size_t n3, Rng& rng) {
    DenseTensor t(n1, n2, n3);
    for (double& v : t.data) v = 2.0 * rng.next_double() - 1.0;
    return t;
}

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 0.5 * (a - b).cwiseAbs().sum();
}

Eigen::VectorXd flatten_joint(const Eigen::MatrixXd& joint) {
    // (product, context) -> group code j*n3 + t, the measurement convention.
    Eigen::VectorXd out(joint.size());
    for (Eigen::Index j = 0; j < joint.rows(); ++j)
        for (Eigen::Index t = 0; t < joint.cols(); ++t) out[j * joint.cols() + t] = joint(j, t);
    return out;
}

// All singular values of every context slice, descending.
std::vector<double> pooled_sigma(const ComplexTensor& hat) {
    std::vector<double> s;
    for (std::size_t m = 0; m < hat.dim(2); ++m) {
        Eigen::MatrixXcd slice = hat.slice(m);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slice);
        for (Eigen::Index l = 0; l < svd.singularValues().size(); ++l)
            s.push_back(svd.singularValues()[l]);
    }
    std::sort(s.begin(), s.end(), std::greater<double>());
    return s;
}

}  // namespace

TEST_CASE("subsampling is exact at p=1 and unbiased at p=1/2") {
    Rng rng(71);
    DenseTensor t(4, 4, 4);
    for (double& v : t.data) v = rng.next_double() < 0.5 ? 1.0 : 0.0;

    DenseTensor same = subsample(t, {1.0, 9});
    CHECK(same.data == t.data);

    DenseTensor zero(4, 4, 4);
    DenseTensor still = subsample(zero, {0.5, 9});
    CHECK(frobenius_norm(still) == 0.0);

    DenseTensor ones(4, 4, 4);
    for (double& v : ones.data) v = 1.0;
    double sum = 0.0;
    const std::size_t draws = 1600;  // 1600 * 64 > 1e5 sample points
    for (std::size_t r = 0; r < draws; ++r) {
        DenseTensor s = subsample(ones, {0.5, 1000 + r});
        for (double v : s.data) sum += v;
    }
    const double count = double(draws) * 64.0;
    // each entry is 2 w.p. 1/2: mean 1, variance 1
    CHECK(std::abs(sum / count - 1.0) < 4.0 / std::sqrt(count));

    CHECK_THROWS_AS(subsample(t, {0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(subsample(t, {1.5, 1}), std::invalid_argument);
}

TEST_CASE("typicality bands pass uniform tensors and flag empty fibers") {
    DenseTensor ones(4, 4, 4);
    for (double& v : ones.data) v = 1.0;
    for (double gamma : {0.0, 0.5, 3.0}) CHECK(check_typical_user(ones, gamma).all());

    DenseTensor holed = ones;
    for (std::size_t j = 0; j < 4; ++j) holed.at(0, j, 1) = 0.0;
    auto ok = check_typical_user(holed, 0.25);
    CHECK_FALSE(ok(0, 1));
    CHECK(ok.count() == 15);

    DenseTensor pref = generate_preference_tensor(8, 2, 1.0, 11);
    CHECK(check_typical_user(pref, 1.0).all());

    CHECK_THROWS_AS(check_typical_user(ones, -0.1), std::invalid_argument);
}

TEST_CASE("zero thresholds make the classical reference reproduce the row") {
    Rng rng(5);
    DenseTensor t = random_tensor(4, 4, 4, rng);
    ClassicalRecommendation rec = classical_reference_pipeline(t, TruncationPolicy::global(0.0), 1);

    Eigen::MatrixXcd row = horizontal_slice(t, 1).cast<cd>();
    CHECK((rec.reconstructed - row).norm() < 1e-12);
    CHECK(rec.mass == doctest::Approx(row.squaredNorm()).epsilon(1e-12));
    CHECK(rec.joint.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& kept : rec.kept) CHECK(kept.size() == 4);

    CHECK_THROWS_AS(classical_reference_pipeline(t, TruncationPolicy::global(1e6), 1),
                    empty_recommendation_error);
    CHECK_THROWS_AS(classical_reference_pipeline(t, TruncationPolicy::global(0.0), 9),
                    std::invalid_argument);
}

TEST_CASE("row projection onto kept directions equals matrix truncation") {
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXcd a(8, 8);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = cd(rng.next_gaussian(), rng.next_gaussian());
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& s = svd.singularValues();
        const std::size_t cut = 1 + rng.next_below(6);
        const double thr = 0.5 * (s[Eigen::Index(cut - 1)] + s[Eigen::Index(cut)]);

        Eigen::MatrixXcd keep(8, 0);
        for (Eigen::Index j = 0; j < 8; ++j)
            if (s[j] >= thr) {
                keep.conservativeResize(8, keep.cols() + 1);
                keep.col(keep.cols() - 1) = svd.matrixV().col(j);
            }
        Eigen::MatrixXcd projected = a * keep * keep.adjoint();
        Eigen::MatrixXcd truncated = threshold_truncate_matrix(a, thr);
        CHECK((projected - truncated).norm() < 1e-10);
    }
}

TEST_CASE("classical reference matches an independent projection oracle") {
    Rng rng(23);
    DenseTensor t = random_tensor(4, 4, 4, rng);
    ComplexTensor hat = unitary_hat_slices(t);
    const std::size_t k = 2, user = 2, n3 = 4;
    std::vector<double> eps = slice_tail_ratios(hat, k);
    TruncationPolicy policy = TruncationPolicy::per_slice(k, eps);
    ClassicalRecommendation rec = classical_reference_pipeline(t, policy, user);

    Eigen::MatrixXcd oracle_hat(4, n3);
    for (std::size_t m = 0; m < n3; ++m) {
        Eigen::MatrixXcd slice = hat.slice(m);
        const double thr = eps[m] * slice.norm() / std::sqrt(double(k));
        oracle_hat.col(Eigen::Index(m)) =
            threshold_truncate_matrix(slice, thr).row(Eigen::Index(user)).transpose();
    }
    Eigen::MatrixXcd oracle(4, n3);
    for (std::size_t tt = 0; tt < n3; ++tt) {
        oracle.col(Eigen::Index(tt)).setZero();
        for (std::size_t m = 0; m < n3; ++m) {
            const double ang = -2.0 * M_PI * double(tt * m) / double(n3);
            oracle.col(Eigen::Index(tt)) +=
                cd(std::cos(ang), std::sin(ang)) / 2.0 * oracle_hat.col(Eigen::Index(m));
        }
    }
    CHECK((rec.reconstructed - oracle).norm() < 1e-10);
    CHECK((rec.joint - oracle.cwiseAbs2() / oracle.squaredNorm()).norm() < 1e-10);

    // the context transform moves no Frobenius mass in and out of the row
    double hat_row_sq = 0.0;
    for (std::size_t m = 0; m < n3; ++m)
        hat_row_sq += hat.slice(m).row(Eigen::Index(user)).squaredNorm();
    CHECK(std::sqrt(hat_row_sq) ==
          doctest::Approx(horizontal_slice(t, user).norm()).epsilon(1e-12));
}

TEST_CASE("zero thresholds leave the recommendation state untruncated") {
    Rng rng(29);
    DenseTensor t = random_tensor(4, 4, 4, rng);
    Algorithm4Result res = algorithm4(t, TruncationPolicy::global(0.0), 1, 2, {6, 3}, 0);

    Eigen::MatrixXd row = horizontal_slice(t, 1);
    Eigen::VectorXd want = row.col(2).cwiseAbs2() / row.col(2).squaredNorm();
    CHECK(tv_distance(res.outcome.product_distribution, want) < 1e-10);
    CHECK(res.outcome.context_probability ==
          doctest::Approx(row.col(2).squaredNorm() / row.squaredNorm()).epsilon(1e-10));
    CHECK(res.trace.postselect_probability == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.trace.flips == 0);
    CHECK(res.trace.xi.size() == 5);
    CHECK(res.trace.alpha == doctest::Approx(row.norm()).epsilon(1e-10));

    CHECK_THROWS_AS(algorithm4(t, TruncationPolicy::global(0.0), 1, 7, {6, 3}, 0),
                    std::invalid_argument);
}

TEST_CASE("a single nonzero tube is always the recommendation") {
    DenseTensor t(4, 4, 4);
    for (std::size_t tt = 0; tt < 4; ++tt) t.at(2, 3, tt) = 1.0;
    Algorithm4Result res = algorithm4(t, TruncationPolicy::global(0.0), 2, 1, {6, 13}, 40);
    CHECK(res.outcome.product_distribution[3] == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(res.outcome.samples.size() == 4);  // histogram over products
    CHECK(res.outcome.samples[3] == 40);
    CHECK(res.outcome.samples[0] + res.outcome.samples[1] + res.outcome.samples[2] == 0);
}

TEST_CASE("recommendation circuit agrees with the classical reference") {
    DenseTensor pref = generate_preference_tensor(4, 2, 1.0, 5);
    DenseTensor sampled = subsample(pref, {0.7, 9});
    ComplexTensor hat = unitary_hat_slices(sampled);
    TruncationPolicy policy = TruncationPolicy::per_slice(2, slice_tail_ratios(hat, 2));

    for (std::size_t user : {0u, 3u}) {
        REQUIRE(horizontal_slice(sampled, user).norm() > 0.0);
        Algorithm4Result res = algorithm4(sampled, policy, user, 1, {10, 17}, 0);
        ClassicalRecommendation rec = classical_reference_pipeline(sampled, policy, user);
        REQUIRE(res.trace.flips == 0);
        CHECK(res.trace.kept == rec.kept);

        Eigen::VectorXd quantum = res.trace.xi[4].probabilities({"d", "e"});
        CHECK(tv_distance(quantum, flatten_joint(rec.joint)) < 1e-6);

        const double colmass = rec.joint.col(1).sum();
        CHECK(tv_distance(res.outcome.product_distribution,
                          Eigen::VectorXd(rec.joint.col(1) / colmass)) < 1e-6);
        CHECK(res.outcome.context_probability == doctest::Approx(colmass).epsilon(1e-8));

        const double row_sq = horizontal_slice(sampled, user).squaredNorm();
        CHECK(res.trace.postselect_probability ==
              doctest::Approx(rec.mass / row_sq).epsilon(1e-8));
        CHECK(res.trace.alpha * res.trace.alpha == doctest::Approx(rec.mass).epsilon(1e-8));
        double beta_sum = 0.0;
        for (std::size_t m = 0; m < 4; ++m)
            for (std::size_t j : res.trace.kept[m])
                beta_sum += res.trace.row_norms[Eigen::Index(m)] *
                            res.trace.row_norms[Eigen::Index(m)] *
                            std::norm(res.trace.beta(Eigen::Index(j), Eigen::Index(m)));
        CHECK(std::abs(res.trace.alpha * res.trace.alpha - beta_sum) < 1e-10);
    }

    Rng rng(31);
    DenseTensor dense = random_tensor(4, 4, 4, rng);
    ComplexTensor dense_hat = unitary_hat_slices(dense);
    TruncationPolicy dense_policy = TruncationPolicy::per_slice(2, slice_tail_ratios(dense_hat, 2));
    Algorithm4Result res = algorithm4(dense, dense_policy, 2, 3, {10, 17}, 0);
    ClassicalRecommendation rec = classical_reference_pipeline(dense, dense_policy, 2);
    REQUIRE(res.trace.flips == 0);
    CHECK(tv_distance(res.trace.xi[4].probabilities({"d", "e"}), flatten_joint(rec.joint)) < 1e-6);
}

TEST_CASE("completion variant reduces to matrices and matches its oracle") {
    Rng rng(37);
    DenseTensor t = random_tensor(4, 4, 4, rng);
    Eigen::MatrixXd row = horizontal_slice(t, 1);

    CompletionResult plain = completion_variant(t, 0.0, 1, {8, 3}, 0);
    CHECK((plain.joint - row.cwiseAbs2() / row.squaredNorm()).norm() < 1e-10);

    CHECK_THROWS_AS(completion_variant(t, frobenius_norm(t) + 1.0, 1, {8, 3}, 0),
                    postselection_error);

    ComplexTensor hat = unitary_hat_slices(t);
    std::vector<double> pool = pooled_sigma(hat);
    const double sigma = 0.5 * (pool[2] + pool[3]);  // strictly between spectrum values
    CHECK(pooled_global_threshold(hat, 3) == doctest::Approx(pool[3]).epsilon(1e-12));

    CompletionResult res = completion_variant(t, sigma, 1, {10, 3}, 25);
    ClassicalRecommendation rec =
        classical_reference_pipeline(t, TruncationPolicy::global(sigma), 1);
    REQUIRE(res.trace.flips == 0);
    CHECK(tv_distance(flatten_joint(res.joint), flatten_joint(rec.joint)) < 1e-6);
    REQUIRE(res.samples.size() == 16);  // histogram over (product, context)
    std::size_t shot_total = 0;
    for (std::size_t c : res.samples) shot_total += c;
    CHECK(shot_total == 25);

    // one context slice: the pipeline is the plain matrix recommender
    DenseTensor flat(4, 4, 1);
    Eigen::MatrixXcd m(4, 4);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = cd(rng.next_gaussian(), 0.0);
    flat.slice(0) = m.real();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double cut = 0.5 * (svd.singularValues()[1] + svd.singularValues()[2]);
    CompletionResult single = completion_variant(flat, cut, 2, {10, 3}, 0);
    REQUIRE(single.trace.flips == 0);
    Eigen::VectorXcd want = threshold_truncate_matrix(m, cut).row(2).transpose();
    CHECK((single.joint.col(0) - Eigen::VectorXd(want.cwiseAbs2() / want.squaredNorm())).norm() <
          1e-8);
}

TEST_CASE("pooled thresholds and tail ratios read off a diagonal fixture") {
    DenseTensor t(3, 3, 1);
    t.at(0, 0, 0) = 3.0;
    t.at(1, 1, 0) = 2.0;
    t.at(2, 2, 0) = 1.0;
    ComplexTensor hat = unitary_hat_slices(t);
    CHECK(pooled_global_threshold(hat, 0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(pooled_global_threshold(hat, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pooled_global_threshold(hat, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pooled_global_threshold(hat, 5) == 0.0);

    std::vector<double> ratios = slice_tail_ratios(hat, 1);
    CHECK(ratios[0] == doctest::Approx(std::sqrt(5.0 / 14.0)).epsilon(1e-12));
    CHECK(slice_tail_ratios(hat, 3)[0] == 0.0);

    ComplexTensor zero_hat(3, 3, 2);
    CHECK(pooled_global_threshold(zero_hat, 1) == 0.0);
    CHECK(slice_tail_ratios(zero_hat, 1) == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(TruncationPolicy::per_slice(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(TruncationPolicy::per_slice(2, {0.1, -0.2}), std::invalid_argument);
    CHECK_THROWS_AS(TruncationPolicy::global(-1.0), std::invalid_argument);
    TruncationPolicy policy = TruncationPolicy::per_slice(4, {0.2, 0.4});
    std::vector<double> thr = policy.thresholds({1.0, 2.0});
    CHECK(thr[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(thr[1] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(policy.thresholds({1.0}), std::invalid_argument);
}

TEST_CASE("per-slice truncation errors aggregate within the pooled tail bound") {
    Rng rng(41);
    for (int rep = 0; rep < 3; ++rep) {
        DenseTensor t = random_tensor(5, 6, 4, rng);
        ComplexTensor hat = unitary_hat_slices(t);
        const std::size_t k = 2;
        std::vector<double> eps = slice_tail_ratios(hat, k);
        double total = 0.0, hat_sq = 0.0;
        for (std::size_t m = 0; m < 4; ++m) {
            Eigen::MatrixXcd slice = hat.slice(m);
            const double thr = eps[m] * slice.norm() / std::sqrt(double(k));
            total += (slice - threshold_truncate_matrix(slice, thr)).squaredNorm();
            hat_sq += slice.squaredNorm();
        }
        const double eps0 = 2.0 * *std::max_element(eps.begin(), eps.end());
        CHECK(total <= eps0 * eps0 * hat_sq + 1e-12);
    }
}

TEST_CASE("bound formulas match plug-in values and a second coding") {
    CHECK(bound_epsilon(0.0, 0.0, 1.0, 1.0, 0.3) ==
          doctest::Approx(std::sqrt(2.0) * 0.3).epsilon(1e-15));
    CHECK(bound_epsilon(0.7, 0.0, 0.4, 0.5, 0.0) ==
          doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));

    Rng rng(43);
    for (int rep = 0; rep < 200; ++rep) {
        const double gamma = rng.next_double(), zeta = rng.next_double();
        const double delta = 1e-3 + (1.0 - 1e-3) * rng.next_double();
        const double p = 1e-3 + (1.0 - 1e-3) * rng.next_double();
        const double eps0 = 2.0 * rng.next_double();
        const double again =
            std::sqrt((1.0 + zeta) * (1.0 / p - p)) + eps0 * std::sqrt(2.0 * (1.0 + gamma) / (delta * p));
        CHECK(bound_epsilon(gamma, zeta, delta, p, eps0) == doctest::Approx(again).epsilon(1e-13));
    }
    CHECK_THROWS_AS(bound_epsilon(0, 0, 1, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(0, 0, 1, 1.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(0, 0, 0.0, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(0, 0, 1.2, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(-0.1, 0, 1, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(1.2, 0, 1, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(0, 1.2, 1, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(bound_epsilon(0, 0, 1, 1, -0.1), std::invalid_argument);

    CHECK(bad_recommendation_bound(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bad_recommendation_bound(1.0 / 3.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bad_recommendation_bound(0.0) == 0.0);
    CHECK_THROWS_AS(bad_recommendation_bound(1.0), std::invalid_argument);
    CHECK_THROWS_AS(bad_recommendation_bound(-0.1), std::invalid_argument);

    auto [p1, p2] = success_probabilities(0.5, 0.5, 0.5, 12.0, 4);
    CHECK(p1 == doctest::Approx(1.0 - std::exp(-12.0 / 1.5)).epsilon(1e-13));
    CHECK(p2 == doctest::Approx(1.0 - std::exp(-0.25 * 1.5 * 12.0 / 18.0)).epsilon(1e-13));
    CHECK(success_probabilities(0.3, 0.0, 0.5, 12.0, 4).second == 0.0);
    CHECK(success_probabilities(0.0, 0.0, 1.0, 1e7, 4).first == doctest::Approx(1.0));
    CHECK_THROWS_AS(success_probabilities(0, 0, 0.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(success_probabilities(0, 0, 1.0, 1.0, 0), std::invalid_argument);

    CHECK(repeat_count_estimate(0.0, 0.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(repeat_count_estimate(1.0, 0.5, 0.25) ==
          doctest::Approx(std::sqrt(2.0) * 2.0 / 0.75).epsilon(1e-13));
    CHECK(repeat_count_estimate(0.0, 0.0, 1e-10) > 1e4);
    CHECK_THROWS_AS(repeat_count_estimate(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("monte carlo never flags faithful reconstructions") {
    DenseTensor pref = generate_preference_tensor(8, 2, 1.0, 3);
    MonteCarloResult mc = monte_carlo_bad_rate(pref, {1.0, 1}, TruncationPolicy::global(0.0), 1.0,
                                               0.1, 1.0, 4000, 19);
    CHECK(mc.bad_rate == 0.0);
    CHECK(mc.bad == 0);
    CHECK(mc.counted == 4000);
    CHECK(mc.skipped_zero_users == 0);
    CHECK(mc.skipped_empty == 0);
    CHECK(mc.skipped_zero_context == 0);
    CHECK(mc.user_bad_probability.maxCoeff() < 1e-20);  // roundoff mass only
    CHECK(mc.typical_fraction == 1.0);
    CHECK(mc.report.vacuous);  // global policy carries no per-slice tail bounds
    CHECK(std::isinf(mc.report.bad_bound));

    DenseTensor ones(4, 4, 4);
    for (double& v : ones.data) v = 1.0;
    SubsampleModel model{0.9, 2};
    ComplexTensor hat = unitary_hat_slices(subsample(ones, model));
    TruncationPolicy policy = TruncationPolicy::per_slice(2, slice_tail_ratios(hat, 2));
    MonteCarloResult all_good = monte_carlo_bad_rate(ones, model, policy, 1.0, 0.1, 1.0, 2000, 23);
    CHECK(all_good.bad == 0);
    CHECK(all_good.bad_rate == 0.0);

    CHECK_THROWS_AS(monte_carlo_bad_rate(ones, model, policy, 1.0, 0.1, 1.0, 0, 23),
                    std::invalid_argument);
}

TEST_CASE("monte carlo rates respect the proven quality bound on a sampled ensemble") {
    // Light sampling keeps the bound vacuous; near-complete sampling activates it.
    const std::vector<double> rates = {0.8, 0.8, 0.9, 0.98, 0.997};
    std::size_t nonvacuous = 0;
    for (std::uint64_t seed = 0; seed < rates.size(); ++seed) {
        DenseTensor pref = generate_preference_tensor(8, 2, 1.0, 100 + seed);
        SubsampleModel model{rates[seed], 200 + seed};
        ComplexTensor hat = unitary_hat_slices(subsample(pref, model));
        TruncationPolicy policy = TruncationPolicy::per_slice(2, slice_tail_ratios(hat, 2));
        MonteCarloResult mc =
            monte_carlo_bad_rate(pref, model, policy, 1.0, 0.05, 1.0, 2000, 300 + seed);

        CHECK(mc.counted + mc.skipped_zero_context == 2000);
        CHECK(mc.bad_rate >= 0.0);
        CHECK(mc.bad_rate <= 1.0);
        CHECK(mc.typical_fraction == 1.0);
        CHECK(mc.report.p1 > 0.99);  // squared norm is large, failure chance negligible
        if (!mc.report.vacuous) {
            ++nonvacuous;
            CHECK(mc.bad_rate <= mc.report.bad_bound);
            CHECK(mc.fraction_within_bound == 1.0);
        }
        if (!std::isnan(mc.report.p3_empirical)) {
            CHECK(mc.report.p3_empirical >= 0.0);
            CHECK(mc.report.p3_empirical <= 1.0);
        }
    }
    MESSAGE("non-vacuous instances: ", nonvacuous, " of ", rates.size());
    CHECK(nonvacuous >= 1);  // the near-complete models must yield usable bounds
}

TEST_CASE("monte carlo books zero rows and empty truncations as skips") {
    DenseTensor t(4, 4, 4);
    for (double& v : t.data) v = 1.0;
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t m = 0; m < 4; ++m) t.at(3, j, m) = 0.0;

    MonteCarloResult mc =
        monte_carlo_bad_rate(t, {1.0, 5}, TruncationPolicy::global(0.0), 1.0, 0.1, 1.0, 500, 7);
    CHECK(mc.skipped_zero_users == 1);
    CHECK(std::isnan(mc.user_bad_probability[3]));
    CHECK(mc.user_bad_probability[0] == 0.0);
    CHECK(mc.counted == 500);

    MonteCarloResult empty =
        monte_carlo_bad_rate(t, {1.0, 5}, TruncationPolicy::global(1e6), 1.0, 0.1, 1.0, 500, 7);
    CHECK(empty.skipped_empty == 3);
    CHECK(empty.skipped_zero_users == 1);
    CHECK(empty.counted == 0);
    CHECK(empty.bad_rate == 0.0);
}
