#include "tqsvd/recsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tqsvd/errors.hpp"
#include "tqsvd/fft.hpp"
#include "tqsvd/kernels.hpp"
#include "tqsvd/qsve.hpp"
#include "tqsvd/rng.hpp"
#include "tqsvd/tsvd.hpp"

namespace tqsvd {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// Per-slice spectral data shared by the pipeline and its classical reference.
struct SliceSpectra {
    std::vector<kernels::SliceSvd> svd;  // full bases; empty matrices for zero slices
    std::vector<double> fro;
};

SliceSpectra slice_spectra(const ComplexTensor& hat) {
    SliceSpectra out;
    const std::size_t n3 = hat.dim(2);
    out.svd.resize(n3);
    out.fro.resize(n3);
    for (std::size_t m = 0; m < n3; ++m) {
        Eigen::MatrixXcd slice = hat.slice(m);
        out.fro[m] = slice.norm();
        if (out.fro[m] > 0.0) out.svd[m] = kernels::svd_full_with_phase_convention(slice);
    }
    return out;
}

double padded_sigma(const kernels::SliceSvd& svd, std::size_t j) {
    return j < static_cast<std::size_t>(svd.sigma.size()) ? svd.sigma[Eigen::Index(j)] : 0.0;
}

}  // namespace

DenseTensor subsample(const DenseTensor& t, const SubsampleModel& model) {
    if (!(model.p > 0.0) || model.p > 1.0)
        throw std::invalid_argument("sampling probability must be in (0, 1]");
    DenseTensor out = t;
    Rng rng(model.seed);
    for (double& v : out.data) v = rng.next_double() < model.p ? v / model.p : 0.0;
    return out;
}

Eigen::MatrixXd horizontal_slice(const DenseTensor& t, std::size_t i) {
    if (t.order() != 3) throw std::invalid_argument("expected an order-3 tensor");
    if (i >= t.dim(0)) throw std::invalid_argument("user index out of range");
    Eigen::MatrixXd out(Eigen::Index(t.dim(1)), Eigen::Index(t.dim(2)));
    for (std::size_t j = 0; j < t.dim(1); ++j)
        for (std::size_t k = 0; k < t.dim(2); ++k) out(Eigen::Index(j), Eigen::Index(k)) = t.at(i, j, k);
    return out;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> check_typical_user(const DenseTensor& t,
                                                                       double gamma) {
    if (t.order() != 3) throw std::invalid_argument("expected an order-3 tensor");
    if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
    const std::size_t n1 = t.dim(0), n2 = t.dim(1), n3 = t.dim(2);
    const double mean = frobenius_norm(t) * frobenius_norm(t) / double(n1 * n3);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ok{Eigen::Index(n1), Eigen::Index(n3)};
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t m = 0; m < n3; ++m) {
            double fiber = 0.0;
            for (std::size_t j = 0; j < n2; ++j) fiber += t.at(i, j, m) * t.at(i, j, m);
            ok(Eigen::Index(i), Eigen::Index(m)) =
                fiber * (1.0 + gamma) >= mean && fiber <= (1.0 + gamma) * mean;
        }
    return ok;
}

TruncationPolicy TruncationPolicy::per_slice(std::size_t k, std::vector<double> eps) {
    if (k == 0) throw std::invalid_argument("rank target must be positive");
    for (double e : eps)
        if (!(e >= 0.0)) throw std::invalid_argument("tail bounds must be nonnegative");
    TruncationPolicy p;
    p.kind = Kind::per_slice;
    p.k = k;
    p.eps = std::move(eps);
    return p;
}

TruncationPolicy TruncationPolicy::global(double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("threshold must be nonnegative");
    TruncationPolicy p;
    p.kind = Kind::global_threshold;
    p.global_sigma = sigma;
    return p;
}

std::vector<double> TruncationPolicy::thresholds(const std::vector<double>& slice_fro) const {
    if (kind == Kind::global_threshold)
        return std::vector<double>(slice_fro.size(), global_sigma);
    if (eps.size() != slice_fro.size())
        throw std::invalid_argument("one tail bound per context slice required");
    std::vector<double> thr(slice_fro.size());
    for (std::size_t m = 0; m < thr.size(); ++m)
        thr[m] = eps[m] * slice_fro[m] / std::sqrt(double(k));
    return thr;
}

std::vector<double> slice_tail_ratios(const ComplexTensor& hat, std::size_t k) {
    if (hat.order() != 3) throw std::invalid_argument("expected an order-3 slice stack");
    std::vector<double> out(hat.dim(2));
    for (std::size_t m = 0; m < out.size(); ++m) {
        Eigen::MatrixXcd slice = hat.slice(m);
        const double fro = slice.norm();
        if (fro == 0.0) {
            out[m] = 0.0;
            continue;
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(slice);
        out[m] = tail_norm(svd.singularValues(), k) / fro;
    }
    return out;
}

double pooled_global_threshold(const ComplexTensor& hat, std::size_t k) {
    if (hat.order() != 3) throw std::invalid_argument("expected an order-3 slice stack");
    std::vector<double> pooled;
    for (std::size_t m = 0; m < hat.dim(2); ++m) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hat.slice(m));
        for (Eigen::Index l = 0; l < svd.singularValues().size(); ++l)
            pooled.push_back(svd.singularValues()[l]);
    }
    if (k >= pooled.size()) return 0.0;
    std::nth_element(pooled.begin(), pooled.begin() + Eigen::Index(k), pooled.end(),
                     std::greater<double>());
    return pooled[k];
}

namespace {

// The shared engine behind the per-slice and global-threshold variants.
PipelineTrace run_pipeline(const DenseTensor& sampled, const std::vector<double>& thr,
                           std::size_t user, std::size_t t_bits) {
    const std::size_t n2 = sampled.dim(1), n3 = sampled.dim(2);
    if (user >= sampled.dim(0)) throw std::invalid_argument("user index out of range");
    if (thr.size() != n3) throw std::invalid_argument("one threshold per context slice required");

    ComplexTensor hat = unitary_hat_slices(sampled);
    SliceSpectra spectra = slice_spectra(hat);

    PipelineTrace trace;
    trace.kept.resize(n3);
    trace.beta = Eigen::MatrixXcd::Zero(Eigen::Index(n2), Eigen::Index(n3));
    trace.row_norms = Eigen::VectorXd::Zero(Eigen::Index(n3));
    for (std::size_t m = 0; m < n3; ++m) {
        Eigen::VectorXcd row = hat.slice(m).row(Eigen::Index(user)).transpose();
        trace.row_norms[Eigen::Index(m)] = row.norm();
        if (spectra.fro[m] == 0.0) continue;
        for (std::size_t j = 0; j < n2; ++j) {
            const double sigma = padded_sigma(spectra.svd[m], j);
            const std::size_t code =
                fold_grid(phase_to_grid(sigma_to_phase(sigma, spectra.fro[m]), t_bits), t_bits);
            const double est = grid_to_sigma(code, t_bits, spectra.fro[m]);
            const bool keep_est = est >= thr[m];
            if (keep_est != (sigma >= thr[m])) ++trace.flips;
            if (keep_est) trace.kept[m].push_back(j);
            if (trace.row_norms[Eigen::Index(m)] > 0.0)
                trace.beta(Eigen::Index(j), Eigen::Index(m)) =
                    (spectra.svd[m].v.col(Eigen::Index(j)).transpose() * row)(0) /
                    trace.row_norms[Eigen::Index(m)];
        }
    }
    double alpha_sq = 0.0;
    for (std::size_t m = 0; m < n3; ++m)
        for (std::size_t j : trace.kept[m])
            alpha_sq += trace.row_norms[Eigen::Index(m)] * trace.row_norms[Eigen::Index(m)] *
                        std::norm(trace.beta(Eigen::Index(j), Eigen::Index(m)));
    trace.alpha = std::sqrt(alpha_sq);

    Eigen::MatrixXd row = horizontal_slice(sampled, user);
    StateVector s = prepare_matrix_state(row.cast<cd>(), "d", "e");
    s.apply_qft("e", +1);
    s.append_register("b", t_bits);
    controlled_sve_xor(s, "d", "e", "b", hat, t_bits);
    trace.xi.push_back(s);
    s.append_register("a", 1);
    const std::size_t big_t = std::size_t{1} << t_bits;
    s.apply_permutation({"e", "b", "a"}, [&](std::size_t g) {
        const std::size_t flag = g & 1;
        const std::size_t c = (g >> 1) & (big_t - 1);
        const std::size_t m = g >> (t_bits + 1);
        const bool below = grid_to_sigma(c, t_bits, spectra.fro[m]) < thr[m];
        return (g - flag) | (flag ^ (below ? 1u : 0u));
    });
    trace.xi.push_back(s);
    controlled_sve_xor(s, "d", "e", "b", hat, t_bits);
    s.discard("b");
    trace.xi.push_back(s);
    trace.postselect_probability = s.postselect("a", 0);
    trace.xi.push_back(s);
    s.apply_qft("e", -1);
    trace.xi.push_back(s);
    return trace;
}

}  // namespace

Algorithm4Result algorithm4(const DenseTensor& sampled, const TruncationPolicy& policy,
                            std::size_t user, std::size_t context, const QsveConfig& cfg,
                            std::size_t shots) {
    if (context >= sampled.dim(2)) throw std::invalid_argument("context index out of range");
    ComplexTensor hat = unitary_hat_slices(sampled);
    std::vector<double> fro(sampled.dim(2));
    for (std::size_t m = 0; m < fro.size(); ++m) fro[m] = hat.slice(m).norm();

    Algorithm4Result out;
    out.trace = run_pipeline(sampled, policy.thresholds(fro), user, cfg.t_bits);
    StateVector s = out.trace.xi.back();
    out.outcome.context_probability = s.postselect("e", context);
    out.outcome.product_distribution = s.probabilities({"d"});
    if (shots > 0) out.outcome.samples = s.measure({"d"}, shots, cfg.seed);
    return out;
}

CompletionResult completion_variant(const DenseTensor& sampled, double sigma, std::size_t user,
                                    const QsveConfig& cfg, std::size_t shots) {
    const std::size_t n2 = sampled.dim(1), n3 = sampled.dim(2);
    CompletionResult out;
    out.trace = run_pipeline(sampled, std::vector<double>(n3, sigma), user, cfg.t_bits);
    const StateVector& s = out.trace.xi.back();
    Eigen::VectorXd probs = s.probabilities({"d", "e"});
    out.joint.resize(Eigen::Index(n2), Eigen::Index(n3));
    for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t t = 0; t < n3; ++t)
            out.joint(Eigen::Index(j), Eigen::Index(t)) = probs[Eigen::Index(j * n3 + t)];
    if (shots > 0) out.samples = s.measure({"d", "e"}, shots, cfg.seed);
    return out;
}

ClassicalRecommendation classical_reference_pipeline(const DenseTensor& sampled,
                                                     const TruncationPolicy& policy,
                                                     std::size_t user) {
    const std::size_t n2 = sampled.dim(1), n3 = sampled.dim(2);
    if (user >= sampled.dim(0)) throw std::invalid_argument("user index out of range");
    ComplexTensor hat = unitary_hat_slices(sampled);
    SliceSpectra spectra = slice_spectra(hat);
    const std::vector<double> thr = policy.thresholds(spectra.fro);

    ClassicalRecommendation out;
    out.kept.resize(n3);
    Eigen::MatrixXcd recon_hat = Eigen::MatrixXcd::Zero(Eigen::Index(n2), Eigen::Index(n3));
    for (std::size_t m = 0; m < n3; ++m) {
        if (spectra.fro[m] == 0.0) continue;
        Eigen::VectorXcd row = hat.slice(m).row(Eigen::Index(user)).transpose();
        for (std::size_t j = 0; j < n2; ++j) {
            if (padded_sigma(spectra.svd[m], j) < thr[m]) continue;
            out.kept[m].push_back(j);
            Eigen::VectorXcd v = spectra.svd[m].v.col(Eigen::Index(j));
            recon_hat.col(Eigen::Index(m)) += v.conjugate() * (v.transpose() * row)(0);
        }
    }
    out.reconstructed = Eigen::MatrixXcd::Zero(Eigen::Index(n2), Eigen::Index(n3));
    for (std::size_t t = 0; t < n3; ++t)
        for (std::size_t m = 0; m < n3; ++m) {
            const double ang = -2.0 * M_PI * double(t * m) / double(n3);
            out.reconstructed.col(Eigen::Index(t)) +=
                cd(std::cos(ang), std::sin(ang)) / std::sqrt(double(n3)) *
                recon_hat.col(Eigen::Index(m));
        }
    out.mass = out.reconstructed.squaredNorm();
    if (out.mass == 0.0)
        throw empty_recommendation_error("every context slice truncated the user's row to zero");
    out.joint = out.reconstructed.cwiseAbs2() / out.mass;
    return out;
}

double bound_epsilon(double gamma, double zeta, double delta, double p, double eps0) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("delta must be in (0, 1]");
    if (gamma < 0.0 || gamma > 1.0 || zeta < 0.0 || zeta > 1.0)
        throw std::invalid_argument("gamma and zeta must be in [0, 1]");
    if (!(eps0 >= 0.0)) throw std::invalid_argument("eps0 must be nonnegative");
    return std::sqrt((1.0 + zeta) * (1.0 / p - p)) +
           eps0 * std::sqrt(2.0 * (1.0 + gamma) / (delta * p));
}

double bad_recommendation_bound(double eps) {
    if (!(eps >= 0.0) || eps >= 1.0)
        throw std::invalid_argument("the bound needs eps in [0, 1)");
    return (eps / (1.0 - eps)) * (eps / (1.0 - eps));
}

std::pair<double, double> success_probabilities(double gamma, double zeta, double p,
                                                double tensor_fro_sq, std::size_t n) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    if (gamma < 0.0 || zeta < 0.0 || tensor_fro_sq < 0.0 || n == 0)
        throw std::invalid_argument("bad concentration parameters");
    const double p1 = 1.0 - std::exp(-tensor_fro_sq / (3.0 * p));
    const double p2 = 1.0 - std::exp(-zeta * zeta * (1.0 / p - p) * tensor_fro_sq /
                                     (3.0 * double(n) * (1.0 + gamma)));
    return {p1, p2};
}

double repeat_count_estimate(double gamma, double eps, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
    if (gamma < 0.0 || eps < 0.0) throw std::invalid_argument("negative parameters");
    return std::sqrt(2.0) * (1.0 + gamma) / ((1.0 + eps) * std::sqrt(p));
}

MonteCarloResult monte_carlo_bad_rate(const DenseTensor& t, const SubsampleModel& model,
                                      const TruncationPolicy& policy, double gamma, double zeta,
                                      double delta, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("at least one trial required");
    const std::size_t n1 = t.dim(0), n3 = t.dim(2);
    DenseTensor sampled = subsample(t, model);

    MonteCarloResult out;
    out.report.gamma = gamma;
    out.report.zeta = zeta;
    out.report.delta = delta;
    out.report.p = model.p;
    out.report.k = policy.k;

    const double fro_sq = frobenius_norm(t) * frobenius_norm(t);
    auto [p1, p2] = success_probabilities(gamma, zeta, model.p, fro_sq, n1);
    out.report.p1 = p1;
    out.report.p2 = p2;
    if (policy.kind == TruncationPolicy::Kind::per_slice && !policy.eps.empty()) {
        out.report.eps0 = 2.0 * *std::max_element(policy.eps.begin(), policy.eps.end());
        out.report.eps = bound_epsilon(gamma, zeta, delta, model.p, out.report.eps0);
    } else {
        out.report.eps0 = nan_v;
        out.report.eps = nan_v;
    }
    out.report.vacuous = !(out.report.eps < 1.0);
    out.report.bad_bound = out.report.vacuous ? std::numeric_limits<double>::infinity()
                                              : bad_recommendation_bound(out.report.eps);
    out.report.repeat_estimate = std::isnan(out.report.eps)
                                     ? nan_v
                                     : repeat_count_estimate(gamma, out.report.eps, model.p);

    const auto typical = check_typical_user(t, gamma);
    out.typical_fraction = double(typical.count()) / double(typical.size());

    // Per-user reference pipelines; skipped users carry NaN.
    out.user_bad_probability = Eigen::VectorXd::Constant(Eigen::Index(n1), nan_v);
    std::vector<std::size_t> eligible;
    std::vector<Eigen::MatrixXd> joints(n1);
    std::size_t slice_ok = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        Eigen::MatrixXd srow = horizontal_slice(sampled, i);
        if (srow.norm() == 0.0) {
            ++out.skipped_zero_users;
            continue;
        }
        ClassicalRecommendation rec;
        try {
            rec = classical_reference_pipeline(sampled, policy, i);
        } catch (const empty_recommendation_error&) {
            ++out.skipped_empty;
            continue;
        }
        eligible.push_back(i);
        joints[i] = rec.joint;

        Eigen::MatrixXd trow = horizontal_slice(t, i);
        if (!std::isnan(out.report.eps) &&
            (trow.cast<cd>() - rec.reconstructed).norm() <= out.report.eps * trow.norm())
            ++slice_ok;

        // Exact bad probability: uniform over contexts with mass.
        double acc = 0.0;
        std::size_t live = 0;
        for (std::size_t ctx = 0; ctx < n3; ++ctx) {
            const double colmass = rec.joint.col(Eigen::Index(ctx)).sum();
            if (colmass <= 0.0) continue;
            ++live;
            double badmass = 0.0;
            for (std::size_t j = 0; j < t.dim(1); ++j)
                if (t.at(i, j, ctx) == 0.0) badmass += rec.joint(Eigen::Index(j), Eigen::Index(ctx));
            acc += badmass / colmass;
        }
        if (live > 0) out.user_bad_probability[Eigen::Index(i)] = acc / double(live);
    }
    out.report.p3_empirical =
        eligible.empty() || std::isnan(out.report.eps)
            ? nan_v
            : double(slice_ok) / double(eligible.size());
    if (out.report.vacuous) {
        out.fraction_within_bound = nan_v;
    } else {
        std::size_t within = 0, rated = 0;
        for (std::size_t i : eligible) {
            const double rate = out.user_bad_probability[Eigen::Index(i)];
            if (std::isnan(rate)) continue;
            ++rated;
            if (rate <= out.report.bad_bound) ++within;
        }
        out.fraction_within_bound = rated == 0 ? nan_v : double(within) / double(rated);
    }

    if (!eligible.empty()) {
        Rng root(seed);
        for (std::size_t trial = 0; trial < trials; ++trial) {
            Rng rng = root.derive(trial);
            const std::size_t i = eligible[rng.next_below(eligible.size())];
            const std::size_t ctx = rng.next_below(n3);
            const Eigen::MatrixXd& joint = joints[i];
            const double colmass = joint.col(Eigen::Index(ctx)).sum();
            if (colmass <= 0.0) {
                ++out.skipped_zero_context;
                continue;
            }
            double u = rng.next_double() * colmass;
            std::size_t j = 0;
            for (; j + 1 < t.dim(1); ++j) {
                u -= joint(Eigen::Index(j), Eigen::Index(ctx));
                if (u < 0.0) break;
            }
            ++out.counted;
            if (t.at(i, j, ctx) == 0.0) ++out.bad;
        }
    }
    out.bad_rate = out.counted == 0 ? 0.0 : double(out.bad) / double(out.counted);
    return out;
}

}  // namespace tqsvd
