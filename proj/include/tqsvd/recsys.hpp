#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "tqsvd/qsim.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Entry sampling model: every entry survives independently with probability p
// and is scaled by 1/p, making the sampled tensor an unbiased estimate of the
// original.
struct SubsampleModel {
    double p = 1.0;
    std::uint64_t seed = 0;
};
DenseTensor subsample(const DenseTensor& t, const SubsampleModel& model);

// Horizontal slice T(i,:,:) as a (products x contexts) matrix.
Eigen::MatrixXd horizontal_slice(const DenseTensor& t, std::size_t i);

// Fiber typicality: entry (i,m) is true when ||T(i,:,m)||_2^2 lies within
// [1/(1+gamma), 1+gamma] times the all-fiber average ||T||_F^2/(N1*N3).
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> check_typical_user(const DenseTensor& t,
                                                                       double gamma);

// Singular-value thresholds, one per context slice: either derived per slice
// from a relative tail bound (sigma^(m) = eps^(m) ||slice m||_F / sqrt(k)) or
// a single global cut applied to every slice.
struct TruncationPolicy {
    enum class Kind { per_slice, global_threshold };
    Kind kind = Kind::global_threshold;
    std::size_t k = 1;
    std::vector<double> eps;  // per-slice relative tail bounds (per_slice only)
    double global_sigma = 0.0;

    static TruncationPolicy per_slice(std::size_t k, std::vector<double> eps);
    static TruncationPolicy global(double sigma);
    std::vector<double> thresholds(const std::vector<double>& slice_fro) const;
};

// Relative tails ||slice - slice_k||_F / ||slice||_F for every frontal slice
// of a transform-domain stack (zero slices report 0): the natural eps list for
// a per-slice policy.
std::vector<double> slice_tail_ratios(const ComplexTensor& hat, std::size_t k);

// The (k+1)-th largest singular value pooled across all frontal slices of
// `hat` (0 when fewer than k+1 values exist).  With the >= keep rule,
// everything down to and including this value survives the global cut.
double pooled_global_threshold(const ComplexTensor& hat, std::size_t k);

struct QsveConfig {
    std::size_t t_bits = 8;
    std::uint64_t seed = 0;
};

// Everything observable about one run of the truncation pipeline.  xi[0..4]
// are the five intermediate states: after the estimation oracle, after the
// threshold flag, after the uncompute + estimate-register discard, after the
// flag postselection, and after the inverse context transform.
struct PipelineTrace {
    std::vector<std::vector<std::size_t>> kept;  // per slice: estimated keep set
    Eigen::MatrixXcd beta;                       // (product, context) row coefficients
    Eigen::VectorXd row_norms;                   // transform-domain row norms per context
    double alpha = 0.0;       // sqrt(sum over kept of row_norm^2 |beta|^2)
    double postselect_probability = 0.0;         // flag-0 branch probability
    std::size_t flips = 0;    // keep decisions that differ from the exact-spectrum rule
    std::vector<StateVector> xi;
};

struct RecommendationOutcome {
    Eigen::VectorXd product_distribution;  // over products, given the context
    double context_probability = 0.0;      // mass of the postselected context
    std::vector<std::size_t> samples;      // measurement histogram over products
};

struct Algorithm4Result {
    RecommendationOutcome outcome;
    PipelineTrace trace;
};

// Full-circuit recommendation for one user at one context: prepare the user's
// slice, rotate contexts into the transform domain, flag singular components
// whose estimate falls below the slice threshold, uncompute, postselect the
// flag and the requested context, and measure products.
Algorithm4Result algorithm4(const DenseTensor& sampled, const TruncationPolicy& policy,
                            std::size_t user, std::size_t context, const QsveConfig& cfg,
                            std::size_t shots);

struct CompletionResult {
    Eigen::MatrixXd joint;              // final-state probabilities over (product, context)
    std::vector<std::size_t> samples;   // measurement histogram over (product, context)
    PipelineTrace trace;
};

// Global-threshold variant: identical plumbing with one cut value shared by
// every context slice; returns the full joint output distribution.
CompletionResult completion_variant(const DenseTensor& sampled, double sigma, std::size_t user,
                                    const QsveConfig& cfg, std::size_t shots);

struct ClassicalRecommendation {
    Eigen::MatrixXcd reconstructed;              // thresholded slice over (product, context)
    Eigen::MatrixXd joint;                       // normalized |entry|^2
    std::vector<std::vector<std::size_t>> kept;  // exact-spectrum keep sets
    double mass = 0.0;                           // squared norm of the reconstruction
};

// Brute-force reference: project the user's transform-domain row onto the
// right singular vectors whose exact singular value clears each slice
// threshold, rotate back, and read the |entry|^2 distribution.
ClassicalRecommendation classical_reference_pipeline(const DenseTensor& sampled,
                                                     const TruncationPolicy& policy,
                                                     std::size_t user);

// Precision of the sampled-and-truncated reconstruction:
//   eps = sqrt((1+zeta)(1/p - p)) + eps0 sqrt(2(1+gamma)/(delta p)).
double bound_epsilon(double gamma, double zeta, double delta, double p, double eps0);

// Probability that a draw from an eps-accurate approximation lands on a zero
// of the true tensor: (eps/(1-eps))^2.
double bad_recommendation_bound(double eps);

// Concentration probabilities for the sampling model:
//   p1 = 1 - exp(-||T||_F^2 / (3p))
//   p2 = 1 - exp(-zeta^2 (1/p - p) ||T||_F^2 / (3N(1+gamma)))
std::pair<double, double> success_probabilities(double gamma, double zeta, double p,
                                                double tensor_fro_sq, std::size_t n);

// Amplitude-amplification repeat factor for the flag postselection:
//   sqrt(2) (1+gamma) / ((1+eps) sqrt(p)).
double repeat_count_estimate(double gamma, double eps, double p);

struct BoundReport {
    double gamma = 0.0, zeta = 0.0, delta = 0.0, p = 1.0;
    std::size_t k = 0;
    double eps0 = 0.0, eps = 0.0;
    double p1 = 0.0, p2 = 0.0;
    double p3_empirical = 0.0;  // fraction of users meeting the slice-error inequality
    double bad_bound = 0.0;     // (eps/(1-eps))^2, infinity when vacuous
    bool vacuous = false;       // eps >= 1: the bound says nothing
    double repeat_estimate = 0.0;
};

struct MonteCarloResult {
    double bad_rate = 0.0;               // bad draws / counted draws
    std::size_t counted = 0, bad = 0;
    std::size_t skipped_zero_users = 0;  // ||sampled row||_F = 0
    std::size_t skipped_empty = 0;       // every slice truncated to zero
    std::size_t skipped_zero_context = 0;  // drawn context had no mass
    Eigen::VectorXd user_bad_probability;  // exact per-user rate, NaN when skipped
    double fraction_within_bound = 0.0;    // eligible users with exact rate <= bound
    double typical_fraction = 0.0;         // fibers passing the typicality check
    BoundReport report;
};

// Draw (context uniform, product from the reference pipeline's conditional)
// and count draws that land on zeros of the true tensor, against the computed
// bound chain.
MonteCarloResult monte_carlo_bad_rate(const DenseTensor& t, const SubsampleModel& model,
                                      const TruncationPolicy& policy, double gamma, double zeta,
                                      double delta, std::size_t trials, std::uint64_t seed);

}  // namespace tqsvd
