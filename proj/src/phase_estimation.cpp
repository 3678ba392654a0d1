#include "tqsvd/phase_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "tqsvd/errors.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

Eigen::VectorXcd phase_kernel_amplitudes(double theta, std::size_t t) {
    const std::size_t big_t = std::size_t{1} << t;
    Eigen::VectorXcd out(static_cast<Eigen::Index>(big_t));
    for (std::size_t c = 0; c < big_t; ++c) {
        const double delta = theta - 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(big_t);
        const cd den = std::exp(cd(0.0, delta)) - 1.0;
        if (std::abs(den) < 1e-13) {
            // On the grid the geometric sum is exactly T.
            out[static_cast<Eigen::Index>(c)] = 1.0;
            continue;
        }
        const cd num = std::exp(cd(0.0, delta * static_cast<double>(big_t))) - 1.0;
        out[static_cast<Eigen::Index>(c)] = num / den / static_cast<double>(big_t);
    }
    return out;
}

Eigen::VectorXd phase_estimate_distribution(double theta, std::size_t t) {
    return phase_kernel_amplitudes(theta, t).cwiseAbs2();
}

Eigen::VectorXd phase_estimate(const Eigen::MatrixXcd& u, const Eigen::VectorXcd& eigenstate,
                               std::size_t t) {
    if (u.rows() != u.cols() || u.rows() != eigenstate.size())
        throw std::invalid_argument("phase_estimate: dimension mismatch");
    const double n = eigenstate.norm();
    if (n == 0.0) throw std::invalid_argument("phase_estimate: zero eigenstate");
    Eigen::VectorXcd psi = eigenstate / n;
    Eigen::VectorXcd upsi = u * psi;
    const cd lambda = psi.dot(upsi);  // Eigen dot conjugates the left factor
    if ((upsi - lambda * psi).norm() > 1e-8)
        throw numeric_error("phase_estimate: state is not an eigenstate of the unitary");
    double theta = std::arg(lambda);
    if (theta < 0.0) theta += 2.0 * M_PI;
    return phase_estimate_distribution(theta, t);
}

std::size_t circular_median(const std::vector<std::size_t>& outcomes, std::size_t t) {
    if (outcomes.empty()) throw std::invalid_argument("circular_median: no outcomes");
    const std::size_t big_t = std::size_t{1} << t;
    // Modal outcome (smallest value wins ties) anchors the cut point.
    std::vector<std::size_t> sorted = outcomes;
    std::sort(sorted.begin(), sorted.end());
    std::size_t mode = sorted[0], best_run = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        if (j - i > best_run) {
            best_run = j - i;
            mode = sorted[i];
        }
        i = j;
    }
    const auto half = static_cast<std::ptrdiff_t>(big_t / 2);
    std::vector<std::ptrdiff_t> dev;
    dev.reserve(outcomes.size());
    for (std::size_t c : outcomes) {
        auto d = static_cast<std::ptrdiff_t>((c + big_t - mode) % big_t);
        if (d >= half) d -= static_cast<std::ptrdiff_t>(big_t);
        dev.push_back(d);
    }
    std::nth_element(dev.begin(), dev.begin() + static_cast<std::ptrdiff_t>((dev.size() - 1) / 2),
                     dev.end());
    const std::ptrdiff_t med = dev[(dev.size() - 1) / 2];
    return static_cast<std::size_t>(
        (static_cast<std::ptrdiff_t>(mode) + med + static_cast<std::ptrdiff_t>(big_t)) %
        static_cast<std::ptrdiff_t>(big_t));
}

std::size_t sample_phase_median(const Eigen::VectorXd& dist, std::size_t repeats, Rng& rng) {
    if (repeats == 0) throw std::invalid_argument("sample_phase_median: need at least one repeat");
    std::vector<double> cum(static_cast<std::size_t>(dist.size()));
    double acc = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        acc += dist[static_cast<Eigen::Index>(i)];
        cum[i] = acc;
    }
    std::vector<std::size_t> outcomes(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
        const double u = rng.next_double() * acc;
        outcomes[r] = static_cast<std::size_t>(
            std::min<std::ptrdiff_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin(),
                                     static_cast<std::ptrdiff_t>(cum.size()) - 1));
    }
    std::size_t t = 0;
    while ((std::size_t{1} << t) < static_cast<std::size_t>(dist.size())) ++t;
    return circular_median(outcomes, t);
}

}  // namespace tqsvd
