#include "tqsvd/generators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tqsvd/errors.hpp"
#include "tqsvd/fft.hpp"
#include "tqsvd/rng.hpp"

namespace tqsvd {

namespace {

Eigen::MatrixXcd random_rank_slice(std::size_t n1, std::size_t n2, std::size_t r, bool real_only,
                                   Rng& rng) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n1, n2);
  if (r == 0) return out;
  Eigen::MatrixXcd left(n1, r), right(r, n2);
  for (Eigen::Index i = 0; i < left.rows(); ++i)
    for (Eigen::Index j = 0; j < left.cols(); ++j)
      left(i, j) = cd(rng.next_gaussian(), real_only ? 0.0 : rng.next_gaussian());
  for (Eigen::Index i = 0; i < right.rows(); ++i)
    for (Eigen::Index j = 0; j < right.cols(); ++j)
      right(i, j) = cd(rng.next_gaussian(), real_only ? 0.0 : rng.next_gaussian());
  out = left * right;
  return out;
}

}  // namespace

DenseTensor generate_low_multirank_tensor(std::size_t n1, std::size_t n2, std::size_t n3,
                                          const MultiRank& targets, std::uint64_t seed) {
  if (n1 == 0 || n2 == 0 || n3 == 0) throw std::invalid_argument("empty tensor dimensions");
  if (targets.size() != n3) throw std::invalid_argument("need one rank target per hat slice");
  const std::size_t rmax = std::min(n1, n2);
  for (std::size_t m = 0; m < n3; ++m) {
    if (targets[m] > rmax) throw std::invalid_argument("rank target exceeds slice dimensions");
    if (targets[m] != targets[(n3 - m) % n3])
      throw std::invalid_argument("rank targets must match on conjugate slice pairs");
  }

  Rng rng(seed);
  ComplexTensor hat(n1, n2, n3);
  for (std::size_t m = 0; m <= n3 / 2; ++m) {
    const bool self_paired = (m == 0) || (2 * m == n3);
    Eigen::MatrixXcd s = random_rank_slice(n1, n2, targets[m], self_paired, rng);
    hat.slice(m) = s;
    const std::size_t mirror = (n3 - m) % n3;
    if (mirror != m) hat.slice(mirror) = s.conjugate();
  }
  return to_real_checked(ifft_trailing_modes(hat));
}

DenseTensor generate_preference_tensor(std::size_t n, std::size_t k, double gamma,
                                       std::uint64_t seed) {
  if (n < 2 || k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= N and N >= 2");
  if (gamma <= 0.0) throw infeasible_error("typicality band is empty for gamma <= 0");

  // Per-context popularity counts drawn from [c0/t, c0*t] with t = sqrt(1+gamma):
  // every count is then within (1+gamma) of their mean in ratio, which is the
  // fiber-norm typicality band because each user's context fiber has norm^2 = c_m.
  const double c0 = static_cast<double>(n) / 2.0;
  const double t = std::sqrt(1.0 + gamma);
  const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(c0 / t)));
  const auto hi = static_cast<std::size_t>(std::min(static_cast<double>(n), std::floor(c0 * t)));
  if (lo > hi) throw infeasible_error("no popularity count fits the typicality band");

  Rng rng(seed);
  DenseTensor out(n, n, n);
  std::vector<std::size_t> perm(n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t count = lo + rng.next_below(hi - lo + 1);
    // k archetype rows for this context, each liking `count` products.
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t j = 0; j < n; ++j) perm[j] = j;
      for (std::size_t j = n; j > 1; --j) std::swap(perm[j - 1], perm[rng.next_below(j)]);
      for (std::size_t i = r; i < n; i += k)  // users assigned round-robin
        for (std::size_t c = 0; c < count; ++c) out.at(i, perm[c], m) = 1.0;
    }
  }
  return out;
}

}  // namespace tqsvd
