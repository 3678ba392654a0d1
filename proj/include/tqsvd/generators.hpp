#pragma once

#include <cstdint>

#include "tqsvd/tensor.hpp"
#include "tqsvd/tsvd.hpp"

namespace tqsvd {

// Real tensor whose hat slices have exactly the requested ranks.  Targets
// must respect the conjugate-pair symmetry target[m] == target[(N3-m) % N3]
// and fit within min(n1, n2); otherwise invalid_argument.
DenseTensor generate_low_multirank_tensor(std::size_t n1, std::size_t n2, std::size_t n3,
                                          const MultiRank& targets, std::uint64_t seed);

// Binary preference tensor with N users, N products, N contexts built from k
// user archetypes.  Every archetype keeps the same per-context popularity
// count, drawn so each fiber norm sits inside the (1+gamma) typicality band
// around ||T||_F^2 / N^2; per-context hat slices then have rank <= k.
// gamma <= 0 (band collapses) or an empty count band -> infeasible_error.
DenseTensor generate_preference_tensor(std::size_t n, std::size_t k, double gamma,
                                       std::uint64_t seed);

}  // namespace tqsvd
