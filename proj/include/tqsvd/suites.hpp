#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tqsvd/config.hpp"
#include "tqsvd/report.hpp"

namespace tqsvd {

// Named verification suites.  Each pins the scale, tolerances, and runtime
// budget of one release gate; a config can override the scale knobs for
// exploratory runs, but the defaults ARE the gate.
//
//   convolution      cyclic convolution diagonalizes under the DFT
//   tsvd             factor orthogonality, reconstruction, spectra ordering
//   truncation       multi-rank truncation optimality and its error formula
//   threshold        tail-derived threshold keeps error within twice the tail
//   walk             two-reflection walk eigenphases encode singular values
//   sve-circuit      circuit-mode estimation hits the oracle rounding
//   tensor-sve       per-slice estimates recombine into the tube spectrum
//   recommend        sampling pipeline matches its classical reference
//   recommend-bound  Monte-Carlo bad-recommendation rate respects the bound
//   completion       global-threshold variant and its matrix reduction
//   kp-tree          prefix-sum tree invariants and sampling frequencies
std::vector<std::string> suite_names();

SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      const ExperimentConfig* cfg = nullptr);

// Which suites an experiment kind executes.
std::vector<std::string> suites_for_kind(ExperimentKind kind);

RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace tqsvd
