#pragma once

#include <stdexcept>
#include <string>

namespace tqsvd {

// An ifft result that should have been real carried too much imaginary mass,
// or a checked linear-algebra identity failed beyond tolerance.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Postselection on an outcome whose probability is (numerically) zero.
struct postselection_error : std::runtime_error {
    explicit postselection_error(const std::string& what) : std::runtime_error(what) {}
};

// A generator or bound was asked for parameters with an empty feasible set.
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// Register layout would exceed the simulator qubit cap.
struct qubit_cap_error : std::runtime_error {
    explicit qubit_cap_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or out-of-domain experiment configuration (CLI exit code 2).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// Every slice was truncated away; the pipeline has nothing to recommend.
struct empty_recommendation_error : std::runtime_error {
    explicit empty_recommendation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tqsvd
