#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tqsvd/rng.hpp"
#include "tqsvd/tensor.hpp"

namespace tqsvd {

// Sampling-ready matrix store: one flat segment tree of squared magnitudes per
// row plus one tree over row norms, with the complex entries kept at the
// leaves.  Point updates touch one root-to-leaf path per tree; weighted
// sampling descends the same paths.  This is the classical data structure the
// state-preparation oracles of the pipeline assume.
class KpTree {
  public:
    KpTree(std::size_t rows, std::size_t cols);  // zero matrix
    explicit KpTree(const Eigen::MatrixXcd& a);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void update(std::size_t i, std::size_t j, cd value);
    cd entry(std::size_t i, std::size_t j) const;

    double row_weight(std::size_t i) const;  // ||A(i,:)||_2^2
    double total_weight() const;             // ||A||_F^2

    std::size_t sample_row(Rng& rng) const;                    // P(i) ∝ row_weight(i)
    std::size_t sample_in_row(std::size_t i, Rng& rng) const;  // P(j) ∝ |A(i,j)|^2

    // Normalized row as a state vector (phases preserved); zero row -> invalid_argument.
    Eigen::VectorXcd row_state(std::size_t i) const;

  private:
    void check_indices(std::size_t i, std::size_t j) const;
    static std::size_t pow2_at_least(std::size_t n);
    static std::size_t descend(const std::vector<double>& tree, std::size_t leaves, double u);

    std::size_t rows_ = 0, cols_ = 0;
    std::size_t row_leaves_ = 1, col_leaves_ = 1;   // padded leaf counts
    std::vector<std::vector<double>> row_trees_;    // per-row trees, size 2*col_leaves_
    std::vector<double> norm_tree_;                 // over rows, size 2*row_leaves_
    std::vector<std::vector<cd>> values_;           // exact complex entries
};

}  // namespace tqsvd
