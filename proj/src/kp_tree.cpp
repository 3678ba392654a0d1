#include "tqsvd/kp_tree.hpp"

#include <cmath>
#include <stdexcept>

namespace tqsvd {

std::size_t KpTree::pow2_at_least(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

KpTree::KpTree(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("KpTree needs a nonempty shape");
    row_leaves_ = pow2_at_least(rows);
    col_leaves_ = pow2_at_least(cols);
    row_trees_.assign(rows, std::vector<double>(2 * col_leaves_, 0.0));
    norm_tree_.assign(2 * row_leaves_, 0.0);
    values_.assign(rows, std::vector<cd>(cols, cd(0.0, 0.0)));
}

KpTree::KpTree(const Eigen::MatrixXcd& a)
    : KpTree(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols())) {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            update(i, j, a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
}

void KpTree::check_indices(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::invalid_argument("KpTree index out of range");
}

void KpTree::update(std::size_t i, std::size_t j, cd value) {
    check_indices(i, j);
    values_[i][j] = value;
    std::vector<double>& tree = row_trees_[i];
    std::size_t p = col_leaves_ + j;
    tree[p] = std::norm(value);
    for (p >>= 1; p >= 1; p >>= 1) tree[p] = tree[2 * p] + tree[2 * p + 1];
    std::size_t q = row_leaves_ + i;
    norm_tree_[q] = tree[1];
    for (q >>= 1; q >= 1; q >>= 1) norm_tree_[q] = norm_tree_[2 * q] + norm_tree_[2 * q + 1];
}

cd KpTree::entry(std::size_t i, std::size_t j) const {
    check_indices(i, j);
    return values_[i][j];
}

double KpTree::row_weight(std::size_t i) const {
    check_indices(i, 0);
    return row_trees_[i][1];
}

double KpTree::total_weight() const { return norm_tree_[1]; }

std::size_t KpTree::descend(const std::vector<double>& tree, std::size_t leaves, double u) {
    std::size_t p = 1;
    while (p < leaves) {
        const double left = tree[2 * p];
        if (u < left) {
            p = 2 * p;
        } else {
            u -= left;
            p = 2 * p + 1;
        }
    }
    return p - leaves;
}

std::size_t KpTree::sample_row(Rng& rng) const {
    const double total = total_weight();
    if (total <= 0.0) throw std::invalid_argument("cannot sample a row of the zero matrix");
    std::size_t i = descend(norm_tree_, row_leaves_, rng.next_double() * total);
    return std::min(i, rows_ - 1);
}

std::size_t KpTree::sample_in_row(std::size_t i, Rng& rng) const {
    check_indices(i, 0);
    const double w = row_trees_[i][1];
    if (w <= 0.0) throw std::invalid_argument("cannot sample within a zero row");
    std::size_t j = descend(row_trees_[i], col_leaves_, rng.next_double() * w);
    return std::min(j, cols_ - 1);
}

Eigen::VectorXcd KpTree::row_state(std::size_t i) const {
    check_indices(i, 0);
    const double w = row_trees_[i][1];
    if (w <= 0.0) throw std::invalid_argument("zero row has no state");
    Eigen::VectorXcd out(static_cast<Eigen::Index>(cols_));
    const double inv = 1.0 / std::sqrt(w);
    for (std::size_t j = 0; j < cols_; ++j) out[static_cast<Eigen::Index>(j)] = values_[i][j] * inv;
    return out;
}

}  // namespace tqsvd
