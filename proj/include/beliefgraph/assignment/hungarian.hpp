#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace beliefgraph::assignment {

class AssignmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major cost matrix.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    CostMatrix(std::initializer_list<std::initializer_list<double>> init);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Finite stand-in for a forbidden pairing in padded matrices.
inline constexpr double kForbidden = 1e9;

/// Result over a square matrix: row i is assigned column `row_to_col[i]`.
struct Solution {
    std::vector<std::size_t> row_to_col;
    double cost = 0.0;
};

/// Minimum-cost perfect matching on a square matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Throws on non-finite entries or non-square input.
Solution solve(const CostMatrix& c);

/// Exhaustive minimum over all n! permutations, n <= 8. Among optimal
/// permutations returns the lexicographically smallest row mapping.
Solution brute_force(const CostMatrix& c);

/// Sum of c(i, row_to_col[i]) in row order.
double assignment_cost(const CostMatrix& c, const std::vector<std::size_t>& row_to_col);

/// Match/birth/death decomposition of a padded rectangular problem.
struct PaddedResult {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col) over real entries
    std::vector<std::size_t> unmatched_rows;                    // rows sent to their virtual column
    std::vector<std::size_t> unmatched_cols;                    // cols taken by their virtual row
    double cost = 0.0;
};

/// Solves a rows x cols real cost block padded to (rows+cols) square: each row
/// may instead take a private virtual column at `row_virtual_cost`, and each
/// column a private virtual row at `col_virtual_cost`.
PaddedResult solve_padded(const CostMatrix& real, double row_virtual_cost, double col_virtual_cost);

/// Builds the square padded matrix used by solve_padded.
CostMatrix pad(const CostMatrix& real, double row_virtual_cost, double col_virtual_cost);

}  // namespace beliefgraph::assignment
