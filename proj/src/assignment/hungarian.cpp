#include "beliefgraph/assignment/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace beliefgraph::assignment {

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw AssignmentError("ragged cost matrix");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

namespace {

void check_input(const CostMatrix& c) {
    if (!c.square()) throw AssignmentError("cost matrix must be square after padding");
    for (double v : c.data()) {
        if (!std::isfinite(v)) throw AssignmentError("non-finite entry in cost matrix");
    }
}

}  // namespace

double assignment_cost(const CostMatrix& c, const std::vector<std::size_t>& row_to_col) {
    double total = 0.0;
    for (std::size_t i = 0; i < row_to_col.size(); ++i) total += c(i, row_to_col[i]);
    return total;
}

Solution solve(const CostMatrix& c) {
    check_input(c);
    const std::size_t n = c.rows();
    Solution out;
    if (n == 0) return out;

    // 1-based potentials formulation; p[j] = row matched to column j.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    out.row_to_col.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
    out.cost = assignment_cost(c, out.row_to_col);
    return out;
}

Solution brute_force(const CostMatrix& c) {
    check_input(c);
    const std::size_t n = c.rows();
    if (n > 8) throw AssignmentError("brute_force supports n <= 8");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Solution best{perm, assignment_cost(c, perm)};
    // next_permutation visits permutations in lexicographic order, so the
    // first strict improvement found is the lexicographically smallest optimum.
    while (std::next_permutation(perm.begin(), perm.end())) {
        const double cost = assignment_cost(c, perm);
        if (cost < best.cost) best = {perm, cost};
    }
    return best;
}

CostMatrix pad(const CostMatrix& real, double row_virtual_cost, double col_virtual_cost) {
    const std::size_t r = real.rows();
    const std::size_t k = real.cols();
    const std::size_t n = r + k;
    CostMatrix m(n, n, kForbidden);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < k; ++j) m(i, j) = real(i, j);
        m(i, k + i) = row_virtual_cost;
    }
    for (std::size_t j = 0; j < k; ++j) {
        m(r + j, j) = col_virtual_cost;
        for (std::size_t i = 0; i < r; ++i) m(r + j, k + i) = 0.0;
    }
    return m;
}

PaddedResult solve_padded(const CostMatrix& real, double row_virtual_cost, double col_virtual_cost) {
    PaddedResult out;
    const std::size_t r = real.rows();
    const std::size_t k = real.cols();
    if (r == 0 && k == 0) return out;
    const CostMatrix m = pad(real, row_virtual_cost, col_virtual_cost);
    const Solution s = solve(m);
    std::vector<char> col_taken(k, 0);
    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t j = s.row_to_col[i];
        if (j < k) {
            out.matches.emplace_back(i, j);
            col_taken[j] = 1;
        } else {
            out.unmatched_rows.push_back(i);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (!col_taken[j]) out.unmatched_cols.push_back(j);
    }
    out.cost = s.cost;
    return out;
}

}  // namespace beliefgraph::assignment
