#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace aesa {

/// Result of a rectangular linear assignment.
struct Assignment {
    std::vector<int> row_to_col;  ///< -1 when the row is left unassigned
    double total_cost = 0.0;      ///< summed in row order
};

namespace detail {

// Shortest augmenting path Hungarian method with row/column potentials,
// O(rows^2 * cols). Requires rows <= cols; every row gets a column.
inline std::vector<int> hungarian_rows_le_cols(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);  // match[j]: row (1-based) owning column j

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace detail

/// Minimum-cost assignment of min(rows, cols) pairs (Munkres / Hungarian).
/// Costs must be finite.
inline Assignment solve_assignment(const Eigen::MatrixXd& cost) {
    Assignment out;
    const auto rows = cost.rows();
    const auto cols = cost.cols();
    out.row_to_col.assign(static_cast<std::size_t>(rows), -1);
    if (rows == 0 || cols == 0) return out;

    if (rows <= cols) {
        out.row_to_col = detail::hungarian_rows_le_cols(cost);
    } else {
        const std::vector<int> col_to_row = detail::hungarian_rows_le_cols(cost.transpose());
        for (int j = 0; j < static_cast<int>(col_to_row.size()); ++j)
            out.row_to_col[static_cast<std::size_t>(col_to_row[j])] = j;
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        const int j = out.row_to_col[static_cast<std::size_t>(i)];
        if (j >= 0) out.total_cost += cost(i, j);
    }
    return out;
}

/// Assignment restricted to pairs with cost <= gate, partitioning both sides.
struct GatedAssignment {
    std::vector<std::pair<int, int>> pairs;  ///< (row, col), ascending row
    std::vector<int> unassigned_rows;
    std::vector<int> unassigned_cols;
    double total_cost = 0.0;
};

/// Largest set of in-gate pairs, and among those the cheapest.
///
/// Out-of-gate entries are replaced by a penalty larger than any sum of
/// admissible costs, so the solver first minimises the number of forbidden
/// pairs it is forced to use and only then the admissible cost.
inline GatedAssignment assign_gated(const Eigen::MatrixXd& cost, double gate) {
    GatedAssignment out;
    const auto rows = cost.rows();
    const auto cols = cost.cols();

    Eigen::MatrixXd work = cost;
    double max_allowed = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (std::isfinite(cost(i, j)) && cost(i, j) <= gate)
                max_allowed = std::max(max_allowed, std::abs(cost(i, j)));
    const double penalty = 2.0 * (static_cast<double>(std::min(rows, cols)) + 1.0) * (max_allowed + 1.0);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!std::isfinite(cost(i, j)) || cost(i, j) > gate) work(i, j) = penalty;

    const Assignment full = solve_assignment(work);
    std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const int j = full.row_to_col[static_cast<std::size_t>(i)];
        if (j >= 0 && std::isfinite(cost(i, j)) && cost(i, j) <= gate) {
            out.pairs.emplace_back(static_cast<int>(i), j);
            out.total_cost += cost(i, j);
            col_used[static_cast<std::size_t>(j)] = 1;
        } else {
            out.unassigned_rows.push_back(static_cast<int>(i));
        }
    }
    for (Eigen::Index j = 0; j < cols; ++j)
        if (!col_used[static_cast<std::size_t>(j)]) out.unassigned_cols.push_back(static_cast<int>(j));
    return out;
}

}  // namespace aesa
