#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace skymot::assoc {

// Rectangular assignment cost matrix in doubles. Cells set to forbidden()
// can never be assigned; everything else must be finite.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }

    static constexpr double forbidden() { return std::numeric_limits<double>::infinity(); }
};

// Minimum-cost assignment with maximum cardinality first. Rows whose allowed
// cells are all forbidden stay unassigned. Among equal-cost optima the result
// is the lexicographically smallest (row, col) pair list.
std::vector<std::pair<int, int>> hungarian(const CostMatrix& cost);

double assignment_cost(const CostMatrix& cost, const std::vector<std::pair<int, int>>& pairs);

}  // namespace skymot::assoc
