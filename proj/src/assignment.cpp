#include "skymot/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "skymot/errors.hpp"

namespace skymot::assoc {

namespace {

// Dense O(n^3) shortest-augmenting-path solver over a square matrix.
// Returns col_of_row plus the dual potentials.
struct SquareSolution {
    std::vector<int> col_of_row;
    std::vector<double> u, v;
    double total = 0.0;
};

SquareSolution solve_square(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);  // p[j]: row (1-based) assigned to col j

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
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
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    SquareSolution sol;
    sol.col_of_row.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) sol.col_of_row[p[j] - 1] = j - 1;
    sol.u = std::move(u);
    sol.v = std::move(v);
    for (int r = 0; r < n; ++r) sol.total += a[r][sol.col_of_row[r]];
    return sol;
}

struct Padded {
    std::vector<std::vector<double>> a;
    double big = 0.0;
    int n = 0;
};

// Square padding; forbidden and padding cells get a cost large enough that
// minimizing total cost first maximizes real-cell cardinality.
Padded pad(const CostMatrix& cost) {
    Padded out;
    out.n = std::max(cost.rows, cost.cols);
    double max_abs = 0.0;
    for (double c : cost.values) {
        if (std::isnan(c)) throw ArgumentError("hungarian: NaN cost entry");
        if (std::isfinite(c)) max_abs = std::max(max_abs, std::abs(c));
    }
    out.big = (max_abs + 1.0) * (2.0 * out.n + 2.0);
    out.a.assign(out.n, std::vector<double>(out.n, out.big));
    for (int r = 0; r < cost.rows; ++r)
        for (int c = 0; c < cost.cols; ++c)
            if (std::isfinite(cost.at(r, c))) out.a[r][c] = cost.at(r, c);
    return out;
}

double solve_total(const std::vector<std::vector<double>>& a) {
    if (a.empty()) return 0.0;
    return solve_square(a).total;
}

// Total of the optimal solution with row `fr` forced onto col `fcol`:
// solve the residual square problem and add the forced cost.
double forced_total(const std::vector<std::vector<double>>& a, int fr, int fc) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<double>> sub;
    sub.reserve(n - 1);
    for (int r = 0; r < n; ++r) {
        if (r == fr) continue;
        std::vector<double> row;
        row.reserve(n - 1);
        for (int c = 0; c < n; ++c)
            if (c != fc) row.push_back(a[r][c]);
        sub.push_back(std::move(row));
    }
    return a[fr][fc] + solve_total(sub);
}

}  // namespace

std::vector<std::pair<int, int>> hungarian(const CostMatrix& cost) {
    if (cost.rows == 0 || cost.cols == 0) return {};
    Padded pd = pad(cost);

    // Lexicographic tie-break: fix rows in ascending order to the smallest
    // column that preserves the optimal total. Only zero-reduced-cost cells
    // can belong to an optimal solution, which keeps the verification solves
    // to actual ties.
    std::vector<std::pair<int, int>> result;
    std::vector<std::vector<double>> rem = pd.a;  // shrinking live submatrix
    std::vector<int> live_cols(pd.n);
    for (int i = 0; i < pd.n; ++i) live_cols[i] = i;
    int orig_row = 0;

    while (!rem.empty()) {
        const SquareSolution cur = solve_square(rem);
        const int base_col = cur.col_of_row[0];
        const double tol = 1e-9 * (std::abs(cur.total) + 1.0);
        int chosen = base_col;
        for (int c = 0; c < base_col; ++c) {
            const double reduced = rem[0][c] - cur.u[1] - cur.v[c + 1];
            if (reduced > tol) continue;
            if (std::abs(forced_total(rem, 0, c) - cur.total) <= tol) {
                chosen = c;
                break;
            }
        }
        const int orig_col = live_cols[chosen];
        if (orig_row < cost.rows && orig_col < cost.cols && std::isfinite(cost.at(orig_row, orig_col)))
            result.emplace_back(orig_row, orig_col);

        ++orig_row;
        live_cols.erase(live_cols.begin() + chosen);
        rem.erase(rem.begin());
        for (auto& row : rem) row.erase(row.begin() + chosen);
    }
    return result;
}

double assignment_cost(const CostMatrix& cost, const std::vector<std::pair<int, int>>& pairs) {
    double total = 0.0;
    for (const auto& [r, c] : pairs) total += cost.at(r, c);
    return total;
}

}  // namespace skymot::assoc
