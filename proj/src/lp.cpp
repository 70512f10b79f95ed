#include "rambig/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rambig {

namespace {

constexpr double kPivotTol = 1e-12;

// Row-major tableau; the last column is the right-hand side and the last
// row holds reduced costs (objective row).
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& cost(std::size_t c) { return at(rows_, c); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
        }
        basis_[pr] = pc;
    }

    // Minimizes over columns [0, allowed); returns false when unbounded.
    bool optimize(std::size_t allowed) {
        while (true) {
            std::size_t enter = allowed;
            for (std::size_t c = 0; c < allowed; ++c) {
                if (cost(c) < -1e-11) {
                    enter = c;
                    break;
                }
            }
            if (enter == allowed) return true;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                if (at(r, enter) > kPivotTol) {
                    double ratio = rhs(r) / at(r, enter);
                    if (ratio < best - 1e-14 ||
                        (std::abs(ratio - best) <= 1e-14 && leave < rows_ &&
                         basis_[r] < basis_[leave])) {
                        best = ratio;
                        leave = r;
                    }
                }
            }
            if (leave == rows_) return false;
            pivot(leave, enter);
        }
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

} // namespace

LpSolution solve_dense_lp(const DenseLp& lp) {
    const std::size_t n = lp.cost.size();
    const std::size_t m_eq = lp.eq_rows.size();
    const std::size_t m_ub = lp.ub_rows.size();
    if (lp.eq_rhs.size() != m_eq || lp.ub_rhs.size() != m_ub)
        throw std::invalid_argument("solve_dense_lp: right-hand side size mismatch");
    const std::size_t m = m_eq + m_ub;
    // columns: original, slacks (one per ub row), artificials (one per row)
    const std::size_t slack0 = n, art0 = n + m_ub, total = n + m_ub + m;

    Tableau t(m, total);
    for (std::size_t r = 0; r < m; ++r) {
        const bool is_eq = r < m_eq;
        const numvec& row = is_eq ? lp.eq_rows[r] : lp.ub_rows[r - m_eq];
        if (row.size() != n) throw std::invalid_argument("solve_dense_lp: row size mismatch");
        double b = is_eq ? lp.eq_rhs[r] : lp.ub_rhs[r - m_eq];
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * row[c];
        if (!is_eq) t.at(r, slack0 + (r - m_eq)) = sign;
        t.at(r, art0 + r) = 1.0;
        t.rhs(r) = sign * b;
        t.basis()[r] = art0 + r;
    }

    // phase 1: minimize the sum of artificials
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c <= total; ++c)
            if (c < art0 || c == total) t.cost(c) -= t.at(r, c);
    t.optimize(total);

    LpSolution sol;
    if (-t.cost(total) > 1e-9) {
        sol.status = LpSolution::Status::Infeasible;
        return sol;
    }
    // drive zero-level artificials out of the basis where possible
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis()[r] < art0) continue;
        for (std::size_t c = 0; c < art0; ++c) {
            if (std::abs(t.at(r, c)) > 1e-9) {
                t.pivot(r, c);
                break;
            }
        }
    }

    // phase 2 objective in terms of the current basis
    for (std::size_t c = 0; c <= total; ++c) t.cost(c) = 0.0;
    for (std::size_t c = 0; c < n; ++c) t.cost(c) = lp.cost[c];
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = t.basis()[r];
        const double cb = b < n ? lp.cost[b] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= total; ++c) t.cost(c) -= cb * t.at(r, c);
    }
    if (!t.optimize(art0)) {
        sol.status = LpSolution::Status::Unbounded;
        return sol;
    }

    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (t.basis()[r] < n) sol.x[t.basis()[r]] = t.rhs(r);
    sol.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c) sol.objective += lp.cost[c] * sol.x[c];
    return sol;
}

} // namespace rambig
