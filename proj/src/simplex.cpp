#include "cmek/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmek/error.hpp"

namespace cmek {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

/// Dense LU with partial pivoting, row-major n x n.
class Lu {
public:
    explicit Lu(std::vector<double> a, std::size_t n) : n_(n), a_(std::move(a)), perm_(n) {
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i) {
                if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
            }
            if (std::abs(at(piv, k)) < 1e-14) throw Error("simplex basis became singular");
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = at(i, k) / at(k, k);
                at(i, k) = f;
                if (f == 0.0) continue;
                for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
            }
        }
    }

    /// Solves B x = rhs.
    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j) x[i] -= at(i, j) * x[j];
        }
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t j = i + 1; j < n_; ++j) x[i] -= at(i, j) * x[j];
            x[i] /= at(i, i);
        }
        return x;
    }

    /// Solves B^T y = rhs.
    std::vector<double> solve_transposed(std::span<const double> rhs) const {
        std::vector<double> z(rhs.begin(), rhs.end());
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < i; ++j) z[i] -= at(j, i) * z[j];
            z[i] /= at(i, i);
        }
        for (std::size_t i = n_; i-- > 0;) {
            for (std::size_t j = i + 1; j < n_; ++j) z[i] -= at(j, i) * z[j];
        }
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) y[perm_[i]] = z[i];
        return y;
    }

private:
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::size_t n_;
    std::vector<double> a_;
    std::vector<std::size_t> perm_;
};

/// Standard-form LP  min c.x, A x = b, x >= 0  with A stored densely by column.
struct StandardForm {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::vector<double>> column;  ///< column[j][i] = A(i, j)
    std::vector<double> cost;
    std::vector<double> rhs;
};

class Tableau {
public:
    Tableau(const StandardForm& lp, std::vector<std::size_t> basis) : lp_(lp), basis_(std::move(basis)) {
        rebuild();
    }

    /// Runs primal simplex pivots to optimality. Returns pivot count.
    std::size_t optimize(std::size_t max_pivots) {
        std::size_t pivots = 0;
        std::size_t degenerate_run = 0;
        for (;;) {
            const bool bland = degenerate_run > 50;
            std::size_t enter = lp_.cols;
            double best = -kCostTol;
            for (std::size_t j = 0; j < lp_.cols; ++j) {
                if (is_basic_[j]) continue;
                if (reduced_[j] < best) {
                    enter = j;
                    if (bland) break;
                    best = reduced_[j];
                }
            }
            if (enter == lp_.cols) return pivots;

            std::size_t leave = lp_.rows;
            double ratio = 0.0;
            for (std::size_t r = 0; r < lp_.rows; ++r) {
                const double a = t(r, enter);
                if (a <= kPivotTol) continue;
                const double q = std::max(rhs_[r], 0.0) / a;
                if (leave == lp_.rows || q < ratio - 1e-15 ||
                    (q <= ratio + 1e-15 && basis_[r] < basis_[leave])) {
                    leave = r;
                    ratio = q;
                }
            }
            if (leave == lp_.rows) throw Error("simplex: objective unbounded below");

            degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
            pivot(leave, enter);
            if (++pivots > max_pivots) throw Error("simplex: pivot limit reached");
        }
    }

    /// Recomputes the tableau from the original data and the current basis.
    void rebuild() {
        const std::size_t m = lp_.rows;
        std::vector<double> b(m * m);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t i = 0; i < m; ++i) b[i * m + r] = lp_.column[basis_[r]][i];
        }
        const Lu lu(std::move(b), m);

        table_.assign(m * lp_.cols, 0.0);
        for (std::size_t j = 0; j < lp_.cols; ++j) {
            const auto col = lu.solve(lp_.column[j]);
            for (std::size_t r = 0; r < m; ++r) t(r, j) = col[r];
        }
        rhs_ = lu.solve(lp_.rhs);

        std::vector<double> cb(m);
        for (std::size_t r = 0; r < m; ++r) cb[r] = lp_.cost[basis_[r]];
        duals_ = lu.solve_transposed(cb);
        reduced_.assign(lp_.cols, 0.0);
        for (std::size_t j = 0; j < lp_.cols; ++j) {
            double s = lp_.cost[j];
            for (std::size_t i = 0; i < m; ++i) s -= duals_[i] * lp_.column[j][i];
            reduced_[j] = s;
        }
        is_basic_.assign(lp_.cols, false);
        for (auto j : basis_) {
            is_basic_[j] = true;
            reduced_[j] = 0.0;
        }
    }

    const std::vector<std::size_t>& basis() const { return basis_; }
    const std::vector<double>& rhs() const { return rhs_; }
    const std::vector<double>& duals() const { return duals_; }
    const std::vector<double>& reduced() const { return reduced_; }
    bool is_basic(std::size_t j) const { return is_basic_[j]; }

private:
    double& t(std::size_t r, std::size_t j) { return table_[r * lp_.cols + j]; }

    void pivot(std::size_t leave, std::size_t enter) {
        const std::size_t n = lp_.cols;
        const double p = t(leave, enter);
        double* prow = &table_[leave * n];
        for (std::size_t j = 0; j < n; ++j) prow[j] /= p;
        rhs_[leave] /= p;
        prow[enter] = 1.0;
        for (std::size_t r = 0; r < lp_.rows; ++r) {
            if (r == leave) continue;
            const double f = t(r, enter);
            if (f == 0.0) continue;
            double* row = &table_[r * n];
            for (std::size_t j = 0; j < n; ++j) row[j] -= f * prow[j];
            row[enter] = 0.0;
            rhs_[r] -= f * rhs_[leave];
        }
        const double f = reduced_[enter];
        for (std::size_t j = 0; j < n; ++j) reduced_[j] -= f * prow[j];
        reduced_[enter] = 0.0;

        is_basic_[basis_[leave]] = false;
        is_basic_[enter] = true;
        basis_[leave] = enter;
    }

    const StandardForm& lp_;
    std::vector<std::size_t> basis_;
    std::vector<double> table_;
    std::vector<double> rhs_;
    std::vector<double> duals_;
    std::vector<double> reduced_;
    std::vector<bool> is_basic_;
};

}  // namespace

LadSolution solve_nonnegative_lad(const std::vector<std::vector<double>>& design,
                                  std::span<const double> targets, double gap_tolerance) {
    const std::size_t n = design.size();
    if (n == 0) throw Error("LAD fit needs at least one observation");
    if (targets.size() != n) throw Error("LAD fit: design and target sizes differ");
    const std::size_t p = design.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        if (design[i].size() != p) throw Error("LAD fit: ragged design matrix");
        if (!std::isfinite(targets[i])) throw Error("LAD fit: non-finite target");
        for (double v : design[i]) {
            if (!std::isfinite(v)) throw Error("LAD fit: non-finite feature");
        }
    }

    // Columns: beta_0..beta_{p-1}, u_0..u_{n-1}, v_0..v_{n-1}. Rows with a
    // negative target are negated so the slack basis starts feasible.
    StandardForm lp;
    lp.rows = n;
    lp.cols = p + 2 * n;
    lp.column.assign(lp.cols, std::vector<double>(n, 0.0));
    lp.cost.assign(lp.cols, 0.0);
    lp.rhs.resize(n);
    std::vector<double> sign(n);
    std::vector<std::size_t> basis(n);
    for (std::size_t i = 0; i < n; ++i) {
        sign[i] = targets[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < p; ++j) lp.column[j][i] = sign[i] * design[i][j];
        lp.column[p + i][i] = sign[i];
        lp.column[p + n + i][i] = -sign[i];
        lp.rhs[i] = sign[i] * targets[i];
        lp.cost[p + i] = 1.0;
        lp.cost[p + n + i] = 1.0;
        basis[i] = sign[i] > 0.0 ? p + i : p + n + i;
    }

    Tableau tableau(lp, basis);
    LadSolution sol;
    const std::size_t max_pivots = 50 * (lp.rows + lp.cols);
    for (int round = 0;; ++round) {
        sol.pivots += tableau.optimize(max_pivots);
        tableau.rebuild();
        const auto& rc = tableau.reduced();
        const double worst_rc = *std::min_element(rc.begin(), rc.end());
        const double worst_x = *std::min_element(tableau.rhs().begin(), tableau.rhs().end());
        if ((worst_rc >= -kCostTol && worst_x >= -1e-12) || round >= 4) break;
    }

    sol.coefficients.assign(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t j = tableau.basis()[r];
        if (j < p) sol.coefficients[j] = std::max(tableau.rhs()[r], 0.0);
    }

    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += design[i][j] * sol.coefficients[j];
        sol.objective += std::abs(targets[i] - fit);
    }

    // Dual of the LAD program:  max y . xi  s.t. |y_i| <= 1, sum_i y_i x_ij <= 0.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = sign[i] * tableau.duals()[i];
    for (std::size_t i = 0; i < n; ++i) {
        sol.dual_infeasibility = std::max(sol.dual_infeasibility, std::abs(y[i]) - 1.0);
        y[i] = std::clamp(y[i], -1.0, 1.0);
    }
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += y[i] * design[i][j];
        sol.dual_infeasibility = std::max(sol.dual_infeasibility, s);
    }
    for (std::size_t i = 0; i < n; ++i) sol.dual_bound += y[i] * targets[i];

    for (std::size_t j = 0; j < p; ++j) {
        if (!tableau.is_basic(j) && std::abs(tableau.reduced()[j]) <= 1e-10) sol.alternative_optima = true;
    }

    const double gap = sol.objective - sol.dual_bound;
    if (gap > gap_tolerance || sol.dual_infeasibility > 1e-9) {
        throw Error("LAD fit not certified: gap " + std::to_string(gap) + ", dual infeasibility " +
                    std::to_string(sol.dual_infeasibility) + " after " + std::to_string(sol.pivots) +
                    " pivots");
    }
    return sol;
}

}  // namespace cmek
