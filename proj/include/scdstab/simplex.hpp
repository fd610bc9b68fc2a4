#ifndef SCDSTAB_SIMPLEX_HPP
#define SCDSTAB_SIMPLEX_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "scdstab/ratmat.hpp"

namespace scdstab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status;
    Rational value;  // objective at optimum (Optimal only)
    RatVec x;        // optimizer in the original free variables
};

/// maximize c^T x  s.t.  A x <= b,  E x = e,  x free.
/// Two-phase rational simplex with Bland's rule; exact, terminating.
class SimplexSolver {
  public:
    static LpResult solve(const RatMat& a, const RatVec& b, const RatMat& eq,
                          const RatVec& eqrhs, const RatVec& c) {
        const std::size_t nfree = c.size();
        // standard form: x = xp - xm >= 0, slacks on inequality rows
        const std::size_t nineq = a.rows();
        const std::size_t rows = nineq + eq.rows();
        const std::size_t nvars = 2 * nfree + nineq;
        RatMat A(rows, nvars);
        RatVec rhs(rows);
        for (std::size_t i = 0; i < nineq; ++i) {
            for (std::size_t j = 0; j < nfree; ++j) {
                A(i, j) = a(i, j);
                A(i, nfree + j) = -a(i, j);
            }
            A(i, 2 * nfree + i) = 1;
            rhs[i] = b[i];
        }
        for (std::size_t i = 0; i < eq.rows(); ++i) {
            for (std::size_t j = 0; j < nfree; ++j) {
                A(nineq + i, j) = eq(i, j);
                A(nineq + i, nfree + j) = -eq(i, j);
            }
            rhs[nineq + i] = eqrhs[i];
        }
        RatVec obj(nvars);
        for (std::size_t j = 0; j < nfree; ++j) {
            obj[j] = c[j];
            obj[nfree + j] = -c[j];
        }
        auto res = solve_standard(A, rhs, obj);
        if (res.status == LpStatus::Optimal) {
            RatVec x(nfree);
            for (std::size_t j = 0; j < nfree; ++j) x[j] = res.x[j] - res.x[nfree + j];
            res.x = std::move(x);
        }
        return res;
    }

    /// Feasibility of { A x <= b, E x = e } over free x.
    static std::optional<RatVec> feasible_point(const RatMat& a, const RatVec& b,
                                                const RatMat& eq, const RatVec& eqrhs,
                                                std::size_t nfree) {
        auto r = solve(a, b, eq, eqrhs, RatVec(nfree));
        if (r.status == LpStatus::Infeasible) return std::nullopt;
        return r.x;
    }

  private:
    // maximize obj^T x s.t. Ax = b, x >= 0
    static LpResult solve_standard(RatMat A, RatVec b, const RatVec& obj) {
        const std::size_t m = A.rows(), n = A.cols();
        for (std::size_t i = 0; i < m; ++i)
            if (b[i] < 0) {
                for (std::size_t j = 0; j < n; ++j) A(i, j) = -A(i, j);
                b[i] = -b[i];
            }
        // phase 1: artificials
        RatMat T(m, n + m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) T(i, j) = A(i, j);
            T(i, n + i) = 1;
        }
        std::vector<std::size_t> basis(m);
        for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
        RatVec rhs = b;
        RatVec cost1(n + m);
        for (std::size_t i = 0; i < m; ++i) cost1[n + i] = -1;
        Rational v1 = run(T, rhs, cost1, basis, n + m);
        if (v1 != 0) return {LpStatus::Infeasible, 0, {}};
        // drive artificials out of the basis where possible
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            std::size_t piv = n;
            for (std::size_t j = 0; j < n; ++j)
                if (T(i, j) != 0) {
                    piv = j;
                    break;
                }
            if (piv == n) continue;  // redundant row; leave the zero artificial
            pivot(T, rhs, basis, i, piv);
        }
        // phase 2 on the original columns
        RatVec cost2(n + m);
        for (std::size_t j = 0; j < n; ++j) cost2[j] = obj[j];
        Rational v2 = run(T, rhs, cost2, basis, n, /*forbid_from=*/n);
        if (unbounded_) return {LpStatus::Unbounded, 0, {}};
        RatVec x(n);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) x[basis[i]] = rhs[i];
        return {LpStatus::Optimal, v2, x};
    }

    static void pivot(RatMat& T, RatVec& rhs, std::vector<std::size_t>& basis,
                      std::size_t row, std::size_t col) {
        const std::size_t m = T.rows(), cols = T.cols();
        Rational p = T(row, col);
        for (std::size_t j = 0; j < cols; ++j) T(row, j) /= p;
        rhs[row] /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || T(i, col) == 0) continue;
            Rational f = T(i, col);
            for (std::size_t j = 0; j < cols; ++j) T(i, j) -= f * T(row, j);
            rhs[i] -= f * rhs[row];
        }
        basis[row] = col;
    }

    // Bland's rule; columns >= forbid_from are never entered (phase-2 artificials).
    static inline thread_local bool unbounded_ = false;
    static Rational run(RatMat& T, RatVec& rhs, const RatVec& cost,
                        std::vector<std::size_t>& basis, std::size_t ncols,
                        std::size_t forbid_from = ~std::size_t(0)) {
        unbounded_ = false;
        const std::size_t m = T.rows();
        while (true) {
            // reduced costs
            RatVec y(m);  // multipliers of basic rows
            for (std::size_t i = 0; i < m; ++i) y[i] = cost[basis[i]];
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols && enter == ncols; ++j) {
                if (j >= forbid_from) break;
                bool basic = false;
                for (auto bj : basis)
                    if (bj == j) basic = true;
                if (basic) continue;
                Rational red = cost[j];
                for (std::size_t i = 0; i < m; ++i) red -= y[i] * T(i, j);
                if (red > 0) enter = j;
            }
            if (enter == ncols) break;
            std::size_t leave = m;
            Rational best = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (T(i, enter) <= 0) continue;
                Rational ratio = rhs[i] / T(i, enter);
                if (leave == m || ratio < best ||
                    (ratio == best && basis[i] < basis[leave]))
                    best = ratio, leave = i;
            }
            if (leave == m) {
                unbounded_ = true;
                return 0;
            }
            pivot(T, rhs, basis, leave, enter);
        }
        Rational v = 0;
        for (std::size_t i = 0; i < m; ++i) v += cost[basis[i]] * rhs[i];
        return v;
    }
};

}  // namespace scdstab

#endif
