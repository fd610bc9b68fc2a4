#ifndef SCDSTAB_SUBSPACE_HPP
#define SCDSTAB_SUBSPACE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scdstab/ratmat.hpp"

namespace scdstab {

using DVec = std::vector<double>;
using DMat = std::vector<DVec>;  // list of vectors (columns of a basis matrix)

inline double ddot(const DVec& a, const DVec& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double dnorm(const DVec& a) { return std::sqrt(ddot(a, a)); }

namespace detail {

/// Twice-is-enough Gram-Schmidt with column pivoting. Rank cut at
/// 1e-10 relative to the largest input column norm.
inline DMat orthonormalize(DMat cols) {
    double maxnorm = 0;
    for (const auto& c : cols) maxnorm = std::max(maxnorm, dnorm(c));
    if (maxnorm == 0) return {};
    const double cut = 1e-10 * maxnorm;
    DMat basis;
    while (!cols.empty()) {
        std::size_t best = 0;
        double bestn = -1;
        for (std::size_t j = 0; j < cols.size(); ++j) {
            double n = dnorm(cols[j]);
            if (n > bestn) {
                bestn = n;
                best = j;
            }
        }
        if (bestn <= cut) break;
        DVec v = cols[best];
        cols.erase(cols.begin() + best);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                double c = ddot(v, b);
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
            }
        double n = dnorm(v);
        if (n <= cut) continue;
        for (auto& x : v) x /= n;
        // deflate remaining columns so pivoting sees residual mass only
        for (auto& c : cols) {
            double s = ddot(c, v);
            for (std::size_t i = 0; i < c.size(); ++i) c[i] -= s * v[i];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Largest |eigenvalue| of a symmetric matrix by cyclic Jacobi sweeps.
inline double jacobi_spectral_norm(std::vector<DVec> a) {
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off <= 1e-12 * 1e-12) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
    }
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i][i]));
    return m;
}

}  // namespace detail

/// An element of Z_nm: a subspace of R^(n+m) with a declared (n,m) split,
/// stored by orthonormal basis. Zero-dimensional subspaces are first-class
/// (empty basis). Immutable after construction.
class Subspace {
  public:
    Subspace(std::size_t ambient, std::pair<std::size_t, std::size_t> split)
        : ambient_(ambient), split_(split) {
        if (split.first + split.second != ambient)
            throw std::invalid_argument("split does not sum to ambient dimension");
    }

    /// Orthonormalized span of the given columns. Dimension = numerical rank.
    static Subspace from_spanning(const DMat& columns,
                                  std::pair<std::size_t, std::size_t> split) {
        if (columns.empty())
            throw std::invalid_argument("zero subspace requires explicit dimension 0");
        Subspace s(columns[0].size(), split);
        s.basis_ = detail::orthonormalize(columns);
        if (s.basis_.empty())
            throw std::invalid_argument("zero subspace requires explicit dimension 0");
        return s;
    }

    /// Exact spanning columns converted to floating point, then orthonormalized.
    /// Empty input yields the zero subspace.
    static Subspace from_rational_span(const RatMat& span,
                                       std::size_t ambient,
                                       std::pair<std::size_t, std::size_t> split) {
        Subspace s(ambient, split);
        DMat cols;
        for (std::size_t j = 0; j < span.cols(); ++j) {
            DVec c(span.rows());
            for (std::size_t i = 0; i < span.rows(); ++i) c[i] = to_double(span(i, j));
            cols.push_back(std::move(c));
        }
        s.basis_ = detail::orthonormalize(cols);
        return s;
    }

    std::size_t ambient_dim() const { return ambient_; }
    std::pair<std::size_t, std::size_t> split() const { return split_; }
    std::size_t dim() const { return basis_.size(); }
    const DMat& basis() const { return basis_; }

    /// P = Z Z^T; symmetric, idempotent, trace = dim.
    std::vector<DVec> projection() const {
        std::vector<DVec> p(ambient_, DVec(ambient_, 0.0));
        for (const auto& b : basis_)
            for (std::size_t i = 0; i < ambient_; ++i)
                for (std::size_t j = 0; j < ambient_; ++j) p[i][j] += b[i] * b[j];
        return p;
    }

    /// dim(L) + dim(complement) = ambient; same split.
    Subspace complement() const {
        Subspace c(ambient_, split_);
        DMat accum = basis_;  // orthonormal; extend by deflated coordinate vectors
        for (std::size_t i = 0; i < ambient_ && accum.size() < ambient_; ++i) {
            DVec v(ambient_, 0.0);
            v[i] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& b : accum) {
                    double s = ddot(v, b);
                    for (std::size_t j = 0; j < ambient_; ++j) v[j] -= s * b[j];
                }
            double n = dnorm(v);
            if (n <= 1e-10) continue;
            for (auto& x : v) x /= n;
            accum.push_back(std::move(v));
            c.basis_.push_back(accum.back());
        }
        return c;
    }

    /// L* = S_nm L-perp with S_nm = [[0, -I_m],[I_n, 0]]; requires L in Z_nm.
    Subspace adjoint() const {
        const std::size_t n = split_.first, m = split_.second;
        if (dim() != n)
            throw std::invalid_argument("adjoint requires dim(L) = n of the (n,m) split");
        Subspace perp = complement();
        Subspace a(ambient_, {m, n});
        for (const auto& w : perp.basis_) {
            DVec z(ambient_);
            for (std::size_t i = 0; i < m; ++i) z[i] = -w[n + i];
            for (std::size_t i = 0; i < n; ++i) z[m + i] = w[i];
            a.basis_.push_back(std::move(z));
        }
        return a;
    }

    /// L intersected with {z : z_i = 0 for masked i}; result is a subspace of L.
    Subspace intersect_coordinate(const std::vector<bool>& fixed_mask) const {
        if (fixed_mask.size() != ambient_)
            throw std::invalid_argument("mask length mismatch");
        // coefficients c with (Z c)_i = 0 on masked rows
        DMat rows;
        for (std::size_t i = 0; i < ambient_; ++i) {
            if (!fixed_mask[i]) continue;
            DVec r(dim());
            for (std::size_t j = 0; j < dim(); ++j) r[j] = basis_[j][i];
            rows.push_back(std::move(r));
        }
        Subspace out(ambient_, split_);
        if (dim() == 0) return out;
        if (rows.empty()) {
            out.basis_ = basis_;
            return out;
        }
        // nullspace of the coefficient system via orthonormal complement
        DMat nz;
        for (auto& r : rows)
            if (dnorm(r) > 0) nz.push_back(r);
        DMat ker;
        if (nz.empty()) {
            for (std::size_t j = 0; j < dim(); ++j) {
                DVec e(dim(), 0.0);
                e[j] = 1.0;
                ker.push_back(std::move(e));
            }
        } else {
            Subspace rowsp = Subspace::from_spanning(nz, {dim(), 0});
            ker = rowsp.complement().basis();
        }
        DMat cols;
        for (const auto& c : ker) {
            DVec v(ambient_, 0.0);
            for (std::size_t j = 0; j < dim(); ++j)
                for (std::size_t i = 0; i < ambient_; ++i) v[i] += c[j] * basis_[j][i];
            cols.push_back(std::move(v));
        }
        out.basis_ = detail::orthonormalize(cols);
        return out;
    }

  private:
    std::size_t ambient_;
    std::pair<std::size_t, std::size_t> split_;
    DMat basis_;  // orthonormal columns
};

/// d_Z(L1,L2) = ||P1 - P2|| (operator norm).
inline double subspace_distance(const Subspace& a, const Subspace& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw std::invalid_argument("ambient dimension mismatch");
    auto p = a.projection();
    auto q = b.projection();
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) p[i][j] -= q[i][j];
    return detail::jacobi_spectral_norm(p);
}

/// AL for full-column-rank A (rows x cols of A give the new and old ambient).
inline Subspace linear_image(const DMat& a_columns,
                             const Subspace& l,
                             std::pair<std::size_t, std::size_t> result_split) {
    if (a_columns.size() != l.ambient_dim())
        throw std::invalid_argument("column count of A must equal ambient dim of L");
    const std::size_t out_dim = a_columns.empty() ? 0 : a_columns[0].size();
    if (detail::orthonormalize(a_columns).size() != a_columns.size())
        throw std::invalid_argument("rank-deficient matrix in linear_image");
    Subspace img(out_dim, result_split);
    DMat cols;
    for (const auto& b : l.basis()) {
        DVec v(out_dim, 0.0);
        for (std::size_t j = 0; j < a_columns.size(); ++j)
            for (std::size_t i = 0; i < out_dim; ++i) v[i] += b[j] * a_columns[j][i];
        cols.push_back(std::move(v));
    }
    if (cols.empty()) return img;
    return Subspace::from_spanning(cols, result_split);
}

}  // namespace scdstab

#endif
