#ifndef SCDSTAB_SCD_HPP
#define SCDSTAB_SCD_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scdstab/polyhedra.hpp"
#include "scdstab/ratmat.hpp"
#include "scdstab/subspace.hpp"

namespace scdstab {

/// Parameterized generalized equation 0 in f(x,y) + N_D(g(x,y)) at a
/// reference point, with exact affine data: f(x,y) = Jf (x,y) + f0 and
/// g(x,y) = Jg (x,y) + g0 (the Jacobians alone suffice for the condition
/// checkers; the affine constants anchor the reference and feed the oracle).
struct GEProblem {
    std::size_t l = 0;  // parameter dimension
    std::size_t k = 0;  // decision dimension
    RatVec xbar, ybar;
    RatMat Jf, Jg;  // k x (l+k)
    RatVec f0, g0;  // k
    PolyhedralSet D;

    RatVec ref_point() const {
        RatVec z = xbar;
        z.insert(z.end(), ybar.begin(), ybar.end());
        return z;
    }
    RatVec fbar() const { return rat_add(Jf * ref_point(), f0); }
    RatVec gbar() const { return rat_add(Jg * ref_point(), g0); }
    RatVec dstar() const { return rat_scale(-1, fbar()); }

    RatMat Jf_y() const { return block_cols(Jf, l, l + k); }
    RatMat Jf_x() const { return block_cols(Jf, 0, l); }
    RatMat Jg_y() const { return block_cols(Jg, l, l + k); }
    RatMat Jg_x() const { return block_cols(Jg, 0, l); }

    /// Exact reference-solution check: 0 in H(xbar, ybar).
    void validate() const {
        if (xbar.size() != l || ybar.size() != k) throw std::invalid_argument("reference dimension mismatch");
        if (Jf.rows() != k || Jf.cols() != l + k || Jg.rows() != k || Jg.cols() != l + k)
            throw std::invalid_argument("Jacobian dimension mismatch");
        if (f0.size() != k || g0.size() != k) throw std::invalid_argument("affine constant dimension mismatch");
        if (D.dim != k) throw std::invalid_argument("D lives in the wrong dimension");
        if (!D.contains(gbar())) throw std::invalid_argument("reference not a solution: g(xbar,ybar) not in D");
        if (!in_normal_cone_graph(D, gbar(), dstar()))
            throw std::invalid_argument("reference not a solution: -f(xbar,ybar) not in N_D(g(xbar,ybar))");
    }

    static RatMat block_cols(const RatMat& m, std::size_t from, std::size_t to) {
        RatMat b(m.rows(), to - from);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = from; j < to; ++j) b(i, j - from) = m(i, j);
        return b;
    }
};

/// Provenance of a derivative member: the critical-cone face (and, for
/// face-pair objects, the second face) it came from.
struct MemberTag {
    std::set<std::size_t> face_active;
    std::optional<std::set<std::size_t>> pair_active;  // F2 for face-pair objects
};

enum class CollectionKind { Primal, Dual };

/// One subspace member of an SC derivative collection, carried exactly.
struct ScMember {
    RatMat span;  // columns spanning the member
    std::size_t ambient = 0;
    std::pair<std::size_t, std::size_t> split;
    MemberTag tag;

    std::size_t dim() const { return rat_rank(span); }
    Subspace to_subspace() const {
        return Subspace::from_rational_span(span, ambient, split);
    }
};

struct ScCollection {
    CollectionKind kind = CollectionKind::Primal;
    std::vector<ScMember> members;
};

/// Exact adjoint span: L* = S_nm L-perp for L given by spanning columns.
inline RatMat rat_adjoint_span(const RatMat& span, std::size_t n, std::size_t m) {
    RatMat perp = span.cols() == 0 ? RatMat::identity(n + m)
                                   : rat_nullspace(span.transpose());
    RatMat out(n + m, perp.cols());
    for (std::size_t j = 0; j < perp.cols(); ++j) {
        for (std::size_t i = 0; i < m; ++i) out(i, j) = -perp(n + i, j);
        for (std::size_t i = 0; i < n; ++i) out(m + i, j) = perp(i, j);
    }
    return out;
}

inline ScMember adjoint_member(const ScMember& mem) {
    ScMember a;
    a.span = rat_adjoint_span(mem.span, mem.split.first, mem.split.second);
    a.ambient = mem.ambient;
    a.split = {mem.split.second, mem.split.first};
    a.tag = mem.tag;
    return a;
}

/// Exact equality of two subspaces given by spanning columns.
inline bool rat_span_equal(const RatMat& a, const RatMat& b) {
    std::size_t ra = rat_rank(a), rb = rat_rank(b);
    if (ra != rb) return false;
    RatMat joint = a;
    for (std::size_t j = 0; j < b.cols(); ++j) {
        RatVec col = b.col(j);
        joint = RatMat::from_columns([&] {
            std::vector<RatVec> cols;
            for (std::size_t q = 0; q < joint.cols(); ++q) cols.push_back(joint.col(q));
            cols.push_back(col);
            return cols;
        }());
    }
    return rat_rank(joint) == ra;
}

/// Thm-4.1-style transformation: primal L = JPhi^{-1} M; dual
/// L* = S_nm JPhi^T S_nm^T M*. JPhi square and invertible.
inline ScMember transform_theorem41(const RatMat& jphi,
                                    std::pair<std::size_t, std::size_t> split,
                                    const ScMember& m, CollectionKind kind) {
    if (jphi.rows() != jphi.cols()) throw std::invalid_argument("JPhi must be square");
    const std::size_t n = split.first, mm = split.second;
    if (jphi.rows() != n + mm) throw std::invalid_argument("JPhi size does not match split");
    ScMember out;
    out.ambient = n + mm;
    out.tag = m.tag;
    if (kind == CollectionKind::Primal) {
        out.split = split;
        out.span = rat_inverse(jphi) * m.span;  // throws on singular JPhi
    } else {
        out.split = {mm, n};
        RatMat s(n + mm, n + mm);  // S_nm
        for (std::size_t i = 0; i < mm; ++i) s(i, n + i) = -1;
        for (std::size_t i = 0; i < n; ++i) s(mm + i, i) = 1;
        out.span = s * jphi.transpose() * s.transpose() * m.span;
    }
    return out;
}

/// S Q for Q(x,y) = N_D(g(x,y)): one member per face F of the critical cone,
/// {((u,v), e*) : Jg (u,v) in F-F, e* in (F-F)-perp}. If Jg lacks full row
/// rank the parameter augmentation g(x,y) - p applies; restricting the
/// augmented members back to p = 0 reproduces exactly this formula, so the
/// construction below is used in both cases.
inline ScCollection sc_derivative_Q(const GEProblem& p) {
    p.validate();
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    ScCollection coll;
    coll.kind = CollectionKind::Primal;
    for (const auto& f : enumerate_faces(kc)) {
        RatMat w = f.lineality_span;                       // k x d
        RatMat wp = rat_orthogonal_complement(w, p.k);     // k x (k-d)
        // rows: wp^T Jg on (u,v) block;  w^T on e* block
        RatMat sys(wp.cols() + w.cols(), p.l + 2 * p.k);
        RatMat wpJg = wp.transpose() * p.Jg;
        for (std::size_t i = 0; i < wp.cols(); ++i)
            for (std::size_t j = 0; j < p.l + p.k; ++j) sys(i, j) = wpJg(i, j);
        RatMat wt = w.transpose();
        for (std::size_t i = 0; i < w.cols(); ++i)
            for (std::size_t j = 0; j < p.k; ++j)
                sys(wp.cols() + i, p.l + p.k + j) = wt(i, j);
        ScMember mem;
        mem.span = rat_nullspace(sys);
        mem.ambient = p.l + 2 * p.k;
        mem.split = {p.l + p.k, p.k};
        mem.tag.face_active = f.active;
        coll.members.push_back(std::move(mem));
    }
    return coll;
}

/// The Prop-5.6 augmentation made explicit: parameters (x, p), g~ = g - p.
inline GEProblem augment_parameters(const GEProblem& p) {
    GEProblem a;
    a.l = p.l + p.k;
    a.k = p.k;
    a.xbar = p.xbar;
    a.xbar.insert(a.xbar.end(), p.k, Rational(0));
    a.ybar = p.ybar;
    a.Jf = RatMat(p.k, a.l + a.k);
    a.Jg = RatMat(p.k, a.l + a.k);
    for (std::size_t i = 0; i < p.k; ++i) {
        for (std::size_t j = 0; j < p.l; ++j) {
            a.Jf(i, j) = p.Jf(i, j);
            a.Jg(i, j) = p.Jg(i, j);
        }
        a.Jg(i, p.l + i) = -1;  // the -p block
        for (std::size_t j = 0; j < p.k; ++j) {
            a.Jf(i, a.l + j) = p.Jf(i, p.l + j);
            a.Jg(i, a.l + j) = p.Jg(i, p.l + j);
        }
    }
    a.f0 = p.f0;
    a.g0 = p.g0;
    a.D = p.D;
    return a;
}

/// Restrict an augmented S Q member back to p = 0 and drop the p coordinates.
/// Coordinates of the augmented member: (u, p, v, e*) with |p| = k.
inline ScMember restrict_augmented_member(const ScMember& mem, std::size_t l,
                                          std::size_t k) {
    // solve span c with p-block rows = 0
    RatMat prows(k, mem.span.cols());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < mem.span.cols(); ++j)
            prows(i, j) = mem.span(l + i, j);
    RatMat ker = rat_nullspace(prows);
    RatMat restricted = mem.span * ker;
    // drop rows l..l+k (the p block)
    RatMat out(l + 2 * k, restricted.cols());
    for (std::size_t j = 0; j < restricted.cols(); ++j) {
        for (std::size_t i = 0; i < l; ++i) out(i, j) = restricted(i, j);
        for (std::size_t i = 0; i < 2 * k; ++i) out(l + i, j) = restricted(l + k + i, j);
    }
    ScMember r;
    r.span = out;
    r.ambient = l + 2 * k;
    r.split = {l + k, k};
    r.tag = mem.tag;
    return r;
}

/// Primal and dual S H for H = f + Q; dual is the member-wise adjoint,
/// matching the chain-rule display for the dual side.
inline std::pair<ScCollection, ScCollection> sc_derivative_H(const GEProblem& p) {
    ScCollection q = sc_derivative_Q(p);
    ScCollection primal, dual;
    primal.kind = CollectionKind::Primal;
    dual.kind = CollectionKind::Dual;
    // T = [[I_{l+k}, 0], [Jf, I_k]] maps ((u,v), w) to ((u,v), Jf(u,v) + w)
    const std::size_t lk = p.l + p.k;
    RatMat t = RatMat::identity(lk + p.k);
    for (std::size_t i = 0; i < p.k; ++i)
        for (std::size_t j = 0; j < lk; ++j) t(lk + i, j) = p.Jf(i, j);
    for (auto& m : q.members) {
        ScMember h;
        h.span = t * m.span;
        h.ambient = m.ambient;
        h.split = m.split;
        h.tag = m.tag;
        dual.members.push_back(adjoint_member(h));
        primal.members.push_back(std::move(h));
    }
    return {std::move(primal), std::move(dual)};
}

/// Lift collections of H to the extended mapping F(x,y) = (x, H(x,y)).
/// Primal members {((u,v),(u,w)) : ((u,v),w) in L}; dual members
/// {((q*,w*),(q* + u*, v*)) : q* free, (w*,(u*,v*)) in L*}.
inline std::pair<ScCollection, ScCollection> extend_to_F(
    const GEProblem& p, const ScCollection& primal_h, const ScCollection& dual_h) {
    const std::size_t l = p.l, k = p.k, lk = l + k;
    ScCollection primal, dual;
    primal.kind = CollectionKind::Primal;
    dual.kind = CollectionKind::Dual;
    // (u, v, w) -> (u, v, u, w)
    RatMat e(2 * lk, lk + k);
    for (std::size_t i = 0; i < lk; ++i) e(i, i) = 1;
    for (std::size_t i = 0; i < l; ++i) e(lk + i, i) = 1;
    for (std::size_t i = 0; i < k; ++i) e(lk + l + i, lk + i) = 1;
    for (const auto& m : primal_h.members) {
        ScMember x;
        x.span = e * m.span;
        x.ambient = 2 * lk;
        x.split = {lk, lk};
        x.tag = m.tag;
        primal.members.push_back(std::move(x));
    }
    for (const auto& m : dual_h.members) {
        // (w*, u*, v*) -> (0, w*, u*, v*) plus q* directions (q*, 0, q*, 0)
        std::vector<RatVec> cols;
        for (std::size_t j = 0; j < m.span.cols(); ++j) {
            RatVec v(2 * lk);
            for (std::size_t i = 0; i < k; ++i) v[l + i] = m.span(i, j);
            for (std::size_t i = 0; i < lk; ++i) v[lk + i] = m.span(k + i, j);
            cols.push_back(std::move(v));
        }
        for (std::size_t q = 0; q < l; ++q) {
            RatVec v(2 * lk);
            v[q] = 1;
            v[lk + q] = 1;
            cols.push_back(std::move(v));
        }
        ScMember x;
        x.span = cols.empty() ? RatMat(2 * lk, 0) : RatMat::from_columns(cols);
        x.ambient = 2 * lk;
        x.split = {lk, lk};
        x.tag = m.tag;
        dual.members.push_back(std::move(x));
    }
    return {std::move(primal), std::move(dual)};
}

/// One affine branch of a piecewise-affine map: value A z + c on the cell.
struct PwaPiece {
    RatMat A;
    RatVec c;
    PolyhedralSet cell;
};

struct BJacobianResult {
    std::vector<RatMat> jacobians;  // {A_i : x in closure(cell_i)}
    ScCollection primal;            // {rge(I, A_i)}
    ScCollection dual;              // {rge(I, A_i^T)}
};

namespace detail {

/// Implied equality rows of {Az <= b}: rows with min_z a_i z = b_i.
inline std::vector<std::size_t> polyhedron_implied_equalities(const RatMat& a,
                                                              const RatVec& b) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        RatVec obj = rat_scale(-1, a.row(i));  // minimize a_i z
        auto r = SimplexSolver::solve(a, b, RatMat(0, a.cols()), {}, obj);
        if (r.status == LpStatus::Optimal && -r.value == b[i]) out.push_back(i);
    }
    return out;
}

}  // namespace detail

/// B-Jacobian of a piecewise-affine map at x, with the SC lift of Lemma-3.7 type.
/// Branches must agree on shared cell boundaries (verified exactly on the
/// affine hull of each pairwise intersection).
inline BJacobianResult bjacobian_pwa(const std::vector<PwaPiece>& pieces,
                                     const RatVec& x) {
    BJacobianResult res;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (pieces[i].cell.contains(x)) active.push_back(i);
    if (active.empty()) throw std::invalid_argument("cells do not cover x");
    // pairwise continuity on intersections
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = i + 1; j < pieces.size(); ++j) {
            RatMat a = pieces[i].cell.A;
            RatVec b = pieces[i].cell.b;
            for (std::size_t r = 0; r < pieces[j].cell.A.rows(); ++r) {
                a.append_row(pieces[j].cell.A.row(r));
                b.push_back(pieces[j].cell.b[r]);
            }
            auto z0 = SimplexSolver::feasible_point(a, b, RatMat(0, a.cols()), {},
                                                    a.cols());
            if (!z0) continue;
            auto eqrows = detail::polyhedron_implied_equalities(a, b);
            RatMat m(0, a.cols());
            for (auto r : eqrows) m.append_row(a.row(r));
            RatMat dirs = m.rows() ? rat_nullspace(m) : RatMat::identity(a.cols());
            RatMat dA(pieces[i].A.rows(), pieces[i].A.cols());
            for (std::size_t r = 0; r < dA.rows(); ++r)
                for (std::size_t cidx = 0; cidx < dA.cols(); ++cidx)
                    dA(r, cidx) = pieces[i].A(r, cidx) - pieces[j].A(r, cidx);
            RatVec at0 = rat_add(dA * *z0, rat_sub(pieces[i].c, pieces[j].c));
            if (!rat_is_zero(at0))
                throw std::invalid_argument("branches disagree on a shared boundary");
            RatMat ondirs = dA * dirs;
            for (std::size_t r = 0; r < ondirs.rows(); ++r)
                for (std::size_t cidx = 0; cidx < ondirs.cols(); ++cidx)
                    if (ondirs(r, cidx) != 0)
                        throw std::invalid_argument(
                            "branches disagree on a shared boundary");
        }
    res.primal.kind = CollectionKind::Primal;
    res.dual.kind = CollectionKind::Dual;
    for (auto i : active) {
        const RatMat& a = pieces[i].A;
        bool dup = false;
        for (const auto& seen : res.jacobians)
            if (seen == a) dup = true;
        if (dup) continue;
        res.jacobians.push_back(a);
        const std::size_t n = a.cols(), m = a.rows();
        ScMember mp, md;
        mp.ambient = md.ambient = n + m;
        mp.split = {n, m};
        md.split = {m, n};
        RatMat sp(n + m, n), sd(n + m, m);
        for (std::size_t j = 0; j < n; ++j) {
            sp(j, j) = 1;
            for (std::size_t r = 0; r < m; ++r) sp(n + r, j) = a(r, j);
        }
        for (std::size_t j = 0; j < m; ++j) {
            sd(j, j) = 1;
            for (std::size_t r = 0; r < n; ++r) sd(m + r, j) = a(j, r);
        }
        mp.span = std::move(sp);
        md.span = std::move(sd);
        mp.tag.face_active = {i};
        md.tag.face_active = {i};
        res.primal.members.push_back(std::move(mp));
        res.dual.members.push_back(std::move(md));
    }
    return res;
}

}  // namespace scdstab

#endif
