#ifndef SCDSTAB_POLYHEDRA_HPP
#define SCDSTAB_POLYHEDRA_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "scdstab/ratmat.hpp"
#include "scdstab/simplex.hpp"
#include "scdstab/subspace.hpp"

namespace scdstab {

/// {z in R^k : A z <= b}; rows may be redundant.
struct PolyhedralSet {
    RatMat A;
    RatVec b;
    std::size_t dim = 0;  // ambient k (needed when A has no rows)

    static PolyhedralSet whole_space(std::size_t k) { return {RatMat(0, k), {}, k}; }

    bool contains(const RatVec& z) const {
        RatVec az = A.rows() ? A * z : RatVec{};
        for (std::size_t i = 0; i < A.rows(); ++i)
            if (az[i] > b[i]) return false;
        return true;
    }
    std::vector<std::size_t> active_rows(const RatVec& z) const {
        std::vector<std::size_t> act;
        for (std::size_t i = 0; i < A.rows(); ++i)
            if (rat_dot(A.row(i), z) == b[i]) act.push_back(i);
        return act;
    }
};

/// {z : A_ineq z <= 0, A_eq z = 0}; always contains 0.
struct PolyhedralCone {
    RatMat A_ineq;
    RatMat A_eq;
    std::size_t dim = 0;

    static PolyhedralCone whole_space(std::size_t k) {
        return {RatMat(0, k), RatMat(0, k), k};
    }
    static PolyhedralCone from_subspace_equations(const RatMat& eq, std::size_t k) {
        return {RatMat(0, k), eq, k};
    }

    bool contains(const RatVec& z) const {
        for (std::size_t i = 0; i < A_ineq.rows(); ++i)
            if (rat_dot(A_ineq.row(i), z) > 0) return false;
        for (std::size_t i = 0; i < A_eq.rows(); ++i)
            if (rat_dot(A_eq.row(i), z) != 0) return false;
        return true;
    }
};

/// Generator form of a cone: conic hull of rays + linear hull of lineality.
struct ConeGenerators {
    std::vector<RatVec> rays;       // canonicalized directions
    std::vector<RatVec> lineality;  // basis of the lineality space
};

namespace detail {

struct DDRay {
    RatVec v;
    std::set<std::size_t> zero_set;  // processed constraints active at v
};

}  // namespace detail

/// Double description: generators of {z : A_ineq z <= 0, A_eq z = 0}.
inline ConeGenerators cone_generators(const PolyhedralCone& c) {
    const std::size_t k = c.dim;
    std::vector<RatVec> lin;
    for (std::size_t i = 0; i < k; ++i) {
        RatVec e(k);
        e[i] = 1;
        lin.push_back(std::move(e));
    }
    std::vector<detail::DDRay> rays;
    // constraints: equalities first, then inequalities
    std::vector<std::pair<RatVec, bool>> cons;  // (row, is_equality)
    for (std::size_t i = 0; i < c.A_eq.rows(); ++i) cons.push_back({c.A_eq.row(i), true});
    for (std::size_t i = 0; i < c.A_ineq.rows(); ++i)
        cons.push_back({c.A_ineq.row(i), false});

    for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        const RatVec& a = cons[ci].first;
        const bool is_eq = cons[ci].second;
        // lineality pivot: a direction of the lineality not orthogonal to a
        std::size_t pivot = lin.size();
        for (std::size_t j = 0; j < lin.size(); ++j)
            if (rat_dot(a, lin[j]) != 0) {
                pivot = j;
                break;
            }
        if (pivot != lin.size()) {
            RatVec l0 = lin[pivot];
            Rational al0 = rat_dot(a, l0);
            lin.erase(lin.begin() + pivot);
            for (auto& l : lin) {
                Rational f = rat_dot(a, l) / al0;
                if (f != 0) l = rat_sub(l, rat_scale(f, l0));
            }
            for (auto& r : rays) {
                Rational f = rat_dot(a, r.v) / al0;
                if (f != 0) r.v = rat_sub(r.v, rat_scale(f, l0));
                r.zero_set.insert(ci);
            }
            if (!is_eq) {
                detail::DDRay nr;
                nr.v = al0 > 0 ? rat_scale(-1, l0) : l0;
                nr.v = rat_normalize_direction(nr.v);
                // previous constraints are satisfied with equality by lineality dirs
                for (std::size_t p = 0; p <= ci; ++p)
                    if (rat_dot(cons[p].first, nr.v) == 0) nr.zero_set.insert(p);
                rays.push_back(std::move(nr));
            }
            continue;
        }
        // a vanishes on the lineality: split rays by sign
        std::vector<detail::DDRay> neg, zero, pos;
        for (auto& r : rays) {
            Rational s = rat_dot(a, r.v);
            if (s < 0)
                neg.push_back(r);
            else if (s == 0) {
                r.zero_set.insert(ci);
                zero.push_back(r);
            } else
                pos.push_back(r);
        }
        std::vector<detail::DDRay> next = zero;
        if (!is_eq)
            for (auto& r : neg) next.push_back(r);
        // combine every +/- pair; duplicates and non-extreme rays are pruned
        // below, which keeps the hull correct on redundant representations
        for (const auto& p : pos)
            for (const auto& n : neg) {
                Rational sp = rat_dot(a, p.v), sn = rat_dot(a, n.v);
                RatVec comb = rat_sub(rat_scale(sp, n.v), rat_scale(sn, p.v));
                comb = rat_normalize_direction(comb);
                if (rat_is_zero(comb)) continue;
                detail::DDRay nr;
                nr.v = std::move(comb);
                std::set_intersection(p.zero_set.begin(), p.zero_set.end(),
                                      n.zero_set.begin(), n.zero_set.end(),
                                      std::inserter(nr.zero_set, nr.zero_set.begin()));
                nr.zero_set.insert(ci);
                next.push_back(std::move(nr));
            }
        // dedup by direction
        std::vector<detail::DDRay> dedup;
        for (auto& r : next) {
            bool seen = false;
            for (const auto& d : dedup)
                if (d.v == r.v) {
                    seen = true;
                    break;
                }
            if (!seen) dedup.push_back(std::move(r));
        }
        rays = std::move(dedup);
    }
    ConeGenerators g;
    g.lineality = std::move(lin);
    for (auto& r : rays)
        if (!rat_is_zero(r.v)) g.rays.push_back(rat_normalize_direction(r.v));
    return g;
}

/// H-representation of the conic hull of the given generators.
inline PolyhedralCone cone_from_generators(const ConeGenerators& g, std::size_t k) {
    // polar of cone(G) is {y : r.y <= 0, l.y = 0}; its generators are the
    // facet normals of the (closed) bipolar, i.e. of cone(G) itself.
    PolyhedralCone polar;
    polar.dim = k;
    polar.A_ineq = RatMat(0, k);
    polar.A_eq = RatMat(0, k);
    for (const auto& r : g.rays) polar.A_ineq.append_row(r);
    for (const auto& l : g.lineality) polar.A_eq.append_row(l);
    ConeGenerators pg = cone_generators(polar);
    PolyhedralCone h;
    h.dim = k;
    h.A_ineq = RatMat(0, k);
    h.A_eq = RatMat(0, k);
    for (const auto& r : pg.rays) h.A_ineq.append_row(r);
    for (const auto& l : pg.lineality) h.A_eq.append_row(l);
    return h;
}

/// K deg: the (negative) polar cone, exact.
inline PolyhedralCone polar(const PolyhedralCone& c) {
    ConeGenerators g = cone_generators(c);
    PolyhedralCone p;
    p.dim = c.dim;
    p.A_ineq = RatMat(0, c.dim);
    p.A_eq = RatMat(0, c.dim);
    for (const auto& r : g.rays) p.A_ineq.append_row(r);
    for (const auto& l : g.lineality) p.A_eq.append_row(l);
    return p;
}

/// true iff C = {0}; otherwise an exact nonzero witness in C.
struct TrivialityResult {
    bool trivial;
    RatVec witness;  // nonzero member when !trivial
};

inline TrivialityResult cone_is_trivial(const PolyhedralCone& c) {
    const std::size_t k = c.dim;
    RatVec eqrhs(c.A_eq.rows());
    RatVec bz(c.A_ineq.rows());
    for (std::size_t j = 0; j < k; ++j) {
        for (int sign : {+1, -1}) {
            RatVec obj(k);
            obj[j] = sign;
            RatMat A = c.A_ineq;
            RatVec b = bz;
            RatVec bound(k);
            bound[j] = sign;
            A.append_row(bound);  // e_j . z <= 1 keeps the LP bounded
            b.push_back(1);
            auto r = SimplexSolver::solve(A, b, c.A_eq, eqrhs, obj);
            if (r.status == LpStatus::Optimal && r.value > 0) return {false, r.x};
        }
    }
    return {true, {}};
}

/// Active rows I(d) at d (exact); requires d in D.
inline PolyhedralCone tangent_cone(const PolyhedralSet& d_set, const RatVec& d) {
    if (!d_set.contains(d)) throw std::invalid_argument("point not in the set");
    PolyhedralCone t;
    t.dim = d_set.dim;
    t.A_ineq = RatMat(0, d_set.dim);
    t.A_eq = RatMat(0, d_set.dim);
    for (auto i : d_set.active_rows(d)) t.A_ineq.append_row(d_set.A.row(i));
    return t;
}

inline PolyhedralCone normal_cone(const PolyhedralSet& d_set, const RatVec& d) {
    return polar(tangent_cone(d_set, d));
}

/// Exact membership of (d, dstar) in gph N_D.
inline bool in_normal_cone_graph(const PolyhedralSet& d_set, const RatVec& d,
                                 const RatVec& dstar) {
    if (!d_set.contains(d)) return false;
    // dstar in cone{A_i : i active}: nonneg multipliers lambda with A_act^T lambda = dstar
    auto act = d_set.active_rows(d);
    RatMat eq(d_set.dim, act.size());
    for (std::size_t j = 0; j < act.size(); ++j)
        for (std::size_t i = 0; i < d_set.dim; ++i) eq(i, j) = d_set.A(act[j], i);
    RatMat nonneg(act.size(), act.size());
    for (std::size_t j = 0; j < act.size(); ++j) nonneg(j, j) = -1;
    auto fp = SimplexSolver::feasible_point(nonneg, RatVec(act.size()), eq, dstar,
                                            act.size());
    return fp.has_value();
}

/// K_D(d, d*) = T_D(d) intersected with [d*]-perp.
inline PolyhedralCone critical_cone(const PolyhedralSet& d_set, const RatVec& d,
                                    const RatVec& dstar) {
    if (!in_normal_cone_graph(d_set, d, dstar))
        throw std::invalid_argument("pair not in the normal-cone graph");
    PolyhedralCone k = tangent_cone(d_set, d);
    if (!rat_is_zero(dstar)) k.A_eq.append_row(dstar);
    return k;
}

/// A face identified by its saturated active inequality set.
struct Face {
    std::set<std::size_t> active;  // rows of parent's A_ineq identically 0 on the face
    std::size_t dim = 0;           // dimension of F - F
    RatMat lineality_span;         // columns spanning F - F (exact)
};

namespace detail {

/// Is there z in the cone with (extra actives applied) and a_i z <= -1 ?
inline bool row_attains_negative(const PolyhedralCone& c,
                                 const std::set<std::size_t>& active,
                                 std::size_t row) {
    RatMat A(0, c.dim);
    RatVec b;
    RatMat E = c.A_eq;
    RatVec erhs(c.A_eq.rows());
    for (std::size_t i = 0; i < c.A_ineq.rows(); ++i) {
        if (active.count(i)) {
            E.append_row(c.A_ineq.row(i));
            erhs.push_back(0);
        } else if (i != row) {
            A.append_row(c.A_ineq.row(i));
            b.push_back(0);
        }
    }
    A.append_row(c.A_ineq.row(row));
    b.push_back(-1);
    return SimplexSolver::feasible_point(A, b, E, erhs, c.dim).has_value();
}

/// Close an active set under implied equalities.
inline std::set<std::size_t> saturate(const PolyhedralCone& c,
                                      std::set<std::size_t> active) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < c.A_ineq.rows(); ++i) {
            if (active.count(i)) continue;
            if (!row_attains_negative(c, active, i)) {
                active.insert(i);
                changed = true;
            }
        }
    }
    return active;
}

inline Face make_face(const PolyhedralCone& c, std::set<std::size_t> active) {
    Face f;
    f.active = std::move(active);
    RatMat eqsys = c.A_eq;
    for (auto i : f.active) eqsys.append_row(c.A_ineq.row(i));
    if (eqsys.rows() == 0) eqsys = RatMat(0, c.dim);
    f.lineality_span = rat_nullspace(eqsys.rows() ? eqsys : RatMat(1, c.dim));
    f.dim = f.lineality_span.cols();
    return f;
}

}  // namespace detail

/// Complete face lattice of C, canonicalized by implied-equality closure.
/// Ordered by dimension, then lexicographically by active set.
inline std::vector<Face> enumerate_faces(const PolyhedralCone& c) {
    std::map<std::set<std::size_t>, Face> seen;
    std::set<std::size_t> top = detail::saturate(c, {});
    std::vector<std::set<std::size_t>> queue{top};
    seen.emplace(top, detail::make_face(c, top));
    while (!queue.empty()) {
        auto cur = queue.back();
        queue.pop_back();
        for (std::size_t j = 0; j < c.A_ineq.rows(); ++j) {
            if (cur.count(j)) continue;
            auto child = cur;
            child.insert(j);
            child = detail::saturate(c, child);
            if (seen.count(child)) continue;
            seen.emplace(child, detail::make_face(c, child));
            queue.push_back(child);
        }
    }
    std::vector<Face> faces;
    for (auto& [key, f] : seen) faces.push_back(std::move(f));
    std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.active < b.active;
    });
    return faces;
}

/// F2 subset of F1 in the face lattice: saturated active sets are reverse-ordered.
inline bool face_subset(const Face& f2, const Face& f1) {
    return std::includes(f2.active.begin(), f2.active.end(), f1.active.begin(),
                         f1.active.end());
}

/// F - F as a Subspace (floating) with split (k, 0) unless overridden.
inline Subspace face_lineality(const Face& f, std::size_t k) {
    return Subspace::from_rational_span(f.lineality_span, k, {k, 0});
}

/// Exact basis of the orthogonal complement of the column space of span.
inline RatMat rat_orthogonal_complement(const RatMat& span, std::size_t k) {
    if (span.cols() == 0) return RatMat::identity(k);
    return rat_nullspace(span.transpose());
}

/// The cone F1 - F2 (critical superface) in H-representation.
inline PolyhedralCone face_difference(const PolyhedralCone& parent, const Face& f1,
                                      const Face& f2) {
    PolyhedralCone c1;
    c1.dim = parent.dim;
    c1.A_ineq = RatMat(0, parent.dim);
    c1.A_eq = parent.A_eq;
    for (std::size_t i = 0; i < parent.A_ineq.rows(); ++i) {
        if (f1.active.count(i))
            c1.A_eq.append_row(parent.A_ineq.row(i));
        else
            c1.A_ineq.append_row(parent.A_ineq.row(i));
    }
    ConeGenerators g1 = cone_generators(c1);
    ConeGenerators g;
    g.rays = g1.rays;
    g.lineality = g1.lineality;
    // -F2 contributes negated generators; F2's span folds into rays/lineality
    for (std::size_t j = 0; j < f2.lineality_span.cols(); ++j) {
        // F2 - F2 lies inside F1 - F2, so the whole span of F2 may be added
        g.lineality.push_back(f2.lineality_span.col(j));
    }
    return cone_from_generators(g, parent.dim);
}

/// One subspace (F-F) x (F-F)-perp of R^(2k), split (k,k), per face of K_D(d,d*).
struct ScPiece {
    Face face;
    RatMat span;  // exact columns spanning the member in R^(2k)
};

inline RatMat product_span(const RatMat& w, const RatMat& wperp, std::size_t k) {
    std::vector<RatVec> cols;
    for (std::size_t j = 0; j < w.cols(); ++j) {
        RatVec v(2 * k);
        for (std::size_t i = 0; i < k; ++i) v[i] = w(i, j);
        cols.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < wperp.cols(); ++j) {
        RatVec v(2 * k);
        for (std::size_t i = 0; i < k; ++i) v[k + i] = wperp(i, j);
        cols.push_back(std::move(v));
    }
    RatMat m = RatMat::from_columns(cols);
    if (cols.empty()) m = RatMat(2 * k, 0);
    return m;
}

inline std::vector<ScPiece> sc_derivative_ND(const PolyhedralSet& d_set,
                                             const RatVec& d, const RatVec& dstar) {
    PolyhedralCone k_cone = critical_cone(d_set, d, dstar);
    const std::size_t k = d_set.dim;
    std::vector<ScPiece> out;
    for (const auto& f : enumerate_faces(k_cone)) {
        RatMat w = f.lineality_span;
        RatMat wp = rat_orthogonal_complement(w, k);
        out.push_back({f, product_span(w, wp, k)});
    }
    return out;
}

/// All ordered face pairs (F1, F2) of the critical cone with F2 subset of F1.
inline std::vector<std::pair<Face, Face>> outer_tangent_pieces_ND(
    const PolyhedralSet& d_set, const RatVec& d, const RatVec& dstar) {
    PolyhedralCone k_cone = critical_cone(d_set, d, dstar);
    auto faces = enumerate_faces(k_cone);
    std::vector<std::pair<Face, Face>> pairs;
    for (const auto& f1 : faces)
        for (const auto& f2 : faces)
            if (face_subset(f2, f1)) pairs.push_back({f1, f2});
    return pairs;
}

}  // namespace scdstab

#endif
