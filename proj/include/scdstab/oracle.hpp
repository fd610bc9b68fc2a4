#ifndef SCDSTAB_ORACLE_HPP
#define SCDSTAB_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scdstab/scd.hpp"

namespace scdstab {

/// Vertices, extreme rays and lineality basis of {z : Az <= b}.
struct PolyhedronGenerators {
    std::vector<RatVec> vertices;
    std::vector<RatVec> rays;
    std::vector<RatVec> lineality;
    bool empty() const { return vertices.empty(); }
};

/// V-representation via the homogenization cone {(z,t) : Az - bt <= 0, t >= 0}.
inline PolyhedronGenerators polyhedron_generators(const RatMat& a, const RatVec& b) {
    const std::size_t d = a.cols();
    PolyhedralCone h;
    h.dim = d + 1;
    h.A_ineq = RatMat(0, d + 1);
    h.A_eq = RatMat(0, d + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        RatVec row = a.row(i);
        row.push_back(-b[i]);
        h.A_ineq.append_row(row);
    }
    RatVec tpos(d + 1);
    tpos[d] = -1;  // -t <= 0
    h.A_ineq.append_row(tpos);
    ConeGenerators g = cone_generators(h);
    PolyhedronGenerators out;
    for (const auto& r : g.rays) {
        RatVec z(r.begin(), r.begin() + d);
        if (r[d] > 0) {
            out.vertices.push_back(rat_scale(1 / r[d], z));
        } else if (!rat_is_zero(z)) {
            out.rays.push_back(std::move(z));
        }
    }
    for (const auto& l : g.lineality) {
        RatVec z(l.begin(), l.begin() + d);  // lines have t = 0
        if (!rat_is_zero(z)) out.lineality.push_back(std::move(z));
    }
    return out;
}

/// Face lattice of {z : Az <= b} as saturated active sets, BFS as for cones.
inline std::vector<std::set<std::size_t>> enumerate_set_active_sets(
    const RatMat& a, const RatVec& b) {
    const std::size_t d = a.cols();
    auto feasible = [&](const std::set<std::size_t>& act) -> std::optional<RatVec> {
        RatMat eq(0, d);
        RatVec erhs;
        for (auto i : act) {
            eq.append_row(a.row(i));
            erhs.push_back(b[i]);
        }
        return SimplexSolver::feasible_point(a, b, eq, erhs, d);
    };
    auto saturate = [&](std::set<std::size_t> act) {
        // a row is implied-equal when min a_i z over the face equals b_i
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (act.count(i)) continue;
            RatMat eq(0, d);
            RatVec erhs;
            for (auto j : act) {
                eq.append_row(a.row(j));
                erhs.push_back(b[j]);
            }
            auto r = SimplexSolver::solve(a, b, eq, erhs, rat_scale(-1, a.row(i)));
            if (r.status == LpStatus::Optimal && -r.value == b[i]) act.insert(i);
        }
        return act;
    };
    std::vector<std::set<std::size_t>> out;
    std::set<std::set<std::size_t>> seen;
    std::vector<std::set<std::size_t>> queue;
    if (!feasible({})) return out;  // empty set, no faces
    auto root = saturate({});
    queue.push_back(root);
    seen.insert(root);
    while (!queue.empty()) {
        auto act = queue.back();
        queue.pop_back();
        out.push_back(act);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (act.count(i)) continue;
            auto child = act;
            child.insert(i);
            if (!feasible(child)) continue;
            child = saturate(child);
            if (seen.insert(child).second) queue.push_back(child);
        }
    }
    return out;
}

/// gph Sigma as an explicit finite union of polyhedra in R^(l+k), one piece
/// per face F of D: g(x,y) in F and -f(x,y) in N_F = cone of F's active rows.
struct SolutionGraph {
    std::size_t l = 0, k = 0;
    RatVec reference;  // (xbar, ybar)
    std::vector<PolyhedralSet> pieces;
    GEProblem problem;
};

inline SolutionGraph build_solution_graph(const GEProblem& p) {
    p.validate();
    const std::size_t d = p.l + p.k;
    SolutionGraph g;
    g.l = p.l;
    g.k = p.k;
    g.reference = p.ref_point();
    g.problem = p;
    for (const auto& act : enumerate_set_active_sets(p.D.A, p.D.b)) {
        PolyhedralSet piece;
        piece.dim = d;
        piece.A = RatMat(0, d);
        // g(x,y) in F: inactive rows stay inequalities, active rows become
        // equalities (two inequalities; PolyhedralSet is H-form only)
        for (std::size_t i = 0; i < p.D.A.rows(); ++i) {
            RatVec row = (RatMat::from_rows({p.D.A.row(i)}) * p.Jg).row(0);
            Rational rhs = p.D.b[i] - rat_dot(p.D.A.row(i), p.g0);
            piece.A.append_row(row);
            piece.b.push_back(rhs);
            if (act.count(i)) {
                piece.A.append_row(rat_scale(-1, row));
                piece.b.push_back(-rhs);
            }
        }
        // -f(x,y) in N_F, N_F generated by the active rows of F
        ConeGenerators nf;
        for (auto i : act) nf.rays.push_back(p.D.A.row(i));
        PolyhedralCone nfh = cone_from_generators(nf, p.k);
        auto add_nf_rows = [&](const RatMat& rows, bool eq) {
            for (std::size_t i = 0; i < rows.rows(); ++i) {
                // c . (-(Jf w + f0)) <= 0  <=>  (-c Jf) w <= c . f0
                RatVec cjf = (RatMat::from_rows({rows.row(i)}) * p.Jf).row(0);
                RatVec row = rat_scale(-1, cjf);
                Rational rhs = rat_dot(rows.row(i), p.f0);
                piece.A.append_row(row);
                piece.b.push_back(rhs);
                if (eq) {
                    piece.A.append_row(cjf);
                    piece.b.push_back(-rhs);
                }
            }
        };
        add_nf_rows(nfh.A_ineq, false);
        add_nf_rows(nfh.A_eq, true);
        g.pieces.push_back(std::move(piece));
    }
    bool covered = false;
    for (const auto& piece : g.pieces) covered = covered || piece.contains(g.reference);
    if (!covered) throw std::logic_error("reference point escaped every piece");
    return g;
}

struct ViolationQuadruple {
    RatVec x, y, xprime, yprime;
};

struct OracleReport {
    bool consistent = true;
    double empirical_modulus = 0.0;
    std::optional<ViolationQuadruple> violation;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t anchors = 0;
    std::string algorithm = "mt19937_64";
};

namespace detail {

inline Rational sq_norm(const RatVec& v) {
    Rational s = 0;
    for (const auto& c : v) s += c * c;
    return s;
}

/// Dyadic rational approximation of a double, denominator 2^20.
inline Rational dyadic(double v) {
    return Rational(static_cast<long long>(std::llround(v * 1048576.0)), 1048576);
}

/// Slice of a piece at fixed x, intersected with the sup-norm box around y0:
/// vertices of {y' : piece constraints at (x, y'), |y' - y0|_inf <= rho}.
inline std::vector<RatVec> slice_vertices(const PolyhedralSet& piece, std::size_t l,
                                          std::size_t k, const RatVec& x,
                                          const RatVec& y0, const Rational& rho) {
    RatMat a(0, k);
    RatVec b;
    for (std::size_t i = 0; i < piece.A.rows(); ++i) {
        RatVec row = piece.A.row(i);
        RatVec ay(row.begin() + l, row.end());
        RatVec ax(row.begin(), row.begin() + l);
        a.append_row(ay);
        b.push_back(piece.b[i] - rat_dot(ax, x));
    }
    for (std::size_t j = 0; j < k; ++j) {
        RatVec e(k), ne(k);
        e[j] = 1;
        ne[j] = -1;
        a.append_row(e);
        b.push_back(y0[j] + rho);
        a.append_row(ne);
        b.push_back(rho - y0[j]);
    }
    return polyhedron_generators(a, b).vertices;
}

/// Anchor points of a piece inside the euclidean ball around ref: a feasible
/// point in a small box, perturbed toward the piece's vertices by dyadic
/// steps, every candidate checked exactly against the ball.
inline std::vector<RatVec> anchor_points(const PolyhedralSet& piece, const RatVec& ref,
                                         const Rational& radius, std::size_t want,
                                         std::mt19937_64& rng) {
    const std::size_t d = piece.dim;
    Rational rho = radius / Rational(static_cast<long long>(d));
    RatMat a = piece.A;
    RatVec b = piece.b;
    for (std::size_t j = 0; j < d; ++j) {
        RatVec e(d), ne(d);
        e[j] = 1;
        ne[j] = -1;
        a.append_row(e);
        b.push_back(ref[j] + rho);
        a.append_row(ne);
        b.push_back(rho - ref[j]);
    }
    auto w0 = SimplexSolver::feasible_point(a, b, RatMat(0, d), {}, d);
    if (!w0) return {};
    Rational r2 = radius * radius;
    std::vector<RatVec> out;
    if (sq_norm(rat_sub(*w0, ref)) <= r2) out.push_back(*w0);
    PolyhedronGenerators gen = polyhedron_generators(piece.A, piece.b);
    std::vector<RatVec> targets = gen.vertices;
    for (const auto& r : gen.rays) targets.push_back(rat_add(*w0, r));
    for (const auto& lin : gen.lineality) targets.push_back(rat_add(*w0, lin));
    std::uniform_int_distribution<std::size_t> pick(0, targets.empty() ? 0 : targets.size() - 1);
    std::uniform_int_distribution<int> shift(1, 8);
    while (out.size() < want && !targets.empty()) {
        const RatVec& t = targets[pick(rng)];
        Rational lambda = Rational(1, 1 << shift(rng));
        for (int h = 0; h < 48; ++h) {
            RatVec z = rat_add(*w0, rat_scale(lambda, rat_sub(t, *w0)));
            if (sq_norm(rat_sub(z, ref)) <= r2 && piece.contains(z)) {
                out.push_back(std::move(z));
                break;
            }
            lambda /= 2;
        }
        if (out.size() >= want) break;
        if (targets.size() == 1 && out.size() >= 2) break;  // nothing new to mix
    }
    return out;
}

}  // namespace detail

/// Sampling verification of isolated calmness around the reference, per the
/// neighborhood-anchored definition: anchors (x,y) on gph Sigma within
/// `radius` of the reference; probes x' at scales radius * 2^-j (and x' = x
/// exactly); y'-candidates from the anchor's own pieces inside the sup-norm
/// box of size radius/10 around y. "violated" comes with an exact rational
/// quadruple recheck; "consistent" is evidence only.
inline OracleReport verify_isolated_calmness_around(const SolutionGraph& g,
                                                    const Rational& radius,
                                                    const Rational& kappa,
                                                    std::size_t samples,
                                                    std::uint64_t seed,
                                                    std::size_t workers = 1) {
    if (radius <= 0 || kappa <= 0)
        throw std::invalid_argument("radius and kappa must be positive");
    if (workers > 1) {
        // deterministic per-worker streams; merge is max/any, order-free
        std::vector<std::future<OracleReport>> futs;
        std::size_t share = (samples + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&, w] {
                return verify_isolated_calmness_around(
                    g, radius, kappa, share, seed + 0x9e3779b97f4a7c15ULL * (w + 1), 1);
            }));
        OracleReport merged;
        merged.seed = seed;
        for (auto& f : futs) {
            OracleReport r = f.get();
            merged.samples += r.samples;
            merged.anchors = std::max(merged.anchors, r.anchors);
            merged.empirical_modulus = std::max(merged.empirical_modulus, r.empirical_modulus);
            if (!r.consistent && merged.consistent) {
                merged.consistent = false;
                merged.violation = r.violation;
            }
        }
        return merged;
    }
    OracleReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    const std::size_t l = g.l, k = g.k;
    RatVec xref(g.reference.begin(), g.reference.begin() + l);
    Rational rho_u = radius / 10;
    Rational kappa2 = kappa * kappa;

    // anchor pool: a few exact graph points per piece near the reference
    std::vector<RatVec> anchors;
    std::size_t per_piece = std::max<std::size_t>(2, samples / (8 * std::max<std::size_t>(1, g.pieces.size())));
    for (const auto& piece : g.pieces) {
        auto pts = detail::anchor_points(piece, g.reference, radius, per_piece, rng);
        anchors.insert(anchors.end(), pts.begin(), pts.end());
    }
    if (anchors.empty()) anchors.push_back(g.reference);
    rep.anchors = anchors.size();

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_anchor(0, anchors.size() - 1);
    std::uniform_int_distribution<int> pick_scale(0, 6);

    auto probe = [&](const RatVec& anchor, const RatVec& xprime) -> bool {
        RatVec x(anchor.begin(), anchor.begin() + l);
        RatVec y(anchor.begin() + l, anchor.end());
        Rational dx2 = detail::sq_norm(rat_sub(xprime, x));
        for (const auto& piece : g.pieces) {
            if (!piece.contains(anchor)) continue;  // follow the local branch
            for (const auto& yp : detail::slice_vertices(piece, l, k, xprime, y, rho_u)) {
                Rational dy2 = detail::sq_norm(rat_sub(yp, y));
                if (dy2 > kappa2 * dx2) {
                    // exact quadruple: membership holds by construction,
                    // rechecked against the piece before reporting
                    RatVec zp = xprime;
                    zp.insert(zp.end(), yp.begin(), yp.end());
                    if (!piece.contains(zp)) continue;
                    rep.consistent = false;
                    rep.violation = ViolationQuadruple{x, y, xprime, yp};
                    return true;
                }
                if (dx2 > 0) {
                    double ratio = std::sqrt(to_double(dy2) / to_double(dx2));
                    rep.empirical_modulus = std::max(rep.empirical_modulus, ratio);
                }
            }
        }
        return false;
    };

    for (std::size_t s = 0; s < samples; ++s) {
        ++rep.samples;
        const RatVec& anchor = anchors[pick_anchor(rng)];
        RatVec x(anchor.begin(), anchor.begin() + l);
        RatVec xprime = x;
        if (s % 8 != 0) {  // every 8th probe keeps x' = x exactly
            int j = pick_scale(rng);
            RatVec dir(l);
            double nrm = 0;
            std::vector<double> raw(l);
            for (std::size_t i = 0; i < l; ++i) {
                raw[i] = gauss(rng);
                nrm += raw[i] * raw[i];
            }
            nrm = std::sqrt(std::max(nrm, 1e-12));
            Rational scale = radius / Rational(1 << j);
            for (std::size_t i = 0; i < l; ++i)
                dir[i] = detail::dyadic(raw[i] / nrm) * scale;
            xprime = rat_add(x, dir);
        }
        if (probe(anchor, xprime)) return rep;
    }
    return rep;
}

/// Sanity harness for the directional-normal inequality defining the
/// semismooth-star property of a union of polyhedra at a point: samples graph
/// points at shrinking scales with a normal-cone generator of their active
/// piece and checks |<z*, z - zbar>| <= eps |z - zbar| |z*| along the
/// epsilon sequence. Polyhedral unions always pass.
inline bool verify_semismooth_star(const std::vector<PolyhedralSet>& pieces,
                                   const RatVec& zbar,
                                   const std::vector<double>& eps_sequence,
                                   std::uint64_t seed = 7) {
    bool inside = false;
    for (const auto& piece : pieces) inside = inside || piece.contains(zbar);
    if (!inside) throw std::invalid_argument("point outside the union");
    std::mt19937_64 rng(seed);
    Rational scale = 1;
    for (double eps : eps_sequence) {
        scale /= 4;
        double worst = 0;
        for (const auto& piece : pieces) {
            auto pts = detail::anchor_points(piece, zbar, scale, 6, rng);
            for (const auto& z : pts) {
                RatVec dz = rat_sub(z, zbar);
                if (rat_is_zero(dz)) continue;
                // regular normals at z: conic combinations of the active rows
                for (auto i : piece.active_rows(z)) {
                    RatVec zs = piece.A.row(i);
                    Rational num = rat_dot(zs, dz);
                    double lhs = std::abs(to_double(num));
                    double rhs = std::sqrt(to_double(detail::sq_norm(dz))) *
                                 std::sqrt(to_double(detail::sq_norm(zs)));
                    if (rhs > 0) worst = std::max(worst, lhs / rhs);
                }
            }
        }
        if (worst > eps) return false;
    }
    return true;
}

/// The closed form of the running one-dimensional example: Sigma(x) = {0, x}
/// for x <= 0 and empty otherwise.
inline std::vector<Rational> closed_form_example_5_7(const Rational& x) {
    if (x > 0) return {};
    if (x == 0) return {Rational(0)};
    return {Rational(0), x};
}

}  // namespace scdstab

#endif
