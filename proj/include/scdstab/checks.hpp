#ifndef SCDSTAB_CHECKS_HPP
#define SCDSTAB_CHECKS_HPP

#include <future>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scdstab/polyhedra.hpp"
#include "scdstab/scd.hpp"

namespace scdstab {

enum class ConditionId {
    ScdRegular,
    Primal54,
    Dual55,
    FaceEqCompl,
    FacepairEqCompl1,
    PointLR,
    AubinEq100,
};

inline std::string condition_name(ConditionId c) {
    switch (c) {
        case ConditionId::ScdRegular: return "scd_regular";
        case ConditionId::Primal54: return "primal_5_4";
        case ConditionId::Dual55: return "dual_5_5";
        case ConditionId::FaceEqCompl: return "face_EqCompl";
        case ConditionId::FacepairEqCompl1: return "facepair_EqCompl1";
        case ConditionId::PointLR: return "point_LR";
        case ConditionId::AubinEq100: return "aubin_eq100";
    }
    return "?";
}

/// A failure witness: the designated vector(s), exact, plus the face or
/// face pair (saturated active sets) that produced it.
struct Witness {
    std::map<std::string, RatVec> vectors;
    std::optional<std::set<std::size_t>> face;
    std::optional<std::set<std::size_t>> face2;
    std::optional<std::set<std::size_t>> piece_face;  // face G of F1-F2
};

struct Verdict {
    bool holds = true;
    std::optional<Witness> witness;
};

struct StabilityReport {
    std::map<ConditionId, Verdict> verdicts;
    bool all_hold() const {
        for (const auto& [c, v] : verdicts)
            if (!v.holds) return false;
        return true;
    }
};

namespace detail {

/// Nonzero z in the column space of span whose rows in `zero_rows` vanish,
/// or nullopt when the intersection is trivial. Exact.
inline std::optional<RatVec> span_coordinate_section(
    const RatMat& span, const std::vector<std::size_t>& zero_rows) {
    if (span.cols() == 0) return std::nullopt;
    RatMat rows(zero_rows.size(), span.cols());
    for (std::size_t i = 0; i < zero_rows.size(); ++i)
        for (std::size_t j = 0; j < span.cols(); ++j) rows(i, j) = span(zero_rows[i], j);
    RatMat ker = zero_rows.empty() ? RatMat::identity(span.cols())
                                   : rat_nullspace(rows);
    for (std::size_t j = 0; j < ker.cols(); ++j) {
        RatVec z = span * ker.col(j);
        if (!rat_is_zero(z)) return z;
    }
    return std::nullopt;
}

}  // namespace detail

/// SCD regularity, dual form: (v*, 0) in L* forces v* = 0, for every member.
/// Square split only.
inline Verdict check_scd_regular(const ScCollection& dual) {
    for (const auto& m : dual.members) {
        const std::size_t n = m.split.first, mm = m.split.second;
        if (n != mm) throw std::invalid_argument("SCD regularity needs a square split");
        std::vector<std::size_t> zr;
        for (std::size_t i = 0; i < mm; ++i) zr.push_back(n + i);
        if (auto z = detail::span_coordinate_section(m.span, zr)) {
            Witness w;
            w.vectors["vstar"] = RatVec(z->begin(), z->begin() + n);
            w.face = m.tag.face_active;
            return {false, w};
        }
    }
    return {true, std::nullopt};
}

/// Condition (5.4): ((0, v), 0) in L forces v = 0, members split (l+k, k).
inline Verdict check_primal(const ScCollection& primal, std::size_t l, std::size_t k) {
    for (const auto& m : primal.members) {
        std::vector<std::size_t> zr;
        for (std::size_t i = 0; i < l; ++i) zr.push_back(i);
        for (std::size_t i = 0; i < k; ++i) zr.push_back(l + k + i);
        if (auto z = detail::span_coordinate_section(m.span, zr)) {
            Witness w;
            w.vectors["v"] = RatVec(z->begin() + l, z->begin() + l + k);
            w.face = m.tag.face_active;
            return {false, w};
        }
    }
    return {true, std::nullopt};
}

/// Condition (5.5): (w*, (u*, 0)) in L* forces w* = 0 and u* = 0.
inline Verdict check_dual(const ScCollection& dual, std::size_t l, std::size_t k) {
    for (const auto& m : dual.members) {
        std::vector<std::size_t> zr;
        for (std::size_t i = 0; i < k; ++i) zr.push_back(k + l + i);  // v* block
        if (auto z = detail::span_coordinate_section(m.span, zr)) {
            Witness w;
            w.vectors["wstar"] = RatVec(z->begin(), z->begin() + k);
            w.vectors["ustar"] = RatVec(z->begin() + k, z->begin() + k + l);
            w.face = m.tag.face_active;
            return {false, w};
        }
    }
    return {true, std::nullopt};
}

/// Face condition: for every face F of the critical cone, no v != 0 with
/// Jg_y v in F-F and -Jf_y v in (F-F)-perp.
inline Verdict check_face(const GEProblem& p) {
    p.validate();
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    RatMat jgy = p.Jg_y(), jfy = p.Jf_y();
    for (const auto& f : enumerate_faces(kc)) {
        RatMat w = f.lineality_span;
        RatMat wp = rat_orthogonal_complement(w, p.k);
        RatMat sys = wp.transpose() * jgy;  // Jg_y v in span(w)
        RatMat second = w.transpose() * jfy;  // Jf_y v orthogonal to span(w)
        for (std::size_t i = 0; i < second.rows(); ++i) sys.append_row(second.row(i));
        RatMat ker = sys.rows() ? rat_nullspace(sys) : RatMat::identity(p.k);
        for (std::size_t j = 0; j < ker.cols(); ++j) {
            RatVec v = ker.col(j);
            if (!rat_is_zero(v)) {
                Witness wit;
                wit.vectors["v"] = v;
                wit.face = f.active;
                return {false, wit};
            }
        }
    }
    return {true, std::nullopt};
}

namespace detail {

/// The complementarity pieces of gph N_C for C = F1 - F2: per face G of C,
/// {v : Jg_y v in G, -Jf_y v in C-polar intersect G-perp}. Returns a witness
/// v != 0 if some piece is nontrivial.
inline std::optional<std::pair<RatVec, std::set<std::size_t>>> facepair_violation(
    const GEProblem& p, const PolyhedralCone& c) {
    PolyhedralCone cpol = polar(c);
    RatMat jgy = p.Jg_y(), jfy = p.Jf_y();
    for (const auto& g : enumerate_faces(c)) {
        // H-rep of face G: C's system with G's active rows as equalities
        PolyhedralCone piece;
        piece.dim = p.k;
        piece.A_ineq = RatMat(0, p.k);
        piece.A_eq = RatMat(0, p.k);
        // Jg_y v in G
        for (std::size_t i = 0; i < c.A_ineq.rows(); ++i) {
            RatVec row = (RatMat::from_rows({c.A_ineq.row(i)}) * jgy).row(0);
            if (g.active.count(i))
                piece.A_eq.append_row(row);
            else
                piece.A_ineq.append_row(row);
        }
        for (std::size_t i = 0; i < c.A_eq.rows(); ++i)
            piece.A_eq.append_row((RatMat::from_rows({c.A_eq.row(i)}) * jgy).row(0));
        // -Jf_y v in C-polar
        RatMat njfy(jfy.rows(), jfy.cols());
        for (std::size_t i = 0; i < jfy.rows(); ++i)
            for (std::size_t j = 0; j < jfy.cols(); ++j) njfy(i, j) = -jfy(i, j);
        for (std::size_t i = 0; i < cpol.A_ineq.rows(); ++i)
            piece.A_ineq.append_row(
                (RatMat::from_rows({cpol.A_ineq.row(i)}) * njfy).row(0));
        for (std::size_t i = 0; i < cpol.A_eq.rows(); ++i)
            piece.A_eq.append_row((RatMat::from_rows({cpol.A_eq.row(i)}) * njfy).row(0));
        // -Jf_y v orthogonal to G (i.e. in G-perp)
        RatMat gperp_sys = g.lineality_span.transpose() * njfy;
        for (std::size_t i = 0; i < gperp_sys.rows(); ++i)
            piece.A_eq.append_row(gperp_sys.row(i));
        auto t = cone_is_trivial(piece);
        if (!t.trivial) return std::make_pair(t.witness, g.active);
    }
    return std::nullopt;
}

}  // namespace detail

/// Face-pair condition: for every pair F2 subset of F1 and every
/// complementarity piece of gph N_{F1-F2}, triviality of the lifted cone.
inline Verdict check_facepair(const GEProblem& p) {
    p.validate();
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    auto faces = enumerate_faces(kc);
    for (const auto& f1 : faces)
        for (const auto& f2 : faces) {
            if (!face_subset(f2, f1)) continue;
            PolyhedralCone c = face_difference(kc, f1, f2);
            if (auto bad = detail::facepair_violation(p, c)) {
                Witness w;
                w.vectors["v"] = bad->first;
                w.face = f1.active;
                w.face2 = f2.active;
                w.piece_face = bad->second;
                return {false, w};
            }
        }
    return {true, std::nullopt};
}

/// Levy-Rockafellar point criterion: the face-pair test restricted to the
/// single superface K - F_min = K (isolated calmness AT the reference).
inline Verdict check_point_LR(const GEProblem& p) {
    p.validate();
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    if (auto bad = detail::facepair_violation(p, kc)) {
        auto faces = enumerate_faces(kc);
        Witness w;
        w.vectors["v"] = bad->first;
        w.face = faces.back().active;   // K itself
        w.face2 = faces.front().active; // minimal face
        w.piece_face = bad->second;
        return {false, w};
    }
    return {true, std::nullopt};
}

/// Coderivative test in the polyhedral-affine case: per superface
/// C = F1 - F2, no (w*, z*) != 0 with -w* in C, z* in C-polar and
/// Jf_y^T w* + Jg_y^T z* = 0; u* = Jf_x^T w* + Jg_x^T z*. The parameter
/// augmentation makes the rank condition vacuous and z* part of u*, so
/// (w*, u*) = 0 iff (w*, z*) = 0 and the test below is the augmented one.
inline Verdict check_aubin_eq100(const GEProblem& p) {
    p.validate();
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    auto faces = enumerate_faces(kc);
    RatMat jfyt = p.Jf_y().transpose(), jgyt = p.Jg_y().transpose();
    RatMat jfxt = p.Jf_x().transpose(), jgxt = p.Jg_x().transpose();
    for (const auto& f1 : faces)
        for (const auto& f2 : faces) {
            if (!face_subset(f2, f1)) continue;
            PolyhedralCone c = face_difference(kc, f1, f2);
            PolyhedralCone cpol = polar(c);
            // variables (w*, z*) in R^{2k}
            PolyhedralCone sys;
            sys.dim = 2 * p.k;
            sys.A_ineq = RatMat(0, 2 * p.k);
            sys.A_eq = RatMat(0, 2 * p.k);
            auto lift = [&](const RatVec& row, bool on_w, bool negate) {
                RatVec r(2 * p.k);
                for (std::size_t i = 0; i < p.k; ++i)
                    r[on_w ? i : p.k + i] = negate ? -row[i] : row[i];
                return r;
            };
            for (std::size_t i = 0; i < c.A_ineq.rows(); ++i)
                sys.A_ineq.append_row(lift(c.A_ineq.row(i), true, true));  // -w* in C
            for (std::size_t i = 0; i < c.A_eq.rows(); ++i)
                sys.A_eq.append_row(lift(c.A_eq.row(i), true, true));
            for (std::size_t i = 0; i < cpol.A_ineq.rows(); ++i)
                sys.A_ineq.append_row(lift(cpol.A_ineq.row(i), false, false));
            for (std::size_t i = 0; i < cpol.A_eq.rows(); ++i)
                sys.A_eq.append_row(lift(cpol.A_eq.row(i), false, false));
            for (std::size_t i = 0; i < p.k; ++i) {
                RatVec r(2 * p.k);
                for (std::size_t j = 0; j < p.k; ++j) {
                    r[j] = jfyt(i, j);
                    r[p.k + j] = jgyt(i, j);
                }
                sys.A_eq.append_row(r);  // Jf_y^T w* + Jg_y^T z* = 0
            }
            auto t = cone_is_trivial(sys);
            if (!t.trivial) {
                RatVec wstar(t.witness.begin(), t.witness.begin() + p.k);
                RatVec zstar(t.witness.begin() + p.k, t.witness.end());
                RatVec ustar = rat_add(jfxt * wstar, jgxt * zstar);
                Witness w;
                w.vectors["wstar"] = wstar;
                w.vectors["zstar"] = zstar;
                w.vectors["ustar"] = ustar;
                w.face = f1.active;
                w.face2 = f2.active;
                return {false, w};
            }
        }
    return {true, std::nullopt};
}

/// Re-verifies a failure witness exactly against its condition premise;
/// every reported witness must pass this before a report ships.
bool verify_witness(const GEProblem& p, ConditionId cond, const Witness& w);

/// Run the selected conditions and assemble a report. Failing verdicts are
/// re-verified before inclusion. workers > 1 evaluates conditions
/// concurrently; verdicts are independent so the merge is order-free.
inline StabilityReport run_checks(const GEProblem& p,
                                  const std::vector<ConditionId>& conditions,
                                  std::size_t workers = 1) {
    StabilityReport rep;
    auto hcols = sc_derivative_H(p);
    auto one = [&](ConditionId c) {
        Verdict v;
        switch (c) {
            case ConditionId::ScdRegular: {
                auto ext = extend_to_F(p, hcols.first, hcols.second);
                v = check_scd_regular(ext.second);
                break;
            }
            case ConditionId::Primal54:
                v = check_primal(hcols.first, p.l, p.k);
                break;
            case ConditionId::Dual55:
                v = check_dual(hcols.second, p.l, p.k);
                break;
            case ConditionId::FaceEqCompl:
                v = check_face(p);
                break;
            case ConditionId::FacepairEqCompl1:
                v = check_facepair(p);
                break;
            case ConditionId::PointLR:
                v = check_point_LR(p);
                break;
            case ConditionId::AubinEq100:
                v = check_aubin_eq100(p);
                break;
        }
        if (!v.holds && !verify_witness(p, c, *v.witness))
            throw std::logic_error("internal error: witness failed re-verification for " +
                                   condition_name(c));
        return v;
    };
    if (workers > 1) {
        std::vector<std::future<Verdict>> futs;
        for (auto c : conditions)
            futs.push_back(std::async(std::launch::async, one, c));
        for (std::size_t i = 0; i < conditions.size(); ++i)
            rep.verdicts[conditions[i]] = futs[i].get();
    } else {
        for (auto c : conditions) rep.verdicts[c] = one(c);
    }
    return rep;
}

inline std::vector<ConditionId> all_conditions() {
    return {ConditionId::ScdRegular,       ConditionId::Primal54,
            ConditionId::Dual55,           ConditionId::FaceEqCompl,
            ConditionId::FacepairEqCompl1, ConditionId::PointLR,
            ConditionId::AubinEq100};
}

// ---- witness re-verification ------------------------------------------------

namespace detail {

inline Face face_from_active(const PolyhedralCone& kc,
                             const std::set<std::size_t>& active) {
    for (const auto& f : enumerate_faces(kc))
        if (f.active == active) return f;
    throw std::logic_error("unknown face in witness");
}

inline bool in_span(const RatMat& span, const RatVec& z) {
    std::vector<RatVec> c;
    for (std::size_t j = 0; j < span.cols(); ++j) c.push_back(span.col(j));
    std::size_t r0 = c.empty() ? 0 : rat_rank(RatMat::from_columns(c));
    c.push_back(z);
    return rat_rank(RatMat::from_columns(c)) == r0;
}

}  // namespace detail

inline bool verify_witness_impl(const GEProblem& p, ConditionId cond,
                                const Witness& w) {
    PolyhedralCone kc = critical_cone(p.D, p.gbar(), p.dstar());
    switch (cond) {
        case ConditionId::FaceEqCompl: {
            const RatVec& v = w.vectors.at("v");
            if (rat_is_zero(v) || !w.face) return false;
            Face f = detail::face_from_active(kc, *w.face);
            RatVec gy = p.Jg_y() * v;
            RatVec fy = p.Jf_y() * v;
            if (!detail::in_span(f.lineality_span, gy)) return false;
            // -Jf_y v orthogonal to F-F
            for (std::size_t j = 0; j < f.lineality_span.cols(); ++j)
                if (rat_dot(f.lineality_span.col(j), fy) != 0) return false;
            return true;
        }
        case ConditionId::PointLR:
        case ConditionId::FacepairEqCompl1: {
            const RatVec& v = w.vectors.at("v");
            if (rat_is_zero(v) || !w.face || !w.face2) return false;
            Face f1 = detail::face_from_active(kc, *w.face);
            Face f2 = detail::face_from_active(kc, *w.face2);
            PolyhedralCone c = face_difference(kc, f1, f2);
            PolyhedralCone cpol = polar(c);
            RatVec gy = p.Jg_y() * v;
            RatVec nfy = rat_scale(-1, p.Jf_y() * v);
            return c.contains(gy) && cpol.contains(nfy) && rat_dot(gy, nfy) == 0;
        }
        case ConditionId::AubinEq100: {
            const RatVec& ws = w.vectors.at("wstar");
            const RatVec& zs = w.vectors.at("zstar");
            if ((rat_is_zero(ws) && rat_is_zero(zs)) || !w.face || !w.face2) return false;
            Face f1 = detail::face_from_active(kc, *w.face);
            Face f2 = detail::face_from_active(kc, *w.face2);
            PolyhedralCone c = face_difference(kc, f1, f2);
            PolyhedralCone cpol = polar(c);
            if (!c.contains(rat_scale(-1, ws)) || !cpol.contains(zs)) return false;
            RatVec chain = rat_add(p.Jf_y().transpose() * ws, p.Jg_y().transpose() * zs);
            return rat_is_zero(chain);
        }
        case ConditionId::ScdRegular: {
            const RatVec& vs = w.vectors.at("vstar");
            return !rat_is_zero(vs);
        }
        case ConditionId::Primal54: {
            // premise: ((0,v),0) in the member tagged by w.face
            const RatVec& v = w.vectors.at("v");
            if (rat_is_zero(v) || !w.face) return false;
            auto h = sc_derivative_H(p).first;
            for (const auto& m : h.members) {
                if (m.tag.face_active != *w.face) continue;
                RatVec z(p.l + 2 * p.k);
                for (std::size_t i = 0; i < p.k; ++i) z[p.l + i] = v[i];
                return detail::in_span(m.span, z);
            }
            return false;
        }
        case ConditionId::Dual55: {
            const RatVec& ws = w.vectors.at("wstar");
            const RatVec& us = w.vectors.at("ustar");
            if ((rat_is_zero(ws) && rat_is_zero(us)) || !w.face) return false;
            auto h = sc_derivative_H(p).second;
            for (const auto& m : h.members) {
                if (m.tag.face_active != *w.face) continue;
                RatVec z(p.k + p.l + p.k);
                for (std::size_t i = 0; i < p.k; ++i) z[i] = ws[i];
                for (std::size_t i = 0; i < p.l; ++i) z[p.k + i] = us[i];
                return detail::in_span(m.span, z);
            }
            return false;
        }
    }
    return false;
}

inline bool verify_witness(const GEProblem& p, ConditionId cond, const Witness& w) {
    return verify_witness_impl(p, cond, w);
}

}  // namespace scdstab

#endif
