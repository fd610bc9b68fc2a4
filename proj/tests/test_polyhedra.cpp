#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scdstab/polyhedra.hpp"

using namespace scdstab;

namespace {

PolyhedralSet halfline() {
    PolyhedralSet d;
    d.dim = 1;
    d.A = RatMat(1, 1);
    d.A(0, 0) = -1;
    d.b = {0};
    return d;
}

PolyhedralSet orthant(std::size_t k) {
    PolyhedralSet d;
    d.dim = k;
    d.A = RatMat(k, k);
    for (std::size_t i = 0; i < k; ++i) d.A(i, i) = -1;
    d.b = RatVec(k);
    return d;
}

PolyhedralCone orthant_cone(std::size_t k) {
    PolyhedralCone c;
    c.dim = k;
    c.A_ineq = RatMat(k, k);
    for (std::size_t i = 0; i < k; ++i) c.A_ineq(i, i) = -1;
    c.A_eq = RatMat(0, k);
    return c;
}

bool cone_contains(const PolyhedralCone& c, const RatVec& z) {
    return c.contains(z);
}

// every z <= 1 box point of one cone lies in the other, decided by LP
bool cone_subset(const PolyhedralCone& a, const PolyhedralCone& b) {
    // a subset of b iff no generator of a violates b
    ConeGenerators g = cone_generators(a);
    for (const auto& r : g.rays)
        if (!b.contains(r)) return false;
    for (const auto& l : g.lineality)
        if (!b.contains(l) || !b.contains(rat_scale(-1, l))) return false;
    return true;
}

bool cone_equal(const PolyhedralCone& a, const PolyhedralCone& b) {
    return cone_subset(a, b) && cone_subset(b, a);
}

// brute-force face enumeration: every subset of rows, canonicalized by the
// span of its forced-equality system
std::set<std::set<std::size_t>> brute_force_faces(const PolyhedralCone& c) {
    std::set<std::set<std::size_t>> out;
    const std::size_t p = c.A_ineq.rows();
    for (std::size_t mask = 0; mask < (std::size_t(1) << p); ++mask) {
        std::set<std::size_t> act;
        for (std::size_t i = 0; i < p; ++i)
            if (mask & (std::size_t(1) << i)) act.insert(i);
        // face must be nonempty: feasibility of the equality-restricted system
        RatMat eq = c.A_eq;
        for (auto i : act) eq.append_row(c.A_ineq.row(i));
        RatVec zero(eq.rows());
        RatVec bz(c.A_ineq.rows());
        if (!SimplexSolver::feasible_point(c.A_ineq, bz, eq, zero, c.dim)) continue;
        // canonical form: saturate every row that cannot go strictly negative
        std::set<std::size_t> sat = act;
        for (std::size_t i = 0; i < p; ++i) {
            if (sat.count(i)) continue;
            RatMat a2 = c.A_ineq;
            RatVec b2 = bz;
            RatVec row = c.A_ineq.row(i);
            a2.append_row(row);
            b2.push_back(-1);  // a_i z <= -1 reachable?
            if (!SimplexSolver::feasible_point(a2, b2, eq, zero, c.dim)) sat.insert(i);
        }
        out.insert(sat);
    }
    return out;
}

std::mt19937_64 g_rng(97);

PolyhedralCone random_cone(std::size_t k, std::size_t rows) {
    std::uniform_int_distribution<int> coef(-2, 2);
    PolyhedralCone c;
    c.dim = k;
    c.A_ineq = RatMat(rows, k);
    c.A_eq = RatMat(0, k);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < k; ++j) c.A_ineq(i, j) = coef(g_rng);
    return c;
}

}  // namespace

TEST_CASE("tangent cones") {
    PolyhedralSet d = halfline();
    PolyhedralCone t0 = tangent_cone(d, {0});
    CHECK(cone_contains(t0, {1}));
    CHECK(!cone_contains(t0, {-1}));

    PolyhedralCone t1 = tangent_cone(d, {1});
    CHECK(cone_contains(t1, {-5}));
    CHECK(cone_contains(t1, {5}));

    PolyhedralSet box;  // unit box in R^2
    box.dim = 2;
    box.A = RatMat(4, 2);
    box.A(0, 0) = 1;
    box.A(1, 1) = 1;
    box.A(2, 0) = -1;
    box.A(3, 1) = -1;
    box.b = {1, 1, 0, 0};
    PolyhedralCone tc = tangent_cone(box, {1, 1});
    CHECK(cone_contains(tc, {-1, -1}));
    CHECK(!cone_contains(tc, {1, 0}));
    CHECK(!cone_contains(tc, {0, 1}));

    CHECK_THROWS(tangent_cone(d, {-1}));
}

TEST_CASE("normal cones") {
    PolyhedralSet d = halfline();
    PolyhedralCone n0 = normal_cone(d, {0});
    CHECK(cone_contains(n0, {-1}));
    CHECK(!cone_contains(n0, {1}));

    PolyhedralCone n1 = normal_cone(d, {1});
    CHECK(cone_is_trivial(n1).trivial);

    PolyhedralSet halfplane;
    halfplane.dim = 2;
    halfplane.A = RatMat(1, 2);
    halfplane.A(0, 0) = 1;
    halfplane.b = {0};
    PolyhedralCone ray = normal_cone(halfplane, {0, 5});
    CHECK(cone_contains(ray, {1, 0}));
    CHECK(!cone_contains(ray, {-1, 0}));
    CHECK(!cone_contains(ray, {0, 1}));
    CHECK(!cone_contains(ray, {0, -1}));
}

TEST_CASE("critical cones") {
    PolyhedralSet d = halfline();
    PolyhedralCone k00 = critical_cone(d, {0}, {0});
    CHECK(cone_contains(k00, {1}));
    CHECK(!cone_contains(k00, {-1}));

    PolyhedralCone kneg = critical_cone(d, {0}, {-1});
    CHECK(cone_is_trivial(kneg).trivial);

    PolyhedralCone k2 = critical_cone(orthant(2), {0, 0}, {-1, 0});
    CHECK(cone_contains(k2, {0, 1}));
    CHECK(!cone_contains(k2, {1, 0}));
    CHECK(!cone_contains(k2, {0, -1}));

    CHECK_THROWS(critical_cone(d, {0}, {1}));
}

TEST_CASE("polars") {
    PolyhedralCone rp = orthant_cone(1);
    PolyhedralCone rm = polar(rp);
    CHECK(cone_contains(rm, {-1}));
    CHECK(!cone_contains(rm, {1}));

    PolyhedralCone zero;
    zero.dim = 2;
    zero.A_ineq = RatMat(0, 2);
    zero.A_eq = RatMat::identity(2);
    PolyhedralCone whole = polar(zero);
    CHECK(cone_contains(whole, {7, -3}));

    PolyhedralCone ray;  // R_+ (1,1)
    ray.dim = 2;
    ray.A_ineq = RatMat(2, 2);
    ray.A_ineq(0, 0) = 1;
    ray.A_ineq(0, 1) = -1;
    ray.A_ineq(1, 0) = -1;
    ray.A_ineq(1, 1) = 1;
    ray.A_eq = RatMat(0, 2);
    // those two rows force z1 = z2; add z1 >= 0
    RatVec nonneg(2);
    nonneg[0] = -1;
    ray.A_ineq.append_row(nonneg);
    PolyhedralCone pr = polar(ray);
    CHECK(cone_contains(pr, {-1, -1}));
    CHECK(cone_contains(pr, {1, -1}));   // z1 + z2 = 0 boundary
    CHECK(!cone_contains(pr, {1, 0}));
}

TEST_CASE("bipolar involution on random cones") {
    for (int t = 0; t < 25; ++t) {
        PolyhedralCone c = random_cone(3, 4);
        CHECK(cone_equal(polar(polar(c)), c));
    }
    for (int t = 0; t < 10; ++t) {
        PolyhedralCone c = random_cone(5, 3);
        CHECK(cone_equal(polar(polar(c)), c));
    }
}

TEST_CASE("face enumeration") {
    auto faces1 = enumerate_faces(orthant_cone(1));
    REQUIRE(faces1.size() == 2);
    CHECK(faces1[0].dim == 0);
    CHECK(faces1[1].dim == 1);

    auto faces2 = enumerate_faces(orthant_cone(2));
    CHECK(faces2.size() == 4);

    PolyhedralCone sub;  // the line z1 = z2 in R^2
    sub.dim = 2;
    sub.A_ineq = RatMat(0, 2);
    sub.A_eq = RatMat(1, 2);
    sub.A_eq(0, 0) = 1;
    sub.A_eq(0, 1) = -1;
    CHECK(enumerate_faces(sub).size() == 1);

    for (std::size_t d = 1; d <= 6; ++d)
        CHECK(enumerate_faces(orthant_cone(d)).size() == (std::size_t(1) << d));
}

TEST_CASE("face enumeration matches the brute-force oracle") {
    for (int t = 0; t < 12; ++t) {
        PolyhedralCone c = random_cone(3, 4);
        std::set<std::set<std::size_t>> got;
        for (const auto& f : enumerate_faces(c)) got.insert(f.active);
        CHECK(got == brute_force_faces(c));
    }
    for (int t = 0; t < 4; ++t) {
        PolyhedralCone c = random_cone(4, 6);
        std::set<std::set<std::size_t>> got;
        for (const auto& f : enumerate_faces(c)) got.insert(f.active);
        CHECK(got == brute_force_faces(c));
    }
}

TEST_CASE("face lineality spans") {
    auto faces = enumerate_faces(orthant_cone(1));
    CHECK(faces[0].lineality_span.cols() == 0);  // {0}
    CHECK(faces[1].lineality_span.cols() == 1);  // R

    PolyhedralCone ray;
    ray.dim = 2;
    ray.A_ineq = RatMat(2, 2);
    ray.A_ineq(0, 0) = 1;
    ray.A_ineq(0, 1) = -1;
    ray.A_ineq(1, 0) = -1;
    ray.A_ineq(1, 1) = 0;
    ray.A_eq = RatMat(1, 2);
    ray.A_eq(0, 0) = 1;
    ray.A_eq(0, 1) = -1;
    auto rf = enumerate_faces(ray);
    bool saw_diag = false;
    for (const auto& f : rf)
        if (f.dim == 1) {
            RatVec v = f.lineality_span.col(0);
            CHECK(v[0] == v[1]);
            saw_diag = true;
        }
    CHECK(saw_diag);
}

TEST_CASE("cone triviality with witnesses") {
    PolyhedralCone point;
    point.dim = 1;
    point.A_ineq = RatMat(2, 1);
    point.A_ineq(0, 0) = 1;
    point.A_ineq(1, 0) = -1;
    point.A_eq = RatMat(0, 1);
    CHECK(cone_is_trivial(point).trivial);

    auto r = cone_is_trivial(orthant_cone(1));
    CHECK(!r.trivial);
    CHECK(r.witness[0] > 0);
    CHECK(orthant_cone(1).contains(r.witness));
    CHECK(!rat_is_zero(r.witness));

    PolyhedralCone pinched;  // z1 <= 0, z2 <= 0, -z1 - z2 <= 0
    pinched.dim = 2;
    pinched.A_ineq = RatMat(3, 2);
    pinched.A_ineq(0, 0) = 1;
    pinched.A_ineq(1, 1) = 1;
    pinched.A_ineq(2, 0) = -1;
    pinched.A_ineq(2, 1) = -1;
    pinched.A_eq = RatMat(0, 2);
    CHECK(cone_is_trivial(pinched).trivial);
}

TEST_CASE("triviality agrees with generator enumeration on random cones") {
    for (int t = 0; t < 30; ++t) {
        PolyhedralCone c = random_cone(1 + t % 4, 1 + (t * 7) % 6);
        ConeGenerators g = cone_generators(c);
        bool has_dir = !g.lineality.empty();
        for (const auto& r : g.rays) has_dir = has_dir || !rat_is_zero(r);
        auto res = cone_is_trivial(c);
        CHECK(res.trivial == !has_dir);
        if (!res.trivial) {
            CHECK(c.contains(res.witness));
            CHECK(!rat_is_zero(res.witness));
        }
    }
}

TEST_CASE("derivative pieces of the normal-cone map") {
    auto pieces = sc_derivative_ND(halfline(), {0}, {0});
    REQUIRE(pieces.size() == 2);
    // pieces are R x {0} and {0} x R in some order
    bool saw_horizontal = false, saw_vertical = false;
    for (const auto& p : pieces) {
        REQUIRE(rat_rank(p.span) == 1);
        RatVec v = p.span.col(0);
        if (v[1] == 0 && v[0] != 0) saw_horizontal = true;
        if (v[0] == 0 && v[1] != 0) saw_vertical = true;
    }
    CHECK(saw_horizontal);
    CHECK(saw_vertical);

    PolyhedralSet line;  // D = R
    line.dim = 1;
    line.A = RatMat(0, 1);
    auto lp = sc_derivative_ND(line, {3}, {0});
    REQUIRE(lp.size() == 1);
    CHECK(lp[0].span.col(0)[1] == 0);

    auto op = sc_derivative_ND(orthant(2), {0, 0}, {0, 0});
    CHECK(op.size() == 4);
    for (const auto& p : op) CHECK(rat_rank(p.span) == 2);
}

TEST_CASE("outer tangent piece index pairs") {
    auto pairs = outer_tangent_pieces_ND(halfline(), {0}, {0});
    CHECK(pairs.size() == 3);

    PolyhedralSet line;
    line.dim = 1;
    line.A = RatMat(0, 1);
    CHECK(outer_tangent_pieces_ND(line, {0}, {0}).size() == 1);

    CHECK(outer_tangent_pieces_ND(orthant(2), {0, 0}, {0, 0}).size() == 9);

    // pairs with F1 = F2 reproduce the derivative subspaces
    auto pieces = sc_derivative_ND(halfline(), {0}, {0});
    PolyhedralCone kc = critical_cone(halfline(), {0}, {0});
    for (const auto& [f1, f2] : pairs) {
        if (f1.active != f2.active) continue;
        PolyhedralCone diff = face_difference(kc, f1, f2);
        // gph N_{F-F} for a subspace F-F is (F-F) x (F-F)-perp
        bool matched = false;
        for (const auto& p : pieces)
            if (p.face.active == f1.active) {
                Subspace got = Subspace::from_rational_span(p.span, 2, {1, 1});
                RatMat w = f1.lineality_span;
                RatMat wp = rat_orthogonal_complement(w, 1);
                Subspace expect =
                    Subspace::from_rational_span(product_span(w, wp, 1), 2, {1, 1});
                CHECK(subspace_distance(got, expect) <= 1e-9);
                matched = true;
            }
        CHECK(matched);
        (void)diff;
    }
}
