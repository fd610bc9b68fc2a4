#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "scdstab/subspace.hpp"

using namespace scdstab;

namespace {

Subspace random_subspace(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::normal_distribution<double> gauss;
    DMat cols;
    for (std::size_t j = 0; j < n; ++j) {
        DVec c(n + m);
        for (auto& x : c) x = gauss(rng);
        cols.push_back(std::move(c));
    }
    return Subspace::from_spanning(cols, {n, m});
}

double mat_inf_diff(const DMat& a, const DMat& b) {
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
    return worst;
}

}  // namespace

TEST_CASE("spanning matrix basis extraction") {
    Subspace s = Subspace::from_spanning({{1, 2}}, {1, 1});
    CHECK(s.dim() == 1);
    double inv = 1.0 / std::sqrt(5.0);
    CHECK(std::abs(std::abs(s.basis()[0][0]) - inv) < 1e-12);
    CHECK(std::abs(std::abs(s.basis()[0][1]) - 2 * inv) < 1e-12);

    Subspace dep = Subspace::from_spanning({{1, 0}, {2, 0}}, {1, 1});
    CHECK(dep.dim() == 1);
    CHECK(std::abs(std::abs(dep.basis()[0][0]) - 1.0) < 1e-12);

    // rge(I, A^T) for the 1x1 matrix A = (2)
    Subspace rge = Subspace::from_spanning({{1, 2}}, {1, 1});
    CHECK(subspace_distance(rge, s) < 1e-12);

    CHECK_THROWS_WITH(Subspace::from_spanning({{0, 0}}, {1, 1}),
                      doctest::Contains("zero subspace"));
}

TEST_CASE("projection matrices") {
    Subspace axis = Subspace::from_spanning({{1, 0}}, {1, 1});
    DMat p = axis.projection();
    CHECK(p[0][0] == doctest::Approx(1.0));
    CHECK(p[1][1] == doctest::Approx(0.0));

    Subspace diag = Subspace::from_spanning({{1, 1}}, {1, 1});
    DMat q = diag.projection();
    for (auto& row : q)
        for (auto v : row) CHECK(v == doctest::Approx(0.5));

    Subspace zero(2, {1, 1});
    DMat z = zero.projection();
    CHECK(mat_inf_diff(z, DMat{{0, 0}, {0, 0}}) == 0.0);

    // idempotency and symmetry within stated tolerances
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        Subspace s = random_subspace(rng, 3, 2);
        DMat pm = s.projection();
        double sym = 0, idem = 0, trace = 0;
        for (std::size_t i = 0; i < 5; ++i) {
            trace += pm[i][i];
            for (std::size_t j = 0; j < 5; ++j) {
                sym = std::max(sym, std::abs(pm[i][j] - pm[j][i]));
                double pij = 0;
                for (std::size_t r = 0; r < 5; ++r) pij += pm[i][r] * pm[r][j];
                idem = std::max(idem, std::abs(pij - pm[i][j]));
            }
        }
        CHECK(sym < 1e-10);
        CHECK(idem < 1e-9);
        CHECK(std::abs(trace - double(s.dim())) < 1e-9);
    }
}

TEST_CASE("metric on Z_nm") {
    Subspace e1 = Subspace::from_spanning({{1, 0}}, {1, 1});
    Subspace e2 = Subspace::from_spanning({{0, 1}}, {1, 1});
    Subspace diag = Subspace::from_spanning({{1, 1}}, {1, 1});
    CHECK(subspace_distance(e1, e2) == doctest::Approx(1.0));
    CHECK(subspace_distance(e1, e1) == doctest::Approx(0.0));
    // eigenvalues of P1 - P2 for a 45 degree rotation are +-sin(45deg)
    CHECK(subspace_distance(e1, diag) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));

    Subspace other(3, {2, 1});
    CHECK_THROWS(subspace_distance(e1, other));
}

TEST_CASE("complements") {
    Subspace e1 = Subspace::from_spanning({{1, 0}}, {1, 1});
    Subspace c = e1.complement();
    CHECK(c.dim() == 1);
    CHECK(std::abs(std::abs(c.basis()[0][1]) - 1.0) < 1e-12);

    Subspace full = Subspace::from_spanning({{1, 0}, {0, 1}}, {1, 1});
    CHECK(full.complement().dim() == 0);

    Subspace t = Subspace::from_spanning({{1, 2}}, {1, 1});
    Subspace tc = t.complement();
    Subspace expect = Subspace::from_spanning({{-2, 1}}, {1, 1});
    CHECK(subspace_distance(tc, expect) < 1e-10);

    // projection(L) + projection(L-perp) = I
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        Subspace s = random_subspace(rng, 2, 3);
        DMat p = s.projection(), q = s.complement().projection();
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j)
                CHECK(std::abs(p[i][j] + q[i][j] - (i == j ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("adjoints") {
    // graph of x -> 2x is self-adjoint under the block rotation
    Subspace l = Subspace::from_spanning({{1, 2}}, {1, 1});
    CHECK(subspace_distance(l.adjoint(), l) < 1e-10);

    Subspace zero_map = Subspace::from_spanning({{1, 0}}, {1, 1});
    CHECK(subspace_distance(zero_map.adjoint(), zero_map) < 1e-10);

    // adjoint of rge(I, A) is rge(I, A^T) for square A
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 3;
        DMat a(n, DVec(n));
        for (auto& row : a)
            for (auto& v : row) v = gauss(rng);
        DMat cols, colst;
        for (std::size_t j = 0; j < n; ++j) {
            DVec c(2 * n), ct(2 * n);
            c[j] = ct[j] = 1;
            for (std::size_t i = 0; i < n; ++i) {
                c[n + i] = a[i][j];
                ct[n + i] = a[j][i];
            }
            cols.push_back(c);
            colst.push_back(ct);
        }
        Subspace rge_a = Subspace::from_spanning(cols, {n, n});
        Subspace rge_at = Subspace::from_spanning(colst, {n, n});
        CHECK(subspace_distance(rge_a.adjoint(), rge_at) < 1e-8);
    }

    Subspace wrong_dim = Subspace::from_spanning({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {2, 1});
    CHECK_THROWS(wrong_dim.adjoint());
}

TEST_CASE("linear images") {
    Subspace l = Subspace::from_spanning({{1, 0}}, {1, 1});
    CHECK(subspace_distance(linear_image({{1, 0}, {0, 1}}, l, {1, 1}), l) < 1e-12);
    CHECK(subspace_distance(linear_image({{2, 0}, {0, 2}}, l, {1, 1}), l) < 1e-12);

    // columns of A = [[1,0],[1,1]]
    Subspace img = linear_image({{1, 1}, {0, 1}}, l, {1, 1});
    Subspace expect = Subspace::from_spanning({{1, 1}}, {1, 1});
    CHECK(subspace_distance(img, expect) < 1e-12);

    CHECK_THROWS(linear_image({{1, 1}, {1, 1}}, l, {1, 1}));
}

TEST_CASE("coordinate intersections") {
    Subspace full = Subspace::from_spanning({{1, 0}, {0, 1}}, {1, 1});
    Subspace cut = full.intersect_coordinate({true, false});
    CHECK(cut.dim() == 1);
    CHECK(std::abs(std::abs(cut.basis()[0][1]) - 1.0) < 1e-12);

    Subspace diag = Subspace::from_spanning({{1, 1}}, {1, 1});
    CHECK(diag.intersect_coordinate({true, false}).dim() == 0);

    Subspace two = Subspace::from_spanning({{1, 0, 0}, {0, 1, 1}}, {2, 1});
    Subspace kept = two.intersect_coordinate({false, false, true});
    CHECK(kept.dim() == 1);
    Subspace e1 = Subspace::from_spanning({{1, 0, 0}}, {2, 1});
    CHECK(subspace_distance(kept, e1) < 1e-10);
}

TEST_CASE("involution and isometry") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::size_t> d(1, 6);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = d(rng), m = d(rng);
        Subspace l1 = random_subspace(rng, n, m);
        Subspace l2 = random_subspace(rng, n, m);
        CHECK(subspace_distance(l1.adjoint().adjoint(), l1) <= 1e-8);
        CHECK(std::abs(subspace_distance(l1, l2) -
                       subspace_distance(l1.adjoint(), l2.adjoint())) <= 1e-8);
    }
}

TEST_CASE("first-order continuity of linear images") {
    std::mt19937_64 rng(23);
    Subspace l = random_subspace(rng, 2, 2);
    DMat a = {{1, 0, 0.5, 0}, {0, 1, 0, 0}, {0.25, 0, 1, 0}, {0, 0, 0, 1}};
    Subspace al = linear_image(a, l, {2, 2});
    const double c = 50.0;  // fitted slack constant
    for (int t = 3; t <= 8; ++t) {
        double eps = std::pow(10.0, -t);
        DMat ak = a;
        ak[0][1] += eps;
        ak[2][3] -= eps;
        CHECK(subspace_distance(linear_image(ak, l, {2, 2}), al) <= c * eps);
    }
}

TEST_CASE("distances never exceed one on equal dimensions") {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 1000; ++t) {
        Subspace l1 = random_subspace(rng, 3, 2);
        Subspace l2 = random_subspace(rng, 3, 2);
        CHECK(subspace_distance(l1, l2) <= 1.0 + 1e-9);
    }
}
