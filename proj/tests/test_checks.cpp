#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "random_instances.hpp"
#include "scdstab/checks.hpp"

using namespace scdstab;

namespace {

GEProblem running_example() {
    GEProblem p;
    p.l = 1;
    p.k = 1;
    p.xbar = {0};
    p.ybar = {0};
    p.Jf = RatMat(1, 2);
    p.Jf(0, 1) = -1;
    p.Jg = RatMat(1, 2);
    p.Jg(0, 0) = -1;
    p.Jg(0, 1) = 1;
    p.f0 = {0};
    p.g0 = {0};
    p.D.dim = 1;
    p.D.A = RatMat(1, 1);
    p.D.A(0, 0) = -1;
    p.D.b = {0};
    return p;
}

}  // namespace

TEST_CASE("running example verdicts") {
    GEProblem p = running_example();
    StabilityReport rep = run_checks(p, all_conditions());
    CHECK(rep.verdicts.at(ConditionId::ScdRegular).holds);
    CHECK(rep.verdicts.at(ConditionId::Primal54).holds);
    CHECK(rep.verdicts.at(ConditionId::Dual55).holds);
    CHECK(rep.verdicts.at(ConditionId::FaceEqCompl).holds);
    CHECK(rep.verdicts.at(ConditionId::FacepairEqCompl1).holds);
    CHECK(rep.verdicts.at(ConditionId::PointLR).holds);

    const Verdict& aubin = rep.verdicts.at(ConditionId::AubinEq100);
    REQUIRE(!aubin.holds);
    REQUIRE(aubin.witness);
    // the witness class of the hand enumeration: w* = -1, z* = -1, u* = 1
    // up to positive scaling
    const RatVec& ws = aubin.witness->vectors.at("wstar");
    const RatVec& zs = aubin.witness->vectors.at("zstar");
    const RatVec& us = aubin.witness->vectors.at("ustar");
    REQUIRE(ws.size() == 1);
    CHECK(ws[0] < 0);
    CHECK(zs[0] == ws[0]);
    CHECK(us[0] == -ws[0]);
    CHECK(!rep.all_hold());
}

TEST_CASE("running example member-level checks") {
    GEProblem p = running_example();
    auto [primal, dual] = sc_derivative_H(p);
    CHECK(check_primal(primal, p.l, p.k).holds);
    CHECK(check_dual(dual, p.l, p.k).holds);
    auto ext = extend_to_F(p, primal, dual);
    CHECK(check_scd_regular(ext.second).holds);
    CHECK(check_face(p).holds);
    CHECK(check_facepair(p).holds);
    CHECK(check_point_LR(p).holds);
    CHECK(!check_aubin_eq100(p).holds);
}

TEST_CASE("smooth regular case satisfies the coderivative test") {
    // D = R^k with invertible Jf_y
    GEProblem p;
    p.l = 1;
    p.k = 2;
    p.xbar = {0};
    p.ybar = {0, 0};
    p.Jf = RatMat(2, 3);
    p.Jf(0, 0) = 1;
    p.Jf(0, 1) = 1;
    p.Jf(1, 2) = 1;
    p.Jg = RatMat(2, 3);
    p.Jg(0, 1) = 1;
    p.Jg(1, 2) = 1;
    p.f0 = {0, 0};
    p.g0 = {0, 0};
    p.D = PolyhedralSet::whole_space(2);
    CHECK(check_aubin_eq100(p).holds);
    CHECK(check_face(p).holds);
}

TEST_CASE("strongly monotone complementarity data passes everything") {
    // Jf_y positive definite, Jg_y = I, D = R^k_+
    GEProblem p;
    p.l = 2;
    p.k = 2;
    p.xbar = {0, 0};
    p.ybar = {0, 0};
    p.Jf = RatMat(2, 4);
    p.Jf(0, 2) = 2;
    p.Jf(0, 3) = 1;
    p.Jf(1, 2) = 1;
    p.Jf(1, 3) = 2;
    p.Jf(0, 0) = -1;
    p.Jf(1, 1) = -1;
    p.Jg = RatMat(2, 4);
    p.Jg(0, 2) = 1;
    p.Jg(1, 3) = 1;
    p.f0 = {0, 0};
    p.g0 = {0, 0};
    p.D.dim = 2;
    p.D.A = RatMat(2, 2);
    p.D.A(0, 0) = -1;
    p.D.A(1, 1) = -1;
    p.D.b = {0, 0};
    StabilityReport rep = run_checks(p, all_conditions());
    for (const auto& [c, v] : rep.verdicts) CHECK(v.holds);
}

TEST_CASE("equivalence of the four conditions on random instances") {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        GEProblem p = testing::random_instance(seed);
        auto [primal, dual] = sc_derivative_H(p);
        bool a = check_primal(primal, p.l, p.k).holds;
        bool b = check_dual(dual, p.l, p.k).holds;
        bool c = check_face(p).holds;
        bool d = check_facepair(p).holds;
        CHECK(a == b);
        CHECK(b == c);
        CHECK(c == d);
    }
}

TEST_CASE("duality consistency of primal and adjoint collections") {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        GEProblem p = testing::random_instance(seed);
        auto [primal, dual] = sc_derivative_H(p);
        ScCollection adj;
        adj.kind = CollectionKind::Dual;
        for (const auto& m : primal.members) adj.members.push_back(adjoint_member(m));
        CHECK(check_dual(dual, p.l, p.k).holds == check_dual(adj, p.l, p.k).holds);
    }
}

TEST_CASE("coderivative condition implies the face condition") {
    for (std::uint64_t seed = 500; seed < 560; ++seed) {
        GEProblem p = testing::random_instance(seed);
        if (check_aubin_eq100(p).holds) CHECK(check_face(p).holds);
    }
}

TEST_CASE("witnesses re-verify exactly") {
    std::size_t failures_seen = 0;
    for (std::uint64_t seed = 700; seed < 760; ++seed) {
        GEProblem p = testing::random_instance(seed);
        StabilityReport rep = run_checks(p, all_conditions());
        for (const auto& [c, v] : rep.verdicts)
            if (!v.holds) {
                ++failures_seen;
                CHECK(verify_witness(p, c, *v.witness));
            }
    }
    CHECK(failures_seen > 0);  // the sample must actually exercise failures
}

TEST_CASE("parallel evaluation matches serial") {
    GEProblem p = running_example();
    StabilityReport serial = run_checks(p, all_conditions(), 1);
    StabilityReport par = run_checks(p, all_conditions(), 4);
    for (const auto& [c, v] : serial.verdicts)
        CHECK(v.holds == par.verdicts.at(c).holds);
}
