// Command-line front end: check (stability conditions), faces (critical-cone
// face lattice), oracle (sampling verification of isolated calmness).
// Exit codes: 0 all selected tests pass, 2 some condition fails or the
// oracle finds a violation, 1 on input errors.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scdstab/io.hpp"

using namespace scdstab;

namespace {

struct GlobalOpts {
    bool json = false;
    bool quiet = false;
    std::size_t workers = 1;
};

void emit(const GlobalOpts& g, const json& doc, const std::string& text) {
    if (g.quiet) return;
    if (g.json)
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << text;
}

std::size_t effective_workers(std::size_t cli_value) {
    if (const char* env = std::getenv("SCD_STAB_WORKERS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return v;
    }
    return cli_value;
}

std::vector<ConditionId> conditions_for(const std::string& sel) {
    if (sel == "all") return all_conditions();
    if (sel == "primal") return {ConditionId::Primal54};
    if (sel == "dual") return {ConditionId::Dual55};
    if (sel == "face") return {ConditionId::FaceEqCompl};
    if (sel == "facepair") return {ConditionId::FacepairEqCompl1};
    if (sel == "point") return {ConditionId::PointLR};
    if (sel == "aubin") return {ConditionId::AubinEq100};
    throw ParseError("unknown condition " + sel);
}

int cmd_check(const GlobalOpts& g, const std::string& file, const std::string& sel) {
    GEProblem p = load_problem(file).problem;
    p.validate();
    StabilityReport rep = run_checks(p, conditions_for(sel), effective_workers(g.workers));
    std::ostringstream text;
    for (const auto& [c, v] : rep.verdicts) {
        text << condition_name(c) << ": " << (v.holds ? "holds" : "fails") << "\n";
        if (!v.holds)
            for (const auto& [name, vec] : v.witness->vectors) {
                text << "  " << name << " = [";
                for (std::size_t i = 0; i < vec.size(); ++i)
                    text << (i ? ", " : "") << to_string(vec[i]);
                text << "]\n";
            }
    }
    emit(g, report_json(rep), text.str());
    return rep.all_hold() ? 0 : 2;
}

int cmd_faces(const GlobalOpts& g, const std::string& file) {
    GEProblem p = load_problem(file).problem;
    p.validate();
    auto faces = enumerate_faces(critical_cone(p.D, p.gbar(), p.dstar()));
    std::ostringstream text;
    for (const auto& f : faces) {
        text << "dim " << f.dim << "  active {";
        bool first = true;
        for (auto i : f.active) {
            text << (first ? "" : ", ") << i;
            first = false;
        }
        text << "}\n";
    }
    emit(g, faces_json(faces), text.str());
    return 0;
}

int cmd_oracle(const GlobalOpts& g, const std::string& file, const std::string& radius,
               const std::string& kappa, std::size_t samples, std::uint64_t seed) {
    LoadedProblem lp = load_problem(file);
    if (!lp.has_affine) throw ParseError("oracle requires affine data (f0 and g0)");
    lp.problem.validate();
    SolutionGraph graph = build_solution_graph(lp.problem);
    OracleReport rep = verify_isolated_calmness_around(
        graph, parse_rational(radius), parse_rational(kappa), samples, seed,
        effective_workers(g.workers));
    std::ostringstream text;
    text << (rep.consistent ? "consistent" : "violated")
         << "  empirical modulus " << rep.empirical_modulus << "\n";
    if (rep.violation) {
        auto vec = [](const RatVec& v) {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + to_string(v[i]);
            return s + "]";
        };
        text << "  x = " << vec(rep.violation->x) << "  y = " << vec(rep.violation->y)
             << "\n  x' = " << vec(rep.violation->xprime)
             << "  y' = " << vec(rep.violation->yprime) << "\n";
    }
    emit(g, oracle_json(rep), text.str());
    return rep.consistent ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability certification for polyhedral generalized equations"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_flag("--json", g.json, "emit JSON instead of text");
    app.add_flag("--quiet", g.quiet, "suppress report output");
    app.add_option("--workers", g.workers, "worker threads (SCD_STAB_WORKERS overrides)")
        ->check(CLI::PositiveNumber);

    std::string file, condition = "all", radius = "1/10", kappa = "2";
    std::size_t samples = 1000;
    std::uint64_t seed = 1;

    auto* check = app.add_subcommand("check", "run stability condition checks");
    check->add_option("file", file, "problem file")->required();
    check->add_option("--condition", condition,
                      "primal|dual|face|facepair|point|aubin|all");

    auto* faces = app.add_subcommand("faces", "list critical-cone faces");
    faces->add_option("file", file, "problem file")->required();

    auto* oracle = app.add_subcommand("oracle", "sampling oracle for isolated calmness");
    oracle->add_option("file", file, "problem file")->required();
    oracle->add_option("--radius", radius, "anchor ball radius (rational)");
    oracle->add_option("--kappa", kappa, "calmness modulus to test (rational)");
    oracle->add_option("--samples", samples, "probe count");
    oracle->add_option("--seed", seed, "generator seed");

    CLI11_PARSE(app, argc, argv);
    try {
        if (check->parsed()) return cmd_check(g, file, condition);
        if (faces->parsed()) return cmd_faces(g, file);
        if (oracle->parsed()) return cmd_oracle(g, file, radius, kappa, samples, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
