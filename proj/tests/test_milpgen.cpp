#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hetsched/milpgen.hpp"

using namespace hetsched;

namespace {

const std::string kFixtures = HETSCHED_FIXTURE_DIR;

Scenario hand_scenario(int B, int N, int K, int NU, double sigma,
                       std::vector<double> omega) {
    Scenario sc;
    sc.config.num_pbs = B;
    sc.config.rbs_per_pbs = N;
    sc.config.num_users = K;
    sc.config.num_normal = NU;
    sc.sigma_mw = sigma;
    sc.omega_mw = std::move(omega);
    sc.op_flags.assign(K, false);
    for (int k = NU; k < K; ++k) sc.op_flags[k] = true;
    return sc;
}

AllocationProblem hand_problem(Scenario sc, Objective obj,
                               std::vector<double> up, int max_rbs) {
    AllocationProblem p;
    p.scenario = std::move(sc);
    p.up = std::move(up);
    p.objective = obj;
    p.max_rbs = max_rbs;
    return p;
}

std::string xname(int k, int n, int b) {
    return "X_" + std::to_string(k + 1) + "_" + std::to_string(n + 1) + "_" +
           std::to_string(b + 1);
}
std::string psiname(int k, int n, int b) {
    return "PSI_" + std::to_string(k + 1) + "_" + std::to_string(n + 1) + "_" +
           std::to_string(b + 1);
}
std::string lname(int k, int n, int b) {
    return "L_" + std::to_string(k + 1) + "_" + std::to_string(n + 1) + "_" +
           std::to_string(b + 1);
}
std::string vname(int k, int n, int m, int b, int w) {
    return "V_" + std::to_string(k + 1) + "_" + std::to_string(n + 1) + "_" +
           std::to_string(m + 1) + "_" + std::to_string(b + 1) + "_" +
           std::to_string(w + 1);
}

// Pins every model variable to the value it takes at a fixed assignment:
// X from the assignment itself, PSI from the SINR definition, V = PSI * X
// of the interferer, L tight against the cut family. This is the optimal
// completion of the fixed X, so checking constraints against it exercises
// the whole encoding.
std::vector<double> pinned_values(const AllocationProblem& p,
                                  const MilpModel& m, const Assignment& a,
                                  const PiecewiseLnSpec& pw) {
    const auto& sc = p.scenario;
    const int B = sc.config.num_pbs;
    const int N = sc.config.rbs_per_pbs;
    const int K = sc.config.num_users;
    std::vector<double> val(m.vars.size(), 0.0);

    auto is_ln_user = [&](int k) {
        return p.objective == Objective::PfBefore ||
               (p.objective == Objective::PfAfter && !sc.op_flags[k]);
    };
    auto set = [&](const std::string& name, double v) {
        int i = m.var_index(name);
        REQUIRE(i >= 0);
        val[static_cast<std::size_t>(i)] = v;
    };

    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
            for (int b = 0; b < B; ++b) {
                const bool on = a.slot_user[b * N + n] == k;
                set(xname(k, n, b), on ? 1.0 : 0.0);
                double psi = on ? sinr(p, a, k, n, b) : 0.0;
                set(psiname(k, n, b), psi);
                for (int mm = 0; mm < K; ++mm) {
                    if (mm == k) continue;
                    for (int w = 0; w < B; ++w) {
                        if (w == b) continue;
                        bool mon = a.slot_user[w * N + n] == mm;
                        set(vname(k, n, mm, b, w), mon ? psi : 0.0);
                    }
                }
                if (is_ln_user(k)) {
                    double l = 0.0;
                    if (on) {
                        l = std::log(sc.omega(k, b, n) / sc.sigma_mw);
                        for (double t : pw.breakpoints) {
                            l = std::min(l, psi / t + std::log(t) - 1.0);
                        }
                    }
                    set(lname(k, n, b), l);
                }
            }
        }
    }
    if (B >= 2) {
        for (int k = 0; k < K; ++k) {
            int home = -1;
            for (int s = 0; s < B * N; ++s) {
                if (a.slot_user[s] == k) home = s / N;
            }
            for (int b = 0; b < B; ++b) {
                set("A_" + std::to_string(k + 1) + "_" + std::to_string(b + 1),
                    b == home ? 1.0 : 0.0);
            }
        }
    }
    return val;
}

bool satisfies(const MilpModel& m, const std::vector<double>& val) {
    for (const auto& con : m.constraints) {
        double lhs = 0.0;
        double scale = 1.0;
        for (const auto& t : con.terms) {
            lhs += t.coef * val[static_cast<std::size_t>(t.var)];
            scale = std::max(scale, std::abs(t.coef *
                                             val[static_cast<std::size_t>(t.var)]));
        }
        const double tol = 1e-9 * std::max(scale, std::abs(con.rhs));
        bool ok = true;
        switch (con.sense) {
            case Sense::Le: ok = lhs <= con.rhs + tol; break;
            case Sense::Ge: ok = lhs >= con.rhs - tol; break;
            case Sense::Eq: ok = std::abs(lhs - con.rhs) <= tol; break;
        }
        if (!ok) {
            INFO("violated: ", con.name, " lhs=", lhs, " rhs=", con.rhs);
            return false;
        }
    }
    return true;
}

double model_objective(const MilpModel& m, const std::vector<double>& val) {
    double total = 0.0;
    for (const auto& t : m.objective) {
        total += t.coef * val[static_cast<std::size_t>(t.var)];
    }
    return total;
}

// All feasible assignments of a small problem, by direct enumeration.
std::vector<Assignment> all_feasible(const AllocationProblem& p) {
    const int S = p.scenario.config.num_slots();
    const int K = p.scenario.config.num_users;
    std::vector<Assignment> out;
    std::vector<int> slots(S, -1);
    auto rec = [&](auto&& self, int s) -> void {
        if (s == S) {
            Assignment a{slots};
            if (check_feasible(p, a).empty()) out.push_back(a);
            return;
        }
        for (int k = -1; k < K; ++k) {
            slots[s] = k;
            self(self, s + 1);
        }
        slots[s] = -1;
    };
    rec(rec, 0);
    return out;
}

AllocationProblem golden_problem() {
    return hand_problem(hand_scenario(2, 1, 2, 1, 1.0, {10.0, 5.0, 8.0, 2.0}),
                        Objective::PfAfter, {1.0, 26.0}, 1);
}

} // namespace

TEST_CASE("log_spaced breakpoints") {
    auto pw = PiecewiseLnSpec::log_spaced(6, 1e-3, 10.0);
    REQUIRE(pw.breakpoints.size() == 6);
    CHECK(pw.breakpoints.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(pw.breakpoints.back() == doctest::Approx(10.0).epsilon(1e-12));
    for (std::size_t i = 1; i < pw.breakpoints.size(); ++i) {
        CHECK(pw.breakpoints[i] > pw.breakpoints[i - 1]);
    }
    CHECK_THROWS_AS(PiecewiseLnSpec::log_spaced(1, 1e-3, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLnSpec::log_spaced(4, 0.0, 10.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PiecewiseLnSpec::log_spaced(4, 2.0, 2.0),
                    std::invalid_argument);
}

TEST_CASE("for_problem spans up to the best interference-free SINR") {
    auto p = golden_problem();
    auto pw = PiecewiseLnSpec::for_problem(p, 16);
    REQUIRE(pw.breakpoints.size() == 16);
    CHECK(pw.breakpoints.front() == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(pw.breakpoints.back() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("variable census for the smallest problems") {
    auto p1 = hand_problem(hand_scenario(1, 1, 1, 0, 1.0, {4.0}),
                           Objective::WsrMax, {1.0}, 1);
    auto m1 = build_milp(p1, PiecewiseLnSpec::log_spaced(4, 1e-3, 10.0));
    REQUIRE(m1.vars.size() == 2);  // one X, one PSI; no V, A or L
    CHECK(m1.var_index("X_1_1_1") == 0);
    CHECK(m1.var_index("PSI_1_1_1") == 1);
    CHECK(m1.var_index("V_1_1_2_1_2") == -1);
    CHECK(m1.var_index("A_1_1") == -1);
    CHECK(m1.var_index("L_1_1_1") == -1);
    CHECK(m1.vars[0].kind == VarKind::Binary);
    CHECK(m1.vars[1].kind == VarKind::NonNegative);

    auto p2 = hand_problem(hand_scenario(1, 1, 1, 0, 1.0, {4.0}),
                           Objective::PfBefore, {1.0}, 1);
    auto m2 = build_milp(p2, PiecewiseLnSpec::log_spaced(4, 1e-3, 10.0));
    CHECK(m2.var_index("L_1_1_1") >= 0);
    CHECK(m2.vars[static_cast<std::size_t>(m2.var_index("L_1_1_1"))].kind ==
          VarKind::Free);

    // Two users, two PBSs, one RB: each (k, b) sees exactly one (m, w)
    // interference product, so four V variables; A appears once B >= 2.
    auto p3 = golden_problem();
    auto m3 = build_milp(p3, PiecewiseLnSpec::log_spaced(4, 1e-3, 10.0));
    int nv = 0, na = 0;
    for (const auto& v : m3.vars) {
        nv += v.name.rfind("V_", 0) == 0 ? 1 : 0;
        na += v.name.rfind("A_", 0) == 0 ? 1 : 0;
    }
    CHECK(nv == 4);
    CHECK(na == 4);
    CHECK(m3.var_index("V_1_1_2_1_2") >= 0);
    CHECK(m3.var_index("V_2_1_1_2_1") >= 0);
}

TEST_CASE("pinned valuations satisfy every constraint") {
    for (auto obj :
         {Objective::WsrMax, Objective::PfBefore, Objective::PfAfter}) {
        auto p = golden_problem();
        p.objective = obj;
        auto pw = PiecewiseLnSpec::for_problem(p, 24);
        auto m = build_milp(p, pw);
        for (const auto& a : all_feasible(p)) {
            auto val = pinned_values(p, m, a, pw);
            CHECK(satisfies(m, val));
        }
    }
}

TEST_CASE("enumerated model optimum matches the solver for WSRMax") {
    std::vector<AllocationProblem> cases;
    cases.push_back(hand_problem(
        hand_scenario(2, 1, 2, 1, 1.0, {10, 5, 8, 2}), Objective::WsrMax,
        {1.0, 26.0}, 1));
    cases.push_back(hand_problem(
        hand_scenario(2, 2, 3, 2, 0.5,
                      {3, 1, 2, 8, 4, 4, 1, 1, 2, 6, 3, 9}),
        Objective::WsrMax, {1.0, 1.0, 11.0}, 2));
    for (const auto& p : cases) {
        auto pw = PiecewiseLnSpec::for_problem(p, 8);
        auto m = build_milp(p, pw);
        double best = -1e300;
        for (const auto& a : all_feasible(p)) {
            auto val = pinned_values(p, m, a, pw);
            REQUIRE(satisfies(m, val));
            best = std::max(best, model_objective(m, val));
            // for a linear objective the model value is the exact value
            CHECK(model_objective(m, val) ==
                  doctest::Approx(evaluate_objective(p, a)).epsilon(1e-9));
        }
        CHECK(best ==
              doctest::Approx(solve(p).objective_value).epsilon(1e-9));
    }
}

TEST_CASE("ln relaxation upper-bounds PF and tightens with more cuts") {
    auto p = golden_problem();
    p.objective = Objective::PfBefore;
    const double truth = solve(p).objective_value;
    double prev = 1e300;
    for (int count : {8, 16, 32, 64}) {
        auto pw = PiecewiseLnSpec::for_problem(p, count);
        auto m = build_milp(p, pw);
        double best = -1e300;
        for (const auto& a : all_feasible(p)) {
            best = std::max(best,
                            model_objective(m, pinned_values(p, m, a, pw)));
        }
        CHECK(best >= truth - 1e-9);
        CHECK(best <= prev + 1e-9);
        prev = best;
    }
    // 64 log-spaced cuts pin ln to within a few percent
    CHECK(prev - truth < 0.05 * std::abs(truth) + 0.05);
}

TEST_CASE("build_milp validates the breakpoint spec") {
    auto p = golden_problem();
    PiecewiseLnSpec bad;
    CHECK_THROWS_AS(build_milp(p, bad), std::invalid_argument);
    bad.breakpoints = {1.0, 1.0};
    CHECK_THROWS_AS(build_milp(p, bad), std::invalid_argument);
    bad.breakpoints = {-1.0, 1.0};
    CHECK_THROWS_AS(build_milp(p, bad), std::invalid_argument);
}

TEST_CASE("LP text structure") {
    ScenarioConfig cfg;  // default scale, so rows get long enough to wrap
    auto p = hand_problem(generate(cfg, 6), Objective::PfAfter,
                          std::vector<double>(10, 1.0), 3);
    auto m = build_milp(p, PiecewiseLnSpec::for_problem(p, 16));
    auto text = write_lp_string(m);

    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(!lines.empty());
    CHECK(lines.front() == "Maximize");
    CHECK(lines.back() == "End");

    std::size_t colon_lines = 0, longest = 0;
    bool seen_subject = false, seen_bounds = false, seen_binary = false;
    std::size_t bounds_at = 0, binary_at = 0;
    int free_vars = 0, binary_vars = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        longest = std::max(longest, lines[i].size());
        if (lines[i] == "Subject To") seen_subject = true;
        if (lines[i] == "Bounds") { seen_bounds = true; bounds_at = i; }
        if (lines[i] == "Binary") { seen_binary = true; binary_at = i; }
        if (lines[i].find(':') != std::string::npos) ++colon_lines;
        if (seen_bounds && !seen_binary && lines[i].find(" free") !=
                                               std::string::npos) {
            ++free_vars;
        }
        if (seen_binary && lines[i] != "Binary" && lines[i] != "End") {
            ++binary_vars;
        }
    }
    CHECK(seen_subject);
    CHECK(seen_bounds);
    CHECK(seen_binary);
    CHECK(bounds_at < binary_at);
    CHECK(longest <= 82);
    CHECK(colon_lines == m.constraints.size() + 1);

    int expect_free = 0, expect_binary = 0;
    for (const auto& v : m.vars) {
        expect_free += v.kind == VarKind::Free ? 1 : 0;
        expect_binary += v.kind == VarKind::Binary ? 1 : 0;
    }
    CHECK(free_vars == expect_free);
    CHECK(binary_vars == expect_binary);
    CHECK(expect_free == 7 * 10);       // one L per (normal user, slot)
    CHECK(expect_binary == 100 + 20);   // X plus A
}

TEST_CASE("a model with no constraints still writes") {
    MilpModel m;
    m.vars.push_back({"Z", VarKind::NonNegative});
    m.objective.push_back({0, 2.5});
    auto text = write_lp_string(m);
    CHECK(text.find("Maximize\n obj: 2.5 Z\n") != std::string::npos);
    CHECK(text.find("Subject To\nBounds\n") != std::string::npos);
    CHECK(text.find("End\n") != std::string::npos);
}

TEST_CASE("golden LP file regenerates byte for byte") {
    auto p = golden_problem();
    auto m = build_milp(p, PiecewiseLnSpec::log_spaced(6, 1e-3, 10.0));
    std::ifstream in(kFixtures + "/golden_small.lp", std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(write_lp_string(m) == buf.str());
}
