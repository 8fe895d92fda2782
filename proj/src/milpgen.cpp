#include "hetsched/milpgen.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hetsched/textio.hpp"

namespace hetsched {

PiecewiseLnSpec PiecewiseLnSpec::log_spaced(int count, double lo, double hi) {
    if (count < 2) {
        throw std::invalid_argument("piecewise ln: need at least 2 breakpoints");
    }
    if (!(lo > 0.0) || !(hi > lo)) {
        throw std::invalid_argument("piecewise ln: need 0 < lo < hi");
    }
    PiecewiseLnSpec spec;
    spec.breakpoints.reserve(count);
    const double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i) {
        spec.breakpoints.push_back(std::exp(std::log(lo) + step * i));
    }
    return spec;
}

PiecewiseLnSpec PiecewiseLnSpec::for_problem(const AllocationProblem& problem,
                                             int count) {
    double m_max = 0.0;
    for (double om : problem.scenario.omega_mw) {
        m_max = std::max(m_max, om / problem.scenario.sigma_mw);
    }
    const double lo = 1e-3;
    return log_spaced(count, lo, std::max(m_max, lo * 2.0));
}

int MilpModel::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

std::string id3(const char* prefix, int k, int n, int b) {
    return std::string(prefix) + "_" + std::to_string(k + 1) + "_" +
           std::to_string(n + 1) + "_" + std::to_string(b + 1);
}

} // namespace

MilpModel build_milp(const AllocationProblem& problem,
                     const PiecewiseLnSpec& pw) {
    const auto& sc = problem.scenario;
    const int B = sc.config.num_pbs;
    const int N = sc.config.rbs_per_pbs;
    const int K = sc.config.num_users;
    const double sigma = sc.sigma_mw;
    if (pw.breakpoints.size() < 2) {
        throw std::invalid_argument("build_milp: bad breakpoint spec");
    }
    for (std::size_t i = 0; i < pw.breakpoints.size(); ++i) {
        if (!(pw.breakpoints[i] > 0.0) ||
            (i > 0 && pw.breakpoints[i] <= pw.breakpoints[i - 1])) {
            throw std::invalid_argument(
                "build_milp: breakpoints must be ascending and positive");
        }
    }

    auto is_ln_user = [&](int k) {
        return problem.objective == Objective::PfBefore ||
               (problem.objective == Objective::PfAfter && !sc.op_flags[k]);
    };

    MilpModel m;
    m.maximize = true;

    auto add_var = [&](std::string name, VarKind kind) {
        m.vars.push_back({std::move(name), kind});
        return static_cast<int>(m.vars.size()) - 1;
    };

    // Variable blocks, in declaration order: X, PSI, V, A, L.
    std::vector<int> x(static_cast<std::size_t>(K) * N * B);
    std::vector<int> psi(x.size());
    auto flat = [&](int k, int n, int b) {
        return (static_cast<std::size_t>(k) * N + n) * B + b;
    };
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b)
                x[flat(k, n, b)] = add_var(id3("X", k, n, b), VarKind::Binary);
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b)
                psi[flat(k, n, b)] =
                    add_var(id3("PSI", k, n, b), VarKind::NonNegative);

    // v[(k,n,b)][(m,w)] in loop order m ascending (skipping k), w ascending
    // (skipping b).
    std::vector<std::vector<int>> v(x.size());
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b)
                for (int mm = 0; mm < K; ++mm) {
                    if (mm == k) continue;
                    for (int w = 0; w < B; ++w) {
                        if (w == b) continue;
                        std::string name =
                            "V_" + std::to_string(k + 1) + "_" +
                            std::to_string(n + 1) + "_" +
                            std::to_string(mm + 1) + "_" +
                            std::to_string(b + 1) + "_" + std::to_string(w + 1);
                        v[flat(k, n, b)].push_back(
                            add_var(std::move(name), VarKind::NonNegative));
                    }
                }

    std::vector<int> assoc;
    if (B >= 2) {
        assoc.resize(static_cast<std::size_t>(K) * B);
        for (int k = 0; k < K; ++k)
            for (int b = 0; b < B; ++b)
                assoc[static_cast<std::size_t>(k) * B + b] =
                    add_var("A_" + std::to_string(k + 1) + "_" +
                                std::to_string(b + 1),
                            VarKind::Binary);
    }

    std::vector<int> lvar(x.size(), -1);
    for (int k = 0; k < K; ++k) {
        if (!is_ln_user(k)) continue;
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b)
                lvar[flat(k, n, b)] = add_var(id3("L", k, n, b), VarKind::Free);
    }

    // Objective.
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b) {
                if (is_ln_user(k)) {
                    m.objective.push_back({lvar[flat(k, n, b)], 1.0});
                } else {
                    m.objective.push_back({psi[flat(k, n, b)], problem.up[k]});
                }
            }

    auto add_con = [&](std::string name, std::vector<MilpTerm> terms,
                       Sense sense, double rhs) {
        m.constraints.push_back({std::move(name), std::move(terms), sense, rhs});
    };

    // (i) one user per slot.
    for (int n = 0; n < N; ++n)
        for (int b = 0; b < B; ++b) {
            std::vector<MilpTerm> terms;
            terms.reserve(K);
            for (int k = 0; k < K; ++k) terms.push_back({x[flat(k, n, b)], 1.0});
            add_con("slot_" + std::to_string(n + 1) + "_" +
                        std::to_string(b + 1),
                    std::move(terms), Sense::Le, 1.0);
        }

    // (ii) power budget as an RB-count cap; (iii) at least one RB.
    for (int k = 0; k < K; ++k) {
        std::vector<MilpTerm> terms;
        terms.reserve(static_cast<std::size_t>(N) * B);
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b) terms.push_back({x[flat(k, n, b)], 1.0});
        add_con("maxrb_" + std::to_string(k + 1), terms, Sense::Le,
                static_cast<double>(problem.max_rbs));
        add_con("minrb_" + std::to_string(k + 1), std::move(terms), Sense::Ge,
                1.0);
    }

    // Single association, only meaningful with more than one PBS.
    if (B >= 2) {
        for (int k = 0; k < K; ++k) {
            for (int n = 0; n < N; ++n)
                for (int b = 0; b < B; ++b) {
                    add_con(
                        "assoc_" + std::to_string(k + 1) + "_" +
                            std::to_string(n + 1) + "_" + std::to_string(b + 1),
                        {{x[flat(k, n, b)], 1.0},
                         {assoc[static_cast<std::size_t>(k) * B + b], -1.0}},
                        Sense::Le, 0.0);
                }
            std::vector<MilpTerm> terms;
            for (int b = 0; b < B; ++b)
                terms.push_back({assoc[static_cast<std::size_t>(k) * B + b], 1.0});
            add_con("assoc1_" + std::to_string(k + 1), std::move(terms),
                    Sense::Le, 1.0);
        }
    }

    // SINR definition and big-M rows.
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n)
            for (int b = 0; b < B; ++b) {
                const std::size_t f = flat(k, n, b);
                const double big_m = sc.omega(k, b, n) / sigma;

                std::vector<MilpTerm> sinr_terms;
                sinr_terms.push_back({psi[f], sigma});
                int vi = 0;
                for (int mm = 0; mm < K; ++mm) {
                    if (mm == k) continue;
                    for (int w = 0; w < B; ++w) {
                        if (w == b) continue;
                        sinr_terms.push_back({v[f][vi], sc.omega(mm, b, n)});
                        ++vi;
                    }
                }
                sinr_terms.push_back({x[f], -sc.omega(k, b, n)});
                add_con(id3("sinr", k, n, b), std::move(sinr_terms), Sense::Eq,
                        0.0);

                add_con(id3("psicap", k, n, b),
                        {{psi[f], 1.0}, {x[f], -big_m}}, Sense::Le, 0.0);

                vi = 0;
                for (int mm = 0; mm < K; ++mm) {
                    if (mm == k) continue;
                    for (int w = 0; w < B; ++w) {
                        if (w == b) continue;
                        std::string tail = "_" + std::to_string(k + 1) + "_" +
                                           std::to_string(n + 1) + "_" +
                                           std::to_string(mm + 1) + "_" +
                                           std::to_string(b + 1) + "_" +
                                           std::to_string(w + 1);
                        int vv = v[f][vi];
                        int xm = x[flat(mm, n, w)];
                        add_con("vub" + tail, {{vv, 1.0}, {xm, -big_m}},
                                Sense::Le, 0.0);
                        add_con("vpsi" + tail, {{vv, 1.0}, {psi[f], -1.0}},
                                Sense::Le, 0.0);
                        add_con("vlb" + tail,
                                {{vv, 1.0}, {psi[f], -1.0}, {xm, -big_m}},
                                Sense::Ge, -big_m);
                        ++vi;
                    }
                }

                if (lvar[f] >= 0) {
                    // Tangent cuts: L <= psi/t + ln t - 1 when X = 1. The
                    // C_j * X term relaxes each cut to L <= max(0, ln t - 1)
                    // when X = 0 so that, together with psicap, L is pushed
                    // to exactly 0 on unused (k,n,b) triples.
                    for (std::size_t j = 0; j < pw.breakpoints.size(); ++j) {
                        const double t = pw.breakpoints[j];
                        const double c = std::max(0.0, 1.0 - std::log(t));
                        std::vector<MilpTerm> terms{{lvar[f], 1.0},
                                                    {psi[f], -1.0 / t}};
                        if (c != 0.0) terms.push_back({x[f], c});
                        add_con(id3("cut", k, n, b) + "_" +
                                    std::to_string(j + 1),
                                std::move(terms), Sense::Le,
                                std::log(t) - 1.0 + c);
                    }
                    add_con(id3("lzero", k, n, b),
                            {{lvar[f], 1.0}, {x[f], -std::log(big_m)}},
                            Sense::Le, 0.0);
                }
            }

    return m;
}

namespace {

void append_terms(std::string& line, const MilpModel& model,
                  const std::vector<MilpTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
        if (t.coef < 0.0) {
            line += first ? " - " : " - ";
        } else {
            line += first ? " " : " + ";
        }
        double mag = std::abs(t.coef);
        if (mag != 1.0) {
            line += shortest(mag);
            line += ' ';
        }
        line += model.vars[t.var].name;
        first = false;
    }
}

void flush_wrapped(std::ostream& out, const std::string& text) {
    // Break long rows between terms; continuation lines are indented so
    // LP readers with line-length limits stay happy.
    const std::size_t limit = 78;
    std::size_t start = 0;
    bool first_line = true;
    while (text.size() - start > limit) {
        std::size_t cut = text.rfind(" + ", start + limit);
        std::size_t cut2 = text.rfind(" - ", start + limit);
        if (cut == std::string::npos ||
            (cut2 != std::string::npos && cut2 > cut)) {
            cut = cut2;
        }
        if (cut == std::string::npos || cut <= start) break;
        out << (first_line ? " " : "   ") << text.substr(start, cut - start)
            << '\n';
        start = cut + 1;  // keep the sign on the continuation line
        first_line = false;
    }
    out << (first_line ? " " : "   ") << text.substr(start) << '\n';
}

} // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
    out << (model.maximize ? "Maximize\n" : "Minimize\n");
    std::string obj = "obj:";
    append_terms(obj, model, model.objective);
    flush_wrapped(out, obj);

    out << "Subject To\n";
    for (const auto& con : model.constraints) {
        std::string line = con.name + ":";
        append_terms(line, model, con.terms);
        switch (con.sense) {
            case Sense::Le: line += " <= "; break;
            case Sense::Ge: line += " >= "; break;
            case Sense::Eq: line += " = "; break;
        }
        line += shortest(con.rhs);
        flush_wrapped(out, line);
    }

    out << "Bounds\n";
    for (const auto& var : model.vars) {
        if (var.kind == VarKind::Free) out << ' ' << var.name << " free\n";
    }
    out << "Binary\n";
    for (const auto& var : model.vars) {
        if (var.kind == VarKind::Binary) out << ' ' << var.name << '\n';
    }
    out << "End\n";
}

std::string write_lp_string(const MilpModel& model) {
    std::ostringstream out;
    write_lp(model, out);
    return out.str();
}

void save_lp(const MilpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    write_lp(model, out);
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

} // namespace hetsched
