#include "hetsched/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace hetsched {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Empty slots sort after any user, so assignments that fill early slots
// with low user indices come first.
inline int lex_key(int user) {
    return user < 0 ? std::numeric_limits<int>::max() : user;
}

void validate_problem(const AllocationProblem& p) {
    const auto& c = p.scenario.config;
    const std::size_t expect =
        static_cast<std::size_t>(c.num_users) * c.num_slots();
    if (c.num_users < 1 || c.num_pbs < 1 || c.rbs_per_pbs < 1) {
        throw std::invalid_argument("allocation: empty problem dimensions");
    }
    if (p.scenario.omega_mw.size() != expect) {
        throw std::invalid_argument("allocation: omega tensor shape mismatch");
    }
    if (static_cast<int>(p.scenario.op_flags.size()) != c.num_users) {
        throw std::invalid_argument("allocation: op_flags size mismatch");
    }
    if (static_cast<int>(p.up.size()) != c.num_users) {
        throw std::invalid_argument("allocation: priority vector size mismatch");
    }
    if (!(p.scenario.sigma_mw > 0.0)) {
        throw std::invalid_argument("allocation: sigma must be > 0");
    }
    for (double u : p.up) {
        if (!std::isfinite(u) || u < 0.0) {
            throw std::invalid_argument("allocation: priorities must be finite and >= 0");
        }
    }
}

double interference_at(const Scenario& sc, const Assignment& a, int k, int n,
                       int b) {
    const int B = sc.config.num_pbs;
    const int N = sc.config.rbs_per_pbs;
    double interference = 0.0;
    for (int w = 0; w < B; ++w) {
        if (w == b) continue;
        int m = a.slot_user[w * N + n];
        if (m >= 0 && m != k) interference += sc.omega(m, b, n);
    }
    return interference;
}

AllocationResult make_result(const AllocationProblem& p, Assignment best,
                             double objective, std::uint64_t nodes) {
    const int B = p.scenario.config.num_pbs;
    const int N = p.scenario.config.rbs_per_pbs;
    AllocationResult r;
    r.assignment = std::move(best);
    r.slot_sinr.assign(static_cast<std::size_t>(B) * N, 0.0);
    for (int s = 0; s < B * N; ++s) {
        int k = r.assignment.slot_user[s];
        if (k >= 0) r.slot_sinr[s] = sinr(p, r.assignment, k, s % N, s / N);
    }
    r.objective_value = objective;
    r.nodes_explored = nodes;
    r.proven_optimal = true;
    return r;
}

// Shared incumbent-acceptance rule. Exact comparison on the objective is
// intentional: both solvers compute leaf values through the same
// evaluate_objective path, so equal optima produce identical doubles.
bool improves(double obj, const Assignment& cand, bool have_best,
              double best_obj, const Assignment& best) {
    if (!have_best || obj > best_obj) return true;
    return obj == best_obj && lex_less(cand, best);
}

struct BruteForce {
    const AllocationProblem& prob;
    int B, N, K, S;
    std::vector<int> slot_user;
    std::vector<int> count;
    std::vector<int> pbs_of;
    int unassigned;
    Assignment best;
    double best_obj = kNegInf;
    bool have_best = false;
    std::uint64_t nodes = 0;

    explicit BruteForce(const AllocationProblem& p)
        : prob(p),
          B(p.scenario.config.num_pbs),
          N(p.scenario.config.rbs_per_pbs),
          K(p.scenario.config.num_users),
          S(B * N),
          slot_user(S, -1),
          count(K, 0),
          pbs_of(K, -1),
          unassigned(K) {}

    void rec(int s) {
        ++nodes;
        if (s == S) {
            if (unassigned > 0) return;
            Assignment cand{slot_user};
            double obj = evaluate_objective(prob, cand);
            if (improves(obj, cand, have_best, best_obj, best)) {
                best = std::move(cand);
                best_obj = obj;
                have_best = true;
            }
            return;
        }
        if (unassigned > S - s) return;  // no feasible completion exists
        int b = s / N;
        rec(s + 1);
        for (int k = 0; k < K; ++k) {
            if (count[k] >= prob.max_rbs) continue;
            if (pbs_of[k] >= 0 && pbs_of[k] != b) continue;
            slot_user[s] = k;
            if (count[k]++ == 0) {
                --unassigned;
                pbs_of[k] = b;
            }
            rec(s + 1);
            slot_user[s] = -1;
            if (--count[k] == 0) {
                ++unassigned;
                pbs_of[k] = -1;
            }
        }
    }
};

struct UndoRec {
    int slot;
    double denom;
};

// Branch-and-bound over slots in RB-major order (all PBSs of RB 0, then
// RB 1, ...), so each RB's mutual interference settles within B
// consecutive depths. Incremental state tracks the current denominator
// sigma+I per slot; the bound recomputes partial-assignment terms against
// effective denominators that include interference every completion must
// add.
class Searcher {
public:
    explicit Searcher(const AllocationProblem& p)
        : prob(p),
          B(p.scenario.config.num_pbs),
          N(p.scenario.config.rbs_per_pbs),
          K(p.scenario.config.num_users),
          S(B * N),
          sigma(p.scenario.sigma_mw),
          omega(p.scenario.omega_mw) {
        is_ln.assign(K, 0);
        weight.assign(K, 1.0);
        for (int k = 0; k < K; ++k) {
            bool ln_term =
                p.objective == Objective::PfBefore ||
                (p.objective == Objective::PfAfter && !p.scenario.op_flags[k]);
            is_ln[k] = ln_term ? 1 : 0;
            any_ln = any_ln || ln_term;
            weight[k] = p.up[k];
        }
        ln_omega.assign(omega.size(), 0.0);
        if (any_ln) {
            for (std::size_t i = 0; i < omega.size(); ++i) {
                ln_omega[i] = std::log(omega[i]);
            }
        }
        cap0.resize(omega.size());
        const double ln_sigma = std::log(sigma);
        for (int k = 0; k < K; ++k) {
            for (int s = 0; s < S; ++s) {
                cap0[k * S + s] = is_ln[k]
                                      ? ln_omega[k * S + s] - ln_sigma
                                      : weight[k] * omega[k * S + s] / sigma;
            }
        }
        order.resize(S);
        for (int i = 0; i < S; ++i) {
            order[i] = (i % B) * N + i / B;
        }
        cand.resize(static_cast<std::size_t>(S) * K);
        for (int s = 0; s < S; ++s) {
            int* row = cand.data() + static_cast<std::size_t>(s) * K;
            std::iota(row, row + K, 0);
            std::sort(row, row + K, [&](int x, int y) {
                double cx = cap0[x * S + s], cy = cap0[y * S + s];
                if (cx != cy) return cx > cy;
                return x < y;
            });
        }
        minomega.assign(S, 0.0);
        for (int s = 0; s < S; ++s) {
            double lo = omega[s];
            for (int k = 1; k < K; ++k) {
                lo = std::min(lo, omega[k * S + s]);
            }
            minomega[s] = lo;
        }
        slot_user.assign(S, -1);
        denom.assign(S, sigma);
        count.assign(K, 0);
        pbs_of.assign(K, -1);
        unassigned = K;
        undo.reserve(static_cast<std::size_t>(S) * B + 8);
        mark_stack.assign(S + 1, 0);
        ed.assign(S, 0.0);
        ld.assign(S, 0.0);
        slotmax.assign(S, 0.0);
        extras.reserve(S);
    }

    AllocationResult run() {
        greedy_incumbent();
        dfs(0);
        return make_result(prob, std::move(best), best_obj, nodes);
    }

private:
    const AllocationProblem& prob;
    int B, N, K, S;
    double sigma;
    std::vector<double> omega;
    std::vector<double> ln_omega;
    std::vector<double> cap0;
    std::vector<char> is_ln;
    std::vector<double> weight;
    bool any_ln = false;
    std::vector<int> order;
    std::vector<int> cand;

    std::vector<double> minomega;

    std::vector<int> slot_user;
    std::vector<double> denom;
    std::vector<int> count;
    std::vector<int> pbs_of;
    int unassigned;
    std::vector<UndoRec> undo;
    std::vector<int> mark_stack;
    std::vector<double> ed;
    std::vector<double> ld;
    std::vector<double> slotmax;
    std::vector<double> extras;

    Assignment best;
    double best_obj = kNegInf;
    std::uint64_t nodes = 0;

    double term_with(int k, int s, double d) const {
        return is_ln[k] ? ln_omega[k * S + s] - std::log(d)
                        : weight[k] * omega[k * S + s] / d;
    }

    double margin() const { return 1e-9 + 1e-12 * std::abs(best_obj); }

    void greedy_incumbent() {
        std::vector<std::pair<double, int>> pairs;
        pairs.reserve(omega.size());
        for (int k = 0; k < K; ++k) {
            for (int s = 0; s < S; ++s) {
                pairs.emplace_back(cap0[k * S + s], k * S + s);
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        Assignment g;
        g.slot_user.assign(S, -1);
        std::vector<char> placed(K, 0);
        int left = K;
        for (const auto& [c, ks] : pairs) {
            if (left == 0) break;
            int k = ks / S, s = ks % S;
            if (placed[k] || g.slot_user[s] >= 0) continue;
            g.slot_user[s] = k;
            placed[k] = 1;
            --left;
        }
        best_obj = evaluate_objective(prob, g);
        best = std::move(g);
    }

    // Admissible upper bound on any feasible completion. Effective
    // denominators start at the current sigma+I; when every open slot must
    // take a user (open == unassigned, the common case here since users
    // equal slots at the default scale), each slot additionally absorbs at
    // least the smallest omega any user would contribute from its foreign
    // same-RB slots. The bound is then the recomputed partial-assignment
    // value plus a relaxed user-to-slot matching: the smaller of the
    // row-max sum (each unassigned user at its best open slot) and the
    // column-max sum (each open slot at its best unassigned user). When
    // open slots outnumber unassigned users only the row-max relaxation
    // applies, topped up with the E largest positive per-slot caps for the
    // E surplus slots.
    double bound(int depth) {
        const int free_slots = S - depth;
        const bool full = unassigned == free_slots;
        for (int s = 0; s < S; ++s) ed[s] = denom[s];
        if (full) {
            for (int j = depth; j < S; ++j) {
                const int sp = order[j];
                const int n = sp % N;
                const int bb = sp / N;
                for (int w = 0; w < B; ++w) {
                    if (w == bb) continue;
                    const int t = w * N + n;
                    ed[t] += minomega[t];
                }
            }
        }
        double total = 0.0;
        for (int j = 0; j < depth; ++j) {
            const int s = order[j];
            const int k = slot_user[s];
            if (k >= 0) total += term_with(k, s, ed[s]);
        }
        for (int j = depth; j < S; ++j) {
            if (any_ln) ld[j] = std::log(ed[order[j]]);
            slotmax[j] = kNegInf;
        }
        double rowmax_sum = 0.0;
        for (int k = 0; k < K; ++k) {
            const bool counts = count[k] == 0;
            if (full && !counts) continue;  // open slots go to unassigned users
            double bestk = kNegInf;
            const double* om = omega.data() + static_cast<std::size_t>(k) * S;
            const double* lo =
                ln_omega.data() + static_cast<std::size_t>(k) * S;
            if (is_ln[k]) {
                for (int j = depth; j < S; ++j) {
                    double c = lo[order[j]] - ld[j];
                    if (c > slotmax[j]) slotmax[j] = c;
                    if (c > bestk) bestk = c;
                }
            } else {
                const double wk = weight[k];
                for (int j = depth; j < S; ++j) {
                    double c = wk * om[order[j]] / ed[order[j]];
                    if (c > slotmax[j]) slotmax[j] = c;
                    if (c > bestk) bestk = c;
                }
            }
            if (counts) rowmax_sum += bestk;
        }
        if (full) {
            double colmax_sum = 0.0;
            for (int j = depth; j < S; ++j) colmax_sum += slotmax[j];
            return total + std::min(rowmax_sum, colmax_sum);
        }
        total += rowmax_sum;
        const int extra = free_slots - unassigned;
        if (extra > 0) {
            extras.clear();
            for (int j = depth; j < S; ++j) {
                if (slotmax[j] > 0.0) extras.push_back(slotmax[j]);
            }
            if (static_cast<int>(extras.size()) > extra) {
                std::nth_element(extras.begin(), extras.begin() + extra,
                                 extras.end(), std::greater<>());
                extras.resize(extra);
            }
            for (double v : extras) total += v;
        }
        return total;
    }

    void assign(int depth, int k, int s, int b) {
        mark_stack[depth] = static_cast<int>(undo.size());
        const int n = s - b * N;
        for (int w = 0; w < B; ++w) {
            if (w == b) continue;
            int sp = w * N + n;
            undo.push_back({sp, denom[sp]});
            denom[sp] += omega[k * S + sp];
        }
        slot_user[s] = k;
        if (count[k]++ == 0) {
            --unassigned;
            pbs_of[k] = b;
        }
    }

    void unassign(int depth, int k, int s) {
        slot_user[s] = -1;
        if (--count[k] == 0) {
            ++unassigned;
            pbs_of[k] = -1;
        }
        for (int i = static_cast<int>(undo.size()) - 1; i >= mark_stack[depth];
             --i) {
            denom[undo[i].slot] = undo[i].denom;
        }
        undo.resize(mark_stack[depth]);
    }

    void dfs(int depth) {
        ++nodes;
        if (depth == S) {
            if (unassigned > 0) return;
            Assignment candi{slot_user};
            double obj = evaluate_objective(prob, candi);
            if (improves(obj, candi, true, best_obj, best)) {
                best = std::move(candi);
                best_obj = obj;
            }
            return;
        }
        const int rem = S - depth;
        if (unassigned > rem) return;
        if (bound(depth) < best_obj - margin()) return;
        const int s = order[depth];
        const int b = s / N;
        const int* row = cand.data() + static_cast<std::size_t>(s) * K;
        for (int i = 0; i < K; ++i) {
            int k = row[i];
            if (count[k] >= prob.max_rbs) continue;
            if (pbs_of[k] >= 0 && pbs_of[k] != b) continue;
            assign(depth, k, s, b);
            dfs(depth + 1);
            unassign(depth, k, s);
        }
        if (unassigned < rem) dfs(depth + 1);  // slot left empty
    }
};

} // namespace

std::string_view objective_name(Objective objective) {
    switch (objective) {
        case Objective::WsrMax: return "wsrmax";
        case Objective::PfBefore: return "pf-before";
        case Objective::PfAfter: return "pf-after";
    }
    return "unknown";
}

Objective parse_objective(std::string_view name) {
    if (name == "wsrmax") return Objective::WsrMax;
    if (name == "pf-before") return Objective::PfBefore;
    if (name == "pf-after") return Objective::PfAfter;
    throw std::invalid_argument("unknown objective '" + std::string(name) +
                                "' (expected wsrmax, pf-before or pf-after)");
}

bool lex_less(const Assignment& a, const Assignment& b) {
    const std::size_t n = std::min(a.slot_user.size(), b.slot_user.size());
    for (std::size_t i = 0; i < n; ++i) {
        int ka = lex_key(a.slot_user[i]);
        int kb = lex_key(b.slot_user[i]);
        if (ka != kb) return ka < kb;
    }
    return a.slot_user.size() < b.slot_user.size();
}

AllocationProblem make_problem(Scenario scenario, Objective objective,
                               std::vector<double> up) {
    AllocationProblem p;
    p.max_rbs = max_rbs_per_user(scenario.config);
    p.scenario = std::move(scenario);
    p.up = std::move(up);
    p.objective = objective;
    return p;
}

std::vector<Violation> check_feasible(const AllocationProblem& problem,
                                      const Assignment& assignment) {
    const auto& c = problem.scenario.config;
    const int K = c.num_users, N = c.rbs_per_pbs, S = c.num_slots();
    if (static_cast<int>(assignment.slot_user.size()) != S) {
        throw std::invalid_argument("check_feasible: assignment has " +
                                    std::to_string(assignment.slot_user.size()) +
                                    " slots, scenario has " +
                                    std::to_string(S));
    }
    std::vector<Violation> out;
    std::vector<int> count(K, 0);
    std::vector<int> pbs_of(K, -1);
    std::vector<char> multi(K, 0);
    for (int s = 0; s < S; ++s) {
        int k = assignment.slot_user[s];
        if (k < 0) continue;
        if (k >= K) {
            out.push_back({Violation::Kind::BadUserIndex, k,
                           "slot " + std::to_string(s) + " references user " +
                               std::to_string(k) + " outside 0.." +
                               std::to_string(K - 1)});
            continue;
        }
        ++count[k];
        int b = s / N;
        if (pbs_of[k] < 0) {
            pbs_of[k] = b;
        } else if (pbs_of[k] != b) {
            multi[k] = 1;
        }
    }
    for (int k = 0; k < K; ++k) {
        if (count[k] == 0) {
            out.push_back({Violation::Kind::MinRbs, k,
                           "user " + std::to_string(k) + " holds no RB"});
        }
        if (count[k] > problem.max_rbs) {
            out.push_back({Violation::Kind::MaxRbs, k,
                           "user " + std::to_string(k) + " holds " +
                               std::to_string(count[k]) +
                               " RBs, power budget allows " +
                               std::to_string(problem.max_rbs)});
        }
        if (multi[k]) {
            out.push_back({Violation::Kind::SingleAssociation, k,
                           "user " + std::to_string(k) +
                               " holds RBs on more than one PBS"});
        }
    }
    return out;
}

double sinr(const AllocationProblem& problem, const Assignment& assignment,
            int k, int n, int b) {
    const auto& sc = problem.scenario;
    const int N = sc.config.rbs_per_pbs;
    const int S = sc.config.num_slots();
    if (static_cast<int>(assignment.slot_user.size()) != S) {
        throw std::invalid_argument("sinr: assignment shape mismatch");
    }
    if (k < 0 || k >= sc.config.num_users || n < 0 || n >= N || b < 0 ||
        b >= sc.config.num_pbs) {
        throw std::invalid_argument("sinr: index out of range");
    }
    if (assignment.slot_user[b * N + n] != k) {
        throw std::invalid_argument("sinr: user " + std::to_string(k) +
                                    " is not assigned to PBS " +
                                    std::to_string(b) + ", RB " +
                                    std::to_string(n));
    }
    return sc.omega(k, b, n) /
           (sc.sigma_mw + interference_at(sc, assignment, k, n, b));
}

double evaluate_objective(const AllocationProblem& problem,
                          const Assignment& assignment) {
    const auto& sc = problem.scenario;
    const int B = sc.config.num_pbs, N = sc.config.rbs_per_pbs;
    const int S = B * N;
    if (static_cast<int>(assignment.slot_user.size()) != S) {
        throw std::invalid_argument("evaluate_objective: shape mismatch");
    }
    double total = 0.0;
    for (int s = 0; s < S; ++s) {
        int k = assignment.slot_user[s];
        if (k < 0) continue;
        int b = s / N, n = s % N;
        double psi = sc.omega(k, b, n) /
                     (sc.sigma_mw + interference_at(sc, assignment, k, n, b));
        double term = 0.0;
        switch (problem.objective) {
            case Objective::WsrMax:
                term = problem.up[k] * psi;
                break;
            case Objective::PfBefore:
                term = std::log(psi);
                break;
            case Objective::PfAfter:
                term = sc.op_flags[k] ? problem.up[k] * psi : std::log(psi);
                break;
        }
        total += term;
    }
    if (!std::isfinite(total)) {
        throw std::runtime_error("evaluate_objective: non-finite value");
    }
    return total;
}

AllocationResult solve_bruteforce(const AllocationProblem& problem) {
    validate_problem(problem);
    const auto& c = problem.scenario.config;
    const int S = c.num_slots();
    const double space = std::pow(static_cast<double>(c.num_users) + 1.0, S);
    if (space > 1e7) {
        throw std::runtime_error(
            "solve_bruteforce: search space (K+1)^(B*N) = " +
            std::to_string(space) + " exceeds the 1e7 guard; use solve()");
    }
    BruteForce bf(problem);
    bf.rec(0);
    if (!bf.have_best) {
        throw std::runtime_error("solve_bruteforce: no feasible assignment");
    }
    return make_result(problem, std::move(bf.best), bf.best_obj, bf.nodes);
}

AllocationResult solve(const AllocationProblem& problem) {
    validate_problem(problem);
    const auto& c = problem.scenario.config;
    if (c.num_users > c.num_slots()) {
        throw std::runtime_error(
            "solve: infeasible, more users than (PBS, RB) slots");
    }
    if (problem.max_rbs < 1) {
        throw std::runtime_error(
            "solve: infeasible, power budget allows no RB per user");
    }
    Searcher searcher(problem);
    return searcher.run();
}

std::string result_to_json(const AllocationProblem& problem,
                           const AllocationResult& result) {
    const auto& c = problem.scenario.config;
    const int N = c.rbs_per_pbs;
    nlohmann::ordered_json j;
    j["objective"] = std::string(objective_name(problem.objective));
    j["objective_value"] = result.objective_value;
    j["nodes_explored"] = result.nodes_explored;
    j["proven_optimal"] = result.proven_optimal;
    j["max_rbs"] = problem.max_rbs;
    nlohmann::ordered_json users = nlohmann::ordered_json::array();
    for (int k = 0; k < c.num_users; ++k) {
        nlohmann::ordered_json u;
        u["user"] = k + 1;
        u["outpatient"] = static_cast<bool>(problem.scenario.op_flags[k]);
        u["up"] = problem.up[k];
        nlohmann::ordered_json rbs = nlohmann::ordered_json::array();
        nlohmann::ordered_json lin = nlohmann::ordered_json::array();
        nlohmann::ordered_json db = nlohmann::ordered_json::array();
        int pbs = -1;
        for (int s = 0; s < c.num_slots(); ++s) {
            if (result.assignment.slot_user[s] != k) continue;
            pbs = s / N;
            rbs.push_back(s % N + 1);
            lin.push_back(result.slot_sinr[s]);
            db.push_back(10.0 * std::log10(result.slot_sinr[s]));
        }
        u["pbs"] = pbs + 1;
        u["rbs"] = std::move(rbs);
        u["sinr"] = std::move(lin);
        u["sinr_db"] = std::move(db);
        users.push_back(std::move(u));
    }
    j["users"] = std::move(users);
    nlohmann::ordered_json slots = nlohmann::ordered_json::array();
    for (int s = 0; s < c.num_slots(); ++s) {
        int k = result.assignment.slot_user[s];
        nlohmann::ordered_json e;
        e["pbs"] = s / N + 1;
        e["rb"] = s % N + 1;
        if (k >= 0) {
            e["user"] = k + 1;
            e["sinr"] = result.slot_sinr[s];
        } else {
            e["user"] = nullptr;
        }
        slots.push_back(std::move(e));
    }
    j["slots"] = std::move(slots);
    return j.dump(2);
}

} // namespace hetsched
