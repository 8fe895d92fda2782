#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetsched/scenario.hpp"

namespace hetsched {

// WsrMax maximizes sum UP_k * Psi; PfBefore maximizes sum ln Psi; PfAfter
// keeps ln terms for normal users and switches outpatients to linear
// UP-weighted terms.
enum class Objective { WsrMax, PfBefore, PfAfter };

std::string_view objective_name(Objective objective);
// Accepts "wsrmax", "pf-before", "pf-after". Throws std::invalid_argument.
Objective parse_objective(std::string_view name);

// One user index per (PBS, RB) slot, -1 for an empty slot. Slot indexing
// follows Scenario: slot = b * N + n.
struct Assignment {
    std::vector<int> slot_user;

    bool operator==(const Assignment&) const = default;
};

// Deterministic tie-break order over equal-objective assignments: compare
// slot lists elementwise with empty ranking after any user index. Both
// exact solvers break ties by this order, so their results are identical.
bool lex_less(const Assignment& a, const Assignment& b);

struct AllocationProblem {
    Scenario scenario;
    std::vector<double> up;  // per-user priority weight UP_k
    Objective objective = Objective::WsrMax;
    int max_rbs = 1;         // per-user RB cap from the power budget
};

// Convenience constructor: max_rbs from max_rbs_per_user(config).
AllocationProblem make_problem(Scenario scenario, Objective objective,
                               std::vector<double> up);

struct Violation {
    enum class Kind {
        BadUserIndex,       // slot refers to a user outside 0..K-1
        MinRbs,             // a user holds no RB
        MaxRbs,             // a user exceeds the power-budget RB cap
        SingleAssociation,  // a user's RBs span more than one PBS
    };
    Kind kind;
    int user;  // -1 when not tied to one user
    std::string detail;
};

// Empty result means feasible. The one-user-per-slot constraint is
// structural in the slot_user representation and cannot be violated.
// Throws std::invalid_argument when the assignment shape does not match
// the scenario.
std::vector<Violation> check_feasible(const AllocationProblem& problem,
                                      const Assignment& assignment);

// SINR of user k on RB n at PBS b under the given assignment:
// omega / (sigma + interference from occupied same-RB slots of other
// PBSs). Throws std::invalid_argument unless aligned with the assignment.
double sinr(const AllocationProblem& problem, const Assignment& assignment,
            int k, int n, int b);

// Objective value of a (feasible) assignment; terms are accumulated in
// slot order so that repeated evaluation is bit-stable. Throws
// std::runtime_error on a non-finite result.
double evaluate_objective(const AllocationProblem& problem,
                          const Assignment& assignment);

struct AllocationResult {
    Assignment assignment;
    std::vector<double> slot_sinr;  // per slot, 0 where empty
    double objective_value = 0.0;
    std::uint64_t nodes_explored = 0;
    bool proven_optimal = false;
};

// Exhaustive enumeration over every slot -> user-or-empty combination,
// keeping the best feasible assignment (ties by lex_less). Guarded: the
// raw space (K+1)^(B*N) must not exceed 1e7, otherwise it throws
// std::runtime_error directing the caller to solve().
AllocationResult solve_bruteforce(const AllocationProblem& problem);

// Branch-and-bound over slot -> user choices with an admissible upper
// bound; returns the global optimum with the same tie-break as the brute
// force. Throws std::runtime_error on infeasible instances (K > B*N or
// max_rbs < 1).
AllocationResult solve(const AllocationProblem& problem);

std::string result_to_json(const AllocationProblem& problem,
                           const AllocationResult& result);

} // namespace hetsched
