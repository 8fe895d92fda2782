#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hetsched/allocator.hpp"

namespace hetsched {

// Breakpoints for the concave outer approximation of ln: one tangent cut
// per breakpoint. The approximation upper-bounds ln everywhere, so the
// exported model's optimum upper-bounds the true PF optimum.
struct PiecewiseLnSpec {
    std::vector<double> breakpoints;  // strictly ascending, all > 0

    // count points, logarithmically spaced over [lo, hi].
    static PiecewiseLnSpec log_spaced(int count, double lo, double hi);
    // Default scheme: count points over [1e-3, M_max] where M_max is the
    // largest interference-free SINR omega/sigma in the problem.
    static PiecewiseLnSpec for_problem(const AllocationProblem& problem,
                                       int count = 32);
};

enum class VarKind { Binary, NonNegative, Free };

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::NonNegative;
};

struct MilpTerm {
    int var = 0;
    double coef = 0.0;
};

enum class Sense { Le, Ge, Eq };

struct MilpConstraint {
    std::string name;
    std::vector<MilpTerm> terms;
    Sense sense = Sense::Le;
    double rhs = 0.0;
};

struct MilpModel {
    bool maximize = true;
    std::vector<MilpVar> vars;
    std::vector<MilpTerm> objective;
    std::vector<MilpConstraint> constraints;

    // Linear scan; -1 when absent. Models are small enough that tests and
    // tools do not need an index.
    int var_index(std::string_view name) const;
};

// The full linearized model: assignment constraints, the SINR definition
// with big-M product variables V = PSI * X, per-variable big-M caps, and
// (for ln objectives) tangent cuts on the L variables. Variable names are
// 1-based: X_k_n_b, PSI_k_n_b, V_k_n_m_b_w, A_k_b, L_k_n_b.
MilpModel build_milp(const AllocationProblem& problem,
                     const PiecewiseLnSpec& pw);

// CPLEX-LP dialect: Maximize / Subject To / Bounds / Binary / End, with
// deterministic ordering and shortest round-trip number formatting, so
// regenerated files are byte-identical.
void write_lp(const MilpModel& model, std::ostream& out);
std::string write_lp_string(const MilpModel& model);
void save_lp(const MilpModel& model, const std::string& path);

} // namespace hetsched
