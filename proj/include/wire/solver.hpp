#pragma once

#include <map>
#include <string>

#include "wire/formula.hpp"
#include "wire/registry.hpp"

namespace wire {

struct SolverLimits {
    int max_atoms = 24;
    long long max_steps = 2'000'000;
};

enum class SolveStatus { Sat, Unsat, Undecided };

struct SolveResult {
    SolveStatus status = SolveStatus::Undecided;
    Valuation assignment;  // total over the formula's atoms and slots when Sat
    long long steps = 0;
};

// Complete satisfiability over bounded domains: slot variables are
// enumerated over their per-sort finite domains (Int: 0..32 plus mentioned
// constants +/-1; strings: mentioned constants plus one fresh value; closed
// sorts: their enum), theory atoms are grounded per slot assignment, and the
// remaining free boolean atoms are decided by branching with partial
// evaluation. Formulas here are per clause pair, so domains stay tiny.
//
// fixed_atoms pins atom keys (overlap atoms resolved upstream) to values.
// Exceeding limits yields Undecided, never a wrong verdict.
SolveResult solve_formula(const Formula& formula,
                          const std::map<std::string, bool>& fixed_atoms,
                          const SolverLimits& limits,
                          const SurfaceRegistry* registry = nullptr);

// The enumeration domain the solver uses for one slot; exposed so tests and
// oracles can mirror it exactly.
std::vector<Term> slot_domain(const std::string& sort, const Formula& formula,
                              const SurfaceRegistry* registry);

}  // namespace wire
