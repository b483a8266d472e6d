#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wire/clause.hpp"
#include "wire/solver.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Overlap resolution
// ---------------------------------------------------------------------------

// Decides whether two open-vocabulary values can denote the same realization.
// The engine answer is restricted to this local value-overlap subproblem.
class OverlapAdapter {
public:
    virtual ~OverlapAdapter() = default;
    virtual bool overlaps(const std::string& value_a, const std::string& value_b) = 0;
};

struct OverlapDecision {
    bool value = false;
    std::string provenance;  // "deterministic" | "adapter" | "deterministic-fallback"
};

// Deterministic default: conservative-retain, i.e. overlap when the
// normalized token sets intersect. An adapter verdict, when configured,
// wins; adapter failure falls back to the default and says so.
class OverlapResolver {
public:
    explicit OverlapResolver(OverlapAdapter* adapter = nullptr) : adapter_(adapter) {}

    OverlapDecision resolve(const std::string& value_a, const std::string& value_b);

private:
    OverlapAdapter* adapter_;
    std::map<std::pair<std::string, std::string>, OverlapDecision> cache_;
};

bool deterministic_overlap(const std::string& value_a, const std::string& value_b);

// ---------------------------------------------------------------------------
// Verdicts, assignments, candidates
// ---------------------------------------------------------------------------

enum class PairOutcome { SkippedSurface, SkippedHardSign, Unsat, Sat, Undecided };
std::string pair_outcome_name(PairOutcome o);

struct SymbolicAssignment {
    std::map<std::string, bool> atom_values;
    std::map<std::string, Term> slot_values;
    std::map<std::string, OverlapDecision> overlap_choices;

    Valuation to_valuation() const;
    json to_json() const;
    static SymbolicAssignment from_json(const json& j);
};

struct PairVerdict {
    std::string clause_a, clause_b;
    PairOutcome outcome = PairOutcome::SkippedSurface;
    std::optional<SymbolicAssignment> assignment;      // present iff Sat
    std::optional<Formula> collision_formula;          // absent when skipped

    json to_json() const;
};

struct CandidateWitness {
    std::string clause_a, clause_b;
    SymbolicAssignment assignment;
    Formula collision_formula;
};

// A retained source-rule pair; rule_a is earlier in source order, and that
// orientation is reused unchanged by all downstream analytics.
struct CandidatePair {
    std::string rule_a, rule_b;
    std::vector<CandidateWitness> witnesses;

    json to_json() const;
    static CandidatePair from_json(const json& j);
};

struct TriageStats {
    long long classified = 0;  // all cross-rule clause pairs, equals the budget
    long long skipped_surface = 0;
    long long skipped_hard_sign = 0;
    long long sat = 0;
    long long unsat = 0;
    long long undecided = 0;

    json to_json() const;
    static TriageStats from_json(const json& j);
};

// ---------------------------------------------------------------------------
// Gates and collision construction
// ---------------------------------------------------------------------------

// Skip unless the projected decision surfaces unify.
bool gate_surface(const Clause& a, const Clause& b);

// Same-surface sign gate: pass for require/forbid in either order, and for
// require/require only on single-valued surfaces. Everything else (all soft
// pairs, forbid/forbid, require/require elsewhere) skips.
bool gate_hard(const Clause& a, const Clause& b, const SurfaceRegistry& registry);

// Surface-specific collision formula for a pair that passed both gates.
// Throws Error("unsupported-comparison") for custom mode without a
// registered comparator.
Formula build_collision(const Clause& a, const Clause& b, const SurfaceRegistry& registry);

// Full per-pair decision: gates, collision construction, overlap resolution,
// bounded-domain satisfiability, and assignment verification.
PairVerdict check_pair(const Clause& a, const Clause& b, const SurfaceRegistry& registry,
                       OverlapResolver& resolver, const SolverLimits& limits = {});

struct TriageResult {
    std::vector<CandidatePair> candidates;
    TriageStats stats;
    std::vector<PairVerdict> verdicts;  // every classified pair, in pair order
};

// Enumerates cross-rule clause pairs in source order ((i,j) by rule order,
// clause pairs by (k,l)), classifies each, and lifts sat clause pairs to
// their parent rule pairs. Clause sets must already be in source order.
TriageResult triage_policy(const std::vector<ClauseSet>& clause_sets,
                           const SurfaceRegistry& registry, OverlapResolver& resolver,
                           const SolverLimits& limits = {});

}  // namespace wire
