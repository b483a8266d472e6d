#pragma once

#include <string>
#include <vector>

#include "wire/formula.hpp"
#include "wire/pyrule_ast.hpp"
#include "wire/registry.hpp"

namespace wire {

// One typed atomic clause: activation condition, force sign, behavior
// primitive, canonical arguments, and the projected decision surface.
struct Clause {
    std::string clause_id;  // "rN#k", k is the 0-based signed-call index
    std::string rule_id;
    Formula activation;
    ForceSign sign = ForceSign::Require;
    std::string primitive;
    ArgMap args;
    SurfaceDescriptor surface;

    json to_json() const;
    static Clause from_json(const json& j, const SurfaceRegistry& registry);
};

struct ClauseSet {
    std::string rule_id;
    std::vector<Clause> clauses;
};

// Compiles a validated AST to its finite clause set. Each signed call emits
// exactly one clause; clauses inside branches conjoin the branch condition
// (or its negation along else paths) into their activation. Indices follow
// source order, depth-first, then before else.
ClauseSet compile_rule(const RuleAst& ast, const SurfaceRegistry& registry);

std::vector<ClauseSet> compile_rules(const std::vector<RuleAst>& asts,
                                     const SurfaceRegistry& registry);

// Lowers a condition expression to a formula: semantic predicates become
// activation atoms keyed by normalized label, extractor results become typed
// slot variables, ground predicates stay free boolean atoms, comparisons
// become theory atoms.
Formula lower_condition(const ExprNode& expr, const SurfaceRegistry& registry);

// Lowers a call argument to a canonical value (literal, list, or slot).
ArgValue lower_argument(const ExprNode& expr, const SurfaceRegistry& registry);

// Canonical (name-sorted, schema-checked) argument map of a primitive call.
ArgMap canonical_args(const ExprNode& call, const SurfaceRegistry& registry);

// Classified cross-rule clause-pair budget: sum over rule pairs i<j of
// |C_i| * |C_j|. Same-rule pairs are never counted.
long long clause_budget(const std::vector<ClauseSet>& clause_sets);

}  // namespace wire
