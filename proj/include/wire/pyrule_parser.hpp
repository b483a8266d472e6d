#pragma once

#include <string>
#include <vector>

#include "wire/pyrule_ast.hpp"
#include "wire/registry.hpp"

namespace wire {

// Parses source containing exactly one decorated rule. Pure: no execution,
// no side effects. Throws ParseError for syntax errors and rejected
// constructs (loops, mutation, imports, dynamic dispatch, non-whitelisted
// calls, missing/duplicate decorator, wrong arity).
RuleAst parse_rule(const std::string& source, const SurfaceRegistry& vocab);

// Parses a source file holding one or more decorated rules, each independent.
std::vector<RuleAst> parse_rules(const std::string& source, const SurfaceRegistry& vocab);

// Role checks against the closed vocabulary. Returns diagnostics instead of
// throwing: predicate-as-consequent, extractor-as-consequent,
// unknown-primitive, primitive-in-condition.
std::vector<Diagnostic> validate_vocabulary_use(const RuleAst& ast, const SurfaceRegistry& vocab);

// Check-only entry point: parse errors become diagnostics (code plus
// position) and parsing resumes at the next decorated rule, so one bad rule
// does not hide diagnostics for the others.
struct CheckResult {
    std::vector<RuleAst> rules;
    std::vector<Diagnostic> diagnostics;
};
CheckResult check_source(const std::string& source, const SurfaceRegistry& vocab);

}  // namespace wire
