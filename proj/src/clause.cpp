#include "wire/clause.hpp"

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

namespace {

// Slot key for an extractor call: sort plus extraction path.
std::string extract_slot_key(const ExprNode& call) {
    std::string path = call.children.empty() ? "?" : call.children[0]->canonical();
    std::string sort = "String";
    if (call.children.size() >= 2 && call.children[1]->kind == ExprNode::Kind::SortName) {
        sort = call.children[1]->str;
    }
    return "s:" + sort + ":" + path;
}

std::string extract_slot_sort(const ExprNode& call) {
    if (call.children.size() >= 2 && call.children[1]->kind == ExprNode::Kind::SortName) {
        return call.children[1]->str;
    }
    return "String";
}

// Comparison operand lowering. Paths become slot variables typed by the
// opposite operand.
Term lower_operand(const ExprNode& expr, const std::string& peer_sort) {
    switch (expr.kind) {
        case ExprNode::Kind::StrLit: return Term::str_const(expr.str);
        case ExprNode::Kind::IntLit: return Term::int_const(expr.num);
        case ExprNode::Kind::BoolLit: return Term::bool_const(expr.boolean);
        case ExprNode::Kind::Path:
            return Term::slot("p:" + expr.canonical(), peer_sort);
        case ExprNode::Kind::Call:
            if (expr.call_role == CallRole::Extractor) {
                return Term::slot(extract_slot_key(expr), extract_slot_sort(expr));
            }
            throw Error("sort-mismatch",
                        "call '" + expr.str + "' cannot appear as a comparison operand");
        default:
            throw Error("sort-mismatch",
                        "unsupported comparison operand: " + expr.canonical());
    }
}

std::string operand_sort(const ExprNode& expr) {
    switch (expr.kind) {
        case ExprNode::Kind::IntLit: return "Int";
        case ExprNode::Kind::BoolLit: return "Bool";
        case ExprNode::Kind::Call:
            if (expr.call_role == CallRole::Extractor) return extract_slot_sort(expr);
            return "String";
        default: return "String";
    }
}

Formula lower_predicate_call(const ExprNode& call, const SurfaceRegistry& registry) {
    if (registry.is_semantic_predicate(call.str)) {
        // Label = last string-literal argument; identical normalized labels
        // share one activation atom.
        const std::string* label = nullptr;
        for (const ExprPtr& a : call.children) {
            if (a->kind == ExprNode::Kind::StrLit) label = &a->str;
        }
        for (const auto& [name, value] : call.kwargs) {
            if (value->kind == ExprNode::Kind::StrLit) label = &value->str;
        }
        if (label) {
            std::string key = call.str == "semantic"
                                  ? "z:" + normalize_label(*label)
                                  : "z:" + call.str + ":" + normalize_label(*label);
            return Formula::atom(Atom::free_atom(key, call.canonical()));
        }
    }
    // Ground or environment predicate: a free boolean variable. Triage is
    // symbolic, so both polarities stay open until witness time.
    return Formula::atom(Atom::free_atom("g:" + call.canonical(), call.canonical()));
}

}  // namespace

Formula lower_condition(const ExprNode& expr, const SurfaceRegistry& registry) {
    switch (expr.kind) {
        case ExprNode::Kind::And: {
            std::vector<Formula> parts;
            for (const ExprPtr& c : expr.children) parts.push_back(lower_condition(*c, registry));
            return Formula::conj(std::move(parts));
        }
        case ExprNode::Kind::Or: {
            std::vector<Formula> parts;
            for (const ExprPtr& c : expr.children) parts.push_back(lower_condition(*c, registry));
            return Formula::disj(std::move(parts));
        }
        case ExprNode::Kind::Not:
            return Formula::negate(lower_condition(*expr.children[0], registry));
        case ExprNode::Kind::Compare: {
            const ExprNode& lhs = *expr.children[0];
            const ExprNode& rhs = *expr.children[1];
            Term a = lower_operand(lhs, operand_sort(rhs));
            Term b = lower_operand(rhs, operand_sort(lhs));
            return Formula::atom(Atom::theory(expr.cmp_op, std::move(a), std::move(b),
                                              expr.canonical()));
        }
        case ExprNode::Kind::BoolLit:
            return Formula::constant(expr.boolean);
        case ExprNode::Kind::Path:
            return Formula::atom(Atom::free_atom("b:" + expr.canonical(), expr.canonical()));
        case ExprNode::Kind::Call:
            if (expr.call_role == CallRole::Extractor) {
                return Formula::atom(
                    Atom::free_atom("b:" + extract_slot_key(expr), expr.canonical()));
            }
            return lower_predicate_call(expr, registry);
        default:
            throw Error("sort-mismatch",
                        "expression cannot be used as a condition: " + expr.canonical());
    }
}

ArgValue lower_argument(const ExprNode& expr, const SurfaceRegistry& registry) {
    switch (expr.kind) {
        case ExprNode::Kind::StrLit: return ArgValue::of_string(expr.str);
        case ExprNode::Kind::IntLit: return ArgValue::of_int(expr.num);
        case ExprNode::Kind::BoolLit: return ArgValue::of_bool(expr.boolean);
        case ExprNode::Kind::ListLit: {
            std::vector<ArgValue> items;
            for (const ExprPtr& c : expr.children) items.push_back(lower_argument(*c, registry));
            return ArgValue::of_list(std::move(items));
        }
        case ExprNode::Kind::Path:
            return ArgValue::of_slot("p:" + expr.canonical(), "String");
        case ExprNode::Kind::Call:
            if (expr.call_role == CallRole::Extractor) {
                return ArgValue::of_slot(extract_slot_key(expr), extract_slot_sort(expr));
            }
            throw Error("sort-mismatch",
                        "call '" + expr.str + "' cannot be a primitive argument");
        default:
            throw Error("sort-mismatch",
                        "unsupported primitive argument: " + expr.canonical());
    }
}

ArgMap canonical_args(const ExprNode& call, const SurfaceRegistry& registry) {
    const PrimitiveSpec* spec = registry.find_primitive(call.str);
    if (!spec) throw Error("unknown-primitive", "unknown primitive: " + call.str);
    if (call.children.size() > spec->arg_schema.size()) {
        throw Error("arity-mismatch",
                    call.str + ": too many positional arguments");
    }
    ArgMap args;
    for (size_t i = 0; i < call.children.size(); ++i) {
        args[spec->arg_schema[i].name] = lower_argument(*call.children[i], registry);
    }
    for (const auto& [name, value] : call.kwargs) {
        if (!spec->find_arg(name)) {
            throw Error("arity-mismatch", call.str + ": unknown argument '" + name + "'");
        }
        if (args.count(name)) {
            throw Error("arity-mismatch", call.str + ": argument '" + name + "' given twice");
        }
        args[name] = lower_argument(*value, registry);
    }
    // Multi-valued and temporal surfaces compare lists; normalize scalars.
    if (spec->cardinality == Cardinality::MultiValued ||
        spec->cardinality == Cardinality::Temporal) {
        for (auto& [name, value] : args) {
            if (value.kind != ArgValue::Kind::List && !value.is_symbolic()) {
                value = ArgValue::of_list({value});
            }
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

namespace {

struct CompileState {
    const SurfaceRegistry& registry;
    const std::string& rule_id;
    std::vector<Formula> path;  // conjunction of branch conditions
    std::vector<Clause> out;

    void emit(const SignedCallNode& leaf) {
        Clause c;
        c.rule_id = rule_id;
        c.clause_id = rule_id + "#" + std::to_string(out.size());
        c.sign = leaf.sign;
        c.primitive = leaf.call->str;
        c.args = canonical_args(*leaf.call, registry);
        c.surface = registry.project_surface(c.primitive, c.args);
        std::vector<Formula> parts = path;
        c.activation = Formula::conj(std::move(parts));
        out.push_back(std::move(c));
    }

    void walk(const BlockNode& block) {
        for (const StmtNode& stmt : block.stmts) {
            if (std::holds_alternative<SignedCallNode>(stmt.node)) {
                emit(std::get<SignedCallNode>(stmt.node));
                continue;
            }
            const auto& cond = std::get<std::shared_ptr<CondNode>>(stmt.node);
            Formula condition = lower_condition(*cond->condition, registry);
            path.push_back(condition);
            walk(cond->then_block);
            path.pop_back();
            if (cond->else_block) {
                path.push_back(Formula::negate(condition));
                walk(*cond->else_block);
                path.pop_back();
            }
        }
    }
};

}  // namespace

ClauseSet compile_rule(const RuleAst& ast, const SurfaceRegistry& registry) {
    CompileState state{registry, ast.rule_id, {}, {}};
    state.walk(ast.body);
    ClauseSet set;
    set.rule_id = ast.rule_id;
    set.clauses = std::move(state.out);
    return set;
}

std::vector<ClauseSet> compile_rules(const std::vector<RuleAst>& asts,
                                     const SurfaceRegistry& registry) {
    std::vector<ClauseSet> out;
    out.reserve(asts.size());
    for (const RuleAst& ast : asts) out.push_back(compile_rule(ast, registry));
    return out;
}

long long clause_budget(const std::vector<ClauseSet>& clause_sets) {
    long long total = 0;
    for (size_t i = 0; i < clause_sets.size(); ++i) {
        for (size_t j = i + 1; j < clause_sets.size(); ++j) {
            total += static_cast<long long>(clause_sets[i].clauses.size()) *
                     static_cast<long long>(clause_sets[j].clauses.size());
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json Clause::to_json() const {
    return {{"clause_id", clause_id},
            {"rule_id", rule_id},
            {"activation", activation.to_json()},
            {"sign", sign_name(sign)},
            {"primitive", primitive},
            {"args", args_to_json(args)},
            {"surface_key", surface.to_string()}};
}

Clause Clause::from_json(const json& j, const SurfaceRegistry& registry) {
    Clause c;
    c.clause_id = j.at("clause_id").get<std::string>();
    c.rule_id = j.at("rule_id").get<std::string>();
    c.activation = Formula::from_json(j.at("activation"));
    auto sign = sign_from_name(j.at("sign").get<std::string>());
    if (!sign) throw Error("malformed-record", "bad sign in clause " + c.clause_id);
    c.sign = *sign;
    c.primitive = j.at("primitive").get<std::string>();
    c.args = args_from_json(j.at("args"));
    c.surface = registry.project_surface(c.primitive, c.args);
    std::string stored = j.value("surface_key", "");
    if (!stored.empty() && stored != c.surface.to_string()) {
        throw Error("malformed-record",
                    "surface key mismatch for clause " + c.clause_id + ": stored " + stored +
                        ", projected " + c.surface.to_string());
    }
    return c;
}

}  // namespace wire
