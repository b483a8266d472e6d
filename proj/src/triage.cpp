#include "wire/triage.hpp"

#include <algorithm>
#include <set>

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Overlap resolution
// ---------------------------------------------------------------------------

bool deterministic_overlap(const std::string& value_a, const std::string& value_b) {
    std::set<std::string> ta = token_set(value_a);
    std::set<std::string> tb = token_set(value_b);
    for (const std::string& t : ta) {
        if (tb.count(t)) return true;
    }
    return false;
}

OverlapDecision OverlapResolver::resolve(const std::string& value_a, const std::string& value_b) {
    std::string na = normalize_label(value_a);
    std::string nb = normalize_label(value_b);
    if (nb < na) std::swap(na, nb);
    auto key = std::make_pair(na, nb);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    OverlapDecision decision;
    if (adapter_) {
        try {
            decision.value = adapter_->overlaps(na, nb);
            decision.provenance = "adapter";
        } catch (const std::exception&) {
            decision.value = deterministic_overlap(na, nb);
            decision.provenance = "deterministic-fallback";
        }
    } else {
        decision.value = deterministic_overlap(na, nb);
        decision.provenance = "deterministic";
    }
    cache_[key] = decision;
    return decision;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string pair_outcome_name(PairOutcome o) {
    switch (o) {
        case PairOutcome::SkippedSurface: return "skipped-surface";
        case PairOutcome::SkippedHardSign: return "skipped-hard-sign";
        case PairOutcome::Unsat: return "unsat";
        case PairOutcome::Sat: return "sat";
        case PairOutcome::Undecided: return "undecided";
    }
    return "?";
}

Valuation SymbolicAssignment::to_valuation() const {
    Valuation v;
    v.atoms = atom_values;
    for (const auto& [key, choice] : overlap_choices) v.atoms[key] = choice.value;
    v.slots = slot_values;
    return v;
}

json SymbolicAssignment::to_json() const {
    json atoms = json::object();
    for (const auto& [key, value] : atom_values) atoms[key] = value;
    json slots = json::object();
    for (const auto& [key, term] : slot_values) slots[key] = term.to_json();
    json overlaps = json::object();
    for (const auto& [key, choice] : overlap_choices) {
        overlaps[key] = {{"value", choice.value}, {"provenance", choice.provenance}};
    }
    return {{"atoms", atoms}, {"slots", slots}, {"overlaps", overlaps}};
}

SymbolicAssignment SymbolicAssignment::from_json(const json& j) {
    SymbolicAssignment a;
    for (auto it = j.at("atoms").begin(); it != j.at("atoms").end(); ++it) {
        a.atom_values[it.key()] = it.value().get<bool>();
    }
    for (auto it = j.at("slots").begin(); it != j.at("slots").end(); ++it) {
        a.slot_values[it.key()] = Term::from_json(it.value());
    }
    for (auto it = j.at("overlaps").begin(); it != j.at("overlaps").end(); ++it) {
        a.overlap_choices[it.key()] = {it.value().at("value").get<bool>(),
                                       it.value().at("provenance").get<std::string>()};
    }
    return a;
}

json PairVerdict::to_json() const {
    json j{{"clause_a", clause_a},
           {"clause_b", clause_b},
           {"outcome", pair_outcome_name(outcome)}};
    if (assignment) j["assignment"] = assignment->to_json();
    if (collision_formula) j["collision_formula"] = collision_formula->to_json();
    return j;
}

json CandidatePair::to_json() const {
    json ws = json::array();
    for (const CandidateWitness& w : witnesses) {
        ws.push_back({{"clause_a", w.clause_a},
                      {"clause_b", w.clause_b},
                      {"assignment", w.assignment.to_json()},
                      {"collision_formula", w.collision_formula.to_json()}});
    }
    return {{"rule_a", rule_a}, {"rule_b", rule_b}, {"witnesses", ws}};
}

CandidatePair CandidatePair::from_json(const json& j) {
    CandidatePair p;
    p.rule_a = j.at("rule_a").get<std::string>();
    p.rule_b = j.at("rule_b").get<std::string>();
    for (const json& w : j.at("witnesses")) {
        CandidateWitness cw;
        cw.clause_a = w.at("clause_a").get<std::string>();
        cw.clause_b = w.at("clause_b").get<std::string>();
        cw.assignment = SymbolicAssignment::from_json(w.at("assignment"));
        cw.collision_formula = Formula::from_json(w.at("collision_formula"));
        p.witnesses.push_back(std::move(cw));
    }
    return p;
}

json TriageStats::to_json() const {
    return {{"classified", classified},
            {"skipped_surface", skipped_surface},
            {"skipped_hard_sign", skipped_hard_sign},
            {"sat", sat},
            {"unsat", unsat},
            {"undecided", undecided}};
}

TriageStats TriageStats::from_json(const json& j) {
    TriageStats s;
    s.classified = j.at("classified").get<long long>();
    s.skipped_surface = j.at("skipped_surface").get<long long>();
    s.skipped_hard_sign = j.at("skipped_hard_sign").get<long long>();
    s.sat = j.at("sat").get<long long>();
    s.unsat = j.at("unsat").get<long long>();
    s.undecided = j.at("undecided").get<long long>();
    return s;
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

bool gate_surface(const Clause& a, const Clause& b) {
    return a.surface.unifies(b.surface);
}

bool gate_hard(const Clause& a, const Clause& b, const SurfaceRegistry& registry) {
    ForceSign sa = a.sign;
    ForceSign sb = b.sign;
    if ((sa == ForceSign::Require && sb == ForceSign::Forbid) ||
        (sa == ForceSign::Forbid && sb == ForceSign::Require)) {
        return true;
    }
    if (sa == ForceSign::Require && sb == ForceSign::Require) {
        const PrimitiveSpec* spec = registry.find_primitive(a.primitive);
        return spec && spec->cardinality == Cardinality::SingleValued;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Collision construction
// ---------------------------------------------------------------------------

namespace {

Term arg_to_term(const ArgValue& v) {
    switch (v.kind) {
        case ArgValue::Kind::Str: return Term::str_const(v.str);
        case ArgValue::Kind::Int: return Term::int_const(v.num);
        case ArgValue::Kind::Bool: return Term::bool_const(v.boolean);
        case ArgValue::Kind::Slot: return Term::slot(v.slot_key, v.slot_sort);
        case ArgValue::Kind::List:
            throw Error("sort-mismatch", "list value has no scalar term form");
    }
    return Term::str_const("");
}

const ArgValue* find_arg(const ArgMap& args, const std::string& name) {
    auto it = args.find(name);
    return it == args.end() ? nullptr : &it->second;
}

// Same-value condition for one compared argument of a require/forbid pair.
Formula same_value(const ArgValue* required, const ArgValue* forbidden,
                   const std::string& sort, const SurfaceRegistry& registry,
                   const std::string& audit) {
    if (!required && !forbidden) return Formula::constant(true);
    // A forbid without the argument forbids the action outright, covering
    // whatever the requirement picks.
    if (required && !forbidden) return Formula::constant(true);
    // A requirement without the argument can be met while steering clear of
    // the forbidden value (there is always a fresh value to pick).
    if (!required && forbidden) return Formula::constant(false);

    if (required->is_symbolic() || forbidden->is_symbolic()) {
        if (required->kind == ArgValue::Kind::List || forbidden->kind == ArgValue::Kind::List) {
            return Formula::constant(true);  // symbolic vs list: retain conservatively
        }
        return Formula::atom(
            Atom::theory(CmpOp::Eq, arg_to_term(*required), arg_to_term(*forbidden), audit));
    }
    if (required->kind == ArgValue::Kind::List || forbidden->kind == ArgValue::Kind::List) {
        return Formula::constant(required->canonical() == forbidden->canonical());
    }
    if (required->kind == ArgValue::Kind::Str && forbidden->kind == ArgValue::Kind::Str) {
        if (normalize_label(required->str) == normalize_label(forbidden->str)) {
            return Formula::constant(true);
        }
        if (registry.is_open_string_sort(sort)) {
            return Formula::atom(Atom::overlap(required->str, forbidden->str, audit));
        }
        return Formula::constant(false);
    }
    return Formula::constant(required->canonical() == forbidden->canonical());
}

// Values-differ condition for one compared argument of a require/require
// pair on a single-valued surface.
Formula values_differ(const ArgValue* va, const ArgValue* vb, const std::string& sort,
                      const SurfaceRegistry& registry, const std::string& audit) {
    // An unconstrained side can always match the other: no forced exclusion.
    if (!va || !vb) return Formula::constant(false);
    if (va->is_symbolic() || vb->is_symbolic()) {
        if (va->kind == ArgValue::Kind::List || vb->kind == ArgValue::Kind::List) {
            return Formula::constant(false);
        }
        return Formula::atom(Atom::theory(CmpOp::Ne, arg_to_term(*va), arg_to_term(*vb), audit));
    }
    if (va->kind == ArgValue::Kind::Str && vb->kind == ArgValue::Kind::Str) {
        if (normalize_label(va->str) == normalize_label(vb->str)) {
            return Formula::constant(false);
        }
        if (registry.is_open_string_sort(sort)) {
            // Distinct only when the values cannot denote the same thing.
            return Formula::negate(Formula::atom(Atom::overlap(va->str, vb->str, audit)));
        }
        return Formula::constant(true);
    }
    return Formula::constant(va->canonical() != vb->canonical());
}

// Item-level collision for set-overlap surfaces: can a required item and a
// forbidden item denote the same inclusion?
Formula items_collide(const ArgValue& required, const ArgValue& forbidden,
                      const std::string& sort, const SurfaceRegistry& registry,
                      const std::string& audit) {
    if (required.is_symbolic() || forbidden.is_symbolic()) {
        return Formula::constant(true);
    }
    const std::vector<ArgValue> req_items =
        required.kind == ArgValue::Kind::List ? required.list : std::vector<ArgValue>{required};
    const std::vector<ArgValue> forb_items =
        forbidden.kind == ArgValue::Kind::List ? forbidden.list : std::vector<ArgValue>{forbidden};
    std::vector<Formula> any;
    for (const ArgValue& r : req_items) {
        for (const ArgValue& f : forb_items) {
            if (r.is_symbolic() || f.is_symbolic()) {
                any.push_back(Formula::constant(true));
            } else if (r.kind == ArgValue::Kind::Str && f.kind == ArgValue::Kind::Str) {
                if (normalize_label(r.str) == normalize_label(f.str)) {
                    any.push_back(Formula::constant(true));
                } else if (registry.is_open_string_sort(sort)) {
                    any.push_back(Formula::atom(Atom::overlap(r.str, f.str, audit)));
                }
            } else if (r.canonical() == f.canonical()) {
                any.push_back(Formula::constant(true));
            }
        }
    }
    return Formula::disj(std::move(any));
}

std::vector<NumericBound> numeric_bounds(const ArgMap& args) {
    std::vector<NumericBound> bounds;
    struct Map { const char* name; CmpOp op; };
    for (const Map& m : {Map{"eq", CmpOp::Eq}, Map{"min", CmpOp::Ge}, Map{"max", CmpOp::Le}}) {
        if (const ArgValue* v = find_arg(args, m.name)) {
            bounds.push_back({m.op, arg_to_term(*v)});
        }
    }
    return bounds;
}

// Precedence pairs (earlier, later) induced by an ordered section list.
std::vector<std::pair<std::string, std::string>> precedence_pairs(const ArgValue& v) {
    std::vector<std::string> items;
    if (v.kind == ArgValue::Kind::List) {
        for (const ArgValue& e : v.list) {
            if (e.kind == ArgValue::Kind::Str) items.push_back(normalize_label(e.str));
        }
    } else if (v.kind == ArgValue::Kind::Str) {
        items.push_back(normalize_label(v.str));
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (size_t i = 0; i < items.size(); ++i) {
        for (size_t j = i + 1; j < items.size(); ++j) {
            pairs.emplace_back(items[i], items[j]);
        }
    }
    return pairs;
}

bool edges_have_cycle(const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, std::vector<std::string>> adj;
    std::set<std::string> nodes;
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        nodes.insert(a);
        nodes.insert(b);
    }
    std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
    struct Dfs {
        std::map<std::string, std::vector<std::string>>& adj;
        std::map<std::string, int>& state;
        bool run(const std::string& n) {
            state[n] = 1;
            for (const std::string& next : adj[n]) {
                int s = state[next];
                if (s == 1) return true;
                if (s == 0 && run(next)) return true;
            }
            state[n] = 2;
            return false;
        }
    } dfs{adj, state};
    for (const std::string& n : nodes) {
        if (state[n] == 0 && dfs.run(n)) return true;
    }
    return false;
}

// Cyclic-precedence reading of ordering collisions: the pair collides when
// the required precedence constraints leave no way to break any forbidden
// precedence pair without creating a cycle.
Formula ordering_collision(const ArgValue* required, const ArgValue* forbidden) {
    auto req_pairs = required ? precedence_pairs(*required)
                              : std::vector<std::pair<std::string, std::string>>{};
    auto forb_pairs = forbidden ? precedence_pairs(*forbidden)
                                : std::vector<std::pair<std::string, std::string>>{};
    if ((required && required->is_symbolic()) || (forbidden && forbidden->is_symbolic())) {
        return Formula::constant(true);
    }
    if (req_pairs.empty()) return Formula::constant(false);
    if (forb_pairs.empty()) {
        // Forbidding the ordering act itself while an ordering is required.
        return Formula::constant(forbidden != nullptr);
    }
    for (const auto& [x, y] : forb_pairs) {
        auto edges = req_pairs;
        edges.emplace_back(y, x);  // violate this forbidden pair
        if (!edges_have_cycle(edges)) return Formula::constant(false);
    }
    return Formula::constant(true);
}

}  // namespace

Formula build_collision(const Clause& a, const Clause& b, const SurfaceRegistry& registry) {
    const PrimitiveSpec* spec = registry.find_primitive(a.primitive);
    if (!spec) throw Error("unknown-primitive", "unknown primitive: " + a.primitive);
    const std::string audit = a.clause_id + "::" + b.clause_id;

    const bool both_require = a.sign == ForceSign::Require && b.sign == ForceSign::Require;
    const Clause& required = a.sign == ForceSign::Require ? a : b;
    const Clause& forbidden = a.sign == ForceSign::Require ? b : a;

    switch (spec->comparison) {
        case CompareMode::Equality: {
            std::vector<Formula> parts;
            for (const ArgSpec& arg : spec->comparison_args()) {
                if (both_require) {
                    parts.push_back(values_differ(find_arg(a.args, arg.name),
                                                  find_arg(b.args, arg.name), arg.sort,
                                                  registry, audit));
                } else {
                    parts.push_back(same_value(find_arg(required.args, arg.name),
                                               find_arg(forbidden.args, arg.name), arg.sort,
                                               registry, audit));
                }
            }
            if (both_require) {
                // Mutual exclusion: some compared argument must differ.
                return Formula::disj(std::move(parts));
            }
            // Same action: every compared argument can coincide.
            return Formula::conj(std::move(parts));
        }
        case CompareMode::SetOverlap: {
            std::vector<Formula> parts;
            for (const ArgSpec& arg : spec->comparison_args()) {
                const ArgValue* req = find_arg(required.args, arg.name);
                const ArgValue* forb = find_arg(forbidden.args, arg.name);
                if (!req) {
                    parts.push_back(Formula::constant(false));
                } else if (!forb) {
                    parts.push_back(Formula::constant(true));  // forbid-any inclusion
                } else {
                    parts.push_back(items_collide(*req, *forb, arg.sort, registry, audit));
                }
            }
            return Formula::disj(std::move(parts));
        }
        case CompareMode::PatternOverlap: {
            std::vector<Formula> parts;
            for (const ArgSpec& arg : spec->comparison_args()) {
                parts.push_back(same_value(find_arg(required.args, arg.name),
                                           find_arg(forbidden.args, arg.name), arg.sort,
                                           registry, audit));
            }
            return Formula::conj(std::move(parts));
        }
        case CompareMode::Numeric: {
            return Formula::atom(Atom::numeric_incompat(numeric_bounds(required.args),
                                                        numeric_bounds(forbidden.args), audit));
        }
        case CompareMode::Ordering: {
            const ArgSpec* arg = spec->comparison_args().empty()
                                     ? nullptr
                                     : &spec->arg_schema.front();
            if (!arg) return Formula::constant(false);
            return ordering_collision(find_arg(required.args, arg->name),
                                      find_arg(forbidden.args, arg->name));
        }
        case CompareMode::Custom:
            throw Error("unsupported-comparison",
                        "custom comparison mode without a registered comparator: " +
                            spec->name);
    }
    return Formula::constant(false);
}

// ---------------------------------------------------------------------------
// Pair checking and lifting
// ---------------------------------------------------------------------------

PairVerdict check_pair(const Clause& a, const Clause& b, const SurfaceRegistry& registry,
                       OverlapResolver& resolver, const SolverLimits& limits) {
    PairVerdict verdict;
    verdict.clause_a = a.clause_id;
    verdict.clause_b = b.clause_id;

    if (!gate_surface(a, b)) {
        verdict.outcome = PairOutcome::SkippedSurface;
        return verdict;
    }
    if (!gate_hard(a, b, registry)) {
        verdict.outcome = PairOutcome::SkippedHardSign;
        return verdict;
    }

    Formula kappa = build_collision(a, b, registry);
    Formula gamma = Formula::conj({a.activation, b.activation, kappa});
    verdict.collision_formula = gamma;

    // Overlap atoms are not free: their value is fixed here, by the
    // deterministic default or the configured judge, and recorded with
    // provenance.
    std::map<std::string, Atom> atoms;
    gamma.collect_atoms(atoms);
    std::map<std::string, bool> fixed;
    std::map<std::string, OverlapDecision> overlap_choices;
    for (const auto& [key, atom] : atoms) {
        if (atom.kind == Atom::Kind::Overlap) {
            OverlapDecision d = resolver.resolve(atom.value_a, atom.value_b);
            fixed[key] = d.value;
            overlap_choices[key] = d;
        }
    }

    SolveResult result = solve_formula(gamma, fixed, limits, &registry);
    if (result.status == SolveStatus::Undecided) {
        verdict.outcome = PairOutcome::Undecided;
        return verdict;
    }
    if (result.status == SolveStatus::Unsat) {
        verdict.outcome = PairOutcome::Unsat;
        return verdict;
    }

    SymbolicAssignment assignment;
    assignment.atom_values = result.assignment.atoms;
    assignment.slot_values = result.assignment.slots;
    assignment.overlap_choices = std::move(overlap_choices);

    // Witness soundness: the returned assignment must re-evaluate to true.
    auto verified = eval_formula(gamma, assignment.to_valuation());
    if (!verified || !*verified) {
        throw Error("internal-error",
                    "solver returned an unverifiable assignment for " + a.clause_id + " x " +
                        b.clause_id);
    }
    verdict.outcome = PairOutcome::Sat;
    verdict.assignment = std::move(assignment);
    return verdict;
}

TriageResult triage_policy(const std::vector<ClauseSet>& clause_sets,
                           const SurfaceRegistry& registry, OverlapResolver& resolver,
                           const SolverLimits& limits) {
    TriageResult result;
    std::map<std::pair<size_t, size_t>, CandidatePair> by_pair;

    for (size_t i = 0; i < clause_sets.size(); ++i) {
        for (size_t j = i + 1; j < clause_sets.size(); ++j) {
            for (const Clause& ca : clause_sets[i].clauses) {
                for (const Clause& cb : clause_sets[j].clauses) {
                    PairVerdict v = check_pair(ca, cb, registry, resolver, limits);
                    ++result.stats.classified;
                    switch (v.outcome) {
                        case PairOutcome::SkippedSurface: ++result.stats.skipped_surface; break;
                        case PairOutcome::SkippedHardSign: ++result.stats.skipped_hard_sign; break;
                        case PairOutcome::Unsat: ++result.stats.unsat; break;
                        case PairOutcome::Undecided: ++result.stats.undecided; break;
                        case PairOutcome::Sat: {
                            ++result.stats.sat;
                            auto key = std::make_pair(i, j);
                            CandidatePair& pair = by_pair[key];
                            pair.rule_a = clause_sets[i].rule_id;
                            pair.rule_b = clause_sets[j].rule_id;
                            pair.witnesses.push_back({ca.clause_id, cb.clause_id, *v.assignment,
                                                      *v.collision_formula});
                            break;
                        }
                    }
                    result.verdicts.push_back(std::move(v));
                }
            }
        }
    }
    for (auto& [key, pair] : by_pair) {
        result.candidates.push_back(std::move(pair));
    }
    return result;
}

}  // namespace wire
