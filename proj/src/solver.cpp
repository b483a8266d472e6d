#include "wire/solver.hpp"

#include <algorithm>
#include <set>

namespace wire {

namespace {

void collect_constants(const Formula& f, std::set<std::string>& strings,
                       std::set<long long>& ints) {
    std::map<std::string, Atom> atoms;
    f.collect_atoms(atoms);
    auto scan_term = [&](const Term& t) {
        if (t.kind == Term::Kind::StrConst) strings.insert(t.str);
        if (t.kind == Term::Kind::IntConst) ints.insert(t.num);
    };
    for (const auto& [key, atom] : atoms) {
        for (const Term& t : atom.operands) scan_term(t);
        for (const NumericBound& b : atom.required) scan_term(b.value);
        for (const NumericBound& b : atom.forbidden) scan_term(b.value);
    }
}

// First Free/Overlap atom without a value; theory atoms are grounded by the
// slot assignment and never need branching.
const Atom* find_unassigned_atom(const Formula& f, const Valuation& v) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
            return nullptr;
        case Formula::Kind::Atom: {
            const Atom& a = f.atom_ref();
            if ((a.kind == Atom::Kind::Free || a.kind == Atom::Kind::Overlap) &&
                !v.atoms.count(a.key)) {
                return &a;
            }
            return nullptr;
        }
        default:
            for (const Formula& c : f.children()) {
                if (const Atom* a = find_unassigned_atom(c, v)) return a;
            }
            return nullptr;
    }
}

struct Search {
    const Formula& formula;
    const SolverLimits& limits;
    long long steps = 0;
    bool exhausted = false;

    bool sat_bool(Valuation& v) {
        if (++steps > limits.max_steps) {
            exhausted = true;
            return false;
        }
        std::optional<bool> value = eval_formula(formula, v);
        if (value.has_value()) return *value;
        const Atom* pick = find_unassigned_atom(formula, v);
        if (!pick) return false;  // unknown without a free atom: unbound slot
        for (bool branch : {true, false}) {
            v.atoms[pick->key] = branch;
            if (sat_bool(v)) return true;
            if (exhausted) return false;
            v.atoms.erase(pick->key);
        }
        return false;
    }
};

}  // namespace

std::vector<Term> slot_domain(const std::string& sort, const Formula& formula,
                              const SurfaceRegistry* registry) {
    std::set<std::string> strings;
    std::set<long long> ints;
    collect_constants(formula, strings, ints);

    if (sort == "Int") {
        std::vector<Term> out;
        for (long long v : numeric_domain({ints.begin(), ints.end()})) {
            out.push_back(Term::int_const(v));
        }
        return out;
    }
    if (sort == "Bool") {
        return {Term::bool_const(true), Term::bool_const(false)};
    }
    if (registry) {
        if (const Sort* s = registry->find_sort(sort); s && s->is_closed()) {
            std::vector<Term> out;
            for (const std::string& v : s->enum_values) out.push_back(Term::str_const(v));
            return out;
        }
    }
    // Open string domain: every mentioned constant plus one fresh value, so
    // a forbidden constant can never be satisfied vacuously.
    std::vector<Term> out;
    for (const std::string& s : strings) out.push_back(Term::str_const(s));
    std::string fresh = "<fresh>";
    while (strings.count(fresh)) fresh += "_";
    out.push_back(Term::str_const(fresh));
    return out;
}

SolveResult solve_formula(const Formula& formula,
                          const std::map<std::string, bool>& fixed_atoms,
                          const SolverLimits& limits, const SurfaceRegistry* registry) {
    SolveResult result;

    std::map<std::string, Atom> atoms;
    formula.collect_atoms(atoms);
    if (static_cast<int>(atoms.size()) > limits.max_atoms) {
        result.status = SolveStatus::Undecided;
        return result;
    }

    std::map<std::string, std::string> slots;
    formula.collect_slots(slots);
    std::vector<std::pair<std::string, std::vector<Term>>> domains;
    for (const auto& [key, sort] : slots) {
        domains.emplace_back(key, slot_domain(sort, formula, registry));
    }

    Search search{formula, limits};

    Valuation v;
    for (const auto& [key, value] : fixed_atoms) v.atoms[key] = value;

    // Depth-first product over slot domains; boolean search per grounding.
    std::vector<size_t> index(domains.size(), 0);
    auto try_current = [&]() -> bool {
        Valuation attempt = v;
        for (size_t d = 0; d < domains.size(); ++d) {
            attempt.slots[domains[d].first] = domains[d].second[index[d]];
        }
        if (search.sat_bool(attempt)) {
            // Total assignment: untouched free atoms default to false.
            for (const auto& [key, atom] : atoms) {
                if (atom.kind == Atom::Kind::Free || atom.kind == Atom::Kind::Overlap) {
                    attempt.atoms.emplace(key, false);
                }
            }
            result.assignment = std::move(attempt);
            return true;
        }
        return false;
    };

    bool sat = false;
    if (domains.empty()) {
        sat = try_current();
    } else {
        while (true) {
            if (try_current()) {
                sat = true;
                break;
            }
            if (search.exhausted) break;
            size_t d = 0;
            while (d < domains.size()) {
                if (++index[d] < domains[d].second.size()) break;
                index[d] = 0;
                ++d;
            }
            if (d == domains.size()) break;
        }
    }

    result.steps = search.steps;
    if (search.exhausted) {
        result.status = SolveStatus::Undecided;
    } else {
        result.status = sat ? SolveStatus::Sat : SolveStatus::Unsat;
    }
    return result;
}

}  // namespace wire
