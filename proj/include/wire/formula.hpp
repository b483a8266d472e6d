#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wire/jsonl.hpp"
#include "wire/pyrule_ast.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

// A comparison operand: a constant or a typed slot variable.
struct Term {
    enum class Kind { StrConst, IntConst, BoolConst, Slot };

    Kind kind = Kind::StrConst;
    std::string str;
    long long num = 0;
    bool boolean = false;
    std::string slot_key;
    std::string slot_sort;

    static Term str_const(std::string v);
    static Term int_const(long long v);
    static Term bool_const(bool v);
    static Term slot(std::string key, std::string sort);

    bool is_slot() const { return kind == Kind::Slot; }
    std::string canonical() const;

    json to_json() const;
    static Term from_json(const json& j);

    bool operator==(const Term& o) const { return canonical() == o.canonical(); }
    bool operator<(const Term& o) const { return canonical() < o.canonical(); }
};

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

struct NumericBound {
    CmpOp op = CmpOp::Eq;
    Term value;  // IntConst or Int slot
};

// Atoms are identified by their canonical key: two occurrences of an
// identical predicate lower to the identical atom (hash-consing by key).
struct Atom {
    enum class Kind {
        Free,     // boolean variable: activation atom z_label or ground predicate
        Theory,   // comparison over terms, decided against slot assignments
        Overlap,  // open-value overlap; fixed by the overlap resolver
        NumericIncompat,  // required numeric region contained in forbidden region
    };

    Kind kind = Kind::Free;
    std::string key;
    std::string text;  // originating predicate text, audit only

    CmpOp op = CmpOp::Eq;          // Theory
    std::vector<Term> operands;    // Theory
    std::string value_a, value_b;  // Overlap (normalized)
    std::vector<NumericBound> required, forbidden;  // NumericIncompat

    static Atom free_atom(std::string key, std::string text);
    static Atom theory(CmpOp op, Term lhs, Term rhs, std::string text);
    static Atom overlap(const std::string& raw_a, const std::string& raw_b, std::string text);
    static Atom numeric_incompat(std::vector<NumericBound> required,
                                 std::vector<NumericBound> forbidden, std::string text);

    json to_json() const;
    static Atom from_json(const json& j);
};

// ---------------------------------------------------------------------------
// Formula
// ---------------------------------------------------------------------------

// Immutable boolean combination over atoms. Construction applies only
// trivial constant folding; obtaining negation normal form is always
// possible via nnf().
class Formula {
public:
    enum class Kind { True, False, Atom, Not, And, Or };

    Formula() : kind_(Kind::True) {}

    static Formula constant(bool value);
    static Formula atom(wire::Atom a);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::True || kind_ == Kind::False; }
    bool constant_value() const { return kind_ == Kind::True; }
    const wire::Atom& atom_ref() const { return *atom_; }
    const std::vector<Formula>& children() const { return children_; }

    void collect_atoms(std::map<std::string, wire::Atom>& out) const;
    void collect_slots(std::map<std::string, std::string>& key_to_sort) const;

    Formula nnf() const;

    std::string canonical() const;
    json to_json() const;
    static Formula from_json(const json& j);

private:
    Kind kind_;
    std::shared_ptr<const wire::Atom> atom_;
    std::vector<Formula> children_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct Valuation {
    std::map<std::string, bool> atoms;  // by atom key; Free and Overlap atoms
    std::map<std::string, Term> slots;  // slot key -> constant term
};

// Evaluates a theory atom under a slot assignment. Unbound slots make the
// result nullopt.
std::optional<bool> eval_atom(const Atom& atom, const Valuation& v);

// Evaluates the full formula; nullopt when any needed atom/slot is unbound.
std::optional<bool> eval_formula(const Formula& f, const Valuation& v);

// Numeric enumeration domain: 0..32 plus every mentioned constant +/- 1.
std::vector<long long> numeric_domain(const std::vector<long long>& constants);

bool numeric_bounds_satisfied(const std::vector<NumericBound>& bounds, long long value,
                              const Valuation& v);

}  // namespace wire
