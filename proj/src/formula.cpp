#include "wire/formula.hpp"

#include <algorithm>

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Term
// ---------------------------------------------------------------------------

Term Term::str_const(std::string v) {
    Term t;
    t.kind = Kind::StrConst;
    t.str = std::move(v);
    return t;
}

Term Term::int_const(long long v) {
    Term t;
    t.kind = Kind::IntConst;
    t.num = v;
    return t;
}

Term Term::bool_const(bool v) {
    Term t;
    t.kind = Kind::BoolConst;
    t.boolean = v;
    return t;
}

Term Term::slot(std::string key, std::string sort) {
    Term t;
    t.kind = Kind::Slot;
    t.slot_key = std::move(key);
    t.slot_sort = std::move(sort);
    return t;
}

std::string Term::canonical() const {
    switch (kind) {
        case Kind::StrConst: return "\"" + str + "\"";
        case Kind::IntConst: return std::to_string(num);
        case Kind::BoolConst: return boolean ? "true" : "false";
        case Kind::Slot: return "<" + slot_key + ">";
    }
    return "?";
}

json Term::to_json() const {
    switch (kind) {
        case Kind::StrConst: return {{"k", "str"}, {"v", str}};
        case Kind::IntConst: return {{"k", "int"}, {"v", num}};
        case Kind::BoolConst: return {{"k", "bool"}, {"v", boolean}};
        case Kind::Slot: return {{"k", "slot"}, {"key", slot_key}, {"sort", slot_sort}};
    }
    return nullptr;
}

Term Term::from_json(const json& j) {
    std::string k = j.at("k").get<std::string>();
    if (k == "str") return str_const(j.at("v").get<std::string>());
    if (k == "int") return int_const(j.at("v").get<long long>());
    if (k == "bool") return bool_const(j.at("v").get<bool>());
    if (k == "slot") return slot(j.at("key").get<std::string>(), j.at("sort").get<std::string>());
    throw Error("malformed-record", "bad term: " + j.dump());
}

// ---------------------------------------------------------------------------
// Atom
// ---------------------------------------------------------------------------

namespace {

std::string bounds_canonical(const std::vector<NumericBound>& bounds) {
    std::string s = "{";
    for (size_t i = 0; i < bounds.size(); ++i) {
        if (i) s += ",";
        s += cmp_op_name(bounds[i].op) + bounds[i].value.canonical();
    }
    return s + "}";
}

json bounds_to_json(const std::vector<NumericBound>& bounds) {
    json arr = json::array();
    for (const NumericBound& b : bounds) {
        arr.push_back({{"op", cmp_op_name(b.op)}, {"value", b.value.to_json()}});
    }
    return arr;
}

std::vector<NumericBound> bounds_from_json(const json& j) {
    std::vector<NumericBound> out;
    for (const json& e : j) {
        NumericBound b;
        std::string op = e.at("op").get<std::string>();
        if (op == "==") b.op = CmpOp::Eq;
        else if (op == "!=") b.op = CmpOp::Ne;
        else if (op == "<") b.op = CmpOp::Lt;
        else if (op == "<=") b.op = CmpOp::Le;
        else if (op == ">") b.op = CmpOp::Gt;
        else if (op == ">=") b.op = CmpOp::Ge;
        else throw Error("malformed-record", "bad bound op: " + op);
        b.value = Term::from_json(e.at("value"));
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace

Atom Atom::free_atom(std::string key, std::string text) {
    Atom a;
    a.kind = Kind::Free;
    a.key = std::move(key);
    a.text = std::move(text);
    return a;
}

Atom Atom::theory(CmpOp op, Term lhs, Term rhs, std::string text) {
    Atom a;
    a.kind = Kind::Theory;
    a.op = op;
    a.operands = {std::move(lhs), std::move(rhs)};
    a.text = std::move(text);
    a.key = "t:" + a.operands[0].canonical() + cmp_op_name(op) + a.operands[1].canonical();
    return a;
}

Atom Atom::overlap(const std::string& raw_a, const std::string& raw_b, std::string text) {
    Atom a;
    a.kind = Kind::Overlap;
    a.value_a = normalize_label(raw_a);
    a.value_b = normalize_label(raw_b);
    if (a.value_b < a.value_a) std::swap(a.value_a, a.value_b);  // symmetric identity
    a.text = std::move(text);
    a.key = "o:" + a.value_a + "|" + a.value_b;
    return a;
}

Atom Atom::numeric_incompat(std::vector<NumericBound> required,
                            std::vector<NumericBound> forbidden, std::string text) {
    Atom a;
    a.kind = Kind::NumericIncompat;
    a.required = std::move(required);
    a.forbidden = std::move(forbidden);
    a.text = std::move(text);
    a.key = "n:req" + bounds_canonical(a.required) + "forb" + bounds_canonical(a.forbidden);
    return a;
}

json Atom::to_json() const {
    json j{{"key", key}, {"text", text}};
    switch (kind) {
        case Kind::Free:
            j["kind"] = "free";
            break;
        case Kind::Theory:
            j["kind"] = "theory";
            j["op"] = cmp_op_name(op);
            j["lhs"] = operands[0].to_json();
            j["rhs"] = operands[1].to_json();
            break;
        case Kind::Overlap:
            j["kind"] = "overlap";
            j["a"] = value_a;
            j["b"] = value_b;
            break;
        case Kind::NumericIncompat:
            j["kind"] = "numeric-incompat";
            j["required"] = bounds_to_json(required);
            j["forbidden"] = bounds_to_json(forbidden);
            break;
    }
    return j;
}

Atom Atom::from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "free") {
        return free_atom(j.at("key").get<std::string>(), j.value("text", ""));
    }
    if (kind == "theory") {
        std::string op = j.at("op").get<std::string>();
        CmpOp o = CmpOp::Eq;
        if (op == "==") o = CmpOp::Eq;
        else if (op == "!=") o = CmpOp::Ne;
        else if (op == "<") o = CmpOp::Lt;
        else if (op == "<=") o = CmpOp::Le;
        else if (op == ">") o = CmpOp::Gt;
        else if (op == ">=") o = CmpOp::Ge;
        return theory(o, Term::from_json(j.at("lhs")), Term::from_json(j.at("rhs")),
                      j.value("text", ""));
    }
    if (kind == "overlap") {
        return overlap(j.at("a").get<std::string>(), j.at("b").get<std::string>(),
                       j.value("text", ""));
    }
    if (kind == "numeric-incompat") {
        return numeric_incompat(bounds_from_json(j.at("required")),
                                bounds_from_json(j.at("forbidden")), j.value("text", ""));
    }
    throw Error("malformed-record", "bad atom kind: " + kind);
}

// ---------------------------------------------------------------------------
// Formula
// ---------------------------------------------------------------------------

Formula Formula::constant(bool value) {
    Formula f;
    f.kind_ = value ? Kind::True : Kind::False;
    return f;
}

Formula Formula::atom(wire::Atom a) {
    Formula f;
    f.kind_ = Kind::Atom;
    f.atom_ = std::make_shared<const wire::Atom>(std::move(a));
    return f;
}

Formula Formula::negate(Formula f) {
    if (f.kind_ == Kind::True) return constant(false);
    if (f.kind_ == Kind::False) return constant(true);
    if (f.kind_ == Kind::Not) return f.children_[0];
    Formula out;
    out.kind_ = Kind::Not;
    out.children_.push_back(std::move(f));
    return out;
}

Formula Formula::conj(std::vector<Formula> parts) {
    std::vector<Formula> flat;
    for (Formula& p : parts) {
        if (p.kind_ == Kind::True) continue;
        if (p.kind_ == Kind::False) return constant(false);
        if (p.kind_ == Kind::And) {
            for (const Formula& c : p.children_) flat.push_back(c);
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) return constant(true);
    if (flat.size() == 1) return flat[0];
    Formula out;
    out.kind_ = Kind::And;
    out.children_ = std::move(flat);
    return out;
}

Formula Formula::disj(std::vector<Formula> parts) {
    std::vector<Formula> flat;
    for (Formula& p : parts) {
        if (p.kind_ == Kind::False) continue;
        if (p.kind_ == Kind::True) return constant(true);
        if (p.kind_ == Kind::Or) {
            for (const Formula& c : p.children_) flat.push_back(c);
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) return constant(false);
    if (flat.size() == 1) return flat[0];
    Formula out;
    out.kind_ = Kind::Or;
    out.children_ = std::move(flat);
    return out;
}

void Formula::collect_atoms(std::map<std::string, wire::Atom>& out) const {
    if (kind_ == Kind::Atom) {
        out.emplace(atom_->key, *atom_);
        return;
    }
    for (const Formula& c : children_) c.collect_atoms(out);
}

void Formula::collect_slots(std::map<std::string, std::string>& key_to_sort) const {
    if (kind_ == Kind::Atom) {
        auto scan = [&](const Term& t) {
            if (t.is_slot()) key_to_sort.emplace(t.slot_key, t.slot_sort);
        };
        for (const Term& t : atom_->operands) scan(t);
        for (const NumericBound& b : atom_->required) scan(b.value);
        for (const NumericBound& b : atom_->forbidden) scan(b.value);
        return;
    }
    for (const Formula& c : children_) c.collect_slots(key_to_sort);
}

Formula Formula::nnf() const {
    struct Impl {
        static Formula run(const Formula& f, bool neg) {
            switch (f.kind()) {
                case Kind::True: return constant(!neg);
                case Kind::False: return constant(neg);
                case Kind::Atom: return neg ? negate(Formula::atom(f.atom_ref())) : f;
                case Kind::Not: return run(f.children()[0], !neg);
                case Kind::And:
                case Kind::Or: {
                    std::vector<Formula> parts;
                    for (const Formula& c : f.children()) parts.push_back(run(c, neg));
                    bool is_and = (f.kind() == Kind::And) != neg;
                    return is_and ? conj(std::move(parts)) : disj(std::move(parts));
                }
            }
            return constant(true);
        }
    };
    return Impl::run(*this, false);
}

std::string Formula::canonical() const {
    switch (kind_) {
        case Kind::True: return "true";
        case Kind::False: return "false";
        case Kind::Atom: return atom_->key;
        case Kind::Not: return "(not " + children_[0].canonical() + ")";
        case Kind::And:
        case Kind::Or: {
            std::string s = kind_ == Kind::And ? "(and" : "(or";
            for (const Formula& c : children_) s += " " + c.canonical();
            return s + ")";
        }
    }
    return "?";
}

json Formula::to_json() const {
    switch (kind_) {
        case Kind::True: return {{"t", "true"}};
        case Kind::False: return {{"t", "false"}};
        case Kind::Atom: return {{"t", "atom"}, {"atom", atom_->to_json()}};
        case Kind::Not: return {{"t", "not"}, {"child", children_[0].to_json()}};
        case Kind::And:
        case Kind::Or: {
            json ch = json::array();
            for (const Formula& c : children_) ch.push_back(c.to_json());
            return {{"t", kind_ == Kind::And ? "and" : "or"}, {"children", ch}};
        }
    }
    return nullptr;
}

Formula Formula::from_json(const json& j) {
    std::string t = j.at("t").get<std::string>();
    if (t == "true") return constant(true);
    if (t == "false") return constant(false);
    if (t == "atom") return atom(Atom::from_json(j.at("atom")));
    if (t == "not") return negate(from_json(j.at("child")));
    if (t == "and" || t == "or") {
        std::vector<Formula> parts;
        for (const json& c : j.at("children")) parts.push_back(from_json(c));
        return t == "and" ? conj(std::move(parts)) : disj(std::move(parts));
    }
    throw Error("malformed-record", "bad formula node: " + t);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

struct Resolved {
    bool ok = false;
    bool is_int = false;
    bool is_bool = false;
    long long num = 0;
    bool boolean = false;
    std::string str;
};

Resolved resolve_term(const Term& t, const Valuation& v) {
    Resolved r;
    const Term* target = &t;
    if (t.is_slot()) {
        auto it = v.slots.find(t.slot_key);
        if (it == v.slots.end()) return r;
        target = &it->second;
    }
    r.ok = true;
    switch (target->kind) {
        case Term::Kind::IntConst:
            r.is_int = true;
            r.num = target->num;
            break;
        case Term::Kind::BoolConst:
            r.is_bool = true;
            r.boolean = target->boolean;
            break;
        case Term::Kind::StrConst:
            r.str = target->str;
            break;
        case Term::Kind::Slot:
            r.ok = false;  // slot bound to a slot is not a value
            break;
    }
    return r;
}

bool compare_resolved(CmpOp op, const Resolved& a, const Resolved& b) {
    if (a.is_int && b.is_int) {
        switch (op) {
            case CmpOp::Eq: return a.num == b.num;
            case CmpOp::Ne: return a.num != b.num;
            case CmpOp::Lt: return a.num < b.num;
            case CmpOp::Le: return a.num <= b.num;
            case CmpOp::Gt: return a.num > b.num;
            case CmpOp::Ge: return a.num >= b.num;
        }
    }
    if (a.is_bool && b.is_bool) {
        bool eq = a.boolean == b.boolean;
        if (op == CmpOp::Eq) return eq;
        if (op == CmpOp::Ne) return !eq;
        return false;
    }
    if (!a.is_int && !a.is_bool && !b.is_int && !b.is_bool) {
        int c = a.str.compare(b.str);
        switch (op) {
            case CmpOp::Eq: return c == 0;
            case CmpOp::Ne: return c != 0;
            case CmpOp::Lt: return c < 0;
            case CmpOp::Le: return c <= 0;
            case CmpOp::Gt: return c > 0;
            case CmpOp::Ge: return c >= 0;
        }
    }
    // Mixed kinds never denote the same value.
    return op == CmpOp::Ne;
}

}  // namespace

bool numeric_bounds_satisfied(const std::vector<NumericBound>& bounds, long long value,
                              const Valuation& v) {
    for (const NumericBound& b : bounds) {
        Resolved r = resolve_term(b.value, v);
        if (!r.ok || !r.is_int) return false;
        Resolved lhs;
        lhs.ok = true;
        lhs.is_int = true;
        lhs.num = value;
        if (!compare_resolved(b.op, lhs, r)) return false;
    }
    return true;
}

std::vector<long long> numeric_domain(const std::vector<long long>& constants) {
    std::vector<long long> domain;
    for (long long i = 0; i <= 32; ++i) domain.push_back(i);
    for (long long c : constants) {
        domain.push_back(c - 1);
        domain.push_back(c);
        domain.push_back(c + 1);
    }
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
    return domain;
}

std::optional<bool> eval_atom(const Atom& atom, const Valuation& v) {
    switch (atom.kind) {
        case Atom::Kind::Free:
        case Atom::Kind::Overlap: {
            auto it = v.atoms.find(atom.key);
            if (it == v.atoms.end()) return std::nullopt;
            return it->second;
        }
        case Atom::Kind::Theory: {
            Resolved a = resolve_term(atom.operands[0], v);
            Resolved b = resolve_term(atom.operands[1], v);
            if (!a.ok || !b.ok) return std::nullopt;
            return compare_resolved(atom.op, a, b);
        }
        case Atom::Kind::NumericIncompat: {
            // True when every value satisfying the required bounds also
            // satisfies the forbidden bounds (over the bounded domain).
            std::vector<long long> constants;
            auto gather = [&](const std::vector<NumericBound>& bounds) -> bool {
                for (const NumericBound& b : bounds) {
                    Resolved r = resolve_term(b.value, v);
                    if (!r.ok) return false;
                    if (r.is_int) constants.push_back(r.num);
                }
                return true;
            };
            if (!gather(atom.required) || !gather(atom.forbidden)) return std::nullopt;
            bool any_required = false;
            for (long long value : numeric_domain(constants)) {
                if (!numeric_bounds_satisfied(atom.required, value, v)) continue;
                any_required = true;
                if (!numeric_bounds_satisfied(atom.forbidden, value, v)) return false;
            }
            // An unsatisfiable requirement cannot be jointly violated.
            return any_required;
        }
    }
    return std::nullopt;
}

std::optional<bool> eval_formula(const Formula& f, const Valuation& v) {
    switch (f.kind()) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::Atom: return eval_atom(f.atom_ref(), v);
        case Formula::Kind::Not: {
            auto c = eval_formula(f.children()[0], v);
            if (!c) return std::nullopt;
            return !*c;
        }
        case Formula::Kind::And: {
            bool unknown = false;
            for (const Formula& c : f.children()) {
                auto r = eval_formula(c, v);
                if (!r) unknown = true;
                else if (!*r) return false;
            }
            if (unknown) return std::nullopt;
            return true;
        }
        case Formula::Kind::Or: {
            bool unknown = false;
            for (const Formula& c : f.children()) {
                auto r = eval_formula(c, v);
                if (!r) unknown = true;
                else if (*r) return true;
            }
            if (unknown) return std::nullopt;
            return false;
        }
    }
    return std::nullopt;
}

}  // namespace wire
