#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wire/jsonl.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Force signs
// ---------------------------------------------------------------------------

enum class ForceSign { Require, Forbid, Prefer, Avoid, Permit };

// Hard signs are exactly require and forbid; the others are preserved for
// audit but never counted as hard contradictions.
bool sign_is_hard(ForceSign sign);
std::string sign_name(ForceSign sign);
std::optional<ForceSign> sign_from_name(const std::string& name);
const std::vector<ForceSign>& all_signs();

// ---------------------------------------------------------------------------
// Sorts and primitive metadata
// ---------------------------------------------------------------------------

enum class Cardinality { SingleValued, MultiValued, EventLike, CountValued, Temporal };
enum class CompareMode { Equality, SetOverlap, Numeric, PatternOverlap, Ordering, Custom };

std::string cardinality_name(Cardinality c);
std::optional<Cardinality> cardinality_from_name(const std::string& name);
std::string compare_mode_name(CompareMode m);
std::optional<CompareMode> compare_mode_from_name(const std::string& name);

struct Sort {
    std::string name;
    std::vector<std::string> enum_values;  // nonempty only for closed sorts

    bool is_closed() const { return !enum_values.empty(); }
};

struct ArgSpec {
    std::string name;
    std::string sort;
};

struct PrimitiveSpec {
    std::string name;
    std::vector<ArgSpec> arg_schema;
    std::vector<std::string> surface_key_args;  // subset of arg_schema names
    Cardinality cardinality = Cardinality::EventLike;
    CompareMode comparison = CompareMode::Equality;

    const ArgSpec* find_arg(const std::string& arg_name) const;
    // Schema args that are not projection keys; these are the values the
    // collision comparator looks at.
    std::vector<ArgSpec> comparison_args() const;

    json to_json() const;
    static PrimitiveSpec from_json(const json& j);
};

// ---------------------------------------------------------------------------
// Argument values
// ---------------------------------------------------------------------------

// A canonical primitive argument: a concrete literal, a finite list, or a
// symbolic slot reference produced by lowering an extractor call.
struct ArgValue {
    enum class Kind { Str, Int, Bool, List, Slot };

    Kind kind = Kind::Str;
    std::string str;
    long long num = 0;
    bool boolean = false;
    std::vector<ArgValue> list;
    std::string slot_key;   // Kind::Slot
    std::string slot_sort;  // Kind::Slot

    static ArgValue of_string(std::string v);
    static ArgValue of_int(long long v);
    static ArgValue of_bool(bool v);
    static ArgValue of_list(std::vector<ArgValue> items);
    static ArgValue of_slot(std::string key, std::string sort);

    bool is_symbolic() const { return kind == Kind::Slot; }
    std::string canonical() const;

    json to_json() const;
    static ArgValue from_json(const json& j);

    bool operator==(const ArgValue& other) const { return canonical() == other.canonical(); }
};

// Canonical (name-sorted) argument form.
using ArgMap = std::map<std::string, ArgValue>;

json args_to_json(const ArgMap& args);
ArgMap args_from_json(const json& j);

// ---------------------------------------------------------------------------
// Decision surfaces
// ---------------------------------------------------------------------------

struct SurfaceKeyPart {
    bool any = false;  // symbolic / absent key argument: unifies with anything
    std::string value;

    bool unifies(const SurfaceKeyPart& other) const {
        return any || other.any || value == other.value;
    }
};

struct SurfaceDescriptor {
    std::string primitive;
    std::vector<SurfaceKeyPart> key;

    // Equality-as-unification: same primitive and pointwise unifying keys.
    // ANY unifies with anything, so the relation is reflexive and symmetric.
    bool unifies(const SurfaceDescriptor& other) const;
    std::string to_string() const;  // e.g. edit_file[path=a.cfg], run_shell[]
};

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

class SurfaceRegistry {
public:
    // The embedded vocabulary: every primitive, predicate, extractor, sign,
    // and sort the compiler and triage stages understand out of the box.
    static SurfaceRegistry builtin();

    // Adds or overrides primitive specs (and optionally sorts) from a
    // manifest record file; see fixtures/registry.jsonl for the format.
    void load_manifest(const std::filesystem::path& path);

    const PrimitiveSpec* find_primitive(const std::string& name) const;
    const Sort* find_sort(const std::string& name) const;

    bool is_primitive(const std::string& name) const;
    bool is_predicate(const std::string& name) const;
    bool is_semantic_predicate(const std::string& name) const;
    bool is_extractor(const std::string& name) const;
    bool is_sign(const std::string& name) const;
    bool is_sort(const std::string& name) const;

    // True for string-typed sorts without a closed enum: values there are
    // open vocabulary and may need overlap judgment at collision time.
    bool is_open_string_sort(const std::string& sort_name) const;

    const std::map<std::string, PrimitiveSpec>& primitives() const { return primitives_; }
    const std::set<std::string>& predicates() const { return predicates_; }
    const std::set<std::string>& extractors() const { return extractors_; }

    // Maps (primitive, canonical args) to its decision surface. Key built
    // from surface_key_args only; symbolic values project to ANY. Throws on
    // unknown primitive or arity/sort mismatch.
    SurfaceDescriptor project_surface(const std::string& primitive, const ArgMap& args) const;

    // Validates one concrete value against a sort (kind and, for closed
    // sorts, enum membership). Throws Error("sort-mismatch") on failure.
    void check_sort(const std::string& primitive, const std::string& arg_name,
                    const std::string& sort_name, const ArgValue& value) const;

    void add_primitive(PrimitiveSpec spec);
    void add_sort(Sort sort);

private:
    std::map<std::string, PrimitiveSpec> primitives_;
    std::map<std::string, Sort> sorts_;
    std::set<std::string> predicates_;
    std::set<std::string> semantic_predicates_;
    std::set<std::string> extractors_;
};

}  // namespace wire
