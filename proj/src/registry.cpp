#include "wire/registry.hpp"

#include <algorithm>

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Signs
// ---------------------------------------------------------------------------

bool sign_is_hard(ForceSign sign) {
    return sign == ForceSign::Require || sign == ForceSign::Forbid;
}

std::string sign_name(ForceSign sign) {
    switch (sign) {
        case ForceSign::Require: return "require";
        case ForceSign::Forbid: return "forbid";
        case ForceSign::Prefer: return "prefer";
        case ForceSign::Avoid: return "avoid";
        case ForceSign::Permit: return "permit";
    }
    return "?";
}

std::optional<ForceSign> sign_from_name(const std::string& name) {
    for (ForceSign s : all_signs()) {
        if (sign_name(s) == name) return s;
    }
    return std::nullopt;
}

const std::vector<ForceSign>& all_signs() {
    static const std::vector<ForceSign> signs = {
        ForceSign::Require, ForceSign::Forbid, ForceSign::Prefer,
        ForceSign::Avoid, ForceSign::Permit};
    return signs;
}

// ---------------------------------------------------------------------------
// Metadata enums
// ---------------------------------------------------------------------------

std::string cardinality_name(Cardinality c) {
    switch (c) {
        case Cardinality::SingleValued: return "single-valued";
        case Cardinality::MultiValued: return "multi-valued";
        case Cardinality::EventLike: return "event-like";
        case Cardinality::CountValued: return "count-valued";
        case Cardinality::Temporal: return "temporal";
    }
    return "?";
}

std::optional<Cardinality> cardinality_from_name(const std::string& name) {
    for (Cardinality c : {Cardinality::SingleValued, Cardinality::MultiValued,
                          Cardinality::EventLike, Cardinality::CountValued,
                          Cardinality::Temporal}) {
        if (cardinality_name(c) == name) return c;
    }
    return std::nullopt;
}

std::string compare_mode_name(CompareMode m) {
    switch (m) {
        case CompareMode::Equality: return "equality";
        case CompareMode::SetOverlap: return "set-overlap";
        case CompareMode::Numeric: return "numeric";
        case CompareMode::PatternOverlap: return "pattern-overlap";
        case CompareMode::Ordering: return "ordering";
        case CompareMode::Custom: return "custom";
    }
    return "?";
}

std::optional<CompareMode> compare_mode_from_name(const std::string& name) {
    for (CompareMode m : {CompareMode::Equality, CompareMode::SetOverlap,
                          CompareMode::Numeric, CompareMode::PatternOverlap,
                          CompareMode::Ordering, CompareMode::Custom}) {
        if (compare_mode_name(m) == name) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PrimitiveSpec
// ---------------------------------------------------------------------------

const ArgSpec* PrimitiveSpec::find_arg(const std::string& arg_name) const {
    for (const ArgSpec& a : arg_schema) {
        if (a.name == arg_name) return &a;
    }
    return nullptr;
}

std::vector<ArgSpec> PrimitiveSpec::comparison_args() const {
    std::vector<ArgSpec> out;
    for (const ArgSpec& a : arg_schema) {
        bool is_key = std::find(surface_key_args.begin(), surface_key_args.end(), a.name) !=
                      surface_key_args.end();
        if (!is_key) out.push_back(a);
    }
    return out;
}

json PrimitiveSpec::to_json() const {
    json args = json::array();
    for (const ArgSpec& a : arg_schema) {
        args.push_back({{"name", a.name}, {"sort", a.sort}});
    }
    return {{"name", name},
            {"args", args},
            {"surface_key_args", surface_key_args},
            {"cardinality", cardinality_name(cardinality)},
            {"comparison_mode", compare_mode_name(comparison)}};
}

PrimitiveSpec PrimitiveSpec::from_json(const json& j) {
    PrimitiveSpec spec;
    spec.name = j.at("name").get<std::string>();
    for (const json& a : j.at("args")) {
        spec.arg_schema.push_back({a.at("name").get<std::string>(), a.at("sort").get<std::string>()});
    }
    spec.surface_key_args = j.value("surface_key_args", std::vector<std::string>{});
    auto card = cardinality_from_name(j.at("cardinality").get<std::string>());
    auto cmp = compare_mode_from_name(j.at("comparison_mode").get<std::string>());
    if (!card || !cmp) {
        throw Error("malformed-record", "primitive spec " + spec.name +
                                            ": unknown cardinality or comparison mode");
    }
    spec.cardinality = *card;
    spec.comparison = *cmp;
    return spec;
}

// ---------------------------------------------------------------------------
// ArgValue
// ---------------------------------------------------------------------------

ArgValue ArgValue::of_string(std::string v) {
    ArgValue a;
    a.kind = Kind::Str;
    a.str = std::move(v);
    return a;
}

ArgValue ArgValue::of_int(long long v) {
    ArgValue a;
    a.kind = Kind::Int;
    a.num = v;
    return a;
}

ArgValue ArgValue::of_bool(bool v) {
    ArgValue a;
    a.kind = Kind::Bool;
    a.boolean = v;
    return a;
}

ArgValue ArgValue::of_list(std::vector<ArgValue> items) {
    ArgValue a;
    a.kind = Kind::List;
    a.list = std::move(items);
    return a;
}

ArgValue ArgValue::of_slot(std::string key, std::string sort) {
    ArgValue a;
    a.kind = Kind::Slot;
    a.slot_key = std::move(key);
    a.slot_sort = std::move(sort);
    return a;
}

std::string ArgValue::canonical() const {
    switch (kind) {
        case Kind::Str: return "\"" + str + "\"";
        case Kind::Int: return std::to_string(num);
        case Kind::Bool: return boolean ? "true" : "false";
        case Kind::Slot: return "<" + slot_key + ">";
        case Kind::List: {
            std::string out = "[";
            for (size_t i = 0; i < list.size(); ++i) {
                if (i) out += ",";
                out += list[i].canonical();
            }
            return out + "]";
        }
    }
    return "?";
}

json ArgValue::to_json() const {
    switch (kind) {
        case Kind::Str: return str;
        case Kind::Int: return num;
        case Kind::Bool: return boolean;
        case Kind::Slot: return {{"slot", slot_key}, {"sort", slot_sort}};
        case Kind::List: {
            json arr = json::array();
            for (const ArgValue& v : list) arr.push_back(v.to_json());
            return arr;
        }
    }
    return nullptr;
}

ArgValue ArgValue::from_json(const json& j) {
    if (j.is_string()) return of_string(j.get<std::string>());
    if (j.is_number_integer()) return of_int(j.get<long long>());
    if (j.is_boolean()) return of_bool(j.get<bool>());
    if (j.is_array()) {
        std::vector<ArgValue> items;
        for (const json& e : j) items.push_back(from_json(e));
        return of_list(std::move(items));
    }
    if (j.is_object() && j.contains("slot")) {
        return of_slot(j.at("slot").get<std::string>(), j.value("sort", "String"));
    }
    throw Error("malformed-record", "unsupported argument value: " + j.dump());
}

json args_to_json(const ArgMap& args) {
    json out = json::object();
    for (const auto& [name, value] : args) out[name] = value.to_json();
    return out;
}

ArgMap args_from_json(const json& j) {
    ArgMap out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        out[it.key()] = ArgValue::from_json(it.value());
    }
    return out;
}

// ---------------------------------------------------------------------------
// SurfaceDescriptor
// ---------------------------------------------------------------------------

bool SurfaceDescriptor::unifies(const SurfaceDescriptor& other) const {
    if (primitive != other.primitive) return false;
    if (key.size() != other.key.size()) return false;
    for (size_t i = 0; i < key.size(); ++i) {
        if (!key[i].unifies(other.key[i])) return false;
    }
    return true;
}

std::string SurfaceDescriptor::to_string() const {
    std::string out = primitive + "[";
    for (size_t i = 0; i < key.size(); ++i) {
        if (i) out += ",";
        out += key[i].any ? "*" : key[i].value;
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// SurfaceRegistry
// ---------------------------------------------------------------------------

namespace {

PrimitiveSpec make_spec(std::string name, std::vector<ArgSpec> args,
                        std::vector<std::string> keys, Cardinality card, CompareMode cmp) {
    PrimitiveSpec s;
    s.name = std::move(name);
    s.arg_schema = std::move(args);
    s.surface_key_args = std::move(keys);
    s.cardinality = card;
    s.comparison = cmp;
    return s;
}

}  // namespace

SurfaceRegistry SurfaceRegistry::builtin() {
    SurfaceRegistry r;

    r.add_sort({"Bool", {}});
    r.add_sort({"Int", {}});
    r.add_sort({"String", {}});
    r.add_sort({"open-string", {}});
    r.add_sort({"Format",
                {"markdown", "json", "html", "plain_text", "yaml", "xml", "csv", "table",
                 "code", "latex"}});
    r.add_sort({"Language", {}});
    r.add_sort({"Tool", {}});
    r.add_sort({"Command", {}});
    r.add_sort({"Path", {}});
    r.add_sort({"FileKind", {}});
    r.add_sort({"Schema", {}});
    r.add_sort({"Policy", {}});
    r.add_sort({"Event", {}});

    using C = Cardinality;
    using M = CompareMode;

    // Response primitives.
    r.add_primitive(make_spec("reply_format", {{"format", "Format"}}, {}, C::SingleValued, M::Equality));
    r.add_primitive(make_spec("reply_style", {{"style", "String"}}, {}, C::SingleValued, M::Equality));
    r.add_primitive(make_spec("reply_language", {{"language", "Language"}}, {}, C::SingleValued, M::Equality));
    r.add_primitive(make_spec("reply_contains", {{"items", "String"}}, {}, C::MultiValued, M::SetOverlap));
    r.add_primitive(make_spec("question_count",
                              {{"eq", "Int"}, {"min", "Int"}, {"max", "Int"}}, {},
                              C::CountValued, M::Numeric));
    r.add_primitive(make_spec("section_order", {{"sections", "String"}}, {}, C::Temporal, M::Ordering));
    r.add_primitive(make_spec("citation_policy", {{"policy", "Policy"}}, {}, C::SingleValued, M::Equality));

    // Tool and operation primitives. File primitives key on their path and
    // tool primitives on the tool name, so edits to distinct known files (or
    // calls to distinct tools) land on distinct surfaces. run_shell keeps a
    // single shell-event surface; command patterns are compared at collision
    // time instead.
    r.add_primitive(make_spec("use_tool", {{"tool", "Tool"}}, {"tool"}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("tool_call", {{"tool", "Tool"}, {"args", "String"}}, {"tool"},
                              C::EventLike, M::Equality));
    r.add_primitive(make_spec("web_search", {{"query", "String"}}, {}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("run_shell", {{"command", "Command"}}, {}, C::EventLike, M::PatternOverlap));
    r.add_primitive(make_spec("read_file", {{"path", "Path"}}, {"path"}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("edit_file", {{"path", "Path"}}, {"path"}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("image_generate", {{"subject", "String"}}, {}, C::EventLike, M::Equality));

    // Refusal, clarification, disclosure, trace.
    r.add_primitive(make_spec("refuse", {{"reason", "String"}}, {}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("ask_clarify", {{"kind", "String"}}, {}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("disclose", {{"category", "String"}}, {}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("withhold", {{"category", "String"}}, {}, C::EventLike, M::Equality));
    r.add_primitive(make_spec("trace_contains", {{"items", "String"}}, {}, C::MultiValued, M::SetOverlap));
    r.add_primitive(make_spec("trace_order", {{"events", "Event"}}, {}, C::Temporal, M::Ordering));

    // Text predicates.
    r.predicates_.insert({"contains", "regex", "exact_text"});
    // Semantic predicates lower to activation atoms.
    for (const char* p : {"semantic", "asks_for", "has_intent", "has_slot"}) {
        r.predicates_.insert(p);
        r.semantic_predicates_.insert(p);
    }
    // Environment and trace predicates.
    r.predicates_.insert({"tool_available", "file_exists", "permission_granted", "trace_has"});

    r.extractors_.insert("extract");

    return r;
}

void SurfaceRegistry::load_manifest(const std::filesystem::path& path) {
    for (const json& rec : read_jsonl(path)) {
        if (rec.contains("sort")) {
            Sort s;
            s.name = rec.at("sort").get<std::string>();
            s.enum_values = rec.value("enum_values", std::vector<std::string>{});
            add_sort(std::move(s));
            continue;
        }
        add_primitive(PrimitiveSpec::from_json(rec));
    }
}

void SurfaceRegistry::add_primitive(PrimitiveSpec spec) {
    if (spec.cardinality == Cardinality::CountValued && spec.comparison != CompareMode::Numeric) {
        throw Error("inconsistent-metadata",
                    "primitive " + spec.name + ": count-valued surfaces must compare numerically");
    }
    for (const std::string& key : spec.surface_key_args) {
        if (!spec.find_arg(key)) {
            throw Error("inconsistent-metadata",
                        "primitive " + spec.name + ": key argument '" + key + "' not in schema");
        }
    }
    primitives_[spec.name] = std::move(spec);
}

void SurfaceRegistry::add_sort(Sort sort) { sorts_[sort.name] = std::move(sort); }

const PrimitiveSpec* SurfaceRegistry::find_primitive(const std::string& name) const {
    auto it = primitives_.find(name);
    return it == primitives_.end() ? nullptr : &it->second;
}

const Sort* SurfaceRegistry::find_sort(const std::string& name) const {
    auto it = sorts_.find(name);
    return it == sorts_.end() ? nullptr : &it->second;
}

bool SurfaceRegistry::is_primitive(const std::string& name) const {
    return primitives_.count(name) > 0;
}
bool SurfaceRegistry::is_predicate(const std::string& name) const {
    return predicates_.count(name) > 0;
}
bool SurfaceRegistry::is_semantic_predicate(const std::string& name) const {
    return semantic_predicates_.count(name) > 0;
}
bool SurfaceRegistry::is_extractor(const std::string& name) const {
    return extractors_.count(name) > 0;
}
bool SurfaceRegistry::is_sign(const std::string& name) const {
    return sign_from_name(name).has_value();
}
bool SurfaceRegistry::is_sort(const std::string& name) const { return sorts_.count(name) > 0; }

bool SurfaceRegistry::is_open_string_sort(const std::string& sort_name) const {
    if (sort_name == "Int" || sort_name == "Bool") return false;
    const Sort* s = find_sort(sort_name);
    return s == nullptr || !s->is_closed();
}

void SurfaceRegistry::check_sort(const std::string& primitive, const std::string& arg_name,
                                 const std::string& sort_name, const ArgValue& value) const {
    auto fail = [&](const std::string& why) {
        throw Error("sort-mismatch", primitive + "." + arg_name + ": " + why);
    };
    switch (value.kind) {
        case ArgValue::Kind::Slot:
            return;  // symbolic values are typed by their own sort
        case ArgValue::Kind::List:
            for (const ArgValue& item : value.list) {
                if (item.kind == ArgValue::Kind::List) fail("nested lists are not supported");
                check_sort(primitive, arg_name, sort_name, item);
            }
            return;
        case ArgValue::Kind::Int:
            if (sort_name != "Int") fail("integer value for sort " + sort_name);
            return;
        case ArgValue::Kind::Bool:
            if (sort_name != "Bool") fail("boolean value for sort " + sort_name);
            return;
        case ArgValue::Kind::Str: {
            if (sort_name == "Int" || sort_name == "Bool") {
                fail("string value for sort " + sort_name);
            }
            const Sort* s = find_sort(sort_name);
            if (s && s->is_closed()) {
                if (std::find(s->enum_values.begin(), s->enum_values.end(), value.str) ==
                    s->enum_values.end()) {
                    fail("value \"" + value.str + "\" not in closed sort " + sort_name);
                }
            }
            return;
        }
    }
}

SurfaceDescriptor SurfaceRegistry::project_surface(const std::string& primitive,
                                                   const ArgMap& args) const {
    const PrimitiveSpec* spec = find_primitive(primitive);
    if (!spec) throw Error("unknown-primitive", "unknown primitive: " + primitive);

    for (const auto& [name, value] : args) {
        const ArgSpec* arg = spec->find_arg(name);
        if (!arg) {
            throw Error("arity-mismatch",
                        primitive + ": unknown argument '" + name + "'");
        }
        check_sort(primitive, name, arg->sort, value);
    }

    SurfaceDescriptor d;
    d.primitive = primitive;
    for (const std::string& key_arg : spec->surface_key_args) {
        SurfaceKeyPart part;
        auto it = args.find(key_arg);
        if (it == args.end() || it->second.is_symbolic()) {
            part.any = true;  // unknown/symbolic key: unify rather than split
        } else {
            part.value = it->second.canonical();
        }
        d.key.push_back(std::move(part));
    }
    return d;
}

}  // namespace wire
