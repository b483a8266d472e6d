#include "wire/policy_store.hpp"

#include <algorithm>

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// PromptPolicy
// ---------------------------------------------------------------------------

std::string PromptPolicy::span_text(int start, int end) const {
    std::vector<std::string> out;
    for (int i = start; i <= end && i >= 1 && i <= line_count(); ++i) {
        out.push_back(lines[static_cast<size_t>(i - 1)]);
    }
    return join_lines(out);
}

std::string PromptPolicy::text() const { return join_lines(lines); }

json PromptPolicy::to_json() const {
    return {{"policy_id", policy_id}, {"lines", lines}, {"rule_ids", rule_ids}};
}

PromptPolicy PromptPolicy::from_json(const json& j) {
    PromptPolicy p;
    p.policy_id = j.at("policy_id").get<std::string>();
    p.lines = j.at("lines").get<std::vector<std::string>>();
    p.rule_ids = j.value("rule_ids", std::vector<std::string>{});
    return p;
}

// ---------------------------------------------------------------------------
// RuleRecord
// ---------------------------------------------------------------------------

json RuleRecord::to_json() const {
    return {{"rule_id", rule_id},
            {"span", json::array({span_start, span_end})},
            {"quote", quote},
            {"gist", gist}};
}

RuleRecord RuleRecord::from_json(const json& j) {
    RuleRecord r;
    r.rule_id = j.at("rule_id").get<std::string>();
    const json& span = j.at("span");
    if (!span.is_array() || span.size() != 2) {
        throw Error("malformed-record", "rule record span must be [start,end]");
    }
    r.span_start = span[0].get<int>();
    r.span_end = span[1].get<int>();
    r.quote = normalize_newlines(j.at("quote").get<std::string>());
    r.gist = j.value("gist", "");
    return r;
}

bool valid_rule_id(const std::string& id) {
    if (id.size() < 2 || id[0] != 'r') return false;
    if (id[1] == '0') return false;
    for (size_t i = 1; i < id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    }
    return true;
}

bool rule_order_less(const RuleRecord& a, const RuleRecord& b) {
    if (a.span_start != b.span_start) return a.span_start < b.span_start;
    if (a.span_end != b.span_end) return a.span_end < b.span_end;
    return a.rule_id < b.rule_id;
}

std::optional<std::string> validate_rule_record(const PromptPolicy& policy,
                                                const RuleRecord& record, std::string* detail) {
    auto set_detail = [&](const std::string& d) {
        if (detail) *detail = d;
    };
    if (!valid_rule_id(record.rule_id)) {
        set_detail("rule id must match rN with positive N: " + record.rule_id);
        return "bad-rule-id";
    }
    if (record.span_start < 1 || record.span_end < record.span_start ||
        record.span_end > policy.line_count()) {
        set_detail("span [" + std::to_string(record.span_start) + "," +
                   std::to_string(record.span_end) + "] outside policy with " +
                   std::to_string(policy.line_count()) + " lines");
        return "span-out-of-range";
    }
    std::string spanned = policy.span_text(record.span_start, record.span_end);
    if (record.quote.empty() || spanned.find(record.quote) == std::string::npos) {
        set_detail("quote not found at span; spanned text:\n" + spanned + "\nquote:\n" +
                   record.quote);
        return "quote-mismatch";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PolicyStore
// ---------------------------------------------------------------------------

PolicyStore::PolicyStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

PromptPolicy& PolicyStore::load_policy(const std::filesystem::path& file,
                                       const std::string& policy_id) {
    std::string raw = read_text_file(file);
    if (!is_valid_utf8(raw)) {
        throw Error("encoding-failure", "policy file is not valid UTF-8: " + file.string());
    }
    PromptPolicy p;
    p.policy_id = policy_id.empty() ? file.stem().string() : policy_id;
    p.lines = split_lines(normalize_newlines(raw));
    if (policies_.count(p.policy_id)) {
        throw Error("duplicate-policy-id", "policy already loaded: " + p.policy_id);
    }
    auto [it, ok] = policies_.emplace(p.policy_id, std::move(p));
    (void)ok;
    return it->second;
}

std::vector<RuleRecord>& PolicyStore::attach_rules(PromptPolicy& policy,
                                                   std::vector<RuleRecord> records) {
    std::stable_sort(records.begin(), records.end(), rule_order_less);
    policy.rule_ids.clear();
    for (const RuleRecord& r : records) policy.rule_ids.push_back(r.rule_id);
    auto& slot = rules_[policy.policy_id];
    slot = std::move(records);
    return slot;
}

std::vector<RuleRecord>& PolicyStore::load_rules(PromptPolicy& policy,
                                                 const std::filesystem::path& file) {
    std::vector<RuleRecord> records;
    std::set<std::string> seen;
    for (const json& j : read_jsonl(file)) {
        RuleRecord r = RuleRecord::from_json(j);
        std::string detail;
        if (auto code = validate_rule_record(policy, r, &detail)) {
            throw Error(*code, "rule " + r.rule_id + ": " + detail);
        }
        if (!seen.insert(r.rule_id).second) {
            throw Error("duplicate-rule-id", "duplicate rule id: " + r.rule_id);
        }
        records.push_back(std::move(r));
    }
    return attach_rules(policy, std::move(records));
}

std::vector<RuleRecord>& PolicyStore::extract_rules(PromptPolicy& policy,
                                                    ExtractionAdapter& adapter,
                                                    int max_attempts) {
    std::vector<RuleRecord> raw;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        try {
            raw = adapter.extract(policy);
            ok = true;
            break;
        } catch (const std::exception& e) {
            last_error = e.what();
            rejections_.push_back({"", "adapter-failure", last_error});
        }
    }
    if (!ok) {
        throw Error("extraction-failed",
                    "extraction adapter failed after " + std::to_string(max_attempts) +
                        " attempts: " + last_error);
    }

    std::vector<RuleRecord> accepted;
    std::set<std::string> seen;
    for (RuleRecord& r : raw) {
        r.quote = normalize_newlines(r.quote);
        std::string detail;
        if (auto code = validate_rule_record(policy, r, &detail)) {
            rejections_.push_back({r.rule_id, *code, detail});
            continue;
        }
        if (!seen.insert(r.rule_id).second) {
            rejections_.push_back({r.rule_id, "duplicate-rule-id", "duplicate id from adapter"});
            continue;
        }
        accepted.push_back(std::move(r));
    }
    if (accepted.empty() && !raw.empty()) {
        throw Error("all-records-rejected",
                    "extraction produced " + std::to_string(raw.size()) +
                        " records, none passed validation");
    }
    return attach_rules(policy, std::move(accepted));
}

PromptPolicy* PolicyStore::find_policy(const std::string& policy_id) {
    auto it = policies_.find(policy_id);
    return it == policies_.end() ? nullptr : &it->second;
}

const std::vector<RuleRecord>* PolicyStore::find_rules(const std::string& policy_id) const {
    auto it = rules_.find(policy_id);
    return it == rules_.end() ? nullptr : &it->second;
}

const RuleRecord* PolicyStore::find_rule(const std::string& policy_id,
                                         const std::string& rule_id) const {
    const auto* records = find_rules(policy_id);
    if (!records) return nullptr;
    for (const RuleRecord& r : *records) {
        if (r.rule_id == rule_id) return &r;
    }
    return nullptr;
}

void PolicyStore::persist() const {
    std::vector<json> policy_records;
    std::vector<json> rule_records;
    for (const auto& [id, policy] : policies_) {
        policy_records.push_back(policy.to_json());
        auto it = rules_.find(id);
        if (it == rules_.end()) continue;
        for (const RuleRecord& r : it->second) {
            json j = r.to_json();
            j["policy_id"] = id;
            rule_records.push_back(std::move(j));
        }
    }
    write_jsonl(dir_ / "policies.jsonl", policy_records);
    write_jsonl(dir_ / "rules.jsonl", rule_records);
    if (!rejections_.empty()) {
        std::vector<json> rej;
        for (const RejectionLog& r : rejections_) {
            rej.push_back({{"rule_id", r.rule_id}, {"reason", r.reason_code}, {"detail", r.detail}});
        }
        write_jsonl(dir_ / "rejections.jsonl", rej);
    }
}

void PolicyStore::reload() {
    policies_.clear();
    rules_.clear();
    for (const json& j : read_jsonl(dir_ / "policies.jsonl")) {
        PromptPolicy p = PromptPolicy::from_json(j);
        policies_[p.policy_id] = std::move(p);
    }
    std::map<std::string, std::vector<RuleRecord>> by_policy;
    if (std::filesystem::exists(dir_ / "rules.jsonl")) {
        for (const json& j : read_jsonl(dir_ / "rules.jsonl")) {
            std::string pid = j.at("policy_id").get<std::string>();
            by_policy[pid].push_back(RuleRecord::from_json(j));
        }
    }
    for (auto& [pid, records] : by_policy) {
        auto it = policies_.find(pid);
        if (it == policies_.end()) {
            throw Error("malformed-record", "rules reference unknown policy: " + pid);
        }
        attach_rules(it->second, std::move(records));
    }
}

}  // namespace wire
