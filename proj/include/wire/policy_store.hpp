#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wire/jsonl.hpp"

namespace wire {

// A standing prompt policy with a 1-based, contiguous line index.
struct PromptPolicy {
    std::string policy_id;
    std::vector<std::string> lines;
    std::vector<std::string> rule_ids;  // ordered by source span start

    int line_count() const { return static_cast<int>(lines.size()); }
    // Joined text of lines [start, end], both 1-based inclusive.
    std::string span_text(int start, int end) const;
    std::string text() const;

    json to_json() const;
    static PromptPolicy from_json(const json& j);
};

// A source-grounded prescriptive rule. The quote is authoritative: it must
// reproduce the spanned policy text verbatim (byte-level after newline
// normalization).
struct RuleRecord {
    std::string rule_id;  // "rN", N positive
    int span_start = 0;
    int span_end = 0;
    std::string quote;
    std::string gist;

    json to_json() const;
    static RuleRecord from_json(const json& j);
};

bool valid_rule_id(const std::string& id);

// Stable rule order: span start, then span end, then rule id.
bool rule_order_less(const RuleRecord& a, const RuleRecord& b);

struct RejectionLog {
    std::string rule_id;
    std::string reason_code;
    std::string detail;
};

// Contract for LLM-mediated rule extraction. The store validates and
// persists whatever the adapter returns; it never repairs records.
class ExtractionAdapter {
public:
    virtual ~ExtractionAdapter() = default;
    virtual std::vector<RuleRecord> extract(const PromptPolicy& policy) = 0;
};

// Validates one record against its policy. Returns the failure reason code
// or nullopt when the record is well-formed.
std::optional<std::string> validate_rule_record(const PromptPolicy& policy,
                                                const RuleRecord& record,
                                                std::string* detail = nullptr);

// Loads, validates, and persists policies plus all downstream artifacts as
// line-oriented record files under one directory. Single writer; reads are
// safe once loading completes.
class PolicyStore {
public:
    explicit PolicyStore(std::filesystem::path dir);

    // Reads a raw policy text file. The policy id defaults to the file stem.
    // Errors: missing file, invalid UTF-8, duplicate id in this store.
    PromptPolicy& load_policy(const std::filesystem::path& file,
                              const std::string& policy_id = "");

    // Reads a rule record file, validates every record against the policy,
    // sorts by span, and attaches the ids to the policy.
    std::vector<RuleRecord>& load_rules(PromptPolicy& policy,
                                        const std::filesystem::path& file);

    // Runs the extraction adapter with bounded retries. Records failing
    // validation are rejected and logged, never silently repaired. Throws
    // when the adapter keeps failing or when every record is rejected.
    std::vector<RuleRecord>& extract_rules(PromptPolicy& policy, ExtractionAdapter& adapter,
                                           int max_attempts = 3);

    PromptPolicy* find_policy(const std::string& policy_id);
    const std::vector<RuleRecord>* find_rules(const std::string& policy_id) const;
    const RuleRecord* find_rule(const std::string& policy_id, const std::string& rule_id) const;

    const std::vector<RejectionLog>& rejections() const { return rejections_; }
    const std::filesystem::path& dir() const { return dir_; }

    // Record-file persistence: policies.jsonl + rules.jsonl (+ rejections).
    void persist() const;
    void reload();

private:
    std::vector<RuleRecord>& attach_rules(PromptPolicy& policy, std::vector<RuleRecord> records);

    std::filesystem::path dir_;
    std::map<std::string, PromptPolicy> policies_;
    std::map<std::string, std::vector<RuleRecord>> rules_;
    std::vector<RejectionLog> rejections_;
};

}  // namespace wire
