#include "wire/jsonl.hpp"

#include <fstream>

#include "wire/error.hpp"
#include "wire/util.hpp"

namespace wire {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::string text = normalize_newlines(read_text_file(path));
    std::vector<json> records;
    int line_no = 0;
    for (const std::string& line : split_lines(text)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            throw Error("malformed-record", path.string() + ":" + std::to_string(line_no) +
                                                ": invalid record");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records) {
    std::string out;
    for (const json& rec : records) {
        out += rec.dump();
        out.push_back('\n');
    }
    write_text_file(path, out);
}

void append_jsonl(const std::filesystem::path& path, const json& record) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out.good()) throw Error("write-failed", "cannot append to " + path.string());
    out << record.dump() << '\n';
}

}  // namespace wire
