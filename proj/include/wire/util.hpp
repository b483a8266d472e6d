#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace wire {

// CRLF/CR -> LF. Applied on every text ingest path so span/quote checks are
// platform-independent.
std::string normalize_newlines(const std::string& text);

// Splits on '\n'. A trailing newline does not produce an extra empty line;
// an empty string produces zero lines.
std::vector<std::string> split_lines(const std::string& text);

std::string join_lines(const std::vector<std::string>& lines);

// Lowercase (ASCII), trim outer whitespace, collapse internal runs to one
// space. This is the canonical normalization for semantic labels and
// open-string values.
std::string normalize_label(const std::string& s);

// Alphanumeric token set of normalize_label(s); everything else is a
// separator.
std::set<std::string> token_set(const std::string& s);

bool is_valid_utf8(const std::string& bytes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// FNV-1a over raw bytes, fixed-width hex. Used for content-addressed stage
// resumption, not for security.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

// Round half away from zero to one decimal place.
double round1(double v);
// "25.6", "-12.5"; pass force_sign for "+6.6" style deltas.
std::string format_pct(double v, bool force_sign = false);

}  // namespace wire
