#pragma once

#include <stdexcept>
#include <string>

namespace wire {

// All recoverable failures carry a stable machine-readable code next to the
// human-readable message. Codes are kebab-case ("quote-mismatch").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct SourcePos {
    int line = 0;  // 1-based
    int col = 0;   // 1-based
};

class ParseError : public Error {
public:
    ParseError(std::string code, const std::string& message, SourcePos pos)
        : Error(std::move(code),
                message + " (line " + std::to_string(pos.line) + ", col " +
                    std::to_string(pos.col) + ")"),
          raw_message_(message),
          pos_(pos) {}

    SourcePos pos() const { return pos_; }
    const std::string& raw_message() const { return raw_message_; }

private:
    std::string raw_message_;
    SourcePos pos_;
};

}  // namespace wire
