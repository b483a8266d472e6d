#include <cctype>
#include <set>

#include "wire/pyrule_ast.hpp"

namespace wire {

namespace {

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {
        "def", "if", "elif", "else", "and", "or", "not", "True", "False",
        // Rejected constructs keep keyword status so errors can name them.
        "while", "for", "import", "from", "return", "yield", "lambda", "class",
        "global", "nonlocal", "del", "try", "except", "finally", "raise",
        "with", "pass", "assert", "break", "continue", "async", "await", "in",
        "is", "None"};
    return kw;
}

struct Lexer {
    const std::string& src;
    size_t i = 0;
    int line = 1;
    int col = 1;
    int paren_depth = 0;
    std::vector<int> indents{0};
    std::vector<Token> out;
    bool at_line_start = true;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
        throw ParseError(code, msg, {line, col});
    }

    char peek(size_t ahead = 0) const {
        return i + ahead < src.size() ? src[i + ahead] : '\0';
    }

    void advance() {
        if (i < src.size()) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    }

    void push(TokKind kind, std::string text, SourcePos pos, long long num = 0) {
        out.push_back({kind, std::move(text), num, pos});
    }

    // Measures indentation at a physical line start and emits INDENT/DEDENT.
    // Blank and comment-only lines produce no tokens at all.
    void handle_line_start() {
        while (true) {
            int width = 0;
            size_t scan = i;
            while (scan < src.size() && (src[scan] == ' ' || src[scan] == '\t')) {
                if (src[scan] == '\t') {
                    col += static_cast<int>(scan - i);
                    fail("syntax-error", "tab characters are not allowed in indentation");
                }
                ++width;
                ++scan;
            }
            if (scan >= src.size()) {  // trailing whitespace at EOF
                while (i < scan) advance();
                return;
            }
            if (src[scan] == '\n' || src[scan] == '#' || src[scan] == '\r') {
                // Skip the whole blank/comment line.
                while (i < src.size() && src[i] != '\n') advance();
                if (i < src.size()) advance();
                continue;
            }
            while (i < scan) advance();
            SourcePos pos{line, col};
            if (width > indents.back()) {
                indents.push_back(width);
                push(TokKind::Indent, "", pos);
            } else {
                while (width < indents.back()) {
                    indents.pop_back();
                    push(TokKind::Dedent, "", pos);
                }
                if (width != indents.back()) {
                    fail("syntax-error", "inconsistent indentation");
                }
            }
            return;
        }
    }

    void lex_string() {
        SourcePos pos{line, col};
        char quote = peek();
        advance();
        std::string value;
        while (true) {
            char c = peek();
            if (c == '\0' || c == '\n') fail("syntax-error", "unterminated string literal");
            if (c == quote) {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                char esc = peek();
                switch (esc) {
                    case 'n': value.push_back('\n'); break;
                    case 't': value.push_back('\t'); break;
                    case '\\': value.push_back('\\'); break;
                    case '"': value.push_back('"'); break;
                    case '\'': value.push_back('\''); break;
                    default: fail("syntax-error", std::string("unsupported escape \\") + esc);
                }
                advance();
                continue;
            }
            value.push_back(c);
            advance();
        }
        push(TokKind::String, value, pos);
    }

    void run() {
        while (i < src.size()) {
            if (at_line_start && paren_depth == 0) {
                at_line_start = false;
                handle_line_start();
                if (i >= src.size()) break;
            }
            char c = peek();
            SourcePos pos{line, col};
            if (c == '\n') {
                advance();
                if (paren_depth == 0) {
                    if (!out.empty() && out.back().kind != TokKind::Newline &&
                        out.back().kind != TokKind::Indent && out.back().kind != TokKind::Dedent) {
                        push(TokKind::Newline, "", pos);
                    }
                    at_line_start = true;
                }
                continue;
            }
            if (c == ' ' || c == '\r') {
                advance();
                continue;
            }
            if (c == '\t') fail("syntax-error", "tab characters are not allowed");
            if (c == '#') {
                while (i < src.size() && peek() != '\n') advance();
                continue;
            }
            if (c == '"' || c == '\'') {
                lex_string();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string digits;
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    digits.push_back(peek());
                    advance();
                }
                if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                    fail("syntax-error", "floating-point literals are not supported");
                }
                push(TokKind::Int, digits, pos, std::stoll(digits));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string name;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                    name.push_back(peek());
                    advance();
                }
                push(keywords().count(name) ? TokKind::Keyword : TokKind::Name, name, pos);
                continue;
            }
            // Punctuation.
            auto two = [&](char a, char b) { return peek() == a && peek(1) == b; };
            if (two('=', '=') || two('!', '=') || two('<', '=') || two('>', '=')) {
                std::string op{peek(), peek(1)};
                advance();
                advance();
                push(TokKind::Punct, op, pos);
                continue;
            }
            switch (c) {
                case '(': case '[':
                    ++paren_depth;
                    push(TokKind::Punct, std::string(1, c), pos);
                    advance();
                    continue;
                case ')': case ']':
                    if (paren_depth > 0) --paren_depth;
                    push(TokKind::Punct, std::string(1, c), pos);
                    advance();
                    continue;
                case '@': case ',': case ':': case '.': case '=': case '<': case '>': case '-':
                    push(TokKind::Punct, std::string(1, c), pos);
                    advance();
                    continue;
                default:
                    fail("syntax-error", std::string("unexpected character '") + c + "'");
            }
        }
        SourcePos eof{line, col};
        if (!out.empty() && out.back().kind != TokKind::Newline &&
            out.back().kind != TokKind::Dedent) {
            push(TokKind::Newline, "", eof);
        }
        while (indents.size() > 1) {
            indents.pop_back();
            push(TokKind::Dedent, "", eof);
        }
        push(TokKind::End, "", eof);
    }
};

}  // namespace

std::vector<Token> lex_pyrule(const std::string& source) {
    Lexer lexer(source);
    lexer.run();
    return std::move(lexer.out);
}

std::string cmp_op_name(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

std::string ExprNode::canonical() const {
    switch (kind) {
        case Kind::And: {
            std::string s = "(";
            for (size_t k = 0; k < children.size(); ++k) {
                if (k) s += " and ";
                s += children[k]->canonical();
            }
            return s + ")";
        }
        case Kind::Or: {
            std::string s = "(";
            for (size_t k = 0; k < children.size(); ++k) {
                if (k) s += " or ";
                s += children[k]->canonical();
            }
            return s + ")";
        }
        case Kind::Not:
            return "(not " + children[0]->canonical() + ")";
        case Kind::Compare:
            return "(" + children[0]->canonical() + " " + cmp_op_name(cmp_op) + " " +
                   children[1]->canonical() + ")";
        case Kind::StrLit:
            return "\"" + str + "\"";
        case Kind::IntLit:
            return std::to_string(num);
        case Kind::BoolLit:
            return boolean ? "True" : "False";
        case Kind::ListLit: {
            std::string s = "[";
            for (size_t k = 0; k < children.size(); ++k) {
                if (k) s += ", ";
                s += children[k]->canonical();
            }
            return s + "]";
        }
        case Kind::Path: {
            std::string s;
            for (size_t k = 0; k < path.size(); ++k) {
                if (k) s += ".";
                s += path[k];
            }
            return s;
        }
        case Kind::SortName:
            return str;
        case Kind::Call: {
            std::string s = str + "(";
            bool first = true;
            for (const ExprPtr& a : children) {
                if (!first) s += ", ";
                s += a->canonical();
                first = false;
            }
            for (const auto& [name, value] : kwargs) {
                if (!first) s += ", ";
                s += name + "=" + value->canonical();
                first = false;
            }
            return s + ")";
        }
    }
    return "?";
}

int count_signed_calls(const BlockNode& block) {
    int n = 0;
    for (const StmtNode& stmt : block.stmts) {
        if (std::holds_alternative<SignedCallNode>(stmt.node)) {
            ++n;
        } else {
            const auto& cond = std::get<std::shared_ptr<CondNode>>(stmt.node);
            n += count_signed_calls(cond->then_block);
            if (cond->else_block) n += count_signed_calls(*cond->else_block);
        }
    }
    return n;
}

}  // namespace wire
