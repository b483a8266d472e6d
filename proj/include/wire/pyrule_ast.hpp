#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wire/error.hpp"
#include "wire/registry.hpp"

namespace wire {

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

enum class TokKind {
    Name,
    Keyword,  // def if elif else and or not True False + rejected keywords
    String,
    Int,
    Punct,  // @ ( ) [ ] , : . = == != <= >= < > -
    Newline,
    Indent,
    Dedent,
    End,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    long long num = 0;
    SourcePos pos;
};

// Tokenizes PyRule source. Indentation-sensitive like the host syntax it
// mimics; newlines inside parentheses/brackets are joined. Throws ParseError
// on malformed input; never loops on any byte sequence.
std::vector<Token> lex_pyrule(const std::string& source);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string cmp_op_name(CmpOp op);

// Which whitelist a call name belongs to, fixed at parse time.
enum class CallRole { Predicate, Extractor, Primitive };

struct ExprNode {
    enum class Kind {
        And,      // children
        Or,       // children
        Not,      // children[0]
        Compare,  // children[0] op children[1]
        StrLit,
        IntLit,
        BoolLit,
        ListLit,   // children
        Path,      // path components, rooted at the context parameter
        SortName,  // bare sort reference in extractor arguments
        Call,      // str = callee, children = positional args, kwargs
    };

    Kind kind;
    SourcePos pos;
    std::vector<ExprPtr> children;
    CmpOp cmp_op = CmpOp::Eq;
    std::string str;
    long long num = 0;
    bool boolean = false;
    std::vector<std::string> path;
    std::vector<std::pair<std::string, ExprPtr>> kwargs;
    CallRole call_role = CallRole::Predicate;

    // Canonical source-like rendering; stable across parses, used for atom
    // identity and audit text.
    std::string canonical() const;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

struct CondNode;

struct SignedCallNode {
    SourcePos pos;
    ForceSign sign = ForceSign::Require;
    ExprPtr call;  // Kind::Call, the behavior primitive
};

struct StmtNode {
    std::variant<SignedCallNode, std::shared_ptr<CondNode>> node;
};

struct BlockNode {
    std::vector<StmtNode> stmts;
};

struct CondNode {
    SourcePos pos;
    ExprPtr condition;
    BlockNode then_block;
    std::optional<BlockNode> else_block;
};

struct RuleAst {
    std::string rule_id;  // decorator argument
    std::string def_name;
    std::string context_param;
    BlockNode body;
    SourcePos pos;
};

// Number of signed-call leaves reachable in the body.
int count_signed_calls(const BlockNode& block);

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct Diagnostic {
    std::string code;
    std::string message;
    SourcePos pos;
    std::string rule_id;
};

}  // namespace wire
