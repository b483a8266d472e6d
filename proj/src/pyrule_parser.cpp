#include "wire/pyrule_parser.hpp"

#include <set>

#include "wire/util.hpp"

namespace wire {

namespace {

const std::set<std::string>& rejected_keywords() {
    static const std::set<std::string> kw = {
        "while", "for", "import", "from", "return", "yield", "lambda", "class",
        "global", "nonlocal", "del", "try", "except", "finally", "raise",
        "with", "pass", "assert", "break", "continue", "async", "await", "in",
        "is", "None"};
    return kw;
}

std::string construct_name(const std::string& kw) {
    if (kw == "while" || kw == "for") return "loop ('" + kw + "')";
    if (kw == "import" || kw == "from") return "import";
    if (kw == "lambda") return "lambda";
    if (kw == "class") return "class definition";
    if (kw == "return" || kw == "yield") return "'" + kw + "' statement";
    return "'" + kw + "'";
}

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;
    const SurfaceRegistry& vocab;
    std::string context_param;

    Parser(const std::string& source, const SurfaceRegistry& registry)
        : toks(lex_pyrule(normalize_newlines(source))), vocab(registry) {}

    const Token& peek(size_t ahead = 0) const {
        size_t k = pos + ahead;
        return k < toks.size() ? toks[k] : toks.back();
    }

    const Token& next() {
        const Token& t = peek();
        if (t.kind != TokKind::End) ++pos;
        return t;
    }

    [[noreturn]] void fail(const std::string& code, const std::string& msg,
                           const Token& at) const {
        throw ParseError(code, msg, at.pos);
    }

    bool at_punct(const std::string& p, size_t ahead = 0) const {
        return peek(ahead).kind == TokKind::Punct && peek(ahead).text == p;
    }
    bool at_keyword(const std::string& k, size_t ahead = 0) const {
        return peek(ahead).kind == TokKind::Keyword && peek(ahead).text == k;
    }

    Token expect_punct(const std::string& p, const std::string& what) {
        if (!at_punct(p)) fail("syntax-error", "expected '" + p + "' " + what, peek());
        return next();
    }

    void expect_newline() {
        if (peek().kind != TokKind::Newline) {
            fail("syntax-error", "expected end of line", peek());
        }
        next();
    }

    void skip_newlines() {
        while (peek().kind == TokKind::Newline) next();
    }

    // --- rules ---------------------------------------------------------

    std::vector<RuleAst> parse_all() {
        std::vector<RuleAst> rules;
        std::set<std::string> ids;
        skip_newlines();
        while (peek().kind != TokKind::End) {
            RuleAst rule = parse_decorated_rule();
            if (!ids.insert(rule.rule_id).second) {
                throw ParseError("duplicate-rule-id",
                                 "duplicate rule id in file: " + rule.rule_id, rule.pos);
            }
            rules.push_back(std::move(rule));
            skip_newlines();
        }
        return rules;
    }

    RuleAst parse_decorated_rule() {
        RuleAst rule;
        rule.pos = peek().pos;
        if (!at_punct("@")) {
            fail("missing-decorator", "rule must start with a rule(\"...\") decorator", peek());
        }
        next();
        const Token& deco = next();
        if (deco.kind != TokKind::Name || deco.text != "rule") {
            fail("rejected-construct", "unsupported decorator '" + deco.text + "'", deco);
        }
        expect_punct("(", "after decorator name");
        const Token& id = next();
        if (id.kind != TokKind::String || id.text.empty()) {
            fail("syntax-error", "decorator requires a rule id string", id);
        }
        rule.rule_id = id.text;
        expect_punct(")", "after rule id");
        expect_newline();
        skip_newlines();
        if (at_punct("@")) {
            fail("duplicate-decorator", "rule has more than one decorator", peek());
        }
        if (!at_keyword("def")) {
            fail("syntax-error", "expected 'def' after decorator", peek());
        }
        next();
        const Token& name = next();
        if (name.kind != TokKind::Name) fail("syntax-error", "expected function name", name);
        rule.def_name = name.text;
        expect_punct("(", "after function name");
        const Token& param = next();
        if (param.kind != TokKind::Name) {
            fail("syntax-error", "expected a single context parameter", param);
        }
        if (at_punct(",")) {
            fail("wrong-arity", "rule must take exactly one context parameter", peek());
        }
        context_param = param.text;
        rule.context_param = param.text;
        expect_punct(")", "after parameter");
        expect_punct(":", "after signature");
        rule.body = parse_block("rule body");
        if (count_signed_calls(rule.body) == 0) {
            throw ParseError("empty-body", "rule body contains no signed primitive call",
                             rule.pos);
        }
        return rule;
    }

    // --- blocks and statements -----------------------------------------

    BlockNode parse_block(const std::string& what) {
        if (peek().kind != TokKind::Newline) {
            fail("syntax-error", "expected newline and indented block for " + what, peek());
        }
        next();
        if (peek().kind != TokKind::Indent) {
            fail("empty-body", "expected indented block for " + what, peek());
        }
        next();
        BlockNode block;
        while (peek().kind != TokKind::Dedent && peek().kind != TokKind::End) {
            if (peek().kind == TokKind::Newline) {
                next();
                continue;
            }
            block.stmts.push_back(parse_stmt());
        }
        if (peek().kind == TokKind::Dedent) next();
        if (block.stmts.empty()) {
            fail("empty-body", "block for " + what + " is empty", peek());
        }
        return block;
    }

    StmtNode parse_stmt() {
        const Token& t = peek();
        if (t.kind == TokKind::Keyword) {
            if (t.text == "if") return parse_cond();
            if (t.text == "def") {
                fail("rejected-construct", "nested function definition is not allowed", t);
            }
            if (rejected_keywords().count(t.text)) {
                fail("rejected-construct",
                     "rejected construct: " + construct_name(t.text) + " is not allowed", t);
            }
            fail("syntax-error", "unexpected keyword '" + t.text + "'", t);
        }
        if (t.kind == TokKind::Name) {
            if (at_punct("=", 1)) {
                fail("rejected-construct", "mutation (assignment) is not allowed", t);
            }
            if (auto sign = sign_from_name(t.text)) {
                return parse_signed_call(*sign);
            }
            if (at_punct("(", 1)) {
                fail("rejected-construct",
                     "statement must be a signed primitive call; bare call '" + t.text +
                         "' has no force sign",
                     t);
            }
            fail("syntax-error", "unexpected name '" + t.text + "'", t);
        }
        fail("syntax-error", "expected a statement", t);
    }

    StmtNode parse_signed_call(ForceSign sign) {
        SignedCallNode node;
        node.pos = peek().pos;
        node.sign = sign;
        next();  // sign name
        expect_punct("(", "after force sign");
        const Token& callee = peek();
        if (callee.kind != TokKind::Name || !at_punct("(", 1)) {
            fail("syntax-error", "force sign must wrap a primitive call", callee);
        }
        node.call = parse_call(/*consequent=*/true);
        expect_punct(")", "after signed primitive call");
        expect_newline();
        StmtNode stmt;
        stmt.node = std::move(node);
        return stmt;
    }

    StmtNode parse_cond() {
        auto cond = std::make_shared<CondNode>();
        cond->pos = peek().pos;
        next();  // if
        cond->condition = parse_expr();
        expect_punct(":", "after condition");
        cond->then_block = parse_block("conditional branch");
        skip_newlines();
        if (at_keyword("elif")) {
            // elif desugars to an else holding a nested conditional.
            Token elif_tok = peek();
            next();
            auto nested = std::make_shared<CondNode>();
            nested->pos = elif_tok.pos;
            nested->condition = parse_expr();
            expect_punct(":", "after condition");
            nested->then_block = parse_block("conditional branch");
            skip_newlines();
            if (at_keyword("elif") || at_keyword("else")) {
                nested->else_block = parse_else_chain();
            }
            BlockNode wrapper;
            StmtNode inner;
            inner.node = nested;
            wrapper.stmts.push_back(std::move(inner));
            cond->else_block = std::move(wrapper);
        } else if (at_keyword("else")) {
            next();
            expect_punct(":", "after else");
            cond->else_block = parse_block("else branch");
        }
        StmtNode stmt;
        stmt.node = cond;
        return stmt;
    }

    std::optional<BlockNode> parse_else_chain() {
        if (at_keyword("elif")) {
            Token elif_tok = peek();
            next();
            auto nested = std::make_shared<CondNode>();
            nested->pos = elif_tok.pos;
            nested->condition = parse_expr();
            expect_punct(":", "after condition");
            nested->then_block = parse_block("conditional branch");
            skip_newlines();
            if (at_keyword("elif") || at_keyword("else")) {
                nested->else_block = parse_else_chain();
            }
            BlockNode wrapper;
            StmtNode inner;
            inner.node = nested;
            wrapper.stmts.push_back(std::move(inner));
            return wrapper;
        }
        next();  // else
        expect_punct(":", "after else");
        return parse_block("else branch");
    }

    // --- expressions -----------------------------------------------------

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr left = parse_and();
        if (!at_keyword("or")) return left;
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Or;
        node->pos = left->pos;
        node->children.push_back(left);
        while (at_keyword("or")) {
            next();
            node->children.push_back(parse_and());
        }
        return node;
    }

    ExprPtr parse_and() {
        ExprPtr left = parse_not();
        if (!at_keyword("and")) return left;
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::And;
        node->pos = left->pos;
        node->children.push_back(left);
        while (at_keyword("and")) {
            next();
            node->children.push_back(parse_not());
        }
        return node;
    }

    ExprPtr parse_not() {
        if (at_keyword("not")) {
            auto node = std::make_shared<ExprNode>();
            node->pos = peek().pos;
            node->kind = ExprNode::Kind::Not;
            next();
            node->children.push_back(parse_not());
            return node;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr left = parse_primary(/*condition_position=*/true);
        CmpOp op;
        if (at_punct("==")) op = CmpOp::Eq;
        else if (at_punct("!=")) op = CmpOp::Ne;
        else if (at_punct("<=")) op = CmpOp::Le;
        else if (at_punct(">=")) op = CmpOp::Ge;
        else if (at_punct("<")) op = CmpOp::Lt;
        else if (at_punct(">")) op = CmpOp::Gt;
        else return left;
        next();
        ExprPtr right = parse_primary(/*condition_position=*/true);
        if (at_punct("==") || at_punct("!=") || at_punct("<") || at_punct(">") ||
            at_punct("<=") || at_punct(">=")) {
            fail("rejected-construct", "chained comparisons are not allowed", peek());
        }
        auto node = std::make_shared<ExprNode>();
        node->kind = ExprNode::Kind::Compare;
        node->pos = left->pos;
        node->cmp_op = op;
        node->children = {left, right};
        return node;
    }

    // Primary expressions. In condition position, calls must name a known
    // predicate, extractor, or primitive (role misuse is a later diagnostic,
    // not a parse error); anything else is a rejected construct. In argument
    // position, only extractor calls are allowed.
    ExprPtr parse_primary(bool condition_position) {
        const Token& t = peek();
        auto node = std::make_shared<ExprNode>();
        node->pos = t.pos;
        if (t.kind == TokKind::String) {
            node->kind = ExprNode::Kind::StrLit;
            node->str = t.text;
            next();
            return node;
        }
        if (t.kind == TokKind::Int) {
            node->kind = ExprNode::Kind::IntLit;
            node->num = t.num;
            next();
            return node;
        }
        if (at_punct("-")) {
            next();
            const Token& i = next();
            if (i.kind != TokKind::Int) {
                fail("rejected-construct", "arithmetic expressions are not supported", i);
            }
            node->kind = ExprNode::Kind::IntLit;
            node->num = -i.num;
            return node;
        }
        if (t.kind == TokKind::Keyword && (t.text == "True" || t.text == "False")) {
            node->kind = ExprNode::Kind::BoolLit;
            node->boolean = t.text == "True";
            next();
            return node;
        }
        if (t.kind == TokKind::Keyword && rejected_keywords().count(t.text)) {
            fail("rejected-construct",
                 "rejected construct: " + construct_name(t.text) + " is not allowed", t);
        }
        if (at_punct("(")) {
            next();
            ExprPtr inner = parse_expr();
            expect_punct(")", "to close parenthesized expression");
            return inner;
        }
        if (at_punct("[")) {
            next();
            node->kind = ExprNode::Kind::ListLit;
            if (!at_punct("]")) {
                node->children.push_back(parse_arg_expr());
                while (at_punct(",")) {
                    next();
                    if (at_punct("]")) break;  // trailing comma
                    node->children.push_back(parse_arg_expr());
                }
            }
            expect_punct("]", "to close list literal");
            return node;
        }
        if (t.kind == TokKind::Name) {
            if (at_punct("(", 1)) {
                if (condition_position) {
                    const std::string& name = t.text;
                    if (!vocab.is_predicate(name) && !vocab.is_extractor(name) &&
                        !vocab.is_primitive(name)) {
                        fail("rejected-construct",
                             "non-whitelisted call '" + name + "' in condition", t);
                    }
                }
                return parse_call(/*consequent=*/false);
            }
            if (at_punct("[", 1)) {
                fail("rejected-construct", "subscription is not allowed", t);
            }
            return parse_path_or_name();
        }
        fail("syntax-error", "expected an expression", t);
    }

    // Literal, list, context path, sort name, or extractor call: the only
    // forms allowed inside call arguments.
    ExprPtr parse_arg_expr() {
        const Token& t = peek();
        if (t.kind == TokKind::Name && at_punct("(", 1)) {
            if (!vocab.is_extractor(t.text)) {
                fail("rejected-construct",
                     "only extractor calls may appear in arguments, not '" + t.text + "'", t);
            }
            return parse_call(/*consequent=*/false);
        }
        return parse_primary(/*condition_position=*/false);
    }

    ExprPtr parse_path_or_name() {
        const Token& t = next();
        auto node = std::make_shared<ExprNode>();
        node->pos = t.pos;
        if (at_punct(".")) {
            if (t.text != context_param) {
                fail("rejected-construct",
                     "attribute path must be rooted at the context parameter '" +
                         context_param + "', got '" + t.text + "'",
                     t);
            }
            node->kind = ExprNode::Kind::Path;
            node->path.push_back(t.text);
            while (at_punct(".")) {
                next();
                const Token& field = next();
                if (field.kind != TokKind::Name) {
                    fail("syntax-error", "expected field name after '.'", field);
                }
                if (at_punct("(")) {
                    fail("rejected-construct", "method calls (dynamic dispatch) are not allowed",
                         field);
                }
                node->path.push_back(field.text);
            }
            static const std::set<std::string> context_fields = {"msg", "trace", "env"};
            if (node->path.size() >= 2 && !context_fields.count(node->path[1])) {
                fail("rejected-construct",
                     "unknown context field '" + node->path[1] +
                         "'; allowed fields are msg, trace, env",
                     t);
            }
            return node;
        }
        if (t.text == context_param) {
            node->kind = ExprNode::Kind::Path;
            node->path.push_back(t.text);
            return node;
        }
        if (vocab.is_sort(t.text)) {
            node->kind = ExprNode::Kind::SortName;
            node->str = t.text;
            return node;
        }
        fail("syntax-error", "unknown name '" + t.text + "'", t);
    }

    ExprPtr parse_call(bool consequent) {
        const Token& callee = next();
        auto node = std::make_shared<ExprNode>();
        node->pos = callee.pos;
        node->kind = ExprNode::Kind::Call;
        node->str = callee.text;
        if (vocab.is_predicate(callee.text)) {
            node->call_role = CallRole::Predicate;
        } else if (vocab.is_extractor(callee.text)) {
            node->call_role = CallRole::Extractor;
        } else {
            node->call_role = CallRole::Primitive;  // possibly unknown; validator reports
        }
        (void)consequent;
        expect_punct("(", "to open call");
        bool saw_kwarg = false;
        std::set<std::string> kwarg_names;
        while (!at_punct(")")) {
            if (peek().kind == TokKind::Name && at_punct("=", 1) && !at_punct("==", 1)) {
                std::string kw = next().text;
                next();  // '='
                if (!kwarg_names.insert(kw).second) {
                    fail("syntax-error", "duplicate keyword argument '" + kw + "'", peek());
                }
                node->kwargs.emplace_back(kw, parse_arg_expr());
                saw_kwarg = true;
            } else {
                if (saw_kwarg) {
                    fail("syntax-error", "positional argument after keyword argument", peek());
                }
                node->children.push_back(parse_arg_expr());
            }
            if (at_punct(",")) {
                next();
                continue;
            }
            break;
        }
        expect_punct(")", "to close call");
        return node;
    }
};

// Every call reachable from a rule body, with its syntactic role.
template <typename Fn>
void visit_calls(const ExprPtr& expr, bool in_condition, Fn&& fn) {
    if (!expr) return;
    if (expr->kind == ExprNode::Kind::Call) fn(*expr, in_condition);
    for (const ExprPtr& c : expr->children) visit_calls(c, in_condition, fn);
    for (const auto& [name, value] : expr->kwargs) visit_calls(value, in_condition, fn);
}

template <typename Fn>
void visit_block(const BlockNode& block, Fn&& fn) {
    for (const StmtNode& stmt : block.stmts) {
        if (std::holds_alternative<SignedCallNode>(stmt.node)) {
            fn(std::get<SignedCallNode>(stmt.node), nullptr);
        } else {
            const auto& cond = std::get<std::shared_ptr<CondNode>>(stmt.node);
            fn(SignedCallNode{}, cond.get());
            visit_block(cond->then_block, fn);
            if (cond->else_block) visit_block(*cond->else_block, fn);
        }
    }
}

}  // namespace

RuleAst parse_rule(const std::string& source, const SurfaceRegistry& vocab) {
    Parser parser(source, vocab);
    std::vector<RuleAst> rules = parser.parse_all();
    if (rules.empty()) {
        throw ParseError("missing-decorator", "source contains no decorated rule", {1, 1});
    }
    if (rules.size() > 1) {
        throw ParseError("syntax-error", "expected exactly one rule, found " +
                                             std::to_string(rules.size()),
                         rules[1].pos);
    }
    return std::move(rules[0]);
}

std::vector<RuleAst> parse_rules(const std::string& source, const SurfaceRegistry& vocab) {
    Parser parser(source, vocab);
    return parser.parse_all();
}

std::vector<Diagnostic> validate_vocabulary_use(const RuleAst& ast, const SurfaceRegistry& vocab) {
    std::vector<Diagnostic> diags;
    auto add = [&](const std::string& code, const std::string& msg, SourcePos pos) {
        diags.push_back({code, msg, pos, ast.rule_id});
    };

    visit_block(ast.body, [&](const SignedCallNode& leaf, const CondNode* cond) {
        if (cond) {
            visit_calls(cond->condition, true, [&](const ExprNode& call, bool) {
                if (call.call_role == CallRole::Primitive) {
                    if (vocab.is_primitive(call.str)) {
                        add("primitive-in-condition",
                            "behavior primitive '" + call.str + "' used in a condition",
                            call.pos);
                    } else {
                        add("unknown-predicate", "unknown predicate '" + call.str + "'",
                            call.pos);
                    }
                }
            });
            return;
        }
        if (!leaf.call) return;
        const ExprNode& call = *leaf.call;
        if (call.call_role == CallRole::Predicate) {
            add("predicate-as-consequent",
                "predicate '" + call.str + "' used as a signed consequent", call.pos);
        } else if (call.call_role == CallRole::Extractor) {
            add("extractor-as-consequent",
                "extractor '" + call.str + "' used as a signed consequent", call.pos);
        } else if (!vocab.is_primitive(call.str)) {
            add("unknown-primitive", "unknown primitive '" + call.str + "'", call.pos);
        }
        // Nested calls in arguments are extractors by construction.
    });
    return diags;
}

CheckResult check_source(const std::string& source, const SurfaceRegistry& vocab) {
    CheckResult result;
    std::string normalized = normalize_newlines(source);
    std::vector<std::string> lines = split_lines(normalized);

    // Split into decorated-rule segments so one bad rule does not hide the
    // rest. A segment starts at each column-0 '@'.
    std::vector<std::pair<int, std::string>> segments;  // (start line, text)
    std::string current;
    int current_start = 1;
    bool have_segment = false;
    for (size_t k = 0; k < lines.size(); ++k) {
        if (!lines[k].empty() && lines[k][0] == '@') {
            if (have_segment) segments.emplace_back(current_start, current);
            current.clear();
            current_start = static_cast<int>(k) + 1;
            have_segment = true;
        }
        current += lines[k];
        current.push_back('\n');
    }
    if (have_segment) segments.emplace_back(current_start, current);
    if (segments.empty() && !normalized.empty()) segments.emplace_back(1, normalized);

    for (auto& [start_line, text] : segments) {
        try {
            for (RuleAst& rule : parse_rules(text, vocab)) {
                auto diags = validate_vocabulary_use(rule, vocab);
                for (Diagnostic& d : diags) {
                    d.pos.line += start_line - 1;
                    result.diagnostics.push_back(std::move(d));
                }
                // Re-offset the recorded position to the original file.
                rule.pos.line += start_line - 1;
                result.rules.push_back(std::move(rule));
            }
        } catch (const ParseError& e) {
            SourcePos pos = e.pos();
            pos.line += start_line - 1;
            result.diagnostics.push_back({e.code(), e.raw_message(), pos, ""});
        }
    }
    return result;
}

}  // namespace wire
