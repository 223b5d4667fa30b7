// Lexer and recursive-descent parser for `.ibp` and `.ibt` files.

#include <cctype>
#include <limits>
#include <set>

#include "ibp/parser.hpp"

namespace ibp {

namespace {

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {"and",  "or",    "not",  "forall", "exists", "if", "then",
                                                "else", "elsif", "endif", "true",  "false",  "div"};
    return words;
}

// Longest symbols first.
const char* const kSymbols[] = {"<=>", ":=", "=>", "<=", ">=", "/=", "!=", "(", ")", "{", "}", "[", "]",
                                ",",   ";",  ":",  "=",  "<",  ">",  "+",  "-",  "*", "/", "|"};

}  // namespace

std::vector<Token> tokenize(const std::string& text, const std::string& file) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto here = [&]() {
        SourceSpan s;
        s.file = file;
        s.start_line = s.end_line = line;
        s.start_col = s.end_col = col;
        return s;
    };

    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (text.compare(i, 2, "//") == 0) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (text.compare(i, 2, "/*") == 0) {
            SourceSpan start = here();
            advance(2);
            while (i < text.size() && text.compare(i, 2, "*/") != 0) advance(1);
            if (i >= text.size()) {
                start.end_line = line;
                start.end_col = col;
                throw DiagnosticError({make_error("PARSE002", "unterminated comment", start)});
            }
            advance(2);
            continue;
        }
        Token tok;
        tok.span = here();
        std::size_t begin = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) advance(1);
            tok.kind = Token::Kind::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
            tok.kind = Token::Kind::Int;
        } else {
            bool matched = false;
            for (const char* sym : kSymbols) {
                std::size_t n = std::char_traits<char>::length(sym);
                if (text.compare(i, n, sym) == 0) {
                    advance(n);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                tok.span.end_col = tok.span.start_col + 1;
                throw DiagnosticError(
                    {make_error("PARSE003", std::string("unexpected character '") + c + "'", tok.span)});
            }
            tok.kind = Token::Kind::Symbol;
        }
        tok.text = text.substr(begin, i - begin);
        tok.span.end_line = line;
        tok.span.end_col = col;
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.span = here();
    out.push_back(end);
    return out;
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::string& file) : toks_(tokenize(text, file)) {}

    // ---- expressions -----------------------------------------------------

    ExprPtr expression() {
        if (at_kw("forall") || at_kw("exists")) return quantified();
        return iff();
    }

    // ---- top level -------------------------------------------------------

    RawContext context() {
        RawContext ctx;
        const Token& start = expect_kw("context");
        ctx.name = expect_ident("context name").text;
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_kw("import")) {
                next();
                do {
                    const Token& t = expect_ident("theory name");
                    ctx.imports.emplace_back(t.text, t.span);
                } while (accept_sym(","));
                expect_sym(";");
            } else if (at_kw("strategy")) {
                next();
                expect_kw("lemmas");
                if (!at_sym(";")) {
                    do {
                        const Token& t = expect_ident("lemma name");
                        ctx.strategy.emplace_back(t.text, t.span);
                    } while (accept_sym(","));
                }
                expect_sym(";");
            } else if (at_kw("const")) {
                next();
                for (auto& v : variable_group()) ctx.constants.push_back(std::move(v));
                expect_sym(";");
            } else if (at_kw("procedure")) {
                ctx.procedures.push_back(procedure());
            } else {
                fail("expected 'import', 'strategy', 'const', 'procedure' or '}'");
            }
        }
        expect_sym("}");
        ctx.span = span_from(start);
        expect_end();
        return ctx;
    }

    RawTheory theory() {
        RawTheory th;
        const Token& start = expect_kw("theory");
        th.name = expect_ident("theory name").text;
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_kw("import")) {
                next();
                do {
                    const Token& t = expect_ident("theory name");
                    th.imports.emplace_back(t.text, t.span);
                } while (accept_sym(","));
                expect_sym(";");
            } else if (at_kw("def") || at_kw("opaque") || at_kw("uninterpreted")) {
                th.functions.push_back(function());
            } else if (at_kw("lemma")) {
                const Token& s = next();
                RawLemma l;
                l.name = expect_ident("lemma name").text;
                expect_sym(":");
                l.statement = expression();
                expect_sym(";");
                l.span = span_from(s);
                th.lemmas.push_back(std::move(l));
            } else if (at_kw("trigger")) {
                const Token& s = next();
                RawTrigger t;
                t.lemma = expect_ident("lemma name").text;
                expect_sym(":");
                do {
                    t.patterns.push_back(expression());
                } while (accept_sym(","));
                expect_sym(";");
                t.span = span_from(s);
                th.triggers.push_back(std::move(t));
            } else {
                fail("expected 'def', 'opaque', 'uninterpreted', 'lemma', 'trigger', 'import' or '}'");
            }
        }
        expect_sym("}");
        th.span = span_from(start);
        return th;
    }

    std::vector<RawTheory> theories() {
        std::vector<RawTheory> out;
        do {
            out.push_back(theory());
        } while (peek().kind != Token::Kind::End);
        return out;
    }

    void expect_end() {
        if (peek().kind != Token::Kind::End) fail("unexpected text after end of input");
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    // ---- token helpers ---------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    bool at_sym(const char* s, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Token::Kind::Symbol && t.text == s;
    }
    bool at_kw(const char* s) const {
        const Token& t = peek();
        return t.kind == Token::Kind::Ident && t.text == s;
    }
    bool accept_sym(const char* s) {
        if (!at_sym(s)) return false;
        next();
        return true;
    }
    bool accept_kw(const char* s) {
        if (!at_kw(s)) return false;
        next();
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek().span); }
    [[noreturn]] void fail_at(const std::string& msg, const SourceSpan& span) const {
        std::string found = peek().kind == Token::Kind::End ? "end of input" : "'" + peek().text + "'";
        throw DiagnosticError({make_error("PARSE001", msg + ", found " + found, span)});
    }

    const Token& expect_sym(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        return next();
    }
    const Token& expect_kw(const char* s) {
        if (!at_kw(s)) fail(std::string("expected '") + s + "'");
        return next();
    }
    const Token& expect_ident(const char* what) {
        const Token& t = peek();
        if (t.kind != Token::Kind::Ident || reserved_words().count(t.text)) fail(std::string("expected ") + what);
        return next();
    }

    SourceSpan span_from(const Token& start) const {
        SourceSpan s = start.span;
        const Token& last = prev();
        s.end_line = last.span.end_line;
        s.end_col = last.span.end_col;
        return s;
    }
    SourceSpan span_from(const SourceSpan& start) const {
        SourceSpan s = start;
        const Token& last = prev();
        s.end_line = last.span.end_line;
        s.end_col = last.span.end_col;
        return s;
    }

    // ---- types -----------------------------------------------------------

    struct TypeSpec {
        SemType type = SemType::Unknown;
        enum class Range { None, Index, Upto, Below } range = Range::None;
        ExprPtr bound;  // vector for Index, limit for Upto/Below
    };

    TypeSpec type_spec() {
        const Token& t = expect_ident("type");
        TypeSpec spec;
        if (t.text == "int") {
            spec.type = SemType::Int;
        } else if (t.text == "nat") {
            spec.type = SemType::Nat;
        } else if (t.text == "bool") {
            spec.type = SemType::Bool;
        } else if (t.text == "vector") {
            spec.type = SemType::Vector;
            if (accept_sym("[")) {
                expect_kw("int");
                expect_sym("]");
            }
        } else if (t.text == "index" || t.text == "upto" || t.text == "below") {
            spec.type = SemType::Nat;
            spec.range = t.text == "index"   ? TypeSpec::Range::Index
                         : t.text == "upto" ? TypeSpec::Range::Upto
                                            : TypeSpec::Range::Below;
            expect_sym("(");
            spec.bound = expression();
            expect_sym(")");
        } else {
            fail_at("unknown type '" + t.text + "'", t.span);
        }
        return spec;
    }

    static ExprPtr range_guard(const std::string& name, const TypeSpec& spec, const SourceSpan& span) {
        ExprPtr v = ex::var(name, SemType::Nat, span);
        switch (spec.range) {
        case TypeSpec::Range::Index: return ex::binary(BinOp::Lt, v, ex::len(spec.bound, span), span);
        case TypeSpec::Range::Upto: return ex::binary(BinOp::Le, v, spec.bound, span);
        case TypeSpec::Range::Below: return ex::binary(BinOp::Lt, v, spec.bound, span);
        case TypeSpec::Range::None: break;
        }
        return nullptr;
    }

    /// `x, y: T` where T is a plain type.
    std::vector<Variable> variable_group() {
        std::vector<Variable> vars;
        do {
            const Token& t = expect_ident("variable name");
            vars.push_back({t.text, SemType::Unknown, t.span});
        } while (accept_sym(","));
        expect_sym(":");
        const Token& tt = peek();
        TypeSpec spec = type_spec();
        if (spec.range != TypeSpec::Range::None) fail_at("range types are only allowed on binders and function parameters", tt.span);
        for (auto& v : vars) v.type = spec.type;
        return vars;
    }

    // ---- expressions -----------------------------------------------------

    struct Binder {
        std::string name;
        TypeSpec spec;
        SourceSpan span;
    };

    std::vector<Binder> binders() {
        std::vector<Binder> out;
        expect_sym("(");
        while (true) {
            std::vector<std::pair<std::string, SourceSpan>> names;
            do {
                const Token& t = expect_ident("bound variable");
                names.emplace_back(t.text, t.span);
            } while (accept_sym(","));
            expect_sym(":");
            TypeSpec spec = type_spec();
            for (auto& [n, s] : names) out.push_back({n, spec, s});
            if (!accept_sym(",")) break;
        }
        expect_sym(")");
        return out;
    }

    ExprPtr quantified() {
        const Token& start = next();
        Quantifier q = start.text == "forall" ? Quantifier::Forall : Quantifier::Exists;
        std::vector<Binder> bs = binders();
        expect_sym(":");
        ExprPtr body = expression();
        SourceSpan span = span_from(start);
        for (auto it = bs.rbegin(); it != bs.rend(); ++it) {
            if (ExprPtr guard = range_guard(it->name, it->spec, it->span)) {
                body = q == Quantifier::Forall ? ex::binary(BinOp::Implies, guard, body, span)
                                               : ex::binary(BinOp::And, guard, body, span);
            }
            body = ex::quant(q, it->name, it->spec.type, body, span);
        }
        return body;
    }

    ExprPtr iff() {
        const Token& start = peek();
        ExprPtr lhs = implication();
        while (accept_sym("<=>")) lhs = ex::binary(BinOp::Iff, lhs, implication(), span_from(start));
        return lhs;
    }

    ExprPtr implication() {
        const Token& start = peek();
        ExprPtr lhs = disjunction();
        if (accept_sym("=>")) {
            ExprPtr rhs = (at_kw("forall") || at_kw("exists")) ? quantified() : implication();
            return ex::binary(BinOp::Implies, lhs, rhs, span_from(start));
        }
        return lhs;
    }

    ExprPtr disjunction() {
        const Token& start = peek();
        ExprPtr lhs = conjunction();
        while (accept_kw("or")) lhs = ex::binary(BinOp::Or, lhs, conjunction(), span_from(start));
        return lhs;
    }

    ExprPtr conjunction() {
        const Token& start = peek();
        ExprPtr lhs = negation();
        while (accept_kw("and")) lhs = ex::binary(BinOp::And, lhs, negation(), span_from(start));
        return lhs;
    }

    ExprPtr negation() {
        if (at_kw("not")) {
            const Token& start = next();
            ExprPtr a = negation();
            return ex::unary(UnOp::Not, a, span_from(start));
        }
        return comparison();
    }

    bool comparison_op(BinOp& op) const {
        const Token& t = peek();
        if (t.kind != Token::Kind::Symbol) return false;
        if (t.text == "=") op = BinOp::Eq;
        else if (t.text == "/=" || t.text == "!=") op = BinOp::Ne;
        else if (t.text == "<") op = BinOp::Lt;
        else if (t.text == "<=") op = BinOp::Le;
        else if (t.text == ">") op = BinOp::Gt;
        else if (t.text == ">=") op = BinOp::Ge;
        else return false;
        return true;
    }

    ExprPtr comparison() {
        const Token& start = peek();
        ExprPtr lhs = additive();
        BinOp op;
        if (comparison_op(op)) {
            next();
            ExprPtr rhs = additive();
            lhs = ex::binary(op, lhs, rhs, span_from(start));
            if (comparison_op(op)) fail("comparison operators do not associate; add parentheses");
        }
        return lhs;
    }

    ExprPtr additive() {
        const Token& start = peek();
        ExprPtr lhs = multiplicative();
        while (at_sym("+") || at_sym("-")) {
            BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
            lhs = ex::binary(op, lhs, multiplicative(), span_from(start));
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        const Token& start = peek();
        ExprPtr lhs = unary_minus();
        while (at_sym("*") || at_sym("/") || at_kw("div")) {
            BinOp op = next().text == "*" ? BinOp::Mul : BinOp::Div;
            lhs = ex::binary(op, lhs, unary_minus(), span_from(start));
        }
        return lhs;
    }

    ExprPtr unary_minus() {
        if (at_sym("-")) {
            const Token& start = next();
            if (peek().kind == Token::Kind::Int && !at_sym("[", 1)) {
                const Token& lit = next();
                return ex::int_lit(-literal_value(lit), span_from(start));
            }
            ExprPtr a = unary_minus();
            return ex::unary(UnOp::Neg, a, span_from(start));
        }
        return postfix();
    }

    std::int64_t literal_value(const Token& t) const {
        try {
            std::size_t used = 0;
            long long v = std::stoll(t.text, &used);
            return v;
        } catch (const std::exception&) {
            throw DiagnosticError({make_error("PARSE004", "integer literal out of range", t.span)});
        }
    }

    ExprPtr postfix() {
        const Token& start = peek();
        ExprPtr e = primary();
        while (at_sym("[")) {
            next();
            ExprPtr idx = expression();
            if (accept_sym(":=")) {
                ExprPtr val = expression();
                expect_sym("]");
                e = ex::set(e, idx, val, span_from(start));
            } else {
                expect_sym("]");
                e = ex::get(e, idx, span_from(start));
            }
        }
        return e;
    }

    std::vector<ExprPtr> call_args() {
        std::vector<ExprPtr> args;
        expect_sym("(");
        if (!at_sym(")")) {
            do {
                args.push_back(expression());
            } while (accept_sym(","));
        }
        expect_sym(")");
        return args;
    }

    ExprPtr conditional(const Token& start) {
        ExprPtr c = expression();
        expect_kw("then");
        ExprPtr t = expression();
        ExprPtr f;
        if (at_kw("elsif")) {
            const Token& s = next();
            f = conditional(s);
            return ex::ite(c, t, f, span_from(start));
        }
        expect_kw("else");
        f = expression();
        expect_kw("endif");
        return ex::ite(c, t, f, span_from(start));
    }

    ExprPtr primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Int) {
            next();
            return ex::int_lit(literal_value(t), t.span);
        }
        if (at_sym("(")) {
            next();
            ExprPtr e = expression();
            expect_sym(")");
            return e;
        }
        if (at_kw("forall") || at_kw("exists")) return quantified();
        if (at_kw("true") || at_kw("false")) {
            next();
            return ex::bool_lit(t.text == "true", t.span);
        }
        if (at_kw("if")) {
            next();
            return conditional(t);
        }
        if (t.kind == Token::Kind::Ident && !reserved_words().count(t.text)) {
            next();
            if (!at_sym("(")) return ex::var(t.text, SemType::Unknown, t.span);
            std::vector<ExprPtr> args = call_args();
            SourceSpan span = span_from(t);
            if (t.text == "len" && args.size() == 1) return ex::len(args[0], span);
            if (t.text == "floor" && args.size() == 1) {
                if (args[0]->kind != Expr::Kind::Binary || args[0]->binop != BinOp::Div) {
                    fail_at("floor applies to a division", span);
                }
                return args[0];
            }
            if (t.text == "access" && args.size() == 2) return ex::get(args[0], args[1], span);
            if (t.text == "update" && args.size() == 3) return ex::set(args[0], args[1], args[2], span);
            return ex::app(t.text, std::move(args), SemType::Unknown, span);
        }
        fail("expected an expression");
    }

    // ---- procedures ------------------------------------------------------

    RawProcedure procedure() {
        const Token& start = expect_kw("procedure");
        RawProcedure p;
        p.name = expect_ident("procedure name").text;
        expect_sym("(");
        if (!at_sym(")")) {
            do {
                ParamMode mode = accept_kw("valres") ? ParamMode::ValueResult : ParamMode::Value;
                std::vector<std::pair<std::string, SourceSpan>> names;
                do {
                    const Token& t = expect_ident("parameter name");
                    names.emplace_back(t.text, t.span);
                } while (accept_sym(","));
                expect_sym(":");
                const Token& tt = peek();
                TypeSpec spec = type_spec();
                if (spec.range != TypeSpec::Range::None) fail_at("range types are not allowed on parameters", tt.span);
                for (auto& [n, s] : names) p.params.push_back({n, spec.type, mode, s});
            } while (accept_sym(","));
        }
        expect_sym(")");
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_kw("var")) {
                next();
                for (auto& v : variable_group()) p.locals.push_back(std::move(v));
                while (accept_sym(",")) {
                    for (auto& v : variable_group()) p.locals.push_back(std::move(v));
                }
                expect_sym(";");
            } else if (at_kw("pre") || at_kw("post")) {
                p.situations.push_back(boundary());
            } else if (at_kw("situation")) {
                p.situations.push_back(situation());
            } else if (at_kw("transition")) {
                p.transitions.push_back(transition());
            } else if (at_kw("recursion")) {
                next();
                expect_kw("variant");
                p.recursion_variant = expression();
                expect_sym(";");
            } else {
                fail("expected 'var', 'pre', 'post', 'situation', 'transition', 'recursion' or '}'");
            }
        }
        expect_sym("}");
        p.span = span_from(start);
        return p;
    }

    void invariant_list(std::vector<ExprPtr>& out, std::vector<RawSituation>* children) {
        expect_sym("{");
        while (!at_sym("}")) {
            if (children && at_kw("situation")) {
                children->push_back(situation());
                continue;
            }
            out.push_back(expression());
            if (!at_sym("}")) expect_sym(";");
        }
        expect_sym("}");
    }

    RawSituation boundary() {
        const Token& start = next();
        RawSituation s;
        s.kind = start.text == "pre" ? SituationKind::Precondition : SituationKind::Postcondition;
        if (peek().kind == Token::Kind::Ident && !at_sym("{")) {
            s.name = expect_ident("situation name").text;
        } else {
            s.name = start.text == "pre" ? "Pre" : "Post";
            s.implicit_name = true;
        }
        invariant_list(s.invariants, nullptr);
        s.span = span_from(start);
        return s;
    }

    RawSituation situation() {
        const Token& start = expect_kw("situation");
        RawSituation s;
        s.name = expect_ident("situation name").text;
        if (accept_kw("variant")) s.variant = expression();
        invariant_list(s.invariants, &s.children);
        s.span = span_from(start);
        return s;
    }

    RawTransition transition() {
        const Token& start = expect_kw("transition");
        RawTransition t;
        if (at_kw("from")) {
            next();
            const Token& f = expect_ident("situation name");
            t.from = f.text;
            t.from_span = f.span;
        }
        if (at_kw("to")) {
            next();
            const Token& g = expect_ident("situation name");
            t.to = g.text;
            t.to_span = g.span;
        }
        t.block = block_body();
        t.span = span_from(start);
        return t;
    }

    /// `{ stmt* [choice { {..} {..} } | goto X;] }`
    RawBlock block_body() {
        const Token& start = expect_sym("{");
        RawBlock b;
        while (!at_sym("}")) {
            if (at_kw("choice")) {
                next();
                expect_sym("{");
                while (!at_sym("}")) b.branches.push_back(block_body());
                expect_sym("}");
                if (b.branches.empty()) fail("a choice needs at least one branch");
                accept_sym(";");
                if (!at_sym("}")) fail("a choice must end its block");
                break;
            }
            if (at_kw("goto")) {
                next();
                const Token& t = expect_ident("situation name");
                b.target = t.text;
                b.target_span = t.span;
                expect_sym(";");
                if (!at_sym("}")) fail("'goto' must end its block");
                break;
            }
            b.stmts.push_back(statement());
        }
        expect_sym("}");
        b.span = span_from(start);
        return b;
    }

    Statement statement() {
        const Token& start = peek();
        Statement s;
        if (accept_sym("[")) {
            s.kind = Statement::Kind::Guard;
            s.expr = expression();
            expect_sym("]");
        } else if (accept_sym("{")) {
            s.kind = Statement::Kind::Assert;
            s.expr = expression();
            expect_sym("}");
        } else if (at_kw("call")) {
            next();
            s.kind = Statement::Kind::Call;
            s.target = expect_ident("procedure name").text;
            s.args = call_args();
        } else if (peek().kind == Token::Kind::Ident && at_sym(":=", 1)) {
            s.kind = Statement::Kind::Assign;
            s.target = expect_ident("variable name").text;
            next();
            s.expr = expression();
        } else if (peek().kind == Token::Kind::Ident && at_sym("(", 1) && !reserved_words().count(peek().text)) {
            // Bare `siftdown(k, len(a), a)` as in the diagrams.
            s.kind = Statement::Kind::Call;
            s.target = next().text;
            s.args = call_args();
        } else {
            fail("expected a statement");
        }
        s.span = span_from(start);
        expect_sym(";");
        return s;
    }

    // ---- theories --------------------------------------------------------

    RawFunction function() {
        const Token& start = peek();
        RawFunction f;
        if (accept_kw("uninterpreted")) {
            f.uninterpreted = true;
        } else {
            f.opaque = accept_kw("opaque");
            expect_kw("def");
        }
        f.name = expect_ident("function name").text;
        expect_sym("(");
        if (!at_sym(")")) {
            while (true) {
                std::vector<std::string> names;
                do {
                    names.push_back(expect_ident("parameter name").text);
                } while (accept_sym(","));
                expect_sym(":");
                TypeSpec spec = type_spec();
                for (const auto& n : names) {
                    f.param_names.push_back(n);
                    f.param_types.push_back(spec.type);
                    f.param_domains.push_back(range_guard(n, spec, prev().span));
                }
                if (!accept_sym(",")) break;
            }
        }
        expect_sym(")");
        expect_sym(":");
        if (accept_sym("{")) {
            f.result_var = expect_ident("result name").text;
            expect_sym(":");
            const Token& tt = peek();
            TypeSpec spec = type_spec();
            if (spec.range != TypeSpec::Range::None) fail_at("range types are not allowed on results", tt.span);
            f.result = spec.type;
            expect_sym("|");
            f.refinement = expression();
            expect_sym("}");
        } else {
            const Token& tt = peek();
            TypeSpec spec = type_spec();
            if (spec.range != TypeSpec::Range::None) fail_at("range types are not allowed on results", tt.span);
            f.result = spec.type;
        }
        if (!f.uninterpreted && accept_sym("=")) {
            if (accept_kw("oracle")) {
                f.oracle = expect_ident("oracle name").text;
            } else {
                f.body = expression();
            }
        } else if (!f.uninterpreted) {
            fail("expected '=' and a definition body");
        }
        expect_sym(";");
        f.span = span_from(start);
        return f;
    }
};

}  // namespace

RawContext parse_raw_context(const std::string& text, const std::string& file) {
    Parser p(text, file);
    return p.context();
}

std::vector<RawTheory> parse_raw_theories(const std::string& text, const std::string& file) {
    Parser p(text, file);
    return p.theories();
}

ExprParseResult parse_expr(const std::string& text, const std::string& file) {
    ExprParseResult r;
    try {
        Parser p(text, file);
        r.expr = p.expression();
        p.expect_end();
    } catch (const DiagnosticError& e) {
        r.expr = nullptr;
        r.diagnostics = e.diagnostics();
    }
    return r;
}

}  // namespace ibp
