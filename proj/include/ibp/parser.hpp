#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ibp/diagnostics.hpp"
#include "ibp/expr.hpp"
#include "ibp/model.hpp"

namespace ibp {

// ---------------------------------------------------------------------------
// Lexing

struct Token {
    enum class Kind { Ident, Int, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    SourceSpan span;
};

/// Throws DiagnosticError (PARSE002/PARSE003) on malformed input.
std::vector<Token> tokenize(const std::string& text, const std::string& file);

// ---------------------------------------------------------------------------
// Unresolved syntax trees, as written. Expressions here are untyped: every
// identifier is a Var and `a_0` has not yet been recognised as an entry value.

struct RawBlock {
    std::vector<Statement> stmts;
    std::vector<RawBlock> branches;  // non-empty for a `choice`
    std::string target;              // `goto` target; empty if none
    SourceSpan target_span;
    SourceSpan span;
};

struct RawTransition {
    std::string from;  // empty: the precondition
    std::string to;    // default target for paths without `goto`
    SourceSpan from_span, to_span;
    RawBlock block;
    SourceSpan span;
};

struct RawSituation {
    std::string name;
    SituationKind kind = SituationKind::Intermediate;
    bool implicit_name = false;
    std::vector<ExprPtr> invariants;
    ExprPtr variant;
    std::vector<RawSituation> children;
    SourceSpan span;
};

struct RawProcedure {
    std::string name;
    std::vector<Param> params;
    std::vector<Variable> locals;
    std::vector<RawSituation> situations;
    std::vector<RawTransition> transitions;
    ExprPtr recursion_variant;
    SourceSpan span;
};

struct RawContext {
    std::string name;
    std::vector<std::pair<std::string, SourceSpan>> imports;
    std::vector<std::pair<std::string, SourceSpan>> strategy;
    std::vector<Variable> constants;
    std::vector<RawProcedure> procedures;
    SourceSpan span;
};

struct RawFunction {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<SemType> param_types;
    std::vector<ExprPtr> param_domains;  // per parameter, may be null
    SemType result = SemType::Unknown;
    std::string result_var;
    ExprPtr refinement;
    ExprPtr body;
    bool opaque = false;
    bool uninterpreted = false;
    std::string oracle;
    SourceSpan span;
};

struct RawLemma {
    std::string name;
    ExprPtr statement;
    SourceSpan span;
};

struct RawTrigger {
    std::string lemma;
    std::vector<ExprPtr> patterns;
    SourceSpan span;
};

struct RawTheory {
    std::string name;
    std::vector<std::pair<std::string, SourceSpan>> imports;
    std::vector<RawFunction> functions;
    std::vector<RawLemma> lemmas;
    std::vector<RawTrigger> triggers;
    SourceSpan span;
};

/// Syntax only; throws DiagnosticError on the first grammar violation.
RawContext parse_raw_context(const std::string& text, const std::string& file);
/// A theory file holds one or more `theory NAME { ... }` blocks.
std::vector<RawTheory> parse_raw_theories(const std::string& text, const std::string& file);

// ---------------------------------------------------------------------------
// Public entry points

struct ParseResult {
    std::optional<VerificationContext> context;
    Diagnostics diagnostics;

    bool ok() const { return context.has_value() && !has_errors(diagnostics); }
};

/// Parses, loads imported theories relative to the file's directory, resolves
/// every name, desugars branching transitions and type-checks.
ParseResult parse_context(const std::string& text, const std::string& file);
ParseResult parse_file(const std::string& path);

struct ExprParseResult {
    ExprPtr expr;
    Diagnostics diagnostics;
};

/// Untyped parse of a single expression (binder sugar already expanded).
ExprParseResult parse_expr(const std::string& text, const std::string& file = "<expr>");

/// Normal-form printing; the output parses back to a structurally identical context.
std::string print_context(const VerificationContext& ctx);

/// Structural equality of contexts ignoring spans.
bool same_context(const VerificationContext& a, const VerificationContext& b);

}  // namespace ibp
