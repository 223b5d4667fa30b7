#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ibp/diagnostics.hpp"

namespace ibp {

/// Semantic types of the first-order language. Nat is Int refined by `>= 0`;
/// the refinement is discharged by safety conditions, never by representation.
enum class SemType { Unknown, Int, Nat, Bool, Vector };

std::string_view to_string(SemType t);
inline bool is_numeric(SemType t) { return t == SemType::Int || t == SemType::Nat; }
/// A value of type `from` may be stored where `to` is expected without an obligation.
bool assignable_without_check(SemType from, SemType to);
/// Least common supertype for if-then-else branches; Unknown if none.
SemType join(SemType a, SemType b);

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies, Iff };
enum class Quantifier { Forall, Exists };

std::string_view to_string(BinOp op);
bool is_comparison(BinOp op);
bool is_logical(BinOp op);
bool is_arithmetic(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Which fields are meaningful depends on `kind`:
///   IntLit/BoolLit: value            Var/Old: name
///   Unary: unop, args[0]             Binary: binop, args[0..1]
///   Ite: args = {cond, then, else}   Quant: quant, name (bound), bound_type, args[0]
///   Len: args[0]                     Get: args = {vec, index}
///   Set: args = {vec, index, value}  App: name, args
/// `Old(x)` is the entry value of value-result parameter `x`, written `x_0`.
struct Expr {
    enum class Kind { IntLit, BoolLit, Var, Old, Unary, Binary, Ite, Quant, Len, Get, Set, App };

    Kind kind = Kind::IntLit;
    SemType type = SemType::Unknown;
    std::int64_t value = 0;
    std::string name;
    UnOp unop = UnOp::Neg;
    BinOp binop = BinOp::Add;
    Quantifier quant = Quantifier::Forall;
    SemType bound_type = SemType::Unknown;
    std::vector<ExprPtr> args;
    SourceSpan span;

    const ExprPtr& arg(std::size_t i) const { return args.at(i); }
    bool is_bool_lit(bool v) const { return kind == Kind::BoolLit && (value != 0) == v; }
};

/// Name used for the entry-value symbol of value-result parameter `param`.
std::string old_symbol(std::string_view param);

namespace ex {

ExprPtr int_lit(std::int64_t v, SourceSpan span = {});
ExprPtr bool_lit(bool v, SourceSpan span = {});
ExprPtr truth();
ExprPtr falsity();
ExprPtr var(std::string name, SemType type, SourceSpan span = {});
ExprPtr old(std::string name, SemType type, SourceSpan span = {});
ExprPtr unary(UnOp op, ExprPtr a, SourceSpan span = {});
ExprPtr neg(ExprPtr a);
ExprPtr not_(ExprPtr a);
ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan span = {});
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr le(ExprPtr a, ExprPtr b);
ExprPtr ge(ExprPtr a, ExprPtr b);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr implies(ExprPtr a, ExprPtr b);
ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr e, SourceSpan span = {});
ExprPtr quant(Quantifier q, std::string bound, SemType bound_type, ExprPtr body, SourceSpan span = {});
ExprPtr forall(std::string bound, SemType bound_type, ExprPtr body);
ExprPtr exists(std::string bound, SemType bound_type, ExprPtr body);
ExprPtr len(ExprPtr v, SourceSpan span = {});
ExprPtr get(ExprPtr v, ExprPtr i, SourceSpan span = {});
ExprPtr set(ExprPtr v, ExprPtr i, ExprPtr x, SourceSpan span = {});
ExprPtr app(std::string fn, std::vector<ExprPtr> args, SemType result, SourceSpan span = {});

/// Left-nested conjunction; `true` when empty.
ExprPtr conj(const std::vector<ExprPtr>& items);
/// Left-nested disjunction; `false` when empty.
ExprPtr disj(const std::vector<ExprPtr>& items);
/// items[0] => (items[1] => ... => goal)
ExprPtr implies_chain(const std::vector<ExprPtr>& hyps, ExprPtr goal);

/// Copy of `e` with a different type annotation.
ExprPtr retyped(const ExprPtr& e, SemType t);
/// Copy of `e` with replaced children.
ExprPtr with_args(const ExprPtr& e, std::vector<ExprPtr> args);

}  // namespace ex

/// Substitution maps: program variables by name, entry values by parameter name.
struct Bindings {
    std::map<std::string, ExprPtr> vars;
    std::map<std::string, ExprPtr> olds;

    bool empty() const { return vars.empty() && olds.empty(); }
};

/// Capture-avoiding simultaneous substitution. A quantifier binding a name in
/// `vars` suspends that binding in its body; bound names that would capture a
/// free variable of a replacement are renamed.
ExprPtr substitute(const ExprPtr& e, const Bindings& b);
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& vars);

std::set<std::string> free_vars(const ExprPtr& e);
/// Parameters `p` such that `Old(p)` occurs in `e`.
std::set<std::string> free_olds(const ExprPtr& e);
/// Every function name applied anywhere in `e`.
void collect_apps(const ExprPtr& e, std::set<std::pair<std::string, std::size_t>>& out);
bool mentions_vector_equality(const ExprPtr& e);
bool contains_set(const ExprPtr& e);

/// Structural equality ignoring spans and type annotations.
bool same(const ExprPtr& a, const ExprPtr& b);

/// Top-level conjuncts of `e` (flattening nested `and`).
std::vector<ExprPtr> conjuncts(const ExprPtr& e);

/// Light syntactic simplification: boolean constant folding, `x op x`
/// comparisons, integer literal arithmetic. Logically equivalent output.
ExprPtr simplify(const ExprPtr& e);

/// Pretty-prints in the concrete syntax accepted by the parser.
std::string to_string(const ExprPtr& e);

/// Fresh name derived from `base` avoiding every name in `taken`: base, base_1, base_2, ...
std::string fresh_name(const std::string& base, const std::set<std::string>& taken, bool try_base = true);

}  // namespace ibp
