#include "ibp/expr.hpp"

#include <algorithm>
#include <sstream>

namespace ibp {

std::string_view to_string(SemType t) {
    switch (t) {
    case SemType::Int: return "int";
    case SemType::Nat: return "nat";
    case SemType::Bool: return "bool";
    case SemType::Vector: return "vector";
    case SemType::Unknown: break;
    }
    return "?";
}

bool assignable_without_check(SemType from, SemType to) {
    if (from == to) return true;
    return from == SemType::Nat && to == SemType::Int;
}

SemType join(SemType a, SemType b) {
    if (a == b) return a;
    if (is_numeric(a) && is_numeric(b)) return SemType::Int;
    return SemType::Unknown;
}

std::string_view to_string(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "div";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "/=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
    case BinOp::Implies: return "=>";
    case BinOp::Iff: return "<=>";
    }
    return "?";
}

bool is_comparison(BinOp op) {
    switch (op) {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return true;
    default: return false;
    }
}

bool is_logical(BinOp op) {
    return op == BinOp::And || op == BinOp::Or || op == BinOp::Implies || op == BinOp::Iff;
}

bool is_arithmetic(BinOp op) {
    return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div;
}

std::string old_symbol(std::string_view param) { return std::string(param) + "_0"; }

namespace ex {

namespace {

std::shared_ptr<Expr> node(Expr::Kind k, SemType t, SourceSpan span) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->type = t;
    e->span = std::move(span);
    return e;
}

SemType arith_type(BinOp op, SemType a, SemType b) {
    if (!is_numeric(a) || !is_numeric(b)) return SemType::Unknown;
    if (op == BinOp::Sub) return SemType::Int;
    return (a == SemType::Nat && b == SemType::Nat) ? SemType::Nat : SemType::Int;
}

}  // namespace

ExprPtr int_lit(std::int64_t v, SourceSpan span) {
    auto e = node(Expr::Kind::IntLit, v >= 0 ? SemType::Nat : SemType::Int, std::move(span));
    e->value = v;
    return e;
}

ExprPtr bool_lit(bool v, SourceSpan span) {
    auto e = node(Expr::Kind::BoolLit, SemType::Bool, std::move(span));
    e->value = v ? 1 : 0;
    return e;
}

ExprPtr truth() {
    static const ExprPtr t = bool_lit(true);
    return t;
}

ExprPtr falsity() {
    static const ExprPtr f = bool_lit(false);
    return f;
}

ExprPtr var(std::string name, SemType type, SourceSpan span) {
    auto e = node(Expr::Kind::Var, type, std::move(span));
    e->name = std::move(name);
    return e;
}

ExprPtr old(std::string name, SemType type, SourceSpan span) {
    auto e = node(Expr::Kind::Old, type, std::move(span));
    e->name = std::move(name);
    return e;
}

ExprPtr unary(UnOp op, ExprPtr a, SourceSpan span) {
    auto e = node(Expr::Kind::Unary, op == UnOp::Not ? SemType::Bool : SemType::Int, std::move(span));
    if (op == UnOp::Neg && a->type == SemType::Unknown) e->type = SemType::Unknown;
    e->unop = op;
    e->args = {std::move(a)};
    return e;
}

ExprPtr neg(ExprPtr a) { return unary(UnOp::Neg, std::move(a)); }
ExprPtr not_(ExprPtr a) { return unary(UnOp::Not, std::move(a)); }

ExprPtr binary(BinOp op, ExprPtr a, ExprPtr b, SourceSpan span) {
    SemType t = is_arithmetic(op) ? arith_type(op, a->type, b->type) : SemType::Bool;
    auto e = node(Expr::Kind::Binary, t, std::move(span));
    e->binop = op;
    e->args = {std::move(a), std::move(b)};
    return e;
}

ExprPtr add(ExprPtr a, ExprPtr b) { return binary(BinOp::Add, std::move(a), std::move(b)); }
ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(BinOp::Sub, std::move(a), std::move(b)); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return binary(BinOp::Eq, std::move(a), std::move(b)); }
ExprPtr lt(ExprPtr a, ExprPtr b) { return binary(BinOp::Lt, std::move(a), std::move(b)); }
ExprPtr le(ExprPtr a, ExprPtr b) { return binary(BinOp::Le, std::move(a), std::move(b)); }
ExprPtr ge(ExprPtr a, ExprPtr b) { return binary(BinOp::Ge, std::move(a), std::move(b)); }
ExprPtr and_(ExprPtr a, ExprPtr b) { return binary(BinOp::And, std::move(a), std::move(b)); }
ExprPtr or_(ExprPtr a, ExprPtr b) { return binary(BinOp::Or, std::move(a), std::move(b)); }
ExprPtr implies(ExprPtr a, ExprPtr b) { return binary(BinOp::Implies, std::move(a), std::move(b)); }

ExprPtr ite(ExprPtr c, ExprPtr t, ExprPtr f, SourceSpan span) {
    auto e = node(Expr::Kind::Ite, join(t->type, f->type), std::move(span));
    e->args = {std::move(c), std::move(t), std::move(f)};
    return e;
}

ExprPtr quant(Quantifier q, std::string bound, SemType bound_type, ExprPtr body, SourceSpan span) {
    auto e = node(Expr::Kind::Quant, SemType::Bool, std::move(span));
    e->quant = q;
    e->name = std::move(bound);
    e->bound_type = bound_type;
    e->args = {std::move(body)};
    return e;
}

ExprPtr forall(std::string bound, SemType bound_type, ExprPtr body) {
    return quant(Quantifier::Forall, std::move(bound), bound_type, std::move(body));
}

ExprPtr exists(std::string bound, SemType bound_type, ExprPtr body) {
    return quant(Quantifier::Exists, std::move(bound), bound_type, std::move(body));
}

ExprPtr len(ExprPtr v, SourceSpan span) {
    auto e = node(Expr::Kind::Len, SemType::Nat, std::move(span));
    e->args = {std::move(v)};
    return e;
}

ExprPtr get(ExprPtr v, ExprPtr i, SourceSpan span) {
    auto e = node(Expr::Kind::Get, SemType::Int, std::move(span));
    e->args = {std::move(v), std::move(i)};
    return e;
}

ExprPtr set(ExprPtr v, ExprPtr i, ExprPtr x, SourceSpan span) {
    auto e = node(Expr::Kind::Set, SemType::Vector, std::move(span));
    e->args = {std::move(v), std::move(i), std::move(x)};
    return e;
}

ExprPtr app(std::string fn, std::vector<ExprPtr> args, SemType result, SourceSpan span) {
    auto e = node(Expr::Kind::App, result, std::move(span));
    e->name = std::move(fn);
    e->args = std::move(args);
    return e;
}

ExprPtr conj(const std::vector<ExprPtr>& items) {
    if (items.empty()) return truth();
    ExprPtr acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = and_(acc, items[i]);
    return acc;
}

ExprPtr disj(const std::vector<ExprPtr>& items) {
    if (items.empty()) return falsity();
    ExprPtr acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = or_(acc, items[i]);
    return acc;
}

ExprPtr implies_chain(const std::vector<ExprPtr>& hyps, ExprPtr goal) {
    ExprPtr acc = std::move(goal);
    for (auto it = hyps.rbegin(); it != hyps.rend(); ++it) acc = implies(*it, acc);
    return acc;
}

ExprPtr retyped(const ExprPtr& e, SemType t) {
    if (e->type == t) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->type = t;
    return copy;
}

ExprPtr with_args(const ExprPtr& e, std::vector<ExprPtr> args) {
    bool changed = args.size() != e->args.size();
    for (std::size_t i = 0; !changed && i < args.size(); ++i) changed = args[i] != e->args[i];
    if (!changed) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->args = std::move(args);
    if (copy->kind == Expr::Kind::Binary && is_arithmetic(copy->binop)) {
        copy->type = arith_type(copy->binop, copy->args[0]->type, copy->args[1]->type);
    } else if (copy->kind == Expr::Kind::Ite) {
        copy->type = join(copy->args[1]->type, copy->args[2]->type);
    } else if (copy->kind == Expr::Kind::Unary && copy->unop == UnOp::Neg) {
        copy->type = is_numeric(copy->args[0]->type) ? SemType::Int : SemType::Unknown;
    }
    return copy;
}

}  // namespace ex

std::string fresh_name(const std::string& base, const std::set<std::string>& taken, bool try_base) {
    if (try_base && !taken.count(base)) return base;
    for (int i = 1;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!taken.count(candidate)) return candidate;
    }
}

namespace {

void free_vars_into(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (e->kind) {
    case Expr::Kind::Var:
        if (!bound.count(e->name)) out.insert(e->name);
        return;
    case Expr::Kind::Quant: {
        bool fresh = bound.insert(e->name).second;
        free_vars_into(e->args[0], bound, out);
        if (fresh) bound.erase(e->name);
        return;
    }
    default:
        for (const auto& a : e->args) free_vars_into(a, bound, out);
    }
}

void free_olds_into(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind == Expr::Kind::Old) out.insert(e->name);
    for (const auto& a : e->args) free_olds_into(a, out);
}

ExprPtr subst_rec(const ExprPtr& e, const Bindings& b);

ExprPtr subst_quant(const ExprPtr& e, const Bindings& b) {
    Bindings inner = b;
    inner.vars.erase(e->name);
    if (inner.empty()) return e;
    const ExprPtr& body = e->args[0];

    std::set<std::string> replacement_fv;
    std::set<std::string> body_fv = free_vars(body);
    bool relevant = false;
    for (const auto& [name, repl] : inner.vars) {
        if (!body_fv.count(name)) continue;
        relevant = true;
        auto fv = free_vars(repl);
        replacement_fv.insert(fv.begin(), fv.end());
    }
    std::set<std::string> body_olds = free_olds(body);
    for (const auto& [name, repl] : inner.olds) {
        if (!body_olds.count(name)) continue;
        relevant = true;
        auto fv = free_vars(repl);
        replacement_fv.insert(fv.begin(), fv.end());
    }
    if (!relevant) return e;

    std::string bound = e->name;
    ExprPtr new_body = body;
    if (replacement_fv.count(bound)) {
        std::set<std::string> taken = replacement_fv;
        taken.insert(body_fv.begin(), body_fv.end());
        for (const auto& [name, _] : inner.vars) taken.insert(name);
        bound = fresh_name(e->name, taken, false);
        new_body = subst_rec(body, Bindings{{{e->name, ex::var(bound, e->bound_type)}}, {}});
    }
    new_body = subst_rec(new_body, inner);
    auto copy = std::make_shared<Expr>(*e);
    copy->name = bound;
    copy->args = {new_body};
    return copy;
}

ExprPtr subst_rec(const ExprPtr& e, const Bindings& b) {
    switch (e->kind) {
    case Expr::Kind::Var: {
        auto it = b.vars.find(e->name);
        return it == b.vars.end() ? e : it->second;
    }
    case Expr::Kind::Old: {
        auto it = b.olds.find(e->name);
        return it == b.olds.end() ? e : it->second;
    }
    case Expr::Kind::Quant: return subst_quant(e, b);
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit: return e;
    default: {
        std::vector<ExprPtr> args;
        args.reserve(e->args.size());
        for (const auto& a : e->args) args.push_back(subst_rec(a, b));
        return ex::with_args(e, std::move(args));
    }
    }
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const Bindings& b) {
    if (b.empty()) return e;
    return subst_rec(e, b);
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& vars) {
    return substitute(e, Bindings{vars, {}});
}

std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> bound, out;
    free_vars_into(e, bound, out);
    return out;
}

std::set<std::string> free_olds(const ExprPtr& e) {
    std::set<std::string> out;
    free_olds_into(e, out);
    return out;
}

void collect_apps(const ExprPtr& e, std::set<std::pair<std::string, std::size_t>>& out) {
    if (e->kind == Expr::Kind::App) out.insert({e->name, e->args.size()});
    for (const auto& a : e->args) collect_apps(a, out);
}

bool mentions_vector_equality(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Binary && (e->binop == BinOp::Eq || e->binop == BinOp::Ne) &&
        e->args[0]->type == SemType::Vector) {
        return true;
    }
    return std::any_of(e->args.begin(), e->args.end(), mentions_vector_equality);
}

bool contains_set(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Set) return true;
    return std::any_of(e->args.begin(), e->args.end(), contains_set);
}

bool same(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    switch (a->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit:
        if (a->value != b->value) return false;
        break;
    case Expr::Kind::Var:
    case Expr::Kind::Old:
    case Expr::Kind::App:
        if (a->name != b->name) return false;
        break;
    case Expr::Kind::Unary:
        if (a->unop != b->unop) return false;
        break;
    case Expr::Kind::Binary:
        if (a->binop != b->binop) return false;
        break;
    case Expr::Kind::Quant:
        if (a->quant != b->quant || a->name != b->name || a->bound_type != b->bound_type) return false;
        break;
    default: break;
    }
    for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (!same(a->args[i], b->args[i])) return false;
    }
    return true;
}

std::vector<ExprPtr> conjuncts(const ExprPtr& e) {
    std::vector<ExprPtr> out;
    std::vector<ExprPtr> stack{e};
    while (!stack.empty()) {
        ExprPtr cur = stack.back();
        stack.pop_back();
        if (cur->kind == Expr::Kind::Binary && cur->binop == BinOp::And) {
            stack.push_back(cur->args[1]);
            stack.push_back(cur->args[0]);
        } else {
            out.push_back(cur);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// simplify

ExprPtr simplify(const ExprPtr& e) {
    if (e->args.empty()) return e;
    std::vector<ExprPtr> args;
    for (const auto& a : e->args) args.push_back(e->kind == Expr::Kind::Quant ? a : simplify(a));
    ExprPtr s = ex::with_args(e, args);
    auto is_t = [](const ExprPtr& x) { return x->is_bool_lit(true); };
    auto is_f = [](const ExprPtr& x) { return x->is_bool_lit(false); };

    if (s->kind == Expr::Kind::Unary && s->unop == UnOp::Not) {
        const auto& a = s->args[0];
        if (a->kind == Expr::Kind::BoolLit) return ex::bool_lit(a->value == 0);
        if (a->kind == Expr::Kind::Unary && a->unop == UnOp::Not) return a->args[0];
        return s;
    }
    if (s->kind == Expr::Kind::Unary && s->unop == UnOp::Neg && s->args[0]->kind == Expr::Kind::IntLit) {
        return ex::int_lit(-s->args[0]->value);
    }
    if (s->kind == Expr::Kind::Quant) {
        ExprPtr body = simplify(s->args[0]);
        if (body->kind == Expr::Kind::BoolLit) return body;
        return ex::with_args(s, {body});
    }
    if (s->kind == Expr::Kind::Ite) {
        if (is_t(s->args[0])) return s->args[1];
        if (is_f(s->args[0])) return s->args[2];
        return s;
    }
    if (s->kind != Expr::Kind::Binary) return s;

    const auto& a = s->args[0];
    const auto& b = s->args[1];
    switch (s->binop) {
    case BinOp::And:
        if (is_t(a)) return b;
        if (is_t(b)) return a;
        if (is_f(a) || is_f(b)) return ex::falsity();
        return s;
    case BinOp::Or:
        if (is_f(a)) return b;
        if (is_f(b)) return a;
        if (is_t(a) || is_t(b)) return ex::truth();
        return s;
    case BinOp::Implies:
        if (is_t(a)) return b;
        if (is_f(a) || is_t(b)) return ex::truth();
        if (is_f(b)) return simplify(ex::not_(a));
        return s;
    case BinOp::Iff:
        if (is_t(a)) return b;
        if (is_t(b)) return a;
        return s;
    default: break;
    }
    if (is_comparison(s->binop) && same(a, b)) {
        bool reflexive = s->binop == BinOp::Eq || s->binop == BinOp::Le || s->binop == BinOp::Ge;
        return ex::bool_lit(reflexive);
    }
    if (a->kind == Expr::Kind::IntLit && b->kind == Expr::Kind::IntLit) {
        std::int64_t x = a->value, y = b->value;
        switch (s->binop) {
        case BinOp::Add: return ex::int_lit(x + y);
        case BinOp::Sub: return ex::int_lit(x - y);
        case BinOp::Mul: return ex::int_lit(x * y);
        case BinOp::Eq: return ex::bool_lit(x == y);
        case BinOp::Ne: return ex::bool_lit(x != y);
        case BinOp::Lt: return ex::bool_lit(x < y);
        case BinOp::Le: return ex::bool_lit(x <= y);
        case BinOp::Gt: return ex::bool_lit(x > y);
        case BinOp::Ge: return ex::bool_lit(x >= y);
        default: break;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// printing

namespace {

// Binding strength; higher binds tighter.
enum Prec : int {
    kQuant = 0,
    kIff = 1,
    kImplies = 2,
    kOr = 3,
    kAnd = 4,
    kNot = 5,
    kCompare = 6,
    kAdditive = 7,
    kMultiplicative = 8,
    kUnaryMinus = 9,
    kPrimary = 10,
};

int prec_of(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Quant: return kQuant;
    case Expr::Kind::Unary: return e.unop == UnOp::Not ? kNot : kUnaryMinus;
    case Expr::Kind::IntLit: return e.value < 0 ? kUnaryMinus : kPrimary;
    case Expr::Kind::Binary:
        switch (e.binop) {
        case BinOp::Iff: return kIff;
        case BinOp::Implies: return kImplies;
        case BinOp::Or: return kOr;
        case BinOp::And: return kAnd;
        case BinOp::Add:
        case BinOp::Sub: return kAdditive;
        case BinOp::Mul:
        case BinOp::Div: return kMultiplicative;
        default: return kCompare;
        }
    default: return kPrimary;
    }
}

void print(std::ostream& os, const ExprPtr& e, int min_prec);

void print_child(std::ostream& os, const ExprPtr& e, int min_prec) {
    if (prec_of(*e) < min_prec) {
        os << '(';
        print(os, e, kQuant);
        os << ')';
    } else {
        print(os, e, min_prec);
    }
}

void print(std::ostream& os, const ExprPtr& e, int /*min_prec*/) {
    switch (e->kind) {
    case Expr::Kind::IntLit: os << e->value; return;
    case Expr::Kind::BoolLit: os << (e->value ? "true" : "false"); return;
    case Expr::Kind::Var: os << e->name; return;
    case Expr::Kind::Old: os << old_symbol(e->name); return;
    case Expr::Kind::Unary:
        if (e->unop == UnOp::Not) {
            os << "not ";
            print_child(os, e->args[0], kNot);
        } else {
            os << '-';
            // A nested minus would otherwise print as `--x`.
            print_child(os, e->args[0], kPrimary);
        }
        return;
    case Expr::Kind::Binary: {
        int p = prec_of(*e);
        int left = p, right = p;
        switch (e->binop) {
        case BinOp::Implies: left = p + 1; break;                       // right-assoc
        case BinOp::Iff: case BinOp::Or: case BinOp::And:
        case BinOp::Add: case BinOp::Sub: case BinOp::Mul: case BinOp::Div:
            right = p + 1;                                                // left-assoc
            break;
        default: left = right = p + 1;                                    // non-assoc
        }
        print_child(os, e->args[0], left);
        os << ' ' << to_string(e->binop) << ' ';
        print_child(os, e->args[1], right);
        return;
    }
    case Expr::Kind::Ite:
        os << "if ";
        print(os, e->args[0], kQuant);
        os << " then ";
        print(os, e->args[1], kQuant);
        os << " else ";
        print(os, e->args[2], kQuant);
        os << " endif";
        return;
    case Expr::Kind::Quant:
        os << (e->quant == Quantifier::Forall ? "forall" : "exists") << " (" << e->name << ": "
           << to_string(e->bound_type) << "): ";
        print(os, e->args[0], kQuant);
        return;
    case Expr::Kind::Len:
        os << "len(";
        print(os, e->args[0], kQuant);
        os << ')';
        return;
    case Expr::Kind::Get:
        print_child(os, e->args[0], kPrimary);
        os << '[';
        print(os, e->args[1], kQuant);
        os << ']';
        return;
    case Expr::Kind::Set:
        print_child(os, e->args[0], kPrimary);
        os << '[';
        print(os, e->args[1], kQuant);
        os << " := ";
        print(os, e->args[2], kQuant);
        os << ']';
        return;
    case Expr::Kind::App:
        os << e->name << '(';
        for (std::size_t i = 0; i < e->args.size(); ++i) {
            if (i) os << ", ";
            print(os, e->args[i], kQuant);
        }
        os << ')';
        return;
    }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print(os, e, kQuant);
    return os.str();
}

}  // namespace ibp
