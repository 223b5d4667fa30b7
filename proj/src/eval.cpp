#include <algorithm>
#include <optional>
#include <set>

#include "ibp/interpreter.hpp"

namespace ibp {

bool multiset_equal(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (a.size() != b.size()) return false;
    auto x = a, y = b;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
}

namespace {

constexpr std::int64_t kMaxRange = 10000000;

bool mentions_any(const ExprPtr& e, const std::set<std::string>& names) {
    for (const auto& v : free_vars(e)) {
        if (names.count(v)) return true;
    }
    return false;
}

/// `coef * x + constant` when `t` has exactly that shape after unfolding transparent definitions.
struct Linear {
    std::int64_t coef = 0;
    std::int64_t constant = 0;
};

std::optional<Linear> linear_in(const ExprPtr& t, const std::string& x, const TheoryEnv& env, int depth = 0) {
    if (depth > 16) return std::nullopt;
    switch (t->kind) {
    case Expr::Kind::IntLit: return Linear{0, t->value};
    case Expr::Kind::Var:
        if (t->name == x) return Linear{1, 0};
        return std::nullopt;
    case Expr::Kind::Binary: {
        auto a = linear_in(t->args[0], x, env, depth + 1);
        auto b = linear_in(t->args[1], x, env, depth + 1);
        if (!a || !b) return std::nullopt;
        switch (t->binop) {
        case BinOp::Add: return Linear{a->coef + b->coef, a->constant + b->constant};
        case BinOp::Sub: return Linear{a->coef - b->coef, a->constant - b->constant};
        case BinOp::Mul:
            if (a->coef == 0) return Linear{a->constant * b->coef, a->constant * b->constant};
            if (b->coef == 0) return Linear{b->constant * a->coef, b->constant * a->constant};
            return std::nullopt;
        default: return std::nullopt;
        }
    }
    case Expr::Kind::App: {
        const FuncDef* f = env.find(t->name, t->args.size());
        if (!f || !f->body || f->opaque) return std::nullopt;
        std::map<std::string, ExprPtr> m;
        for (std::size_t i = 0; i < f->params.size(); ++i) m[f->params[i].name] = t->args[i];
        return linear_in(substitute(f->body, m), x, env, depth + 1);
    }
    default: return std::nullopt;
    }
}

/// `lhs < rhs` (strict) or `lhs <= rhs` for a comparison in either orientation.
struct Cmp {
    ExprPtr lhs, rhs;
    bool strict = false;
};

std::optional<Cmp> as_upper(const ExprPtr& c) {
    if (c->kind != Expr::Kind::Binary) return std::nullopt;
    switch (c->binop) {
    case BinOp::Eq: return Cmp{c->args[0], c->args[1], false};
    case BinOp::Lt: return Cmp{c->args[0], c->args[1], true};
    case BinOp::Le: return Cmp{c->args[0], c->args[1], false};
    case BinOp::Gt: return Cmp{c->args[1], c->args[0], true};
    case BinOp::Ge: return Cmp{c->args[1], c->args[0], false};
    default: return std::nullopt;
    }
}

class Evaluator {
public:
    Evaluator(const TheoryEnv& env, const Store& vars, const Store& olds) : env_(env), vars_(vars), olds_(olds) {}

    Value eval(const ExprPtr& e) {
        switch (e->kind) {
        case Expr::Kind::IntLit: return Value::of_int(e->value);
        case Expr::Kind::BoolLit: return Value::of_bool(e->value != 0);
        case Expr::Kind::Var: return lookup(e);
        case Expr::Kind::Old: {
            auto it = olds_.find(e->name);
            if (it == olds_.end()) throw EvalError(EvalError::Kind::Unbound, "no entry value for '" + e->name + "'", e->span);
            return it->second;
        }
        case Expr::Kind::Unary:
            if (e->unop == UnOp::Not) return Value::of_bool(!boolean(e->args[0]));
            return Value::of_int(checked_sub(0, integer(e->args[0]), e));
        case Expr::Kind::Binary: return binary(e);
        case Expr::Kind::Ite: return boolean(e->args[0]) ? eval(e->args[1]) : eval(e->args[2]);
        case Expr::Kind::Quant: return Value::of_bool(quantifier(e));
        case Expr::Kind::Len: return Value::of_int(static_cast<std::int64_t>(vector(e->args[0]).size()));
        case Expr::Kind::Get: {
            auto v = vector(e->args[0]);
            std::int64_t i = integer(e->args[1]);
            check_index(v, i, e);
            return Value::of_int(v[static_cast<std::size_t>(i)]);
        }
        case Expr::Kind::Set: {
            auto v = vector(e->args[0]);
            std::int64_t i = integer(e->args[1]);
            std::int64_t x = integer(e->args[2]);
            check_index(v, i, e);
            v[static_cast<std::size_t>(i)] = x;
            return Value::of_vector(std::move(v));
        }
        case Expr::Kind::App: return apply(e);
        }
        throw Error("unknown expression kind");
    }

    bool boolean(const ExprPtr& e) {
        Value v = eval(e);
        if (v.kind != Value::Kind::Bool) throw Error("expected a boolean: " + to_string(e));
        return v.b;
    }

    std::int64_t integer(const ExprPtr& e) {
        Value v = eval(e);
        if (v.kind != Value::Kind::Int) throw Error("expected an integer: " + to_string(e));
        return v.i;
    }

    std::vector<std::int64_t> vector(const ExprPtr& e) {
        Value v = eval(e);
        if (v.kind != Value::Kind::Vector) throw Error("expected a vector: " + to_string(e));
        return std::move(v.v);
    }

private:
    const TheoryEnv& env_;
    const Store& vars_;
    const Store& olds_;
    std::vector<std::pair<std::string, Value>> bound_;

    Value lookup(const ExprPtr& e) {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
            if (it->first == e->name) return it->second;
        }
        auto it = vars_.find(e->name);
        if (it == vars_.end()) throw EvalError(EvalError::Kind::Unbound, "'" + e->name + "' has no value", e->span);
        return it->second;
    }

    static void check_index(const std::vector<std::int64_t>& v, std::int64_t i, const ExprPtr& e) {
        if (i < 0 || i >= static_cast<std::int64_t>(v.size())) {
            throw EvalError(EvalError::Kind::OutOfBounds,
                            "index " + std::to_string(i) + " out of bounds for length " + std::to_string(v.size()) +
                                " in " + to_string(e),
                            e->span);
        }
    }

    static std::int64_t overflow(const ExprPtr& e) {
        throw EvalError(EvalError::Kind::Domain, "integer overflow in " + to_string(e), e->span);
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b, const ExprPtr& e) {
        std::int64_t r;
        return __builtin_add_overflow(a, b, &r) ? overflow(e) : r;
    }
    static std::int64_t checked_sub(std::int64_t a, std::int64_t b, const ExprPtr& e) {
        std::int64_t r;
        return __builtin_sub_overflow(a, b, &r) ? overflow(e) : r;
    }
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b, const ExprPtr& e) {
        std::int64_t r;
        return __builtin_mul_overflow(a, b, &r) ? overflow(e) : r;
    }

    Value binary(const ExprPtr& e) {
        const auto& a = e->args[0];
        const auto& b = e->args[1];
        switch (e->binop) {
        case BinOp::And: return Value::of_bool(boolean(a) && boolean(b));
        case BinOp::Or: return Value::of_bool(boolean(a) || boolean(b));
        case BinOp::Implies: return Value::of_bool(!boolean(a) || boolean(b));
        case BinOp::Iff: return Value::of_bool(boolean(a) == boolean(b));
        case BinOp::Eq: return Value::of_bool(eval(a) == eval(b));
        case BinOp::Ne: return Value::of_bool(eval(a) != eval(b));
        default: break;
        }
        std::int64_t x = integer(a), y = integer(b);
        switch (e->binop) {
        case BinOp::Add: return Value::of_int(checked_add(x, y, e));
        case BinOp::Sub: return Value::of_int(checked_sub(x, y, e));
        case BinOp::Mul: return Value::of_int(checked_mul(x, y, e));
        case BinOp::Div: {
            if (y == 0) throw EvalError(EvalError::Kind::DivByZero, "division by zero in " + to_string(e), e->span);
            if (x == INT64_MIN && y == -1) overflow(e);
            std::int64_t q = x / y;
            if ((x % y != 0) && ((x < 0) != (y < 0))) --q;
            return Value::of_int(q);
        }
        case BinOp::Lt: return Value::of_bool(x < y);
        case BinOp::Le: return Value::of_bool(x <= y);
        case BinOp::Gt: return Value::of_bool(x > y);
        case BinOp::Ge: return Value::of_bool(x >= y);
        default: break;
        }
        throw Error("unknown operator");
    }

    Value apply(const ExprPtr& e) {
        const FuncDef* f = env_.find(e->name, e->args.size());
        if (!f) throw Error("unknown function '" + e->name + "'");
        Store params;
        for (std::size_t i = 0; i < f->params.size(); ++i) {
            Value v = eval(e->args[i]);
            const auto& prm = f->params[i];
            if (prm.type == SemType::Nat && v.kind == Value::Kind::Int && v.i < 0) {
                throw EvalError(EvalError::Kind::Domain,
                                "argument " + prm.name + " of " + f->name + " is negative in " + to_string(e), e->span);
            }
            params[prm.name] = std::move(v);
        }
        Store none;
        Evaluator inner(env_, params, none);
        for (const auto& prm : f->params) {
            if (prm.domain && !inner.boolean(prm.domain)) {
                throw EvalError(EvalError::Kind::Domain,
                                "argument " + prm.name + " of " + f->name + " outside its domain in " + to_string(e),
                                e->span);
            }
        }
        if (f->oracle == "multiset_equal") {
            return Value::of_bool(multiset_equal(params.at(f->params[0].name).v, params.at(f->params[1].name).v));
        }
        if (!f->body) {
            throw EvalError(EvalError::Kind::Uninterpreted, "'" + f->name + "' has no executable definition", e->span);
        }
        return inner.eval(f->body);
    }

    // -- quantifier ranges --------------------------------------------------

    std::optional<std::int64_t> value_of(const ExprPtr& e) {
        try {
            Value v = eval(e);
            if (v.kind == Value::Kind::Int) return v.i;
        } catch (const EvalError&) {
        }
        return std::nullopt;
    }

    /// Exclusive upper bound on `x` implied by the constraints, if any.
    std::optional<std::int64_t> upper_from(const std::string& x, const std::vector<ExprPtr>& cs,
                                           const std::set<std::string>& inner, int depth) {
        std::set<std::string> blocked = inner;
        blocked.insert(x);
        for (const auto& c : cs) {
            if (c->kind == Expr::Kind::Binary && c->binop == BinOp::Or) {
                // Every disjunct must bound x on its own.
                std::optional<std::int64_t> best;
                bool all = true;
                for (const auto& d : {c->args[0], c->args[1]}) {
                    std::vector<ExprPtr> one = conjuncts(d);
                    auto b = upper_from(x, one, inner, depth + 1);
                    if (!b) {
                        all = false;
                        break;
                    }
                    best = best ? std::max(*best, *b) : *b;
                }
                if (all && best) return best;
                continue;
            }
            auto cmp = as_upper(c);
            if (!cmp) continue;
            if (!mentions_any(cmp->rhs, blocked)) {
                auto lin = linear_in(cmp->lhs, x, env_);
                if (lin && lin->coef >= 1 && lin->constant >= 0) {
                    if (auto v = value_of(cmp->rhs)) return cmp->strict ? *v : *v + 1;
                }
            }
            if (depth < 4 && cmp->lhs->kind == Expr::Kind::Var && cmp->lhs->name == x &&
                cmp->rhs->kind == Expr::Kind::Var && inner.count(cmp->rhs->name)) {
                if (auto b = upper_from(cmp->rhs->name, cs, inner, depth + 1)) return b;
            }
        }
        return std::nullopt;
    }

    std::optional<std::int64_t> lower_from(const std::string& x, const std::vector<ExprPtr>& cs,
                                           const std::set<std::string>& inner) {
        std::set<std::string> blocked = inner;
        blocked.insert(x);
        for (const auto& c : cs) {
            auto cmp = as_upper(c);
            if (!cmp || cmp->rhs->kind != Expr::Kind::Var || cmp->rhs->name != x) continue;
            if (mentions_any(cmp->lhs, blocked)) continue;
            if (auto v = value_of(cmp->lhs)) return cmp->strict ? *v + 1 : *v;
        }
        return std::nullopt;
    }

    std::optional<std::int64_t> upper_walk(const std::string& x, const ExprPtr& e, std::vector<ExprPtr> cs,
                                           std::set<std::string> inner, bool forall) {
        if (e->kind == Expr::Kind::Quant) {
            inner.insert(e->name);
            return upper_walk(x, e->args[0], std::move(cs), std::move(inner), e->quant == Quantifier::Forall);
        }
        if (e->kind != Expr::Kind::Binary) return std::nullopt;
        if (forall && e->binop == BinOp::Implies) {
            for (const auto& c : conjuncts(e->args[0])) cs.push_back(c);
            if (auto b = upper_from(x, cs, inner, 0)) return b;
            return upper_walk(x, e->args[1], std::move(cs), std::move(inner), forall);
        }
        if (e->binop == BinOp::And) {
            if (!forall) {
                auto parts = conjuncts(e);
                std::vector<ExprPtr> guards;
                for (const auto& p : parts) {
                    if (p->kind == Expr::Kind::Quant) continue;
                    guards.push_back(p);
                }
                cs.insert(cs.end(), guards.begin(), guards.end());
                if (auto b = upper_from(x, cs, inner, 0)) return b;
                for (const auto& p : parts) {
                    if (p->kind == Expr::Kind::Quant) {
                        if (auto b = upper_walk(x, p, cs, inner, forall)) return b;
                    }
                }
                return std::nullopt;
            }
            auto a = upper_walk(x, e->args[0], cs, inner, forall);
            auto b = upper_walk(x, e->args[1], cs, inner, forall);
            if (a && b) return std::max(*a, *b);
        }
        return std::nullopt;
    }

    std::optional<std::int64_t> lower_walk(const std::string& x, const ExprPtr& e, std::set<std::string> inner,
                                           bool forall) {
        if (e->kind == Expr::Kind::Quant) {
            inner.insert(e->name);
            return lower_walk(x, e->args[0], std::move(inner), e->quant == Quantifier::Forall);
        }
        if (e->kind != Expr::Kind::Binary) return std::nullopt;
        if (forall && e->binop == BinOp::Implies) {
            if (auto b = lower_from(x, conjuncts(e->args[0]), inner)) return b;
            return lower_walk(x, e->args[1], std::move(inner), forall);
        }
        if (!forall && e->binop == BinOp::And) return lower_from(x, conjuncts(e), inner);
        return std::nullopt;
    }

    bool quantifier(const ExprPtr& e) {
        bool forall = e->quant == Quantifier::Forall;
        const std::string& x = e->name;
        std::optional<std::int64_t> lo;
        if (e->bound_type == SemType::Nat) {
            lo = 0;
        } else {
            lo = lower_walk(x, e->args[0], {}, forall);
        }
        std::optional<std::int64_t> hi = upper_walk(x, e->args[0], {}, {}, forall);
        if (e->bound_type == SemType::Bool) {
            lo = 0;
            hi = 2;
        }
        if (!lo || !hi) {
            throw EvalError(EvalError::Kind::UnboundedQuantifier,
                            "no finite range for '" + x + "' in " + to_string(e), e->span);
        }
        if (*hi - *lo > kMaxRange) {
            throw EvalError(EvalError::Kind::UnboundedQuantifier, "range of '" + x + "' too large in " + to_string(e),
                            e->span);
        }
        for (std::int64_t i = *lo; i < *hi; ++i) {
            bound_.push_back({x, e->bound_type == SemType::Bool ? Value::of_bool(i != 0) : Value::of_int(i)});
            bool v;
            try {
                v = boolean(e->args[0]);
            } catch (...) {
                bound_.pop_back();
                throw;
            }
            bound_.pop_back();
            if (forall && !v) return false;
            if (!forall && v) return true;
        }
        return forall;
    }
};

}  // namespace

Value eval_expr(const ExprPtr& e, const Store& vars, const Store& olds, const TheoryEnv& env) {
    return Evaluator(env, vars, olds).eval(e);
}

bool eval_bool(const ExprPtr& e, const Store& vars, const Store& olds, const TheoryEnv& env) {
    return Evaluator(env, vars, olds).boolean(e);
}

}  // namespace ibp
