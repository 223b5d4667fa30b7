#include <set>

#include "ibp/analysis.hpp"

namespace ibp {

namespace {

bool compatible_arg(SemType param, SemType arg) {
    if (is_numeric(param)) return is_numeric(arg);
    return param == arg;
}

class Checker {
public:
    Checker(const Scope& scope, Diagnostics& diags) : scope_(scope), diags_(diags) {}

    ExprPtr check(const ExprPtr& e) {
        switch (e->kind) {
        case Expr::Kind::IntLit:
        case Expr::Kind::BoolLit: return e;
        case Expr::Kind::Var: return variable(e);
        case Expr::Kind::Old: {
            auto it = scope_.olds.find(e->name);
            if (it == scope_.olds.end()) return error("RESOLVE006", "'" + old_symbol(e->name) + "' is not an entry value", e);
            return ex::old(e->name, it->second, e->span);
        }
        case Expr::Kind::Unary: {
            ExprPtr a = check(e->args[0]);
            if (!a) return nullptr;
            if (e->unop == UnOp::Not) {
                if (!expect(a, SemType::Bool, "operand of 'not'")) return nullptr;
            } else if (!expect_numeric(a, "operand of unary '-'")) {
                return nullptr;
            }
            return ex::unary(e->unop, a, e->span);
        }
        case Expr::Kind::Binary: return binary(e);
        case Expr::Kind::Ite: {
            ExprPtr c = check(e->args[0]);
            ExprPtr t = check(e->args[1]);
            ExprPtr f = check(e->args[2]);
            if (!c || !t || !f) return nullptr;
            if (!expect(c, SemType::Bool, "condition of 'if'")) return nullptr;
            if (join(t->type, f->type) == SemType::Unknown) {
                return error("TYPE002", "branches of 'if' have incompatible types " + std::string(to_string(t->type)) +
                                            " and " + std::string(to_string(f->type)),
                             e);
            }
            return ex::ite(c, t, f, e->span);
        }
        case Expr::Kind::Quant: {
            auto saved = bound_.find(e->name);
            std::optional<SemType> previous;
            if (saved != bound_.end()) previous = saved->second;
            bound_[e->name] = e->bound_type;
            ExprPtr body = check(e->args[0]);
            if (previous) bound_[e->name] = *previous;
            else bound_.erase(e->name);
            if (!body) return nullptr;
            if (!expect(body, SemType::Bool, "quantifier body")) return nullptr;
            return ex::quant(e->quant, e->name, e->bound_type, body, e->span);
        }
        case Expr::Kind::Len: {
            ExprPtr v = check(e->args[0]);
            if (!v || !expect(v, SemType::Vector, "argument of len")) return nullptr;
            return ex::len(v, e->span);
        }
        case Expr::Kind::Get: {
            ExprPtr v = check(e->args[0]);
            ExprPtr i = check(e->args[1]);
            if (!v || !i) return nullptr;
            if (!expect(v, SemType::Vector, "indexed expression") || !expect_numeric(i, "index")) return nullptr;
            return ex::get(v, i, e->span);
        }
        case Expr::Kind::Set: {
            ExprPtr v = check(e->args[0]);
            ExprPtr i = check(e->args[1]);
            ExprPtr x = check(e->args[2]);
            if (!v || !i || !x) return nullptr;
            if (!expect(v, SemType::Vector, "updated expression") || !expect_numeric(i, "index") ||
                !expect_numeric(x, "stored value")) {
                return nullptr;
            }
            return ex::set(v, i, x, e->span);
        }
        case Expr::Kind::App: return application(e);
        }
        return nullptr;
    }

    bool expect(const ExprPtr& e, SemType t, const std::string& what) {
        if (e->type == t) return true;
        error("TYPE001", what + " must be " + std::string(to_string(t)) + ", not " + std::string(to_string(e->type)),
              e);
        return false;
    }

    bool expect_numeric(const ExprPtr& e, const std::string& what) {
        if (is_numeric(e->type)) return true;
        error("TYPE001", what + " must be numeric, not " + std::string(to_string(e->type)), e);
        return false;
    }

private:
    const Scope& scope_;
    Diagnostics& diags_;
    std::map<std::string, SemType> bound_;

    ExprPtr error(const char* code, const std::string& msg, const ExprPtr& at) {
        diags_.push_back(make_error(code, msg, at->span));
        return nullptr;
    }

    ExprPtr variable(const ExprPtr& e) {
        if (auto it = bound_.find(e->name); it != bound_.end()) return ex::var(e->name, it->second, e->span);
        if (auto it = scope_.vars.find(e->name); it != scope_.vars.end()) return ex::var(e->name, it->second, e->span);
        if (e->name.size() > 2 && e->name.compare(e->name.size() - 2, 2, "_0") == 0) {
            std::string base = e->name.substr(0, e->name.size() - 2);
            if (auto it = scope_.olds.find(base); it != scope_.olds.end()) return ex::old(base, it->second, e->span);
        }
        if (scope_.theory && scope_.theory->has_function(e->name)) {
            return error("TYPE003", "function '" + e->name + "' used without arguments", e);
        }
        return error("RESOLVE006", "unknown variable '" + e->name + "'", e);
    }

    ExprPtr binary(const ExprPtr& e) {
        ExprPtr a = check(e->args[0]);
        ExprPtr b = check(e->args[1]);
        if (!a || !b) return nullptr;
        BinOp op = e->binop;
        std::string sym(to_string(op));
        if (is_arithmetic(op)) {
            if (!expect_numeric(a, "operand of '" + sym + "'") || !expect_numeric(b, "operand of '" + sym + "'")) {
                return nullptr;
            }
        } else if (is_logical(op)) {
            if (!expect(a, SemType::Bool, "operand of '" + sym + "'") ||
                !expect(b, SemType::Bool, "operand of '" + sym + "'")) {
                return nullptr;
            }
        } else if (op == BinOp::Eq || op == BinOp::Ne) {
            bool ok = (is_numeric(a->type) && is_numeric(b->type)) || (a->type == b->type && a->type != SemType::Unknown);
            if (!ok) {
                return error("TYPE001",
                             "cannot compare " + std::string(to_string(a->type)) + " with " +
                                 std::string(to_string(b->type)),
                             e);
            }
        } else {
            if (!expect_numeric(a, "operand of '" + sym + "'") || !expect_numeric(b, "operand of '" + sym + "'")) {
                return nullptr;
            }
        }
        return ex::binary(op, a, b, e->span);
    }

    ExprPtr application(const ExprPtr& e) {
        const TheoryEnv* th = scope_.theory;
        if (!th || !th->has_function(e->name)) return error("RESOLVE007", "unknown function '" + e->name + "'", e);
        std::vector<ExprPtr> args;
        for (const auto& a : e->args) {
            ExprPtr t = check(a);
            if (!t) return nullptr;
            args.push_back(t);
        }
        const FuncDef* f = th->find(e->name, args.size());
        if (!f && e->name == "heap" && args.size() == 2 && th->find("heap", 3)) {
            args.insert(args.begin() + 1, ex::int_lit(0, e->span));
            f = th->find("heap", 3);
        }
        if (!f) {
            return error("TYPE004", "no definition of '" + e->name + "' takes " + std::to_string(args.size()) +
                                        " argument(s)",
                         e);
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!compatible_arg(f->params[i].type, args[i]->type)) {
                return error("TYPE001",
                             "argument " + std::to_string(i + 1) + " of '" + e->name + "' must be " +
                                 std::string(to_string(f->params[i].type)) + ", not " +
                                 std::string(to_string(args[i]->type)),
                             args[i]);
            }
        }
        return ex::app(e->name, std::move(args), f->result, e->span);
    }
};

}  // namespace

ExprPtr typecheck_expr(const ExprPtr& raw, const Scope& scope, Diagnostics& diags) {
    Checker c(scope, diags);
    return c.check(raw);
}

ExprPtr typecheck_bool(const ExprPtr& raw, const Scope& scope, Diagnostics& diags) {
    Checker c(scope, diags);
    ExprPtr e = c.check(raw);
    if (!e || !c.expect(e, SemType::Bool, "condition")) return nullptr;
    return e;
}

ExprPtr typecheck_numeric(const ExprPtr& raw, const Scope& scope, Diagnostics& diags) {
    Checker c(scope, diags);
    ExprPtr e = c.check(raw);
    if (!e || !c.expect_numeric(e, "variant")) return nullptr;
    return e;
}

Scope procedure_scope(const VerificationContext& ctx, const Procedure& p) {
    Scope s;
    s.theory = ctx.theory.get();
    for (const auto& c : ctx.constants) s.vars[c.name] = c.type;
    for (const auto& prm : p.params) {
        s.vars[prm.name] = prm.type;
        if (prm.mode == ParamMode::ValueResult) s.olds[prm.name] = prm.type;
    }
    for (const auto& v : p.locals) s.vars[v.name] = v.type;
    return s;
}

bool typecheck_statement(Statement& s, const Scope& scope, const Procedure& p,
                         const std::vector<Procedure>& callees, Diagnostics& diags) {
    switch (s.kind) {
    case Statement::Kind::Guard:
    case Statement::Kind::Assert: {
        ExprPtr e = typecheck_bool(s.expr, scope, diags);
        if (!e) return false;
        s.expr = e;
        return true;
    }
    case Statement::Kind::Assign: {
        bool is_local = false;
        for (const auto& v : p.locals) is_local |= v.name == s.target;
        if (!is_local && !p.is_valres(s.target)) {
            std::string why = p.find_param(s.target) ? "value parameter '" + s.target + "' cannot be assigned"
                                                     : "'" + s.target + "' is not a local variable or value-result parameter";
            diags.push_back(make_error("TYPE005", why, s.span));
            return false;
        }
        ExprPtr e = typecheck_expr(s.expr, scope, diags);
        if (!e) return false;
        s.target_type = p.type_of(s.target);
        if (!compatible_arg(s.target_type, e->type)) {
            diags.push_back(make_error("TYPE001",
                                       "cannot assign " + std::string(to_string(e->type)) + " to '" + s.target +
                                           "' of type " + std::string(to_string(s.target_type)),
                                       s.span));
            return false;
        }
        s.expr = e;
        return true;
    }
    case Statement::Kind::Call: {
        const Procedure* callee = nullptr;
        for (const auto& c : callees) {
            if (c.name == s.target) callee = &c;
        }
        if (!callee) {
            diags.push_back(make_error("RESOLVE005", "unknown procedure '" + s.target + "'", s.span));
            return false;
        }
        if (callee->params.size() != s.args.size()) {
            diags.push_back(make_error("TYPE006",
                                       "'" + s.target + "' expects " + std::to_string(callee->params.size()) +
                                           " argument(s), got " + std::to_string(s.args.size()),
                                       s.span));
            return false;
        }
        bool ok = true;
        std::set<std::string> valres_args;
        for (std::size_t i = 0; i < s.args.size(); ++i) {
            ExprPtr a = typecheck_expr(s.args[i], scope, diags);
            if (!a) {
                ok = false;
                continue;
            }
            const Param& prm = callee->params[i];
            if (prm.mode == ParamMode::ValueResult) {
                bool assignable = a->kind == Expr::Kind::Var &&
                                  (p.is_valres(a->name) || [&] {
                                       for (const auto& v : p.locals) {
                                           if (v.name == a->name) return true;
                                       }
                                       return false;
                                   }());
                if (!assignable) {
                    diags.push_back(make_error("TYPE007",
                                               "value-result argument " + std::to_string(i + 1) +
                                                   " must be a local variable or value-result parameter",
                                               a->span));
                    ok = false;
                } else if (a->type != prm.type) {
                    diags.push_back(make_error("TYPE001",
                                               "value-result argument '" + a->name + "' must have type " +
                                                   std::string(to_string(prm.type)),
                                               a->span));
                    ok = false;
                } else if (!valres_args.insert(a->name).second) {
                    diags.push_back(make_error("TYPE008", "'" + a->name + "' passed twice as value-result argument",
                                               a->span));
                    ok = false;
                }
            } else if (!compatible_arg(prm.type, a->type)) {
                diags.push_back(make_error("TYPE001",
                                           "argument " + std::to_string(i + 1) + " of '" + s.target + "' must be " +
                                               std::string(to_string(prm.type)),
                                           a->span));
                ok = false;
            }
            s.args[i] = a;
        }
        return ok;
    }
    }
    return false;
}

}  // namespace ibp
