#include "ibp/finite.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ibp {

std::vector<Value> finite_domain(SemType t, const FiniteBounds& b) {
    std::vector<Value> out;
    std::int64_t top = std::max<std::int64_t>(b.max_value, b.max_len + 1);
    switch (t) {
    case SemType::Bool:
        out = {Value::of_bool(false), Value::of_bool(true)};
        break;
    case SemType::Nat:
        for (std::int64_t i = 0; i <= top; ++i) out.push_back(Value::of_int(i));
        break;
    case SemType::Vector: {
        std::vector<std::int64_t> cur;
        out.push_back(Value::of_vector({}));
        std::vector<std::vector<std::int64_t>> layer = {{}};
        for (int len = 1; len <= b.max_len; ++len) {
            std::vector<std::vector<std::int64_t>> next;
            for (const auto& v : layer) {
                for (std::int64_t x = b.min_value; x <= b.max_value; ++x) {
                    auto w = v;
                    w.push_back(x);
                    out.push_back(Value::of_vector(w));
                    next.push_back(std::move(w));
                }
            }
            layer = std::move(next);
        }
        break;
    }
    default:
        for (std::int64_t i = std::min<std::int64_t>(b.min_value, -1); i <= top; ++i) out.push_back(Value::of_int(i));
        break;
    }
    return out;
}

namespace {

std::set<std::string> symbols_of(const ExprPtr& e) {
    std::set<std::string> s = free_vars(e);
    for (const auto& p : free_olds(e)) s.insert(old_symbol(p));
    return s;
}

bool fits(const Value& v, SemType t) {
    switch (t) {
    case SemType::Bool: return v.kind == Value::Kind::Bool;
    case SemType::Vector: return v.kind == Value::Kind::Vector;
    case SemType::Nat: return v.kind == Value::Kind::Int && v.i >= 0;
    default: return v.kind == Value::Kind::Int;
    }
}

/// A hypothesis that determines the candidates of one symbol from bound ones.
struct Generator {
    enum class Kind { None, Equal, Perm } kind = Kind::None;
    ExprPtr source;
};

Generator generator_for(const std::string& s, const ExprPtr& h, const std::set<std::string>& bound) {
    auto closed = [&](const ExprPtr& e) {
        for (const auto& v : symbols_of(e)) {
            if (!bound.count(v)) return false;
        }
        return true;
    };
    auto is_s = [&](const ExprPtr& e) { return e->kind == Expr::Kind::Var && e->name == s; };
    if (h->kind == Expr::Kind::Binary && h->binop == BinOp::Eq) {
        if (is_s(h->args[0]) && closed(h->args[1])) return {Generator::Kind::Equal, h->args[1]};
        if (is_s(h->args[1]) && closed(h->args[0])) return {Generator::Kind::Equal, h->args[0]};
    }
    if (h->kind == Expr::Kind::App && h->name == "perm" && h->args.size() == 2) {
        if (is_s(h->args[0]) && closed(h->args[1])) return {Generator::Kind::Perm, h->args[1]};
        if (is_s(h->args[1]) && closed(h->args[0])) return {Generator::Kind::Perm, h->args[0]};
    }
    return {};
}

class Searcher {
public:
    Searcher(const std::vector<std::pair<std::string, SemType>>& symbols, const std::vector<ExprPtr>& hyps,
             const ExprPtr& goal, const TheoryEnv& env, const FiniteBounds& b)
        : symbols_(symbols), hyps_(hyps), goal_(goal), env_(env), b_(b) {
        for (const auto& h : hyps_) hyp_syms_.push_back(symbols_of(h));
        for (const auto& h : hyps_) {
            for (const auto& p : free_olds(h)) olds_used_.insert(p);
        }
        for (const auto& p : free_olds(goal_)) olds_used_.insert(p);
        plan();
    }

    FiniteSearch run() {
        for (std::size_t h : at_start_) {
            try {
                if (!eval_bool(hyps_[h], vars_, olds_, env_)) return result_;
            } catch (const EvalError&) {
                ++result_.undefined;
                return result_;
            }
        }
        search(0);
        if (result_.assignments == 0 && result_.undefined > 0 && !result_.counterexample) {
            result_.error = "no assignment could be evaluated";
        }
        return result_;
    }

private:
    const std::vector<std::pair<std::string, SemType>>& symbols_;
    const std::vector<ExprPtr>& hyps_;
    ExprPtr goal_;
    const TheoryEnv& env_;
    FiniteBounds b_;
    std::vector<std::set<std::string>> hyp_syms_;
    std::set<std::string> olds_used_;

    std::vector<std::size_t> order_;              // symbol indices
    std::vector<Generator> gens_;                 // per depth
    std::vector<std::vector<std::size_t>> checks_;  // hypotheses closed at each depth
    std::vector<std::size_t> at_start_;
    std::map<SemType, std::vector<Value>> domains_;

    Store vars_, olds_;
    FiniteSearch result_;
    std::size_t nodes_ = 0;

    void plan() {
        std::set<std::string> bound;
        std::vector<bool> used(symbols_.size(), false), closed(hyps_.size(), false);
        for (std::size_t h = 0; h < hyps_.size(); ++h) {
            if (hyp_syms_[h].empty()) {
                at_start_.push_back(h);
                closed[h] = true;
            }
        }
        for (std::size_t step = 0; step < symbols_.size(); ++step) {
            int best = -1, best_score = -1;
            Generator best_gen;
            for (std::size_t i = 0; i < symbols_.size(); ++i) {
                if (used[i]) continue;
                const std::string& s = symbols_[i].first;
                Generator g;
                int closes = 0;
                for (std::size_t h = 0; h < hyps_.size(); ++h) {
                    if (closed[h] || !hyp_syms_[h].count(s)) continue;
                    bool ready = true;
                    for (const auto& v : hyp_syms_[h]) ready &= v == s || bound.count(v);
                    if (!ready) continue;
                    ++closes;
                    if (g.kind == Generator::Kind::None) g = generator_for(s, hyps_[h], bound);
                }
                int score = (g.kind == Generator::Kind::Equal ? 2000 : g.kind == Generator::Kind::Perm ? 1000 : 0) + closes;
                if (score > best_score) {
                    best = static_cast<int>(i);
                    best_score = score;
                    best_gen = g;
                }
            }
            used[best] = true;
            bound.insert(symbols_[best].first);
            order_.push_back(static_cast<std::size_t>(best));
            gens_.push_back(best_gen);
            std::vector<std::size_t> now;
            for (std::size_t h = 0; h < hyps_.size(); ++h) {
                if (closed[h]) continue;
                bool ready = true;
                for (const auto& v : hyp_syms_[h]) ready &= bound.count(v) > 0;
                if (ready) {
                    now.push_back(h);
                    closed[h] = true;
                }
            }
            checks_.push_back(std::move(now));
        }
    }

    const std::vector<Value>& domain(SemType t) {
        auto it = domains_.find(t);
        if (it == domains_.end()) it = domains_.emplace(t, finite_domain(t, b_)).first;
        return it->second;
    }

    std::vector<Value> candidates(std::size_t depth) {
        const auto& [name, type] = symbols_[order_[depth]];
        const Generator& g = gens_[depth];
        if (g.kind == Generator::Kind::None) return domain(type);
        Value src;
        try {
            src = eval_expr(g.source, vars_, olds_, env_);
        } catch (const EvalError&) {
            ++result_.undefined;
            return {};
        }
        if (g.kind == Generator::Kind::Equal) {
            if (!fits(src, type)) return {};
            return {src};
        }
        if (src.kind != Value::Kind::Vector) return {};
        std::vector<Value> out;
        auto v = src.v;
        std::sort(v.begin(), v.end());
        do {
            out.push_back(Value::of_vector(v));
        } while (std::next_permutation(v.begin(), v.end()));
        return out;
    }

    void bind(const std::string& name, const Value& v) {
        vars_[name] = v;
        for (const auto& p : olds_used_) {
            if (old_symbol(p) == name) olds_[p] = v;
        }
    }

    /// True once a counterexample is found or the budget is exhausted.
    bool search(std::size_t depth) {
        if (depth == order_.size()) {
            ++result_.assignments;
            try {
                if (!eval_bool(goal_, vars_, olds_, env_)) {
                    result_.counterexample = vars_;
                    return true;
                }
            } catch (const EvalError&) {
                ++result_.undefined;
            }
            return false;
        }
        const std::string& name = symbols_[order_[depth]].first;
        for (const auto& v : candidates(depth)) {
            if (b_.budget && ++nodes_ > b_.budget) {
                result_.complete = false;
                return true;
            }
            bind(name, v);
            bool ok = true;
            for (std::size_t h : checks_[depth]) {
                try {
                    if (!eval_bool(hyps_[h], vars_, olds_, env_)) {
                        ok = false;
                        break;
                    }
                } catch (const EvalError&) {
                    ++result_.undefined;
                    ok = false;
                    break;
                }
            }
            if (ok && search(depth + 1)) return true;
        }
        vars_.erase(name);
        return false;
    }
};

struct Flat {
    std::vector<std::pair<std::string, SemType>> binders;
    std::vector<ExprPtr> guards;
    ExprPtr body;
};

Flat flatten(const ExprPtr& statement) {
    Flat f;
    ExprPtr cur = statement;
    for (;;) {
        if (cur->kind == Expr::Kind::Quant && cur->quant == Quantifier::Forall) {
            for (const auto& [n, _] : f.binders) {
                if (n == cur->name) throw Error("lemma rebinds '" + n + "'");
            }
            f.binders.push_back({cur->name, cur->bound_type});
            cur = cur->args[0];
        } else if (cur->kind == Expr::Kind::Binary && cur->binop == BinOp::Implies) {
            for (const auto& c : conjuncts(cur->args[0])) f.guards.push_back(c);
            cur = cur->args[1];
        } else {
            break;
        }
    }
    f.body = cur;
    return f;
}

}  // namespace

FiniteSearch finite_search(const std::vector<std::pair<std::string, SemType>>& symbols,
                           const std::vector<ExprPtr>& hypotheses, const ExprPtr& goal, const TheoryEnv& env,
                           const FiniteBounds& b) {
    return Searcher(symbols, hypotheses, goal, env, b).run();
}

std::vector<LemmaCheck> lemma_soundness_suite(const TheoryEnv& env, int bound, std::int64_t min_value,
                                              std::int64_t max_value, const std::vector<std::string>& names) {
    if (bound < 1) throw Error("lemma_soundness_suite needs a bound of at least 1");
    FiniteBounds b;
    b.max_len = bound;
    b.min_value = min_value;
    b.max_value = max_value;
    std::vector<LemmaCheck> out;
    for (const auto& l : env.lemmas()) {
        if (!names.empty() && std::find(names.begin(), names.end(), l.name) == names.end()) continue;
        Flat f = flatten(l.statement);
        out.push_back({l.name, finite_search(f.binders, f.guards, f.body, env, b)});
    }
    return out;
}

FiniteSearch audit_vc(const VC& vc, const TheoryEnv& env, const FiniteBounds& b) {
    std::vector<std::pair<std::string, SemType>> symbols(vc.symbols.begin(), vc.symbols.end());
    std::vector<ExprPtr> hyps;
    for (const auto& a : vc.antecedents) {
        for (const auto& c : conjuncts(a)) hyps.push_back(c);
    }
    return finite_search(symbols, hyps, vc.consequent, env, b);
}

}  // namespace ibp
