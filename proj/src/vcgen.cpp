#include "ibp/vcgen.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "ibp/theory.hpp"

namespace ibp {

std::string_view to_string(VcKind k) {
    switch (k) {
    case VcKind::Consistency: return "consistency";
    case VcKind::Liveness: return "liveness";
    case VcKind::Termination: return "termination";
    case VcKind::Safety: return "safety";
    case VcKind::Recursion: return "recursion";
    }
    return "?";
}

ExprPtr VC::formula() const {
    std::vector<ExprPtr> hyps(antecedents.rbegin(), antecedents.rend());
    return ex::implies_chain(hyps, consequent);
}

namespace {

// Goal tree: the shape of a weakest precondition before it is split into
// sequents. Hyp groups become antecedents of everything below them.
struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class K { Leaf, Conj, Hyp, Fresh };
    K k = K::Leaf;
    ExprPtr goal;
    VcKind kind = VcKind::Consistency;
    std::string origin;
    SourceSpan span;
    std::vector<ExprPtr> group;
    /// Summary of a choice's guards: redundant once a branch's guards are
    /// assumed, so never used for the guards' own well-definedness.
    bool choice = false;
    std::vector<std::pair<std::string, SemType>> fresh;
    std::vector<NodePtr> kids;
};

NodePtr leaf(ExprPtr goal, VcKind kind, std::string origin, SourceSpan span) {
    auto n = std::make_shared<Node>();
    n->goal = std::move(goal);
    n->kind = kind;
    n->origin = std::move(origin);
    n->span = std::move(span);
    return n;
}

NodePtr conj_node(std::vector<NodePtr> kids) {
    if (kids.size() == 1) return kids.front();
    auto n = std::make_shared<Node>();
    n->k = Node::K::Conj;
    n->kids = std::move(kids);
    return n;
}

NodePtr hyp(std::vector<ExprPtr> group, NodePtr body, bool choice = false) {
    if (group.empty()) return body;
    auto n = std::make_shared<Node>();
    n->k = Node::K::Hyp;
    n->choice = choice;
    n->group = std::move(group);
    n->kids = {std::move(body)};
    return n;
}

NodePtr fresh_node(std::vector<std::pair<std::string, SemType>> names, NodePtr body) {
    auto n = std::make_shared<Node>();
    n->k = Node::K::Fresh;
    n->fresh = std::move(names);
    n->kids = {std::move(body)};
    return n;
}

NodePtr subst(const NodePtr& n, const Bindings& b) {
    if (b.empty()) return n;
    auto out = std::make_shared<Node>(*n);
    if (out->goal) out->goal = substitute(out->goal, b);
    for (auto& g : out->group) g = substitute(g, b);
    for (auto& k : out->kids) k = subst(k, b);
    return out;
}

ExprPtr to_expr(const NodePtr& n) {
    switch (n->k) {
    case Node::K::Leaf: return n->goal;
    case Node::K::Conj: {
        std::vector<ExprPtr> parts;
        for (const auto& k : n->kids) parts.push_back(to_expr(k));
        return ex::conj(parts);
    }
    case Node::K::Hyp: return ex::implies(ex::conj(n->group), to_expr(n->kids[0]));
    case Node::K::Fresh: {
        ExprPtr body = to_expr(n->kids[0]);
        for (auto it = n->fresh.rbegin(); it != n->fresh.rend(); ++it) body = ex::forall(it->first, it->second, body);
        return body;
    }
    }
    return ex::truth();
}

bool is_nat_nonneg(const ExprPtr& ob) {
    // `0 <= e` where e is statically Nat.
    return ob->kind == Expr::Kind::Binary && ob->binop == BinOp::Le && ob->args[0]->kind == Expr::Kind::IntLit &&
           ob->args[0]->value == 0 && ob->args[1]->type == SemType::Nat;
}

ExprPtr nonneg(const ExprPtr& e) { return ex::le(ex::int_lit(0), e); }

class Gen {
public:
    Gen(const VerificationContext& ctx, const Procedure& p, bool safety, bool recursion)
        : ctx_(ctx), p_(p), safety_(safety), recursion_(recursion) {
        for (const auto& c : ctx.constants) types_[c.name] = c.type;
        for (const auto& prm : p.params) {
            types_[prm.name] = prm.type;
            if (prm.mode == ParamMode::ValueResult) types_[old_symbol(prm.name)] = prm.type;
        }
        for (const auto& v : p.locals) types_[v.name] = v.type;
        for (const auto& [n, _] : types_) taken_.insert(n);
        if (recursion_) {
            auto cyc = recursion_cycle(ctx, p.name);
            cycle_.insert(cyc.begin(), cyc.end());
        }
    }

    const std::map<std::string, SemType>& types() const { return types_; }

    std::string fresh(const std::string& base, SemType t) {
        for (int i = 1;; ++i) {
            std::string cand = base + "_" + std::to_string(i);
            if (taken_.insert(cand).second) {
                types_[cand] = t;
                return cand;
            }
        }
    }

    /// Well-definedness obligations of `e`, each closed under its local context.
    std::vector<NodePtr> safety(const ExprPtr& e, const SourceSpan& span) {
        std::vector<NodePtr> out;
        if (!safety_) return out;
        struct Frame {
            ExprPtr hyp;
            std::string name;
            SemType type = SemType::Unknown;
        };
        std::vector<Frame> frames;
        auto emit = [&](ExprPtr ob, const std::string& what) {
            if (is_nat_nonneg(ob) || simplify(ob)->is_bool_lit(true)) return;
            for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
                ob = it->hyp ? ex::implies(it->hyp, ob) : ex::forall(it->name, it->type, ob);
            }
            out.push_back(leaf(ob, VcKind::Safety, what, span));
        };
        std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
            switch (x->kind) {
            case Expr::Kind::Binary:
                if (x->binop == BinOp::And || x->binop == BinOp::Implies || x->binop == BinOp::Or) {
                    walk(x->args[0]);
                    frames.push_back({x->binop == BinOp::Or ? ex::not_(x->args[0]) : x->args[0], "", SemType::Unknown});
                    walk(x->args[1]);
                    frames.pop_back();
                    return;
                }
                walk(x->args[0]);
                walk(x->args[1]);
                if (x->binop == BinOp::Div) {
                    emit(ex::binary(BinOp::Ne, x->args[1], ex::int_lit(0)), "divisor is nonzero");
                }
                return;
            case Expr::Kind::Ite:
                walk(x->args[0]);
                frames.push_back({x->args[0], "", SemType::Unknown});
                walk(x->args[1]);
                frames.back().hyp = ex::not_(x->args[0]);
                walk(x->args[2]);
                frames.pop_back();
                return;
            case Expr::Kind::Quant:
                frames.push_back({nullptr, x->name, x->bound_type});
                walk(x->args[0]);
                frames.pop_back();
                return;
            case Expr::Kind::Get:
            case Expr::Kind::Set:
                for (const auto& a : x->args) walk(a);
                emit(nonneg(x->args[1]), "index is nonnegative");
                emit(ex::lt(x->args[1], ex::len(x->args[0])), "index below length");
                return;
            case Expr::Kind::App: {
                for (const auto& a : x->args) walk(a);
                const FuncDef* f = ctx_.theory ? ctx_.theory->find(x->name, x->args.size()) : nullptr;
                if (!f) return;
                std::map<std::string, ExprPtr> m;
                for (std::size_t i = 0; i < f->params.size(); ++i) m[f->params[i].name] = x->args[i];
                for (std::size_t i = 0; i < f->params.size(); ++i) {
                    const auto& prm = f->params[i];
                    if (prm.type == SemType::Nat) emit(nonneg(x->args[i]), "argument of " + f->name + " is a nat");
                    if (prm.domain) {
                        for (const auto& d : conjuncts(substitute(prm.domain, m))) {
                            emit(d, "argument of " + f->name + " in its domain");
                        }
                    }
                }
                return;
            }
            default:
                for (const auto& a : x->args) walk(a);
                return;
            }
        };
        walk(e);
        return out;
    }

    NodePtr stmt(const Statement& s, NodePtr q) {
        using SK = Statement::Kind;
        std::vector<NodePtr> kids;
        switch (s.kind) {
        case SK::Guard:
            kids = safety(s.expr, s.span);
            kids.push_back(hyp({s.expr}, q));
            break;
        case SK::Assert: {
            kids = safety(s.expr, s.span);
            auto items = conjuncts(s.expr);
            for (const auto& c : items) kids.push_back(leaf(c, VcKind::Consistency, "assertion", s.span));
            kids.push_back(hyp(items, q));
            break;
        }
        case SK::Assign: {
            kids = safety(s.expr, s.span);
            if (safety_ && p_.type_of(s.target) == SemType::Nat && s.expr->type != SemType::Nat) {
                kids.push_back(leaf(nonneg(s.expr), VcKind::Safety, "value assigned to nat " + s.target, s.span));
            }
            kids.push_back(subst(q, Bindings{{{s.target, s.expr}}, {}}));
            break;
        }
        case SK::Call: return call(s, std::move(q));
        }
        return conj_node(std::move(kids));
    }

    NodePtr call(const Statement& s, NodePtr q) {
        const Procedure* callee = ctx_.find_procedure(s.target);
        if (!callee) throw Error("unknown procedure '" + s.target + "' in call");
        std::vector<NodePtr> kids;
        for (const auto& a : s.args) {
            auto obs = safety(a, s.span);
            kids.insert(kids.end(), obs.begin(), obs.end());
        }
        Bindings pre_b;
        for (std::size_t i = 0; i < callee->params.size(); ++i) {
            const auto& prm = callee->params[i];
            pre_b.vars[prm.name] = s.args[i];
            if (prm.mode == ParamMode::ValueResult) pre_b.olds[prm.name] = s.args[i];
            if (safety_ && prm.type == SemType::Nat && s.args[i]->type != SemType::Nat) {
                kids.push_back(leaf(nonneg(s.args[i]), VcKind::Safety, "argument " + prm.name + " of " + callee->name + " is a nat",
                                    s.span));
            }
        }
        if (recursion_ && cycle_.count(callee->name) && callee->recursion_variant && p_.recursion_variant) {
            ExprPtr vc = substitute(callee->recursion_variant, pre_b);
            Bindings entry;
            for (const auto& prm : p_.params) {
                if (prm.mode == ParamMode::ValueResult) entry.vars[prm.name] = ex::old(prm.name, prm.type);
            }
            ExprPtr v0 = substitute(p_.recursion_variant, entry);
            kids.push_back(leaf(nonneg(vc), VcKind::Recursion, "recursion variant bounded", s.span));
            kids.push_back(leaf(ex::lt(vc, v0), VcKind::Recursion, "recursion variant decreases", s.span));
        }
        std::vector<ExprPtr> pre_items;
        int pre = callee->precondition();
        if (pre >= 0) {
            for (const auto& item : effective_invariant_items(*callee, pre)) {
                for (const auto& c : conjuncts(substitute(item, pre_b))) {
                    if (!c->is_bool_lit(true)) pre_items.push_back(c);
                }
            }
        }
        for (const auto& c : pre_items) {
            kids.push_back(leaf(c, VcKind::Consistency, "precondition of " + callee->name, s.span));
        }

        Bindings post_b;
        Bindings out_b;
        std::vector<std::pair<std::string, SemType>> names;
        for (std::size_t i = 0; i < callee->params.size(); ++i) {
            const auto& prm = callee->params[i];
            if (prm.mode == ParamMode::Value) {
                post_b.vars[prm.name] = s.args[i];
                continue;
            }
            const std::string& target = s.args[i]->name;
            std::string f = fresh(target, prm.type);
            names.push_back({f, prm.type});
            post_b.vars[prm.name] = ex::var(f, prm.type);
            post_b.olds[prm.name] = s.args[i];
            out_b.vars[target] = ex::var(f, prm.type);
        }
        // Callee locals are only quantified when its postcondition mentions them.
        std::set<std::string> post_vars;
        for (int q2 : callee->postconditions()) {
            for (const auto& v : free_vars(effective_invariant(*callee, q2))) post_vars.insert(v);
        }
        for (const auto& v : callee->locals) {
            if (!post_vars.count(v.name)) continue;
            std::string f = fresh(v.name, v.type);
            names.push_back({f, v.type});
            post_b.vars[v.name] = ex::var(f, v.type);
        }
        std::vector<ExprPtr> post_items;
        auto posts = callee->postconditions();
        if (posts.size() == 1) {
            for (const auto& item : effective_invariant_items(*callee, posts[0])) {
                post_items.push_back(substitute(item, post_b));
            }
        } else {
            std::vector<ExprPtr> alts;
            for (int q2 : posts) alts.push_back(substitute(effective_invariant(*callee, q2), post_b));
            post_items.push_back(ex::disj(alts));
        }
        NodePtr after = subst(q, out_b);
        kids.push_back(hyp(pre_items, fresh_node(names, hyp(post_items, after))));
        return conj_node(std::move(kids));
    }

    NodePtr body(const Transition& t, NodePtr q) {
        for (std::size_t i = t.body.size() + 1; i-- > 0;) {
            for (auto h = t.hypotheses.rbegin(); h != t.hypotheses.rend(); ++h) {
                if (h->position == i) q = hyp({h->expr}, q, true);
            }
            if (i > 0) q = stmt(t.body[i - 1], q);
        }
        return q;
    }

    NodePtr body(const std::vector<Statement>& stmts, NodePtr q) {
        for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) q = stmt(*it, q);
        return q;
    }

    /// not wp(stmts[from..])(false)
    ExprPtr enabled(const std::vector<Statement>& stmts, std::size_t from) {
        ExprPtr e = ex::truth();
        for (std::size_t i = stmts.size(); i-- > from;) {
            const auto& s = stmts[i];
            switch (s.kind) {
            case Statement::Kind::Guard: e = simplify(ex::and_(s.expr, e)); break;
            case Statement::Kind::Assign: e = substitute(e, Bindings{{{s.target, s.expr}}, {}}); break;
            case Statement::Kind::Assert:
                if (!e->is_bool_lit(true)) e = ex::or_(ex::not_(s.expr), e);
                break;
            case Statement::Kind::Call: {
                if (e->is_bool_lit(true)) break;
                const Procedure* callee = ctx_.find_procedure(s.target);
                if (!callee) throw Error("unknown procedure '" + s.target + "' in call");
                Bindings pre_b, post_b, out_b;
                std::vector<std::pair<std::string, SemType>> names;
                for (std::size_t k = 0; k < callee->params.size(); ++k) {
                    const auto& prm = callee->params[k];
                    pre_b.vars[prm.name] = s.args[k];
                    if (prm.mode == ParamMode::Value) {
                        post_b.vars[prm.name] = s.args[k];
                        continue;
                    }
                    pre_b.olds[prm.name] = s.args[k];
                    std::string f = fresh(s.args[k]->name, prm.type);
                    names.push_back({f, prm.type});
                    post_b.vars[prm.name] = ex::var(f, prm.type);
                    post_b.olds[prm.name] = s.args[k];
                    out_b.vars[s.args[k]->name] = ex::var(f, prm.type);
                }
                std::set<std::string> post_vars;
                for (int q2 : callee->postconditions()) {
                    for (const auto& v : free_vars(effective_invariant(*callee, q2))) post_vars.insert(v);
                }
                for (const auto& v : callee->locals) {
                    if (!post_vars.count(v.name)) continue;
                    std::string f = fresh(v.name, v.type);
                    names.push_back({f, v.type});
                    post_b.vars[v.name] = ex::var(f, v.type);
                }
                std::vector<ExprPtr> alts;
                for (int q2 : callee->postconditions()) alts.push_back(effective_invariant(*callee, q2));
                ExprPtr inner = ex::and_(substitute(ex::disj(alts), post_b), substitute(e, out_b));
                for (auto it = names.rbegin(); it != names.rend(); ++it) inner = ex::exists(it->first, it->second, inner);
                int pre = callee->precondition();
                ExprPtr pre_e = pre >= 0 ? substitute(effective_invariant(*callee, pre), pre_b) : ex::truth();
                e = ex::or_(ex::not_(pre_e), inner);
                break;
            }
            }
        }
        return simplify(e);
    }

private:
    const VerificationContext& ctx_;
    const Procedure& p_;
    bool safety_;
    bool recursion_;
    std::map<std::string, SemType> types_;
    std::set<std::string> taken_;
    std::set<std::string> cycle_;
};

struct Group {
    std::vector<ExprPtr> items;
    bool choice = false;
};

struct Leafed {
    std::vector<ExprPtr> antecedents;  // display order
    NodePtr leaf;
};

void split(const NodePtr& n, std::vector<Group>& groups, std::vector<Leafed>& out) {
    switch (n->k) {
    case Node::K::Leaf: {
        Leafed l;
        for (auto g = groups.rbegin(); g != groups.rend(); ++g) {
            if (g->choice && n->kind == VcKind::Safety) continue;
            l.antecedents.insert(l.antecedents.end(), g->items.begin(), g->items.end());
        }
        l.leaf = n;
        out.push_back(std::move(l));
        return;
    }
    case Node::K::Conj:
        for (const auto& k : n->kids) split(k, groups, out);
        return;
    case Node::K::Hyp:
        groups.push_back({n->group, n->choice});
        split(n->kids[0], groups, out);
        groups.pop_back();
        return;
    case Node::K::Fresh: split(n->kids[0], groups, out); return;
    }
}

std::map<std::string, SemType> symbols_of(const VC& vc, const std::map<std::string, SemType>& types) {
    std::map<std::string, SemType> out;
    auto note = [&](const ExprPtr& e) {
        for (const auto& v : free_vars(e)) {
            auto it = types.find(v);
            out[v] = it == types.end() ? SemType::Unknown : it->second;
        }
        for (const auto& o : free_olds(e)) {
            auto it = types.find(old_symbol(o));
            out[old_symbol(o)] = it == types.end() ? SemType::Unknown : it->second;
        }
    };
    for (const auto& a : vc.antecedents) note(a);
    note(vc.consequent);
    return out;
}

std::string sequent_key(const VC& vc) {
    std::string k = std::string(to_string(vc.kind)) + "\n" + to_string(vc.consequent);
    for (const auto& a : vc.antecedents) k += "\n" + to_string(a);
    return k;
}

/// Splits a goal tree into numbered VCs, dropping exact duplicates.
std::vector<VC> emit(const NodePtr& root, const std::vector<ExprPtr>& base, const std::string& proc,
                     const std::string& situation, const std::string& transition,
                     const std::map<std::string, SemType>& types, const std::vector<SourceSpan>& provenance) {
    std::vector<Group> groups{{base, false}};
    std::vector<Leafed> leaves;
    split(root, groups, leaves);
    std::vector<VC> out;
    std::set<std::string> seen;
    for (auto& l : leaves) {
        VC vc;
        vc.kind = l.leaf->kind;
        vc.procedure = proc;
        vc.situation = situation;
        vc.transition = transition;
        vc.antecedents = std::move(l.antecedents);
        vc.consequent = l.leaf->goal;
        vc.origin = l.leaf->origin;
        if (!seen.insert(sequent_key(vc)).second) continue;
        vc.provenance = provenance;
        if (l.leaf->span.valid() &&
            std::find_if(provenance.begin(), provenance.end(), [&](const SourceSpan& s) {
                return s.to_string() == l.leaf->span.to_string();
            }) == provenance.end()) {
            vc.provenance.push_back(l.leaf->span);
        }
        vc.goal = static_cast<int>(out.size()) + 1;
        vc.id = proc + "/" + situation + "/" + transition + "/goal#" + std::to_string(vc.goal) + "/" +
                std::string(to_string(vc.kind));
        vc.symbols = symbols_of(vc, types);
        out.push_back(std::move(vc));
    }
    return out;
}

Bindings entry_olds(const Procedure& p) {
    Bindings b;
    for (const auto& prm : p.params) {
        if (prm.mode == ParamMode::ValueResult) b.olds[prm.name] = ex::var(prm.name, prm.type);
    }
    return b;
}

}  // namespace

ExprPtr wp(const VerificationContext& ctx, const Procedure& p, const std::vector<Statement>& body, const ExprPtr& post) {
    Gen g(ctx, p, false, false);
    return to_expr(g.body(body, leaf(post, VcKind::Consistency, "", {})));
}

ExprPtr enabledness(const VerificationContext& ctx, const Procedure& p, const Transition& t) {
    Gen g(ctx, p, false, false);
    return g.enabled(t.body, 0);
}

std::vector<VC> vc_transition(const VerificationContext& ctx, const Procedure& p, int ti, const TerminationPlan& plan,
                              const VcOptions& opts) {
    const Transition& t = p.transitions.at(ti);
    Gen g(ctx, p, opts.safety, opts.termination);
    const auto& target = p.situations[t.target];

    std::vector<NodePtr> goals;
    for (const auto& item : effective_invariant_items(p, t.target)) {
        for (const auto& c : conjuncts(item)) {
            goals.push_back(leaf(c, VcKind::Consistency, "invariant of " + target.name, target.span));
        }
    }
    if (goals.empty()) goals.push_back(leaf(ex::truth(), VcKind::Consistency, "invariant of " + target.name, target.span));
    NodePtr q = conj_node(goals);

    Bindings placeholders;
    if (opts.termination && static_cast<std::size_t>(ti) < plan.per_transition.size()) {
        std::vector<NodePtr> term;
        std::vector<std::vector<ExprPtr>> facts;
        int n = 0;
        for (const auto& ob : plan.per_transition[ti]) {
            std::string ph = "$v0_" + std::to_string(n++);
            ExprPtr v0 = ex::var(ph, SemType::Int);
            placeholders.vars[ph] = ob.variant;
            const auto& carrier = p.situations[ob.carrier];
            if (ob.strict) {
                term.push_back(leaf(nonneg(ob.variant), VcKind::Termination, "variant of " + carrier.name + " bounded", carrier.span));
                term.push_back(leaf(ex::lt(ob.variant, v0), VcKind::Termination, "variant of " + carrier.name + " decreases",
                                    carrier.span));
                facts.push_back({ex::lt(ob.variant, v0)});
                facts.push_back({nonneg(ob.variant)});
            } else {
                term.push_back(leaf(ex::le(ob.variant, v0), VcKind::Termination,
                                    "variant of " + carrier.name + " does not increase", carrier.span));
                facts.push_back({ex::le(ob.variant, v0)});
            }
        }
        for (auto it = facts.rbegin(); it != facts.rend(); ++it) q = hyp(*it, q);
        term.push_back(q);
        q = conj_node(term);
    }
    q = g.body(t, q);
    q = subst(q, placeholders);

    std::vector<ExprPtr> base = effective_invariant_items(p, t.source);
    if (t.source == p.precondition()) {
        Bindings b = entry_olds(p);
        q = subst(q, b);
        for (auto& e : base) e = substitute(e, b);
    }
    return emit(q, base, p.name, p.situations[t.source].name, t.label(), g.types(), {t.span});
}

std::vector<VC> vc_consistency(const VerificationContext& ctx, const Procedure& p, int situation,
                               const TerminationPlan& plan, const VcOptions& opts) {
    std::vector<VC> out;
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        if (p.transitions[i].source != situation) continue;
        auto vcs = vc_transition(ctx, p, static_cast<int>(i), plan, opts);
        out.insert(out.end(), vcs.begin(), vcs.end());
    }
    return out;
}

VC vc_liveness(const VerificationContext& ctx, const Procedure& p, int situation) {
    Gen g(ctx, p, false, false);
    std::vector<ExprPtr> alts;
    std::vector<SourceSpan> prov{p.situations[situation].span};
    for (const auto& t : p.transitions) {
        if (t.source != situation) continue;
        alts.push_back(g.enabled(t.body, 0));
        prov.push_back(t.span);
    }
    std::vector<ExprPtr> base = effective_invariant_items(p, situation);
    ExprPtr goal = ex::disj(alts);
    if (situation == p.precondition()) {
        Bindings b = entry_olds(p);
        for (auto& e : base) e = substitute(e, b);
        goal = substitute(goal, b);
    }
    auto vcs = emit(leaf(goal, VcKind::Liveness, "some transition from " + p.situations[situation].name + " is enabled",
                         p.situations[situation].span),
                    base, p.name, p.situations[situation].name, "live", g.types(), prov);
    return vcs.front();
}

std::vector<VC> vc_situation_safety(const VerificationContext& ctx, const Procedure& p, int situation) {
    Gen g(ctx, p, true, false);
    const auto& s = p.situations[situation];
    std::vector<ExprPtr> context;
    if (s.parent >= 0) context = effective_invariant_items(p, s.parent);
    std::vector<NodePtr> kids;
    // Each item is checked assuming the ones before it.
    for (const auto& item : s.invariants) {
        auto obs = g.safety(item, s.span);
        if (!obs.empty()) {
            std::vector<ExprPtr> prefix(context.begin(), context.end());
            kids.push_back(hyp(prefix, conj_node(obs)));
        }
        context.push_back(item);
    }
    if (s.variant) {
        auto obs = g.safety(s.variant, s.span);
        if (!obs.empty()) kids.push_back(hyp(context, conj_node(obs)));
    }
    if (kids.empty()) return {};
    return emit(conj_node(kids), {}, p.name, s.name, "inv", g.types(), {s.span});
}

std::vector<VC> vc_recursion(const VerificationContext& ctx, const Procedure& p) {
    std::vector<VC> out;
    TerminationPlan plan = plan_termination(p);
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        for (auto& vc : vc_transition(ctx, p, static_cast<int>(i), plan)) {
            if (vc.kind == VcKind::Recursion) out.push_back(std::move(vc));
        }
    }
    return out;
}

std::vector<VC> generate_all(const VerificationContext& ctx, const VcOptions& opts) {
    Diagnostics diags = analyze(ctx);
    if (has_errors(diags)) throw DiagnosticError(diags);
    std::vector<VC> out;
    for (const auto& p : ctx.procedures) {
        if (!opts.procedure.empty() && p.name != opts.procedure) continue;
        TerminationPlan plan = plan_termination(p);
        std::vector<bool> targeted(p.situations.size(), false);
        for (const auto& t : p.transitions) targeted[t.target] = true;
        for (std::size_t s = 0; s < p.situations.size(); ++s) {
            int si = static_cast<int>(s);
            if (opts.safety) {
                auto v = vc_situation_safety(ctx, p, si);
                out.insert(out.end(), v.begin(), v.end());
            }
            auto c = vc_consistency(ctx, p, si, plan, opts);
            out.insert(out.end(), c.begin(), c.end());
            bool live_candidate = p.situations[s].kind != SituationKind::Postcondition &&
                                  (si == p.precondition() || targeted[s]) && !p.outgoing(si).empty();
            if (live_candidate) {
                // A transition without guards keeps the situation live on its own.
                for (int t : p.outgoing(si)) {
                    if (simplify(enabledness(ctx, p, p.transitions[t]))->is_bool_lit(true)) live_candidate = false;
                }
            }
            if (opts.liveness && live_candidate) out.push_back(vc_liveness(ctx, p, si));
        }
    }
    return out;
}

std::string render(const VC& vc) {
    std::ostringstream os;
    os << vc.id << "\n";
    for (std::size_t i = 0; i < vc.antecedents.size(); ++i) {
        std::string label = "[-" + std::to_string(i + 1) + "]";
        os << "    " << label << std::string(label.size() < 6 ? 6 - label.size() : 1, ' ') << to_string(vc.antecedents[i])
           << "\n";
    }
    os << "      |-------\n";
    os << "    [1]   " << to_string(vc.consequent) << "\n";
    return os.str();
}

}  // namespace ibp
