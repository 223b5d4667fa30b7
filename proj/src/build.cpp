// Turns unresolved syntax into a resolved, typed VerificationContext.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ibp/analysis.hpp"
#include "ibp/parser.hpp"
#include "ibp/theory.hpp"

namespace ibp {

namespace {

/// Conjunction of the guards at the front of `stmts`; null if there are none.
ExprPtr leading_guards(const std::vector<Statement>& stmts) {
    std::vector<ExprPtr> gs;
    for (const auto& s : stmts) {
        if (s.kind != Statement::Kind::Guard) break;
        gs.push_back(s.expr);
    }
    return gs.empty() ? nullptr : ex::conj(gs);
}

class Builder {
public:
    Builder(VerificationContext& ctx, Diagnostics& diags) : ctx_(ctx), diags_(diags) {}

    void procedure_skeleton(const RawProcedure& raw, Procedure& p) {
        p.name = raw.name;
        p.span = raw.span;
        p.params = raw.params;
        p.locals = raw.locals;
        std::set<std::string> names;
        for (const auto& c : ctx_.constants) names.insert(c.name);
        auto declare = [&](const std::string& n, const SourceSpan& span) {
            if (!names.insert(n).second) {
                diags_.push_back(make_error("RESOLVE008", "duplicate declaration of '" + n + "'", span));
            }
        };
        for (const auto& prm : p.params) declare(prm.name, prm.span);
        for (const auto& v : p.locals) declare(v.name, v.span);
        for (const auto& prm : p.params) {
            if (prm.mode == ParamMode::ValueResult && names.count(old_symbol(prm.name))) {
                diags_.push_back(make_error("RESOLVE008",
                                            "'" + old_symbol(prm.name) + "' is reserved for the entry value of '" +
                                                prm.name + "'",
                                            prm.span));
            }
        }

        for (const auto& s : raw.situations) flatten(p, s, -1);
        int pres = 0;
        for (const auto& s : p.situations) pres += s.kind == SituationKind::Precondition;
        if (pres == 0) {
            Situation pre;
            pre.name = "Pre";
            pre.kind = SituationKind::Precondition;
            pre.implicit = true;
            pre.span = raw.span;
            if (p.find_situation("Pre") >= 0) pre.name = fresh_situation_name(p, "Pre");
            p.situations.insert(p.situations.begin(), pre);
            for (auto& s : p.situations) {
                if (s.parent >= 0) ++s.parent;
                for (int& c : s.children) ++c;
            }
        } else if (pres > 1) {
            diags_.push_back(make_error("RESOLVE010", "procedure '" + p.name + "' has more than one precondition", raw.span));
        }
        if (p.postconditions().empty()) {
            diags_.push_back(make_error("RESOLVE009", "procedure '" + p.name + "' has no postcondition", raw.span));
        }
    }

    void procedure_body(const RawProcedure& raw, Procedure& p) {
        Scope scope = procedure_scope(ctx_, p);
        std::size_t raw_index = 0;
        std::vector<const RawSituation*> order;
        for (const auto& s : raw.situations) collect(s, order);
        for (auto& sit : p.situations) {
            if (sit.implicit) continue;
            const RawSituation* rs = order[raw_index++];
            for (const auto& inv : rs->invariants) {
                if (ExprPtr e = typecheck_bool(inv, scope, diags_)) sit.invariants.push_back(e);
            }
            if (rs->variant) sit.variant = typecheck_numeric(rs->variant, scope, diags_);
        }
        if (raw.recursion_variant) {
            Scope pscope;
            pscope.theory = scope.theory;
            for (const auto& c : ctx_.constants) pscope.vars[c.name] = c.type;
            for (const auto& prm : p.params) pscope.vars[prm.name] = prm.type;
            p.recursion_variant = typecheck_numeric(raw.recursion_variant, pscope, diags_);
        }

        for (const auto& rt : raw.transitions) {
            TransitionDecl decl;
            decl.span = rt.span;
            if (rt.from.empty()) {
                decl.source = p.precondition();
            } else {
                decl.source = p.find_situation(rt.from);
                if (decl.source < 0) {
                    diags_.push_back(make_error("RESOLVE001", "unknown situation '" + rt.from + "'", rt.from_span));
                    continue;
                }
            }
            if (p.situations[decl.source].kind == SituationKind::Postcondition) {
                diags_.push_back(make_error("RESOLVE004",
                                            "transition out of postcondition '" + p.situations[decl.source].name + "'",
                                            rt.from_span.valid() ? rt.from_span : rt.span));
                continue;
            }
            int default_target = -1;
            if (!rt.to.empty()) {
                default_target = target_index(p, rt.to, rt.to_span);
                if (default_target < 0) continue;
            }
            bool ok = true;
            decl.block = block(rt.block, p, scope, default_target, ok);
            if (!ok) continue;
            decl.head_guard = leading_guards(decl.block.stmts);
            p.decls.push_back(std::move(decl));
        }

        // Desugar declarations into linear paths.
        for (std::size_t d = 0; d < p.decls.size(); ++d) {
            auto& decl = p.decls[d];
            std::vector<ChoiceHypothesis> hyps;
            std::vector<int> same_source;
            for (std::size_t e = 0; e < p.decls.size(); ++e) {
                if (p.decls[e].source == decl.source) same_source.push_back(static_cast<int>(e));
            }
            if (same_source.size() >= 2) {
                std::vector<ExprPtr> alts;
                for (int e : same_source) {
                    if (!p.decls[e].head_guard) {
                        alts.clear();
                        break;
                    }
                    alts.push_back(p.decls[e].head_guard);
                }
                if (!alts.empty()) hyps.push_back({0, ex::disj(alts)});
            }
            std::vector<Statement> prefix;
            int branch = 0;
            desugar(p, static_cast<int>(d), decl.block, prefix, hyps, branch);
        }
    }

private:
    VerificationContext& ctx_;
    Diagnostics& diags_;

    static std::string fresh_situation_name(const Procedure& p, const std::string& base) {
        std::set<std::string> taken;
        for (const auto& s : p.situations) taken.insert(s.name);
        return fresh_name(base, taken);
    }

    static void collect(const RawSituation& s, std::vector<const RawSituation*>& out) {
        out.push_back(&s);
        for (const auto& c : s.children) collect(c, out);
    }

    void flatten(Procedure& p, const RawSituation& raw, int parent) {
        if (p.find_situation(raw.name) >= 0) {
            diags_.push_back(make_error("RESOLVE002", "duplicate situation '" + raw.name + "'", raw.span));
        }
        Situation s;
        s.name = raw.name;
        s.kind = raw.kind;
        s.parent = parent;
        s.depth = parent < 0 ? 0 : p.situations[parent].depth + 1;
        s.span = raw.span;
        int idx = static_cast<int>(p.situations.size());
        p.situations.push_back(std::move(s));
        if (parent >= 0) p.situations[parent].children.push_back(idx);
        for (const auto& c : raw.children) flatten(p, c, idx);
    }

    int target_index(const Procedure& p, const std::string& name, const SourceSpan& span) {
        int t = p.find_situation(name);
        if (t < 0) {
            diags_.push_back(make_error("RESOLVE001", "unknown situation '" + name + "'", span));
            return -1;
        }
        if (p.situations[t].kind == SituationKind::Precondition) {
            diags_.push_back(make_error("RESOLVE003", "transition into precondition '" + name + "'", span));
            return -1;
        }
        return t;
    }

    TransitionBlock block(const RawBlock& raw, const Procedure& p, const Scope& scope, int default_target, bool& ok) {
        TransitionBlock b;
        b.span = raw.span;
        for (Statement s : raw.stmts) {
            if (typecheck_statement(s, scope, p, ctx_procs_, diags_)) {
                b.stmts.push_back(std::move(s));
            } else {
                ok = false;
            }
        }
        if (!raw.branches.empty()) {
            for (const auto& br : raw.branches) b.branches.push_back(block(br, p, scope, default_target, ok));
        } else if (!raw.target.empty()) {
            b.target = target_index(p, raw.target, raw.target_span);
            ok &= b.target >= 0;
        } else if (default_target >= 0) {
            b.target = default_target;
        } else {
            diags_.push_back(make_error("RESOLVE013", "transition path has no target; add 'goto' or 'to'", raw.span));
            ok = false;
        }
        return b;
    }

    void desugar(Procedure& p, int decl, const TransitionBlock& b, std::vector<Statement>& prefix,
                 std::vector<ChoiceHypothesis>& hyps, int& branch) {
        std::size_t mark = prefix.size();
        prefix.insert(prefix.end(), b.stmts.begin(), b.stmts.end());
        if (b.branches.empty()) {
            Transition t;
            t.source = p.decls[decl].source;
            t.target = b.target;
            t.body = prefix;
            t.hypotheses = hyps;
            t.decl = decl;
            t.branch = branch++;
            t.span = p.decls[decl].span;
            p.decls[decl].paths.push_back(static_cast<int>(p.transitions.size()));
            p.transitions.push_back(std::move(t));
        } else {
            std::size_t hyp_mark = hyps.size();
            if (b.branches.size() >= 2) {
                std::vector<ExprPtr> alts;
                for (const auto& br : b.branches) {
                    ExprPtr g = leading_guards(br.stmts);
                    if (!g) {
                        alts.clear();
                        break;
                    }
                    alts.push_back(g);
                }
                if (!alts.empty()) hyps.push_back({prefix.size(), ex::disj(alts)});
            }
            for (const auto& br : b.branches) desugar(p, decl, br, prefix, hyps, branch);
            hyps.resize(hyp_mark);
        }
        prefix.resize(mark);
    }

public:
    std::vector<Procedure> ctx_procs_;
};

}  // namespace

ParseResult parse_context(const std::string& text, const std::string& file) {
    ParseResult result;
    RawContext raw;
    try {
        raw = parse_raw_context(text, file);
    } catch (const DiagnosticError& e) {
        result.diagnostics = e.diagnostics();
        return result;
    }

    VerificationContext ctx;
    ctx.name = raw.name;
    ctx.file = file;
    ctx.span = raw.span;
    ctx.constants = raw.constants;
    for (const auto& [n, _] : raw.imports) ctx.imports.push_back(n);
    for (const auto& [n, s] : raw.strategy) ctx.strategy.push_back({n, s});

    Diagnostics& diags = result.diagnostics;
    std::string dir = std::filesystem::path(file).parent_path().string();
    ctx.theory = load_theory(dir, ctx.imports, raw.strategy, diags, raw.span);

    std::set<std::string> proc_names;
    for (const auto& rp : raw.procedures) {
        if (!proc_names.insert(rp.name).second) {
            diags.push_back(make_error("RESOLVE008", "duplicate procedure '" + rp.name + "'", rp.span));
        }
    }

    Builder b(ctx, diags);
    ctx.procedures.resize(raw.procedures.size());
    for (std::size_t i = 0; i < raw.procedures.size(); ++i) b.procedure_skeleton(raw.procedures[i], ctx.procedures[i]);
    if (has_errors(diags)) return result;
    b.ctx_procs_ = ctx.procedures;
    for (std::size_t i = 0; i < raw.procedures.size(); ++i) b.procedure_body(raw.procedures[i], ctx.procedures[i]);
    if (has_errors(diags)) return result;
    result.context = std::move(ctx);
    return result;
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back(make_error("IO001", "cannot read '" + path + "'"));
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_context(ss.str(), path);
}

}  // namespace ibp
