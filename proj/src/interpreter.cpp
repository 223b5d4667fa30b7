#include "ibp/interpreter.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json_value.hpp"

#include "ibp/analysis.hpp"

namespace ibp {

std::string_view to_string(ViolationKind k) {
    switch (k) {
    case ViolationKind::Precondition: return "PreconditionViolation";
    case ViolationKind::Invariant: return "InvariantViolation";
    case ViolationKind::Postcondition: return "PostconditionViolation";
    case ViolationKind::Liveness: return "LivenessViolation";
    case ViolationKind::Assert: return "AssertViolation";
    case ViolationKind::Variant: return "VariantViolation";
    case ViolationKind::Safety: return "SafetyViolation";
    case ViolationKind::StepLimit: return "StepLimitExceeded";
    }
    return "?";
}

namespace {

constexpr int kMaxCallDepth = 10000;

Value default_value(SemType t) {
    switch (t) {
    case SemType::Bool: return Value::of_bool(false);
    case SemType::Vector: return Value::of_vector({});
    default: return Value::of_int(0);
    }
}

bool fits(const Value& v, SemType t) {
    switch (t) {
    case SemType::Bool: return v.kind == Value::Kind::Bool;
    case SemType::Vector: return v.kind == Value::Kind::Vector;
    case SemType::Int:
    case SemType::Nat: return v.kind == Value::Kind::Int;
    default: return true;
    }
}

std::string_view policy_name(Policy p) { return p == Policy::Random ? "random" : "first-enabled"; }

struct Frame {
    const Procedure* proc = nullptr;
    Store vars;
    Store olds;
    int depth = 0;
    std::optional<std::int64_t> entry_variant;  // recursion variant at entry
    std::vector<std::string> cycle;             // procedures in a call cycle with this one
};

/// Result of executing one transition path from a given store.
struct Attempt {
    bool enabled = true;
    std::optional<Violation> violation;
    Store vars;
    std::vector<TraceStep> steps;  // callee steps
};

class Machine {
public:
    Machine(const VerificationContext& ctx, const RunOptions& opts) : ctx_(ctx), opts_(opts), rng_(opts.seed) {}

    std::size_t arrivals() const { return arrivals_; }

    Frame frame_at(const Procedure& p, const Store& vars, const Store& olds) const {
        Frame f;
        f.proc = &p;
        f.vars = vars;
        f.olds = olds;
        f.cycle = recursion_cycle(ctx_, p.name);
        return f;
    }

    Attempt step(const Frame& f, const Transition& tr) { return attempt(f, tr); }

    Frame entry_frame(const Procedure& p, const Store& inputs) {
        Frame f;
        f.proc = &p;
        f.cycle = recursion_cycle(ctx_, p.name);
        for (const auto& c : ctx_.constants) {
            auto it = inputs.find(c.name);
            if (it != inputs.end()) {
                if (!fits(it->second, c.type)) throw Error("input " + c.name + ": expected " + std::string(to_string(c.type)));
                f.vars[c.name] = it->second;
            }
        }
        for (const auto& prm : p.params) {
            auto it = inputs.find(prm.name);
            if (it == inputs.end()) throw Error("input for parameter '" + prm.name + "' is missing");
            if (!fits(it->second, prm.type)) {
                throw Error("input " + prm.name + ": expected " + std::string(to_string(prm.type)));
            }
            f.vars[prm.name] = it->second;
            if (prm.mode == ParamMode::ValueResult) f.olds[prm.name] = it->second;
        }
        for (const auto& [name, _] : inputs) {
            bool known = p.find_param(name) != nullptr;
            for (const auto& c : ctx_.constants) known |= c.name == name;
            if (!known) throw Error("input '" + name + "' is not a parameter of " + p.name);
        }
        for (const auto& l : p.locals) f.vars[l.name] = default_value(l.type);
        return f;
    }

    /// Runs the procedure of `f` from its precondition to a postcondition.
    std::optional<Violation> execute(Frame& f, std::vector<TraceStep>& out) {
        const Procedure& p = *f.proc;
        const TerminationPlan& plan = plan_for(p);
        for (const auto& prm : p.params) {
            if (prm.type == SemType::Nat && f.vars.at(prm.name).i < 0) {
                return violation(ViolationKind::Precondition, f, p.precondition(), "",
                                 "parameter " + prm.name + " is negative", prm.span);
            }
        }
        int cur = p.precondition();
        if (auto v = check_situation(f, cur, ViolationKind::Precondition)) return v;
        for (;;) {
            if (++arrivals_ > opts_.step_limit) {
                return violation(ViolationKind::StepLimit, f, cur, "",
                                 "more than " + std::to_string(opts_.step_limit) + " situation arrivals", {});
            }
            std::size_t here = out.size();
            if (opts_.record) out.push_back({f.depth, p.name, p.situations[cur].name, f.vars, "", {}});
            if (p.situations[cur].kind == SituationKind::Postcondition) return std::nullopt;

            std::vector<int> outgoing = p.outgoing(cur);
            std::vector<std::pair<int, Attempt>> enabled;
            for (int t : outgoing) {
                Attempt a = attempt(f, p.transitions[t]);
                if (!a.enabled) continue;
                enabled.emplace_back(t, std::move(a));
                if (opts_.policy == Policy::FirstEnabled) break;
            }
            if (enabled.empty()) {
                return violation(ViolationKind::Liveness, f, cur, "",
                                 "no transition from " + p.situations[cur].name + " is enabled", p.situations[cur].span);
            }
            std::size_t pick = 0;
            if (opts_.policy == Policy::Random && enabled.size() > 1) {
                pick = std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1)(rng_);
            }
            auto& [t, chosen] = enabled[pick];
            const Transition& tr = p.transitions[t];
            if (opts_.record) {
                out[here].transition = tr.label();
                for (auto& s : chosen.steps) out.push_back(std::move(s));
            }
            if (chosen.violation) return chosen.violation;

            std::vector<VariantSample> samples;
            for (const auto& ob : plan.per_transition[t]) {
                std::int64_t before, after;
                try {
                    before = eval_expr(ob.variant, f.vars, f.olds, *ctx_.theory).i;
                    after = eval_expr(ob.variant, chosen.vars, f.olds, *ctx_.theory).i;
                } catch (const EvalError& e) {
                    return violation(ViolationKind::Safety, f, cur, tr.label(), e.what(), e.span);
                }
                const std::string& carrier = p.situations[ob.carrier].name;
                samples.push_back({carrier, before, after, ob.strict});
                bool ok = ob.strict ? (after >= 0 && after < before) : after <= before;
                if (!ok) {
                    return violation(ViolationKind::Variant, f, cur, tr.label(),
                                     "variant of " + carrier + " went from " + std::to_string(before) + " to " +
                                         std::to_string(after),
                                     ob.variant->span);
                }
            }
            if (opts_.record) out[here].variants = std::move(samples);
            f.vars = std::move(chosen.vars);
            cur = tr.target;
            ViolationKind kind = p.situations[cur].kind == SituationKind::Postcondition ? ViolationKind::Postcondition
                                                                                          : ViolationKind::Invariant;
            if (auto v = check_situation(f, cur, kind, tr.label())) return v;
        }
    }

private:
    const VerificationContext& ctx_;
    const RunOptions& opts_;
    std::mt19937_64 rng_;
    std::size_t arrivals_ = 0;
    std::map<std::string, TerminationPlan> plans_;

    const TerminationPlan& plan_for(const Procedure& p) {
        auto it = plans_.find(p.name);
        if (it == plans_.end()) it = plans_.emplace(p.name, plan_termination(p)).first;
        return it->second;
    }

    Violation violation(ViolationKind k, const Frame& f, int situation, const std::string& transition,
                        std::string message, SourceSpan span) const {
        Violation v;
        v.kind = k;
        v.procedure = f.proc->name;
        v.situation = situation >= 0 ? f.proc->situations[situation].name : "";
        v.transition = transition;
        v.message = std::move(message);
        v.span = std::move(span);
        v.store = f.vars;
        return v;
    }

    std::optional<Violation> check_situation(const Frame& f, int s, ViolationKind kind,
                                             const std::string& transition = "") {
        const Procedure& p = *f.proc;
        for (const auto& item : effective_invariant_items(p, s)) {
            try {
                if (!eval_bool(item, f.vars, f.olds, *ctx_.theory)) {
                    return violation(kind, f, s, transition, to_string(item) + " does not hold", item->span);
                }
            } catch (const EvalError& e) {
                return violation(ViolationKind::Safety, f, s, transition, e.what(), e.span);
            }
        }
        return std::nullopt;
    }

    Attempt attempt(const Frame& f, const Transition& tr) {
        Attempt a;
        a.vars = f.vars;
        const Procedure& p = *f.proc;
        int src = tr.source;
        for (const auto& s : tr.body) {
            try {
                switch (s.kind) {
                case Statement::Kind::Guard:
                    if (!eval_bool(s.expr, a.vars, f.olds, *ctx_.theory)) {
                        a.enabled = false;
                        return a;
                    }
                    break;
                case Statement::Kind::Assert:
                    if (!eval_bool(s.expr, a.vars, f.olds, *ctx_.theory)) {
                        Frame g = f;
                        g.vars = a.vars;
                        a.violation = violation(ViolationKind::Assert, g, src, tr.label(),
                                                to_string(s.expr) + " does not hold", s.span);
                        return a;
                    }
                    break;
                case Statement::Kind::Assign: {
                    Value v = eval_expr(s.expr, a.vars, f.olds, *ctx_.theory);
                    if (p.type_of(s.target) == SemType::Nat && v.i < 0) {
                        Frame g = f;
                        g.vars = a.vars;
                        a.violation = violation(ViolationKind::Safety, g, src, tr.label(),
                                                "assigning " + std::to_string(v.i) + " to nat " + s.target, s.span);
                        return a;
                    }
                    a.vars[s.target] = std::move(v);
                    break;
                }
                case Statement::Kind::Call:
                    if (auto v = call(f, a, s, src, tr)) {
                        a.violation = std::move(v);
                        return a;
                    }
                    break;
                }
            } catch (const EvalError& e) {
                Frame g = f;
                g.vars = a.vars;
                a.violation = violation(ViolationKind::Safety, g, src, tr.label(), e.what(), e.span);
                return a;
            }
        }
        return a;
    }

    std::optional<Violation> call(const Frame& f, Attempt& a, const Statement& s, int src, const Transition& tr) {
        const Procedure* callee = ctx_.find_procedure(s.target);
        if (!callee) throw Error("unknown procedure '" + s.target + "'");
        Frame here = f;
        here.vars = a.vars;
        if (f.depth + 1 > kMaxCallDepth) {
            return violation(ViolationKind::StepLimit, here, src, tr.label(), "call depth limit reached", s.span);
        }
        Frame cf;
        cf.proc = callee;
        cf.depth = f.depth + 1;
        cf.cycle = recursion_cycle(ctx_, callee->name);
        for (const auto& c : ctx_.constants) {
            auto it = a.vars.find(c.name);
            if (it != a.vars.end()) cf.vars[c.name] = it->second;
        }
        std::set<std::string> written;
        for (std::size_t i = 0; i < callee->params.size(); ++i) {
            const Param& prm = callee->params[i];
            Value v = eval_expr(s.args[i], a.vars, f.olds, *ctx_.theory);
            if (prm.type == SemType::Nat && v.i < 0) {
                return violation(ViolationKind::Safety, here, src, tr.label(),
                                 "argument " + prm.name + " of " + callee->name + " is negative", s.span);
            }
            if (prm.mode == ParamMode::ValueResult) {
                if (!written.insert(s.args[i]->name).second) {
                    return violation(ViolationKind::Safety, here, src, tr.label(),
                                     "'" + s.args[i]->name + "' passed twice as a value-result argument", s.span);
                }
                cf.olds[prm.name] = v;
            }
            cf.vars[prm.name] = std::move(v);
        }
        for (const auto& l : callee->locals) cf.vars[l.name] = default_value(l.type);

        bool in_cycle = std::find(f.cycle.begin(), f.cycle.end(), callee->name) != f.cycle.end();
        if (callee->recursion_variant) {
            std::int64_t v = eval_expr(callee->recursion_variant, cf.vars, cf.olds, *ctx_.theory).i;
            cf.entry_variant = v;
            if (in_cycle && f.entry_variant && !(v >= 0 && v < *f.entry_variant)) {
                return violation(ViolationKind::Variant, here, src, tr.label(),
                                 "recursion variant went from " + std::to_string(*f.entry_variant) + " to " +
                                     std::to_string(v),
                                 s.span);
            }
        }
        if (auto v = execute(cf, a.steps)) return v;
        for (std::size_t i = 0; i < callee->params.size(); ++i) {
            if (callee->params[i].mode == ParamMode::ValueResult) {
                a.vars[s.args[i]->name] = cf.vars.at(callee->params[i].name);
            }
        }
        return std::nullopt;
    }
};

}  // namespace

Trace run(const VerificationContext& ctx, const std::string& procedure, const Store& inputs, const RunOptions& opts) {
    const Procedure* p = ctx.find_procedure(procedure);
    if (!p) throw Error("no procedure named '" + procedure + "'");
    Trace t;
    t.procedure = procedure;
    t.policy = opts.policy;
    t.seed = opts.seed;
    t.inputs = inputs;
    Machine m(ctx, opts);
    Frame f = m.entry_frame(*p, inputs);
    if (p->recursion_variant) {
        try {
            f.entry_variant = eval_expr(p->recursion_variant, f.vars, f.olds, *ctx.theory).i;
        } catch (const EvalError&) {
        }
    }
    t.violation = m.execute(f, t.steps);
    t.final_store = f.vars;
    t.arrivals = m.arrivals();
    return t;
}

StepOutcome step_transition(const VerificationContext& ctx, const std::string& procedure, int transition,
                            const Store& vars, const Store& olds, const RunOptions& opts) {
    const Procedure* p = ctx.find_procedure(procedure);
    if (!p) throw Error("no procedure named '" + procedure + "'");
    if (transition < 0 || transition >= static_cast<int>(p->transitions.size())) {
        throw Error("procedure '" + procedure + "' has no transition " + std::to_string(transition));
    }
    Machine m(ctx, opts);
    Attempt a = m.step(m.frame_at(*p, vars, olds), p->transitions[transition]);
    return {a.enabled, std::move(a.violation), std::move(a.vars)};
}

std::string trace_text(const Trace& t) {
    std::ostringstream os;
    os << "run " << t.procedure << " policy=" << policy_name(t.policy);
    if (t.policy == Policy::Random) os << " seed=" << t.seed;
    os << "\n";
    for (const auto& s : t.steps) {
        os << std::string(static_cast<std::size_t>(2 + 2 * s.depth), ' ') << s.procedure << "/" << s.situation << "  "
           << to_string(s.store);
        if (!s.transition.empty()) os << "  -> " << s.transition;
        for (const auto& v : s.variants) os << "  [" << v.carrier << " " << v.before << " -> " << v.after << "]";
        os << "\n";
    }
    if (t.violation) {
        const auto& v = *t.violation;
        os << to_string(v.kind) << " in " << v.procedure << "/" << v.situation;
        if (!v.transition.empty()) os << " (" << v.transition << ")";
        if (v.span.valid()) os << " at " << v.span.to_string();
        os << ": " << v.message << "\n";
        os << "  state: " << to_string(v.store) << "\n";
    } else {
        os << "final: " << to_string(t.final_store) << "\n";
    }
    return os.str();
}

std::string trace_json(const Trace& t) {
    nlohmann::json j;
    j["procedure"] = t.procedure;
    j["policy"] = policy_name(t.policy);
    j["seed"] = t.seed;
    j["inputs"] = to_json(t.inputs);
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        nlohmann::json st{{"depth", s.depth},
                          {"procedure", s.procedure},
                          {"situation", s.situation},
                          {"store", to_json(s.store)}};
        if (!s.transition.empty()) st["transition"] = s.transition;
        if (!s.variants.empty()) {
            nlohmann::json vs = nlohmann::json::array();
            for (const auto& v : s.variants) {
                vs.push_back({{"carrier", v.carrier}, {"before", v.before}, {"after", v.after}, {"strict", v.strict}});
            }
            st["variants"] = vs;
        }
        steps.push_back(std::move(st));
    }
    j["steps"] = steps;
    if (t.violation) {
        const auto& v = *t.violation;
        j["violation"] = {{"kind", to_string(v.kind)},   {"procedure", v.procedure}, {"situation", v.situation},
                          {"transition", v.transition}, {"message", v.message},     {"span", v.span.to_string()},
                          {"store", to_json(v.store)}};
    } else {
        j["final"] = to_json(t.final_store);
    }
    return j.dump();
}

}  // namespace ibp
