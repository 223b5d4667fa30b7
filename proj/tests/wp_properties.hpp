#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "ibp/interpreter.hpp"
#include "ibp/smt.hpp"
#include "ibp/vcgen.hpp"
#include "random_expr.hpp"
#include "test_util.hpp"

namespace testutil {

/// Outcome of the random weakest-precondition property checks.
struct WpPropertyReport {
    int cases = 0;
    int proved = 0;
    int evaluated = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty() && proved == 2 * cases; }
};

inline ibp::Store random_store(ExprGen& gen) {
    ibp::Store s;
    for (const auto& v : gen.int_vars) s[v] = ibp::Value::of_int(gen.pick(9) - 4);
    std::vector<std::int64_t> a(static_cast<std::size_t>(gen.pick(5)));
    for (auto& x : a) x = gen.pick(7) - 3;
    s["a"] = ibp::Value::of_vector(std::move(a));
    return s;
}

/// Direct execution oracle for guard/assert/assign lists: a failed guard makes
/// the postcondition vacuous, a failed assertion falsifies it.
inline bool execute_then(const std::vector<ibp::Statement>& body, const ibp::ExprPtr& post, ibp::Store s,
                         const ibp::TheoryEnv& env) {
    for (const auto& st : body) {
        switch (st.kind) {
        case ibp::Statement::Kind::Guard:
            if (!ibp::eval_bool(st.expr, s, {}, env)) return true;
            break;
        case ibp::Statement::Kind::Assert:
            if (!ibp::eval_bool(st.expr, s, {}, env)) return false;
            break;
        default:
            s[st.target] = ibp::eval_expr(st.expr, s, {}, env);
            break;
        }
    }
    return ibp::eval_bool(post, s, {}, env);
}

/// Random statement lists and postconditions. For each case the solver must
/// prove conjunctivity, wp(S, Q1 and Q2) <=> wp(S, Q1) and wp(S, Q2), and the
/// assignment rule, wp(x := e, Q) <=> exists x1. x1 = e and Q[x := x1]. The
/// evaluator must agree with direct execution on random states.
inline WpPropertyReport check_wp_properties(int cases, std::uint64_t seed, int timeout_ms) {
    WpPropertyReport rep;
    auto ctx = load_text(kExprFixture);
    const ibp::Procedure& p = ctx.procedures.front();
    const ibp::TheoryEnv& env = *ctx.theory;
    const std::map<std::string, ibp::SemType> syms = {{"k", ibp::SemType::Int}, {"n", ibp::SemType::Int},
                                                      {"m", ibp::SemType::Int}, {"i", ibp::SemType::Int},
                                                      {"a", ibp::SemType::Vector}};
    ExprGen gen(seed);
    std::vector<ibp::VC> vcs;
    for (int c = 0; c < cases; ++c) {
        auto body = gen.statements(1 + gen.pick(3), 1);
        auto q1 = gen.bool_expr(2);
        auto q2 = gen.bool_expr(1);

        ibp::VC conj;
        conj.id = "wp/conj/t0#0/goal#" + std::to_string(c) + "/consistency";
        conj.symbols = syms;
        conj.consequent = ibp::ex::binary(ibp::BinOp::Iff, ibp::wp(ctx, p, body, ibp::ex::and_(q1, q2)),
                                          ibp::ex::and_(ibp::wp(ctx, p, body, q1), ibp::wp(ctx, p, body, q2)));
        vcs.push_back(conj);

        ibp::Statement assign;
        assign.kind = ibp::Statement::Kind::Assign;
        assign.target = gen.int_vars[static_cast<std::size_t>(gen.pick(4))];
        assign.target_type = ibp::SemType::Int;
        assign.expr = gen.int_expr(2);
        auto fresh = ibp::ex::var("x_fresh", ibp::SemType::Int);
        auto rhs = ibp::ex::exists("x_fresh", ibp::SemType::Int,
                                   ibp::ex::and_(ibp::ex::eq(fresh, assign.expr),
                                                 ibp::substitute(q1, {{assign.target, fresh}})));
        ibp::VC subst;
        subst.id = "wp/subst/t0#0/goal#" + std::to_string(c) + "/consistency";
        subst.symbols = syms;
        subst.consequent = ibp::ex::binary(ibp::BinOp::Iff, ibp::wp(ctx, p, {assign}, q1), rhs);
        vcs.push_back(subst);

        for (int probe = 0; probe < 4; ++probe) {
            ibp::Store s = random_store(gen);
            for (const auto& [stmts, post] : {std::pair{body, q1}, std::pair{std::vector{assign}, q2}}) {
                try {
                    bool want = execute_then(stmts, post, s, env);
                    bool got = ibp::eval_bool(ibp::wp(ctx, p, stmts, post), s, {}, env);
                    ++rep.evaluated;
                    if (want != got) {
                        std::ostringstream msg;
                        msg << "case " << c << ": wp disagrees with execution at " << ibp::to_string(s);
                        rep.failures.push_back(msg.str());
                    }
                } catch (const ibp::EvalError&) {
                    // undefined somewhere along the path
                }
            }
        }
    }
    rep.cases = cases;
    auto report = ibp::check_all(vcs, env, solver(timeout_ms));
    for (const auto& r : report.results) {
        if (r.verdict.kind == ibp::VerdictKind::Proved) {
            ++rep.proved;
        } else {
            rep.failures.push_back(r.vc.id + ": " + std::string(ibp::to_string(r.verdict.kind)) + " " +
                                   ibp::to_string(r.vc.consequent));
        }
    }
    return rep;
}

}  // namespace testutil
