#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ibp/interpreter.hpp"
#include "ibp/model.hpp"
#include "ibp/vcgen.hpp"
#include "random_expr.hpp"
#include "test_util.hpp"

using namespace ibp;
using testutil::typed;

namespace {

const std::map<std::string, SemType> kVars = {{"k", SemType::Nat}, {"n", SemType::Nat}, {"a", SemType::Vector}};

std::set<std::string> printed(const std::vector<ExprPtr>& items) {
    std::set<std::string> s;
    for (const auto& e : items) s.insert(to_string(e));
    return s;
}

}  // namespace

TEST(Substitute, ReplacesEveryOccurrence) {
    auto env = builtin_theory();
    auto e = typed("k - 1 < k", kVars, *env);
    auto r = substitute(e, {{"k", typed("k - 1", kVars, *env)}});
    EXPECT_EQ(to_string(r), "k - 1 - 1 < k - 1");
}

TEST(Substitute, RewritesInsideQuantifierBody) {
    auto env = builtin_theory();
    auto e = typed("forall (i: nat): i < k => a[i] <= a[0]", kVars, *env);
    auto r = substitute(e, {{"a", typed("swap(a, 0, k)", kVars, *env)}});
    EXPECT_EQ(to_string(r), "forall (i: nat): i < k => swap(a, 0, k)[i] <= swap(a, 0, k)[0]");
}

TEST(Substitute, ShadowedBindingIsUntouched) {
    auto env = builtin_theory();
    auto e = typed("forall (k: nat): k < n", kVars, *env);
    auto r = substitute(e, {{"k", ex::int_lit(0)}});
    EXPECT_TRUE(same(r, e));
}

TEST(Substitute, AvoidsCapture) {
    auto env = builtin_theory();
    auto e = typed("forall (i: nat): i < k => a[i] <= n", kVars, *env);
    auto r = substitute(e, {{"n", ex::var("i", SemType::Int)}});
    ASSERT_EQ(r->kind, Expr::Kind::Quant);
    EXPECT_NE(r->name, "i");
    EXPECT_TRUE(free_vars(r).count("i"));
}

TEST(Substitute, IdempotentForGroundRanges) {
    testutil::ExprGen gen(7);
    for (int round = 0; round < 500; ++round) {
        auto e = gen.bool_expr(3);
        std::map<std::string, ExprPtr> sigma;
        for (const auto& v : gen.int_vars) {
            if (gen.pick(2)) sigma[v] = ex::int_lit(gen.pick(9) - 4);
        }
        auto once = substitute(e, sigma);
        EXPECT_TRUE(same(substitute(once, sigma), once)) << to_string(e);
    }
}

TEST(EffectiveInvariant, InnerLoopIncludesOuterInvariant) {
    auto ctx = testutil::load_corpus("selection_sort");
    const Procedure& p = *ctx.find_procedure("selection_sort");
    auto items = printed(effective_invariant_items(p, p.find_situation("Inner")));
    for (const char* want : {"sorted(a, 0, k)", "partitioned(a, k)", "k <= m and m < r and r <= n",
                             "forall (i: nat): k <= i and i < r => a[m] <= a[i]"}) {
        EXPECT_TRUE(items.count(want)) << want;
    }
}

TEST(EffectiveInvariant, TopLevelSituationHasOwnInvariantsOnly) {
    auto ctx = testutil::load_corpus("selection_sort");
    const Procedure& p = *ctx.find_procedure("selection_sort");
    int outer = p.find_situation("Outer");
    auto items = effective_invariant_items(p, outer);
    EXPECT_EQ(printed(items), printed(p.situations[outer].invariants));
}

TEST(EffectiveInvariant, EmptyChildEqualsParent) {
    auto ctx = testutil::load_text(R"(
context c {
  procedure p(n: nat) {
    var k: nat;
    post { true; }
    situation Outer {
      k <= n;
      situation Inner { }
    }
    transition to Inner { k := 0; }
    transition from Inner to Post { }
  }
}
)");
    const Procedure& p = ctx.procedures.front();
    EXPECT_EQ(printed(effective_invariant_items(p, p.find_situation("Inner"))),
              printed(effective_invariant_items(p, p.find_situation("Outer"))));
}

TEST(EffectiveInvariant, ChildContainsEveryParentConjunct) {
    for (const char* name : {"selection_sort", "heapsort_final", "siftdown_fixed", "heapsort_skeleton"}) {
        auto ctx = testutil::load_corpus(name);
        for (const auto& p : ctx.procedures) {
            for (std::size_t s = 0; s < p.situations.size(); ++s) {
                int parent = p.situations[s].parent;
                if (parent < 0) continue;
                auto child = printed(effective_invariant_items(p, static_cast<int>(s)));
                for (const auto& c : printed(effective_invariant_items(p, parent))) {
                    EXPECT_TRUE(child.count(c)) << name << " " << p.situations[s].name << ": " << c;
                }
            }
        }
    }
}

TEST(Enabledness, HeadGuardOfTearHeapLoop) {
    auto ctx = testutil::load_corpus("heapsort_final");
    const Procedure& p = *ctx.find_procedure("heapsort");
    int tear = p.find_situation("TearHeap");
    bool found = false;
    for (int t : p.outgoing(tear)) {
        if (p.transitions[t].target != tear) continue;
        found = true;
        EXPECT_EQ(to_string(simplify(enabledness(ctx, p, p.transitions[t]))), "k > 1");
    }
    EXPECT_TRUE(found);
}

TEST(Enabledness, NoGuardsMeansTrue) {
    auto ctx = testutil::load_corpus("selection_sort");
    const Procedure& p = *ctx.find_procedure("selection_sort");
    const Transition& init = p.transitions[p.outgoing(p.precondition()).front()];
    EXPECT_TRUE(simplify(enabledness(ctx, p, init))->is_bool_lit(true));
}

TEST(Enabledness, GuardsAreConjoined) {
    auto ctx = testutil::load_text(R"(
context c {
  procedure p(k: nat, x: int, a: vector) {
    pre { k < len(a); }
    post { true; }
    transition to Post { [0 < k]; [a[k] < x]; }
    transition to Post { [k = 0 or x <= a[k]]; }
  }
}
)");
    const Procedure& p = ctx.procedures.front();
    EXPECT_EQ(to_string(simplify(enabledness(ctx, p, p.transitions[0]))), "0 < k and a[k] < x");
}

// The interpreter refuses a transition whose enabledness is false and
// completes a call- and assert-free one whose enabledness is true.
TEST(Enabledness, AgreesWithInterpreter) {
    std::mt19937_64 rng(11);
    auto rand_vec = [&](int max_len) {
        std::vector<std::int64_t> v(std::uniform_int_distribution<int>(0, max_len)(rng));
        for (auto& x : v) x = std::uniform_int_distribution<int>(-5, 5)(rng);
        return v;
    };
    int checked = 0;
    for (const char* name : {"selection_sort", "siftdown_fixed", "siftdown_bug", "heapsort_final"}) {
        auto ctx = testutil::load_corpus(name);
        for (const auto& p : ctx.procedures) {
            for (std::size_t t = 0; t < p.transitions.size(); ++t) {
                const Transition& tr = p.transitions[t];
                bool plain = std::none_of(tr.body.begin(), tr.body.end(), [](const Statement& s) {
                    return s.kind == Statement::Kind::Call || s.kind == Statement::Kind::Assert;
                });
                ExprPtr en = enabledness(ctx, p, tr);
                for (int round = 0; round < 200; ++round) {
                    Store vars, olds;
                    for (const auto& prm : p.params) {
                        if (prm.type == SemType::Vector) {
                            vars[prm.name] = Value::of_vector(rand_vec(8));
                        } else {
                            vars[prm.name] = Value::of_int(std::uniform_int_distribution<int>(0, 9)(rng));
                        }
                        if (prm.mode == ParamMode::ValueResult) olds[prm.name] = vars[prm.name];
                    }
                    for (const auto& l : p.locals) vars[l.name] = Value::of_int(std::uniform_int_distribution<int>(0, 9)(rng));
                    bool enabled;
                    try {
                        enabled = eval_bool(en, vars, olds, *ctx.theory);
                    } catch (const EvalError&) {
                        continue;
                    }
                    auto out = step_transition(ctx, p.name, static_cast<int>(t), vars, olds);
                    if (!enabled) {
                        EXPECT_TRUE(!out.enabled || out.violation) << name << " " << tr.label();
                    } else if (plain && !out.violation) {
                        EXPECT_TRUE(out.enabled) << name << " " << tr.label();
                    }
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(Transition, LabelNamesDeclarationAndBranch) {
    auto ctx = testutil::load_corpus("siftdown_fixed");
    const Procedure& p = ctx.procedures.front();
    std::set<std::string> labels;
    for (const auto& t : p.transitions) labels.insert(t.label());
    EXPECT_TRUE(labels.count("t1#0"));
    EXPECT_TRUE(labels.count("t1#2"));
    EXPECT_TRUE(labels.count("t2#1"));
}
