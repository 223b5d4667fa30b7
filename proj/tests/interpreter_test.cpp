#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include <nlohmann/json.hpp>

#include "ibp/interpreter.hpp"
#include "test_util.hpp"

using namespace ibp;

namespace {

Value vec(std::vector<std::int64_t> v) { return Value::of_vector(std::move(v)); }

const std::map<std::string, SemType> kVars = {{"a", SemType::Vector}, {"k", SemType::Nat}, {"n", SemType::Int}};

Value eval(const std::string& text, const Store& vars) {
    auto env = builtin_theory();
    return eval_expr(testutil::typed(text, kVars, *env), vars, {}, *env);
}

void all_vectors(int max_len, int lo, int hi, const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    std::vector<std::int64_t> v;
    std::function<void()> rec = [&]() {
        fn(v);
        if (static_cast<int>(v.size()) == max_len) return;
        for (int x = lo; x <= hi; ++x) {
            v.push_back(x);
            rec();
            v.pop_back();
        }
    };
    rec();
}

std::vector<std::int64_t> sorted_copy(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(Eval, ArithmeticAndAccess) {
    Store s{{"a", vec({4, 7, 1})}, {"k", Value::of_int(2)}, {"n", Value::of_int(-3)}};
    EXPECT_EQ(eval("a[k] + n * 2", s).i, -5);
    EXPECT_EQ(eval("len(a) - k", s).i, 1);
    EXPECT_EQ(eval("floor(len(a) / 2)", s).i, 1);
    EXPECT_TRUE(eval("sorted(a, 2)", s).b);
    EXPECT_FALSE(eval("sorted(a)", s).b);
    EXPECT_TRUE(eval("exists (i: nat): i < len(a) and a[i] = 7", s).b);
}

TEST(Eval, OutOfBoundsIsEvalError) {
    Store s{{"a", vec({1})}, {"k", Value::of_int(3)}, {"n", Value::of_int(0)}};
    EXPECT_THROW(eval("a[k]", s), EvalError);
}

TEST(Eval, UnboundedQuantifierIsEvalError) {
    Store s{{"a", vec({})}, {"k", Value::of_int(0)}, {"n", Value::of_int(0)}};
    try {
        eval("forall (i: nat): i >= 0", s);
        FAIL() << "no error";
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind, EvalError::Kind::UnboundedQuantifier);
    }
}

TEST(Run, HeapsortSortsSmallInputs) {
    auto ctx = testutil::load_corpus("heapsort_final");
    for (const auto& in : std::vector<std::vector<std::int64_t>>{{3, 1, 2}, {}, {42}, {2, 2, 1, 1}}) {
        auto t = run(ctx, "heapsort", {{"a", vec(in)}});
        ASSERT_TRUE(t.ok()) << to_string(t.violation->kind) << " " << t.violation->message;
        EXPECT_EQ(t.final_store.at("a").v, sorted_copy(in));
        EXPECT_EQ(t.steps.back().situation, "Post");
    }
}

TEST(Run, PreconditionViolationIsReported) {
    auto ctx = testutil::load_corpus("siftdown_fixed");
    auto t = run(ctx, "siftdown", {{"a", vec({0, 1, 0, 5})}, {"m", Value::of_int(0)}, {"n", Value::of_int(4)}});
    ASSERT_TRUE(t.violation);
    EXPECT_EQ(t.violation->kind, ViolationKind::Precondition);
}

TEST(Run, MissingInputThrows) {
    auto ctx = testutil::load_corpus("heapsort_final");
    EXPECT_THROW(run(ctx, "heapsort", {}), Error);
    EXPECT_THROW(run(ctx, "nope", {{"a", vec({})}}), Error);
}

TEST(Run, StepLimitIsAViolation) {
    auto ctx = testutil::load_corpus("heapsort_final");
    RunOptions opts;
    opts.step_limit = 5;
    auto t = run(ctx, "heapsort", {{"a", vec({5, 4, 3, 2, 1, 0})}}, opts);
    ASSERT_TRUE(t.violation);
    EXPECT_EQ(t.violation->kind, ViolationKind::StepLimit);
}

TEST(Run, ViolationKindNames) {
    EXPECT_EQ(to_string(ViolationKind::Invariant), "InvariantViolation");
    EXPECT_EQ(to_string(ViolationKind::StepLimit), "StepLimitExceeded");
}

// Every input of length <= 7 over [0, 3] against std::sort.
TEST(Exhaustive, FinalHeapsortMatchesStdSort) {
    auto ctx = testutil::load_corpus("heapsort_final");
    RunOptions opts;
    opts.record = false;
    std::size_t inputs = 0;
    all_vectors(7, 0, 3, [&](const std::vector<std::int64_t>& v) {
        ++inputs;
        auto t = run(ctx, "heapsort", {{"a", vec(v)}}, opts);
        ASSERT_TRUE(t.ok()) << to_string(vec(v)) << ": " << t.violation->message;
        ASSERT_EQ(t.final_store.at("a").v, sorted_copy(v)) << to_string(vec(v));
    });
    EXPECT_EQ(inputs, 21845u);
}

TEST(Exhaustive, BuggySiftIsCaughtAtRuntime) {
    auto ctx = testutil::load_corpus("heapsort_buggy_sift");
    RunOptions opts;
    opts.record = false;
    std::size_t violations = 0;
    std::size_t unsorted = 0;
    all_vectors(7, 0, 3, [&](const std::vector<std::int64_t>& v) {
        auto t = run(ctx, "heapsort", {{"a", vec(v)}}, opts);
        if (!t.ok()) {
            ++violations;
        } else if (t.final_store.at("a").v != sorted_copy(v)) {
            ++unsorted;
        }
    });
    EXPECT_GT(violations, 0u);
    // every wrong result is flagged before it escapes
    EXPECT_EQ(unsorted, 0u);
}

TEST(Policy, IrrelevantOnDeterministicDiagrams) {
    auto ctx = testutil::load_corpus("selection_sort");
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        std::vector<std::int64_t> v(std::uniform_int_distribution<std::size_t>(0, 9)(rng));
        for (auto& x : v) x = std::uniform_int_distribution<int>(-5, 5)(rng);
        Store in{{"a", vec(v)}, {"n", Value::of_int(static_cast<std::int64_t>(v.size()))}};
        auto first = run(ctx, "selection_sort", in);
        RunOptions opts;
        opts.policy = Policy::Random;
        opts.seed = static_cast<std::uint64_t>(round);
        auto random = run(ctx, "selection_sort", in, opts);
        ASSERT_TRUE(first.ok());
        ASSERT_TRUE(random.ok());
        EXPECT_EQ(first.final_store, random.final_store);
        ASSERT_EQ(first.steps.size(), random.steps.size());
        for (std::size_t i = 0; i < first.steps.size(); ++i) {
            EXPECT_EQ(first.steps[i].situation, random.steps[i].situation);
            EXPECT_EQ(first.steps[i].transition, random.steps[i].transition);
        }
    }
}

TEST(Variants, StrictObligationsDecrease) {
    auto ctx = testutil::load_corpus("heapsort_final");
    std::mt19937_64 rng(9);
    std::size_t samples = 0;
    for (int round = 0; round < 100; ++round) {
        std::vector<std::int64_t> v(std::uniform_int_distribution<std::size_t>(0, 12)(rng));
        for (auto& x : v) x = std::uniform_int_distribution<int>(-9, 9)(rng);
        auto t = run(ctx, "heapsort", {{"a", vec(v)}});
        ASSERT_TRUE(t.ok());
        for (const auto& st : t.steps) {
            for (const auto& s : st.variants) {
                ++samples;
                EXPECT_GE(s.before, 0);
                if (s.strict) {
                    EXPECT_LT(s.after, s.before) << s.carrier;
                } else {
                    EXPECT_LE(s.after, s.before) << s.carrier;
                }
            }
        }
    }
    EXPECT_GT(samples, 100u);
}

// States reached at runtime satisfy the effective invariant of their
// situation, and every enabled transition from them lands in a state
// satisfying the target's invariant: the runtime face of the proved
// consistency goals.
TEST(Soundness, ReachedStatesRespectInvariants) {
    auto ctx = testutil::load_corpus("heapsort_final");
    const Procedure& p = *ctx.find_procedure("heapsort");
    std::mt19937_64 rng(13);
    std::size_t checked = 0;
    for (int round = 0; round < 40; ++round) {
        std::vector<std::int64_t> v(std::uniform_int_distribution<std::size_t>(0, 8)(rng));
        for (auto& x : v) x = std::uniform_int_distribution<int>(-4, 4)(rng);
        Store olds{{"a", vec(v)}};
        auto t = run(ctx, "heapsort", olds);
        ASSERT_TRUE(t.ok());
        for (const auto& st : t.steps) {
            if (st.depth != 0) continue;
            int s = p.find_situation(st.situation);
            ASSERT_TRUE(eval_bool(effective_invariant(p, s), st.store, olds, *ctx.theory)) << st.situation;
            for (std::size_t i = 0; i < p.transitions.size(); ++i) {
                if (p.transitions[i].source != s) continue;
                auto out = step_transition(ctx, "heapsort", static_cast<int>(i), st.store, olds);
                if (!out.enabled) continue;
                ASSERT_FALSE(out.violation) << p.transitions[i].label();
                EXPECT_TRUE(eval_bool(effective_invariant(p, p.transitions[i].target), out.vars, olds, *ctx.theory))
                    << p.transitions[i].label();
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 200u);
}

TEST(TraceOutput, JsonAndText) {
    auto ctx = testutil::load_corpus("heapsort_final");
    auto t = run(ctx, "heapsort", {{"a", vec({2, 1})}});
    auto j = nlohmann::json::parse(trace_json(t));
    EXPECT_EQ(j["procedure"], "heapsort");
    ASSERT_TRUE(j["steps"].is_array());
    EXPECT_EQ(j["steps"].size(), t.steps.size());
    EXPECT_EQ(j["final"]["a"], nlohmann::json::parse("[1, 2]"));
    std::string text = trace_text(t);
    EXPECT_NE(text.find("BuildHeap"), std::string::npos);
    EXPECT_NE(text.find("Post"), std::string::npos);
}
