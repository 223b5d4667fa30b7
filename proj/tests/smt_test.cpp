#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ibp/interpreter.hpp"
#include "ibp/smt.hpp"
#include "random_expr.hpp"
#include "test_util.hpp"

using namespace ibp;

namespace {

VC make_vc(std::vector<ExprPtr> ants, ExprPtr goal, std::map<std::string, SemType> symbols) {
    VC vc;
    vc.id = "test/S/t0#0/goal#1/consistency";
    vc.antecedents = std::move(ants);
    vc.consequent = std::move(goal);
    vc.symbols = std::move(symbols);
    return vc;
}

const std::map<std::string, SemType> kSyms = {
    {"k", SemType::Int}, {"n", SemType::Int}, {"m", SemType::Int}, {"i", SemType::Int}, {"a", SemType::Vector}};

}  // namespace

TEST(SExpr, ParsesAtomsListsStringsAndComments) {
    auto xs = parse_sexprs("sat ; comment\n((x 1) (|odd name| (- 2)) (s \"a\"\"b\"))");
    ASSERT_EQ(xs.size(), 2u);
    EXPECT_EQ(xs[0].atom, "sat");
    ASSERT_TRUE(xs[1].is_list);
    ASSERT_EQ(xs[1].list.size(), 3u);
    EXPECT_EQ(xs[1].list[0].to_string(), "(x 1)");
    EXPECT_EQ(xs[1].list[1].list[1].to_string(), "(- 2)");
}

TEST(SExpr, UnbalancedInputThrows) { EXPECT_THROW(parse_sexprs("((a b)"), Error); }

TEST(Protocol, UnsatIsProved) {
    VC vc = make_vc({}, ex::truth(), {});
    EXPECT_EQ(interpret_output("unsat\n", Encoding{}, vc).kind, VerdictKind::Proved);
}

TEST(Protocol, SatWithValuesIsRefutedWithModel) {
    VC vc = make_vc({}, ex::falsity(), {{"k", SemType::Int}, {"a", SemType::Vector}});
    Encoding enc;
    enc.symbol_of = {{"k", "k"}, {"a", "a"}};
    auto v = interpret_output("sat\n(((ibp.len a) 2) ((ibp.elem a 0) (- 3)) ((ibp.elem a 1) 4) (k 7))\n", enc, vc);
    ASSERT_EQ(v.kind, VerdictKind::Refuted);
    ASSERT_TRUE(v.model);
    EXPECT_FALSE(v.model->partial);
    EXPECT_EQ(v.model->values.at("k").i, 7);
    EXPECT_EQ(v.model->values.at("a").v, (std::vector<std::int64_t>{-3, 4}));
}

TEST(Protocol, UnknownAndGarbage) {
    VC vc = make_vc({}, ex::truth(), {});
    EXPECT_EQ(interpret_output("unknown\n", Encoding{}, vc).kind, VerdictKind::Unknown);
    EXPECT_EQ(interpret_output("(error \"line 3: bad\")\n", Encoding{}, vc).kind, VerdictKind::SolverError);
    EXPECT_EQ(interpret_output("", Encoding{}, vc).kind, VerdictKind::SolverError);
}

TEST(RunSolver, TimeoutKillsProcessAndYieldsUnknown) {
    SolverConfig cfg;
    cfg.command = "sleep 30";
    cfg.timeout_ms = 300;
    auto v = run_solver("(check-sat)\n", cfg);
    EXPECT_EQ(v.kind, VerdictKind::Unknown);
    EXPECT_EQ(v.reason, "timeout");
    EXPECT_LT(v.ms, 5000);
}

TEST(RunSolver, MissingCommandIsSolverError) {
    SolverConfig cfg;
    cfg.command = "/nonexistent/solver-binary";
    EXPECT_EQ(run_solver("(check-sat)\n", cfg).kind, VerdictKind::SolverError);
}

TEST(RunSolver, EnvironmentSelectsCommand) {
    ::setenv("IBP_SOLVER", "my-solver --flag", 1);
    EXPECT_EQ(SolverConfig::from_env().command, "my-solver --flag");
    ::unsetenv("IBP_SOLVER");
    EXPECT_EQ(SolverConfig::from_env().command, "z3 -in -smt2");
}

TEST(Encode, VariantBoundedBelowIsProved) {
    auto env = builtin_theory();
    std::map<std::string, SemType> syms{{"r", SemType::Nat}, {"n", SemType::Nat}};
    auto vc = make_vc({testutil::typed("r < n", syms, *env)}, testutil::typed("0 <= n - (r + 1)", syms, *env), syms);
    EXPECT_EQ(testutil::solve(vc, *env).kind, VerdictKind::Proved);
}

TEST(Encode, TrueEntailsFalseIsRefuted) {
    auto env = builtin_theory();
    auto v = testutil::solve(make_vc({ex::truth()}, ex::falsity(), {}), *env);
    EXPECT_EQ(v.kind, VerdictKind::Refuted);
}

TEST(Encode, Deterministic) {
    auto ctx = testutil::load_corpus("heapsort_final");
    auto vcs = generate_all(ctx);
    auto again = generate_all(testutil::load_corpus("heapsort_final"));
    ASSERT_EQ(vcs.size(), again.size());
    for (std::size_t i = 0; i < vcs.size(); ++i) {
        EXPECT_EQ(encode(vcs[i], *ctx.theory).script, encode(again[i], *ctx.theory).script) << vcs[i].id;
    }
}

TEST(Encode, PartitionGoalNeedsTheExtraLemmas) {
    auto ctx = testutil::load_corpus("heapsort_no_asserts");
    for (const auto& vc : generate_all(ctx)) {
        if (vc.id != "heapsort/TearHeap/t3#0/goal#11/consistency") continue;
        EXPECT_EQ(to_string(vc.consequent), "partitioned(a_1, k - 1)");
        std::string s = encode(vc, *ctx.theory).script;
        EXPECT_EQ(s.find("; lemma heap_max"), std::string::npos);
        EXPECT_EQ(s.find("; lemma perm_partitioned"), std::string::npos);
        EXPECT_NE(testutil::solve(vc, *ctx.theory, 5000).kind, VerdictKind::Proved);
        return;
    }
    FAIL() << "goal not generated";
}

TEST(CheckAll, EmptyListIsSuccess) {
    auto r = check_all({}, *builtin_theory(), testutil::solver());
    EXPECT_TRUE(r.results.empty());
    EXPECT_TRUE(r.all_proved());
}

TEST(CheckAll, CallbackSeesResultsInOrderAndDumpsScripts) {
    auto ctx = testutil::load_corpus("siftdown_fixed");
    auto vcs = generate_all(ctx);
    vcs.resize(12);
    auto dir = std::filesystem::temp_directory_path() / ("ibp_dump_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    SolverConfig cfg = testutil::solver();
    cfg.workers = 3;
    cfg.dump_dir = dir.string();
    std::vector<std::string> seen;
    auto report = check_all(vcs, *ctx.theory, cfg, [&](const VcResult& r) { seen.push_back(r.vc.id); });
    ASSERT_EQ(seen.size(), vcs.size());
    for (std::size_t i = 0; i < vcs.size(); ++i) EXPECT_EQ(seen[i], vcs[i].id);
    EXPECT_EQ(report.proved, 12);
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        ++files;
        std::string name = e.path().filename().string();
        EXPECT_EQ(name.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-"),
                  std::string::npos);
        EXPECT_EQ(e.path().extension(), ".smt2");
    }
    EXPECT_EQ(files, 12);
    std::ifstream in(dir / "siftdown_Pre_t0_0_goal_1_consistency.smt2");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), encode(vcs[0], *ctx.theory, cfg).script);
    std::filesystem::remove_all(dir);
}

// A refuted VC's model, replayed through the evaluator, satisfies the
// antecedents and falsifies the goal.
TEST(ModelReplay, RefutationsAreConfirmedByEvaluation) {
    auto env = builtin_theory();
    testutil::ExprGen gen(23);
    std::vector<VC> vcs;
    for (int round = 0; round < 150; ++round) {
        std::vector<ExprPtr> ants{gen.bool_expr(2)};
        if (gen.pick(2)) ants.push_back(gen.bool_expr(1));
        vcs.push_back(make_vc(ants, gen.bool_expr(2), kSyms));
        vcs.back().id = "replay/S/t0#0/goal#" + std::to_string(round) + "/consistency";
    }
    auto report = check_all(vcs, *env, testutil::solver(5000));
    int replayed = 0;
    for (const auto& r : report.results) {
        if (r.verdict.kind != VerdictKind::Refuted || !r.verdict.model || r.verdict.model->partial) continue;
        Store vars = r.verdict.model->values;
        if (vars.size() != kSyms.size()) continue;
        try {
            for (const auto& a : r.vc.antecedents) ASSERT_TRUE(eval_bool(a, vars, {}, *env)) << r.vc.id << to_string(a);
            ASSERT_FALSE(eval_bool(r.vc.consequent, vars, {}, *env)) << r.vc.id;
            ++replayed;
        } catch (const EvalError&) {
            // out-of-bounds reads have no runtime value
        }
    }
    EXPECT_GT(replayed, 20);
}
