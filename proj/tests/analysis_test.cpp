#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "ibp/analysis.hpp"
#include "ibp/vcgen.hpp"
#include "test_util.hpp"

using namespace ibp;

namespace {

std::set<std::string> codes(const Diagnostics& ds) {
    std::set<std::string> s;
    for (const auto& d : ds) s.insert(d.code);
    return s;
}

int count_code(const Diagnostics& ds, const std::string& code) {
    int n = 0;
    for (const auto& d : ds) n += d.code == code;
    return n;
}

std::string with_body(const std::string& body) {
    return R"(
context c {
  import sorting;
  procedure siftdown(m: nat, n: nat, valres a: vector) {
    pre { m <= n and n <= len(a); }
    post { true; }
    transition to Post { }
  }
  procedure p(valres a: vector) {
    var k: nat;
    post { true; }
    situation S { k <= len(a); }
    transition to S { k := 0; }
    transition from S to Post { )" +
           body + R"( }
  }
}
)";
}

/// Kosaraju, written independently of the library's Tarjan.
std::vector<int> kosaraju(const std::vector<std::vector<int>>& adj, int& count) {
    int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> radj(n);
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) radj[v].push_back(u);
    }
    std::vector<int> order;
    std::vector<bool> seen(n, false);
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
        seen[s] = true;
        while (!stack.empty()) {
            auto& [u, i] = stack.back();
            if (i < adj[u].size()) {
                int v = adj[u][i++];
                if (!seen[v]) {
                    seen[v] = true;
                    stack.push_back({v, 0});
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(n, -1);
    count = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] >= 0) continue;
        std::vector<int> todo{*it};
        comp[*it] = count;
        while (!todo.empty()) {
            int u = todo.back();
            todo.pop_back();
            for (int v : radj[u]) {
                if (comp[v] < 0) {
                    comp[v] = count;
                    todo.push_back(v);
                }
            }
        }
        ++count;
    }
    return comp;
}

}  // namespace

TEST(Typecheck, FloorOfHalfLengthIsNat) {
    auto ctx = testutil::load_corpus("heapsort_final");
    const Procedure& p = *ctx.find_procedure("heapsort");
    const Transition& init = p.transitions[p.outgoing(p.precondition()).front()];
    ASSERT_EQ(init.body.size(), 1u);
    EXPECT_EQ(init.body[0].kind, Statement::Kind::Assign);
    EXPECT_EQ(init.body[0].expr->type, SemType::Nat);
}

TEST(Typecheck, VectorPlusOneIsTypeError) {
    auto r = parse_context(with_body("a := a + 1;"), "t.ibp");
    EXPECT_FALSE(r.ok());
    bool type_error = false;
    for (const auto& d : r.diagnostics) type_error |= d.is_error() && d.code.rfind("TYPE", 0) == 0;
    EXPECT_TRUE(type_error);
}

TEST(Typecheck, PermIsBool) {
    auto env = builtin_theory();
    auto e = testutil::typed("perm(a, a_0)", {{"a", SemType::Vector}}, *env, {{"a", SemType::Vector}});
    EXPECT_EQ(e->type, SemType::Bool);
    EXPECT_EQ(e->args[1]->kind, Expr::Kind::Old);
}

TEST(Typecheck, Deterministic) {
    for (const char* name : {"heapsort_final", "selection_sort"}) {
        auto a = testutil::load_corpus(name);
        auto b = testutil::load_corpus(name);
        std::function<void(const ExprPtr&, const ExprPtr&)> cmp = [&](const ExprPtr& x, const ExprPtr& y) {
            ASSERT_EQ(x->type, y->type) << to_string(x);
            ASSERT_EQ(x->args.size(), y->args.size());
            for (std::size_t i = 0; i < x->args.size(); ++i) cmp(x->args[i], y->args[i]);
        };
        for (std::size_t pi = 0; pi < a.procedures.size(); ++pi) {
            const auto& pa = a.procedures[pi];
            const auto& pb = b.procedures[pi];
            for (std::size_t s = 0; s < pa.situations.size(); ++s) {
                for (std::size_t i = 0; i < pa.situations[s].invariants.size(); ++i) {
                    cmp(pa.situations[s].invariants[i], pb.situations[s].invariants[i]);
                }
            }
            for (std::size_t t = 0; t < pa.transitions.size(); ++t) {
                for (std::size_t i = 0; i < pa.transitions[t].body.size(); ++i) {
                    if (pa.transitions[t].body[i].expr) cmp(pa.transitions[t].body[i].expr, pb.transitions[t].body[i].expr);
                }
            }
        }
    }
}

TEST(Reachability, SkeletonIsNotLive) {
    auto ctx = testutil::load_corpus("heapsort_skeleton");
    auto ds = reachability_check(ctx.procedures.front());
    EXPECT_EQ(count_code(ds, "LIVE001"), 1);
    EXPECT_EQ(count_code(ds, "LIVE002"), 2);  // BuildHeap and TearHeap
}

TEST(Reachability, AcyclicStageReachesPost) {
    auto ctx = testutil::load_corpus("heapsort_acyclic");
    auto ds = reachability_check(*ctx.find_procedure("heapsort"));
    EXPECT_EQ(count_code(ds, "LIVE001"), 0);
    EXPECT_EQ(count_code(ds, "LIVE002"), 0);
}

TEST(Reachability, SinglePreToPostHasNoWarnings) {
    auto ctx = testutil::load_text("context c { procedure p() { post { true; } transition to Post { } } }");
    EXPECT_TRUE(reachability_check(ctx.procedures.front()).empty());
}

// LIVE001 against explicit path enumeration on random flat diagrams.
TEST(Reachability, AgreesWithPathEnumeration) {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 300; ++round) {
        int n = std::uniform_int_distribution<int>(1, 12)(rng);
        int edges = std::uniform_int_distribution<int>(0, 2 * n)(rng);
        // nodes: 0 = Pre, 1 = Post, 2.. = S2..
        std::vector<std::pair<int, int>> es;
        std::ostringstream src;
        src << "context c { procedure p() {\n post { true; }\n";
        for (int i = 2; i < n + 2; ++i) src << " situation S" << i << " { }\n";
        auto name = [](int v) { return v == 0 ? std::string("Pre") : v == 1 ? std::string("Post") : "S" + std::to_string(v); };
        for (int e = 0; e < edges; ++e) {
            int u = std::uniform_int_distribution<int>(0, n + 1)(rng);
            int v = std::uniform_int_distribution<int>(1, n + 1)(rng);
            if (u == 1) continue;  // nothing leaves Post
            es.push_back({u, v});
            src << " transition from " << name(u) << " to " << name(v) << " { }\n";
        }
        src << "} }\n";
        auto ctx = testutil::load_text(src.str());
        // Enumerate simple paths from Pre; the postcondition is live iff one ends at Post.
        std::vector<bool> on_path(n + 2, false);
        bool found = false;
        std::function<void(int)> walk = [&](int u) {
            if (u == 1) {
                found = true;
                return;
            }
            on_path[u] = true;
            for (auto [a, b] : es) {
                if (a == u && !on_path[b] && !found) walk(b);
            }
            on_path[u] = false;
        };
        walk(0);
        auto ds = reachability_check(ctx.procedures.front());
        EXPECT_EQ(count_code(ds, "LIVE001") == 0, found) << src.str();
        int dead = 0;
        for (int s = 2; s < n + 2; ++s) {
            bool out = false;
            for (auto [a, b] : es) out |= a == s;
            dead += !out;
        }
        EXPECT_EQ(count_code(ds, "LIVE002"), dead) << src.str();
    }
}

TEST(Scc, SiftSelfLoopIsOneCyclicComponent) {
    auto ctx = testutil::load_corpus("siftdown_bug");
    const Procedure& p = ctx.procedures.front();
    int sift = p.find_situation("Sift");
    int cyclic = 0;
    for (const auto& c : scc_decompose(p)) {
        if (!c.cyclic) continue;
        ++cyclic;
        EXPECT_EQ(c.members, std::vector<int>{sift});
        EXPECT_EQ(c.variant_situation, sift);
        EXPECT_EQ(to_string(p.situations[sift].variant), "n - k");
    }
    EXPECT_EQ(cyclic, 1);
}

TEST(Scc, HeapsortLoopsAreTwoSingletonComponents) {
    auto ctx = testutil::load_corpus("heapsort_final");
    const Procedure& p = *ctx.find_procedure("heapsort");
    std::set<std::string> loops;
    for (const auto& c : scc_decompose(p)) {
        if (!c.cyclic) continue;
        ASSERT_EQ(c.members.size(), 1u);
        ASSERT_GE(c.variant_situation, 0);
        loops.insert(p.situations[c.members[0]].name);
        EXPECT_EQ(to_string(p.situations[c.variant_situation].variant), "k");
    }
    EXPECT_EQ(loops, (std::set<std::string>{"BuildHeap", "TearHeap"}));
}

TEST(Scc, AcyclicDiagramHasOnlySingletons) {
    auto ctx = testutil::load_corpus("heapsort_acyclic");
    const Procedure& p = *ctx.find_procedure("heapsort");
    for (const auto& c : scc_decompose(p)) {
        EXPECT_EQ(c.members.size(), 1u);
        EXPECT_FALSE(c.cyclic);
    }
    EXPECT_EQ(count_code(plan_termination(p).diagnostics, "TERM001"), 0);
}

TEST(Scc, TarjanAgreesWithKosaraju) {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 200; ++round) {
        int n = std::uniform_int_distribution<int>(1, 200)(rng);
        double density = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        std::vector<std::vector<int>> adj(n);
        int m = static_cast<int>(density * n);
        for (int e = 0; e < m; ++e) {
            adj[std::uniform_int_distribution<int>(0, n - 1)(rng)].push_back(std::uniform_int_distribution<int>(0, n - 1)(rng));
        }
        int ct = 0, ck = 0;
        auto t = tarjan_scc(adj, ct);
        auto k = kosaraju(adj, ck);
        ASSERT_EQ(ct, ck);
        ASSERT_EQ(t.size(), static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u) {
            ASSERT_GE(t[u], 0);
            ASSERT_LT(t[u], ct);
            for (int v = 0; v < n; ++v) ASSERT_EQ(t[u] == t[v], k[u] == k[v]);
        }
        // Reverse topological order: edges never go to a later component.
        for (int u = 0; u < n; ++u) {
            for (int v : adj[u]) EXPECT_GE(t[u], t[v]);
        }
    }
}

TEST(Scc, PartitionOfCorpusSituations) {
    for (const char* name : {"selection_sort", "heapsort_final", "siftdown_fixed"}) {
        auto ctx = testutil::load_corpus(name);
        for (const auto& p : ctx.procedures) {
            std::vector<int> seen(p.situations.size(), 0);
            for (const auto& c : scc_decompose(p)) {
                for (int m : c.members) ++seen[m];
            }
            for (int s : seen) EXPECT_EQ(s, 1);
        }
    }
}

TEST(Termination, MissingVariantIsReported) {
    auto ctx = testutil::load_corpus("partial");
    auto plan = plan_termination(ctx.procedures.front());
    EXPECT_EQ(count_code(plan.diagnostics, "TERM001"), 1);
}

// Removing every transition with a strict obligation breaks every cycle.
TEST(Termination, StrictTransitionsCutEveryCycle) {
    for (const char* name : {"selection_sort", "heapsort_final", "siftdown_fixed", "siftdown_bug"}) {
        auto ctx = testutil::load_corpus(name);
        for (const auto& p : ctx.procedures) {
            auto plan = plan_termination(p);
            ASSERT_FALSE(has_errors(plan.diagnostics));
            std::vector<std::vector<int>> adj(p.situations.size());
            for (std::size_t t = 0; t < p.transitions.size(); ++t) {
                bool strict = false;
                for (const auto& ob : plan.per_transition[t]) strict |= ob.strict;
                if (!strict) adj[p.transitions[t].source].push_back(p.transitions[t].target);
            }
            int count = 0;
            auto comp = tarjan_scc(adj, count);
            for (std::size_t u = 0; u < adj.size(); ++u) {
                for (int v : adj[u]) EXPECT_NE(comp[u], comp[v]) << name << " " << p.name;
            }
        }
    }
}

// Termination obligations appear only on transitions inside a cyclic component.
TEST(Termination, ObligationsStayInsideCycles) {
    for (const char* name : {"selection_sort", "heapsort_final", "siftdown_fixed"}) {
        auto ctx = testutil::load_corpus(name);
        for (const auto& p : ctx.procedures) {
            auto plan = plan_termination(p);
            std::vector<int> comp(p.situations.size());
            std::vector<bool> cyclic;
            int id = 0;
            for (const auto& c : scc_decompose(p)) {
                for (int m : c.members) comp[m] = id;
                cyclic.push_back(c.cyclic);
                ++id;
            }
            for (std::size_t t = 0; t < p.transitions.size(); ++t) {
                const auto& tr = p.transitions[t];
                bool inside = comp[tr.source] == comp[tr.target] && cyclic[comp[tr.source]];
                if (!inside) EXPECT_TRUE(plan.per_transition[t].empty()) << name << " " << tr.label();
                if (inside && tr.source == tr.target) EXPECT_FALSE(plan.per_transition[t].empty()) << tr.label();
            }
            auto vcs = generate_all(ctx, {});
            for (const auto& vc : vcs) {
                if (vc.kind != VcKind::Termination || vc.procedure != p.name) continue;
                bool ok = false;
                for (const auto& tr : p.transitions) {
                    if (tr.label() == vc.transition) ok = comp[tr.source] == comp[tr.target];
                }
                EXPECT_TRUE(ok) << vc.id;
            }
        }
    }
}

TEST(MiracleScan, GuardInHeadIsFine) {
    auto ctx = testutil::load_corpus("heapsort_final");
    EXPECT_EQ(count_code(miracle_scan(*ctx.find_procedure("heapsort")), "LIVE003"), 0);
}

TEST(MiracleScan, GuardAfterAssignmentWarns) {
    auto r = parse_context(with_body("k := k + 1; [a[k] > 0];"), "t.ibp");
    ASSERT_TRUE(r.context);
    const Procedure& p = *r.context->find_procedure("p");
    auto ds = miracle_scan(p);
    EXPECT_EQ(count_code(ds, "LIVE003"), 1);
    EXPECT_FALSE(ds.front().is_error());
}

TEST(MiracleScan, AssignmentsOnlyIsFine) {
    auto r = parse_context(with_body("k := 0; a := a;"), "t.ibp");
    ASSERT_TRUE(r.context);
    EXPECT_TRUE(miracle_scan(*r.context->find_procedure("p")).empty());
}

TEST(Recursion, NonRecursiveCallHasEmptyCycle) {
    auto ctx = testutil::load_corpus("heapsort_final");
    EXPECT_TRUE(recursion_cycle(ctx, "heapsort").empty());
    EXPECT_TRUE(codes(recursion_check(ctx)).empty());
}
