#include <algorithm>
#include <functional>
#include <set>

#include "ibp/analysis.hpp"

namespace ibp {

namespace {

std::vector<std::vector<int>> situation_graph(const Procedure& p) {
    std::vector<std::vector<int>> adj(p.situations.size());
    for (const auto& t : p.transitions) adj[t.source].push_back(t.target);
    return adj;
}

/// Variables a transition body may change. Every plain variable passed to a
/// call counts, whatever the callee's parameter modes.
std::set<std::string> modified(const Transition& t) {
    std::set<std::string> out;
    for (const auto& s : t.body) {
        if (s.kind == Statement::Kind::Assign) {
            out.insert(s.target);
        } else if (s.kind == Statement::Kind::Call) {
            for (const auto& a : s.args) {
                if (a->kind == Expr::Kind::Var) out.insert(a->name);
            }
        }
    }
    return out;
}

bool touches(const ExprPtr& e, const std::set<std::string>& vars) {
    for (const auto& v : free_vars(e)) {
        if (vars.count(v)) return true;
    }
    return false;
}

void plan_component(const Procedure& p, const std::vector<int>& members, TerminationPlan& plan,
                    std::set<int>& carriers) {
    std::set<int> in(members.begin(), members.end());
    std::vector<int> internal;
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        const auto& t = p.transitions[i];
        if (in.count(t.source) && in.count(t.target)) internal.push_back(static_cast<int>(i));
    }
    if (internal.empty()) return;

    int min_depth = -1;
    std::vector<int> candidates;
    for (int s : members) {
        if (!p.situations[s].variant) continue;
        int d = p.situations[s].depth;
        if (min_depth < 0 || d < min_depth) {
            min_depth = d;
            candidates.clear();
        }
        if (d == min_depth) candidates.push_back(s);
    }
    std::string names;
    for (int s : members) names += (names.empty() ? "" : ", ") + p.situations[s].name;
    if (candidates.empty()) {
        plan.diagnostics.push_back(make_warning(
            "TERM001", "procedure '" + p.name + "' may not be terminating: cycle through {" + names + "} has no variant",
            p.situations[members.front()].span));
        return;
    }
    if (candidates.size() > 1) {
        std::string vs;
        for (int s : candidates) vs += (vs.empty() ? "" : ", ") + p.situations[s].name;
        plan.diagnostics.push_back(make_error(
            "TERM002", "ambiguous variant for cycle through {" + names + "}: {" + vs + "} all declare one at the same depth",
            p.situations[candidates[1]].span));
        return;
    }
    int carrier = candidates.front();
    carriers.insert(carrier);
    ExprPtr v = p.situations[carrier].variant;
    for (int ti : internal) {
        const auto& t = p.transitions[ti];
        if (t.target == carrier) {
            plan.per_transition[ti].push_back({carrier, v, true});
        } else if (touches(v, modified(t))) {
            plan.per_transition[ti].push_back({carrier, v, false});
        }
    }

    // Cycles avoiding the carrier need their own argument.
    std::vector<int> rest;
    for (int s : members) {
        if (s != carrier) rest.push_back(s);
    }
    if (rest.empty()) return;
    std::vector<int> local(p.situations.size(), -1);
    for (std::size_t i = 0; i < rest.size(); ++i) local[rest[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(rest.size());
    std::vector<bool> self(rest.size(), false);
    for (int ti : internal) {
        const auto& t = p.transitions[ti];
        if (local[t.source] < 0 || local[t.target] < 0) continue;
        adj[local[t.source]].push_back(local[t.target]);
        if (t.source == t.target) self[local[t.source]] = true;
    }
    int count = 0;
    std::vector<int> comp = tarjan_scc(adj, count);
    std::vector<std::vector<int>> groups(count);
    for (std::size_t i = 0; i < rest.size(); ++i) groups[comp[i]].push_back(rest[i]);
    for (auto& g : groups) {
        if (g.size() > 1 || self[local[g.front()]]) plan_component(p, g, plan, carriers);
    }
}

}  // namespace

std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj, int& count) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int next = 0;
    count = 0;
    // Explicit DFS stack of (node, next edge) to avoid recursion depth limits.
    std::vector<std::pair<int, std::size_t>> work;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        work.push_back({root, 0});
        while (!work.empty()) {
            auto& [v, e] = work.back();
            if (e == 0 && index[v] < 0) {
                index[v] = low[v] = next++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (e < adj[v].size()) {
                int w = adj[v][e++];
                if (index[w] < 0) {
                    work.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            int done = v;
            work.pop_back();
            if (!work.empty()) {
                int u = work.back().first;
                low[u] = std::min(low[u], low[done]);
            }
        }
    }
    return comp;
}

Diagnostics reachability_check(const Procedure& p) {
    Diagnostics out;
    auto adj = situation_graph(p);
    std::vector<bool> seen(p.situations.size(), false);
    std::vector<int> todo;
    int pre = p.precondition();
    if (pre >= 0) {
        seen[pre] = true;
        todo.push_back(pre);
    }
    while (!todo.empty()) {
        int s = todo.back();
        todo.pop_back();
        for (int t : adj[s]) {
            if (!seen[t]) {
                seen[t] = true;
                todo.push_back(t);
            }
        }
    }
    bool reached = false;
    for (int q : p.postconditions()) reached = reached || seen[q];
    if (!reached) {
        out.push_back(make_warning("LIVE001",
                                   "procedure '" + p.name + "' is not live: no postcondition is reachable from the precondition",
                                   p.span));
    }
    std::vector<bool> targeted(p.situations.size(), false);
    for (const auto& t : p.transitions) targeted[t.target] = true;
    for (std::size_t i = 0; i < p.situations.size(); ++i) {
        const auto& s = p.situations[i];
        if (s.kind != SituationKind::Intermediate || !adj[i].empty()) continue;
        // A pure container is never entered directly.
        if (!s.children.empty() && !targeted[i]) continue;
        out.push_back(make_warning("LIVE002", "situation '" + s.name + "' has no outgoing transition", s.span));
    }
    return out;
}

Diagnostics miracle_scan(const Procedure& p) {
    Diagnostics out;
    std::function<void(const TransitionBlock&, bool)> scan = [&](const TransitionBlock& b, bool changed) {
        for (const auto& s : b.stmts) {
            if (s.kind == Statement::Kind::Assign || s.kind == Statement::Kind::Call) {
                changed = true;
            } else if (s.kind == Statement::Kind::Guard && changed) {
                out.push_back(make_warning("LIVE003",
                                           "guard [" + to_string(s.expr) +
                                               "] follows a state change and is treated as an assumption; the "
                                               "transition may not be live",
                                           s.span));
            }
        }
        for (const auto& br : b.branches) scan(br, changed);
    };
    for (const auto& d : p.decls) scan(d.block, false);
    return out;
}

std::vector<SccInfo> scc_decompose(const Procedure& p) {
    auto adj = situation_graph(p);
    int count = 0;
    std::vector<int> comp = tarjan_scc(adj, count);
    std::vector<SccInfo> out(count);
    for (std::size_t i = 0; i < p.situations.size(); ++i) out[comp[i]].members.push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < p.transitions.size(); ++i) {
        const auto& t = p.transitions[i];
        if (comp[t.source] == comp[t.target]) {
            out[comp[t.source]].internal_transitions.push_back(static_cast<int>(i));
        } else {
            auto& entries = out[comp[t.target]].entries;
            if (std::find(entries.begin(), entries.end(), t.target) == entries.end()) entries.push_back(t.target);
        }
    }
    for (auto& c : out) {
        c.cyclic = !c.internal_transitions.empty();
        std::sort(c.entries.begin(), c.entries.end());
        int best = -1;
        bool tie = false;
        for (int s : c.members) {
            if (!p.situations[s].variant) continue;
            if (best < 0 || p.situations[s].depth < p.situations[best].depth) {
                best = s;
                tie = false;
            } else if (p.situations[s].depth == p.situations[best].depth) {
                tie = true;
            }
        }
        c.variant_situation = tie ? -1 : best;
    }
    return out;
}

TerminationPlan plan_termination(const Procedure& p) {
    TerminationPlan plan;
    plan.per_transition.resize(p.transitions.size());
    std::set<int> carriers;
    for (const auto& c : scc_decompose(p)) {
        if (c.cyclic) plan_component(p, c.members, plan, carriers);
    }
    for (std::size_t i = 0; i < p.situations.size(); ++i) {
        const auto& s = p.situations[i];
        if (s.variant && !carriers.count(static_cast<int>(i))) {
            plan.diagnostics.push_back(make_warning(
                "TERM004", "variant of situation '" + s.name + "' is unused: no cycle is closed through it", s.span));
        }
    }
    return plan;
}

namespace {

struct CallGraph {
    std::vector<std::vector<int>> adj;
    std::vector<int> comp;
    std::vector<bool> self;
};

CallGraph call_graph(const VerificationContext& ctx) {
    CallGraph g;
    const std::size_t n = ctx.procedures.size();
    g.adj.resize(n);
    g.self.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& t : ctx.procedures[i].transitions) {
            for (const auto& s : t.body) {
                if (s.kind != Statement::Kind::Call) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (ctx.procedures[j].name != s.target) continue;
                    g.adj[i].push_back(static_cast<int>(j));
                    if (j == i) g.self[i] = true;
                }
            }
        }
    }
    int count = 0;
    g.comp = tarjan_scc(g.adj, count);
    return g;
}

}  // namespace

std::vector<std::string> recursion_cycle(const VerificationContext& ctx, const std::string& name) {
    std::vector<std::string> out;
    int idx = -1;
    for (std::size_t i = 0; i < ctx.procedures.size(); ++i) {
        if (ctx.procedures[i].name == name) idx = static_cast<int>(i);
    }
    if (idx < 0) return out;
    CallGraph g = call_graph(ctx);
    for (std::size_t j = 0; j < ctx.procedures.size(); ++j) {
        if (g.comp[j] != g.comp[idx]) continue;
        if (static_cast<int>(j) == idx && !g.self[j]) {
            bool multi = false;
            for (std::size_t k = 0; k < ctx.procedures.size(); ++k) multi = multi || (k != j && g.comp[k] == g.comp[j]);
            if (!multi) continue;
        }
        out.push_back(ctx.procedures[j].name);
    }
    return out;
}

Diagnostics recursion_check(const VerificationContext& ctx) {
    Diagnostics out;
    for (const auto& p : ctx.procedures) {
        auto cycle = recursion_cycle(ctx, p.name);
        if (cycle.empty() || p.recursion_variant) continue;
        std::string names;
        for (const auto& c : cycle) names += (names.empty() ? "" : ", ") + c;
        out.push_back(make_warning("TERM003",
                                   "procedure '" + p.name + "' may not be terminating: it is recursive through {" + names +
                                       "} without a recursion variant",
                                   p.span));
    }
    return out;
}

Diagnostics analyze(const VerificationContext& ctx) {
    Diagnostics out;
    for (const auto& p : ctx.procedures) {
        for (auto&& d : reachability_check(p)) out.push_back(std::move(d));
        for (auto&& d : miracle_scan(p)) out.push_back(std::move(d));
        for (auto&& d : plan_termination(p).diagnostics) out.push_back(std::move(d));
    }
    for (auto&& d : recursion_check(ctx)) out.push_back(std::move(d));
    return out;
}

}  // namespace ibp
