#pragma once

#include <map>
#include <string>
#include <vector>

#include "ibp/diagnostics.hpp"
#include "ibp/expr.hpp"
#include "ibp/model.hpp"
#include "ibp/theory.hpp"

namespace ibp {

// ---------------------------------------------------------------------------
// Type checking and name resolution

struct Scope {
    const TheoryEnv* theory = nullptr;
    std::map<std::string, SemType> vars;
    /// Value-result parameters whose entry value may be written `<name>_0`.
    std::map<std::string, SemType> olds;
};

/// Resolves identifiers, normalises `heap(a, k)` to `heap(a, 0, k)` and
/// annotates every node with its type. Returns null after reporting errors.
ExprPtr typecheck_expr(const ExprPtr& raw, const Scope& scope, Diagnostics& diags);
/// As typecheck_expr, additionally requiring a Bool (or numeric) result.
ExprPtr typecheck_bool(const ExprPtr& raw, const Scope& scope, Diagnostics& diags);
ExprPtr typecheck_numeric(const ExprPtr& raw, const Scope& scope, Diagnostics& diags);

Scope procedure_scope(const VerificationContext& ctx, const Procedure& p);

/// Checks a statement in place against the procedure scope; `callees` gives
/// signatures of the context's procedures.
bool typecheck_statement(Statement& s, const Scope& scope, const Procedure& p,
                         const std::vector<Procedure>& callees, Diagnostics& diags);

// ---------------------------------------------------------------------------
// Graph analyses

/// LIVE001 (no precondition-to-postcondition path) and LIVE002 (intermediate
/// situation with no way out).
Diagnostics reachability_check(const Procedure& p);

/// LIVE003 for every guard that follows an assignment or call.
Diagnostics miracle_scan(const Procedure& p);

struct SccInfo {
    std::vector<int> members;
    std::vector<int> internal_transitions;
    std::vector<int> entries;  // members with an incoming transition from outside
    bool cyclic = false;
    int variant_situation = -1;  // carrier of the designated variant, or -1
};

/// Strongly connected components of the situation graph (Tarjan). Components
/// are listed in reverse topological order of the condensation.
std::vector<SccInfo> scc_decompose(const Procedure& p);

/// Raw SCC routine over an adjacency list; component id per node.
std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj, int& count);

/// How a transition must treat the variant of a loop it stays inside.
struct TerminationObligation {
    int carrier = -1;     // situation carrying the variant
    ExprPtr variant;      // variant expression
    bool strict = false;  // must decrease strictly (and stay >= 0); else must not increase
};

struct TerminationPlan {
    /// Obligations for each transition (indexed like Procedure::transitions).
    std::vector<std::vector<TerminationObligation>> per_transition;
    Diagnostics diagnostics;
};

/// Hierarchical variant assignment: in each cyclic component the variant on the
/// outermost member is designated; transitions re-entering it must decrease it,
/// other internal transitions must not increase it, and the remainder of the
/// component is analysed recursively. TERM001 for a cycle with no variant,
/// TERM002 for ambiguous designation, TERM004 for a variant outside any cycle.
TerminationPlan plan_termination(const Procedure& p);

/// Procedures in a call cycle with `name` (including itself when recursive).
std::vector<std::string> recursion_cycle(const VerificationContext& ctx, const std::string& name);
/// TERM003 for call cycles whose procedures lack recursion variants.
Diagnostics recursion_check(const VerificationContext& ctx);

/// All analysis diagnostics for a context, in procedure order.
Diagnostics analyze(const VerificationContext& ctx);

}  // namespace ibp
