#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ibp/analysis.hpp"
#include "ibp/expr.hpp"
#include "ibp/model.hpp"

namespace ibp {

enum class VcKind { Consistency, Liveness, Termination, Safety, Recursion };

std::string_view to_string(VcKind k);

/// A sequent: the antecedents jointly entail the consequent.
struct VC {
    /// `proc/situation/transition/goal#n/kind`; transition is `t<d>#<b>`, `live` or `inv`.
    std::string id;
    VcKind kind = VcKind::Consistency;
    std::string procedure;
    std::string situation;
    std::string transition;
    int goal = 0;
    /// Most recent hypothesis first, i.e. antecedents[0] is printed as [-1].
    std::vector<ExprPtr> antecedents;
    ExprPtr consequent;
    /// Free symbols with their types: program variables, `x_0` entry values
    /// (keyed by old_symbol) and call results introduced by the generator.
    std::map<std::string, SemType> symbols;
    std::vector<SourceSpan> provenance;
    /// Short human description of where the goal comes from.
    std::string origin;

    /// antecedents => consequent as one closed-over-symbols formula.
    ExprPtr formula() const;
};

struct VcOptions {
    bool termination = true;
    bool liveness = true;
    bool safety = true;
    /// Only this procedure when non-empty.
    std::string procedure;
};

/// Weakest precondition of a statement list as a single formula. Call results
/// are universally quantified; assertions and callee preconditions are
/// asserted and then assumed. Safety obligations are not included.
ExprPtr wp(const VerificationContext& ctx, const Procedure& p, const std::vector<Statement>& body, const ExprPtr& post);

/// not wp(body)(false), with callees treated as miracle-free.
ExprPtr enabledness(const VerificationContext& ctx, const Procedure& p, const Transition& t);

/// Goals of one transition: consistency with every target conjunct plus its
/// termination, safety, assertion, call and recursion obligations.
std::vector<VC> vc_transition(const VerificationContext& ctx, const Procedure& p, int transition,
                              const TerminationPlan& plan, const VcOptions& opts = {});

/// Every transition leaving `situation`.
std::vector<VC> vc_consistency(const VerificationContext& ctx, const Procedure& p, int situation,
                               const TerminationPlan& plan, const VcOptions& opts = {});

/// Some outgoing transition is enabled in every state satisfying the invariant.
VC vc_liveness(const VerificationContext& ctx, const Procedure& p, int situation);

/// Well-definedness of a situation's invariants and variant.
std::vector<VC> vc_situation_safety(const VerificationContext& ctx, const Procedure& p, int situation);

/// Recursion-variant goals of every call inside the procedure's recursion cycle.
std::vector<VC> vc_recursion(const VerificationContext& ctx, const Procedure& p);

/// Every VC of the context in a fixed order. Throws DiagnosticError if the
/// analyses report errors.
std::vector<VC> generate_all(const VerificationContext& ctx, const VcOptions& opts = {});

/// Numbered-antecedent sequent layout with `|-------` before the goal.
std::string render(const VC& vc);

}  // namespace ibp
