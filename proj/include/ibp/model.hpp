#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ibp/diagnostics.hpp"
#include "ibp/expr.hpp"

namespace ibp {

class TheoryEnv;

struct Statement {
    enum class Kind { Guard, Assert, Assign, Call };

    Kind kind = Kind::Guard;
    ExprPtr expr;               // guard/assert condition, or assignment right-hand side
    std::string target;         // assigned variable, or callee name
    SemType target_type = SemType::Unknown;
    std::vector<ExprPtr> args;  // call arguments
    SourceSpan span;
};

std::string to_string(const Statement& s);

enum class SituationKind { Precondition, Intermediate, Postcondition };

struct Situation {
    std::string name;
    SituationKind kind = SituationKind::Intermediate;
    std::vector<ExprPtr> invariants;
    ExprPtr variant;  // may be null
    int parent = -1;
    std::vector<int> children;
    int depth = 0;
    bool implicit = false;  // the default `true` precondition
    SourceSpan span;
};

/// Hypothesis recorded where a choice splits control: the disjunction of the
/// alternatives' leading guards, assumed before statement `position`.
struct ChoiceHypothesis {
    std::size_t position = 0;
    ExprPtr expr;
};

/// One linear path through a (possibly branching) transition declaration.
struct Transition {
    int source = -1;
    int target = -1;
    std::vector<Statement> body;
    std::vector<ChoiceHypothesis> hypotheses;
    int decl = 0;    // index of the declaration in the procedure
    int branch = 0;  // path index within that declaration
    SourceSpan span;

    /// `t<decl>#<branch>`
    std::string label() const;
};

/// Statement tree of a transition as written: a prefix, then either a
/// choice between branches or a jump to `target`.
struct TransitionBlock {
    std::vector<Statement> stmts;
    std::vector<TransitionBlock> branches;
    int target = -1;
    SourceSpan span;
};

/// A transition as written, before branch desugaring.
struct TransitionDecl {
    int source = -1;
    TransitionBlock block;
    ExprPtr head_guard;  // conjunction of the leading guards, or null
    std::vector<int> paths;  // indices into Procedure::transitions
    SourceSpan span;
};

enum class ParamMode { Value, ValueResult };

struct Param {
    std::string name;
    SemType type = SemType::Unknown;
    ParamMode mode = ParamMode::Value;
    SourceSpan span;
};

struct Variable {
    std::string name;
    SemType type = SemType::Unknown;
    SourceSpan span;
};

struct Procedure {
    std::string name;
    std::vector<Param> params;
    std::vector<Variable> locals;
    std::vector<Situation> situations;
    std::vector<Transition> transitions;
    std::vector<TransitionDecl> decls;
    ExprPtr recursion_variant;  // may be null
    SourceSpan span;

    int precondition() const;
    std::vector<int> postconditions() const;
    int find_situation(const std::string& name) const;
    const Param* find_param(const std::string& name) const;
    /// Type of a parameter or local; Unknown if undeclared.
    SemType type_of(const std::string& name) const;
    bool is_valres(const std::string& name) const;
    std::vector<int> outgoing(int situation) const;
    /// `s` or one of its descendants.
    bool encloses(int outer, int inner) const;
};

struct StrategyLemma {
    std::string name;
    SourceSpan span;
};

struct VerificationContext {
    std::string name;
    std::string file;
    std::vector<Variable> constants;
    std::vector<std::string> imports;
    std::vector<StrategyLemma> strategy;
    std::vector<Procedure> procedures;
    std::shared_ptr<const TheoryEnv> theory;
    SourceSpan span;

    const Procedure* find_procedure(const std::string& name) const;
};

/// Own invariants of `s` and all its ancestors, outermost situation first.
std::vector<ExprPtr> effective_invariant_items(const Procedure& p, int s);
ExprPtr effective_invariant(const Procedure& p, int s);

}  // namespace ibp
