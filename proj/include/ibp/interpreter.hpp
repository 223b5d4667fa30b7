#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ibp/diagnostics.hpp"
#include "ibp/model.hpp"
#include "ibp/theory.hpp"
#include "ibp/value.hpp"

namespace ibp {

// ---------------------------------------------------------------------------
// Evaluation

struct EvalError : Error {
    enum class Kind { OutOfBounds, UnboundedQuantifier, DivByZero, Domain, Uninterpreted, Unbound };
    Kind kind;
    SourceSpan span;

    EvalError(Kind k, const std::string& msg, SourceSpan s) : Error(msg), kind(k), span(s) {}
};

/// Ground evaluation of `e`. `olds` holds entry values of value-result parameters.
/// Quantifiers must have a range recoverable from their guards (or a binder
/// type like `index(a)`); otherwise EvalError::UnboundedQuantifier.
Value eval_expr(const ExprPtr& e, const Store& vars, const Store& olds, const TheoryEnv& env);
bool eval_bool(const ExprPtr& e, const Store& vars, const Store& olds, const TheoryEnv& env);

/// Multiset equality of two vectors.
bool multiset_equal(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

// ---------------------------------------------------------------------------
// Execution

enum class ViolationKind { Precondition, Invariant, Postcondition, Liveness, Assert, Variant, Safety, StepLimit };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind = ViolationKind::Invariant;
    std::string procedure;
    std::string situation;   // where it was detected
    std::string transition;  // label of the transition being executed, if any
    std::string message;
    SourceSpan span;
    Store store;
};

enum class Policy { FirstEnabled, Random };

struct RunOptions {
    Policy policy = Policy::FirstEnabled;
    std::uint64_t seed = 0;
    std::size_t step_limit = 1000000;  // situation arrivals, callees included
    bool record = true;                // keep per-step snapshots
};

struct VariantSample {
    std::string carrier;
    std::int64_t before = 0;
    std::int64_t after = 0;
    bool strict = false;
};

struct TraceStep {
    int depth = 0;  // call nesting, 0 for the top-level procedure
    std::string procedure;
    std::string situation;
    Store store;             // on arrival
    std::string transition;  // label of the transition leaving it, empty at the end
    std::vector<VariantSample> variants;  // obligations checked on that transition
};

struct Trace {
    std::string procedure;
    Policy policy = Policy::FirstEnabled;
    std::uint64_t seed = 0;
    Store inputs;
    std::vector<TraceStep> steps;
    Store final_store;
    std::optional<Violation> violation;
    std::size_t arrivals = 0;

    bool ok() const { return !violation; }
};

/// Executes `procedure` from its precondition. Inputs must bind every
/// parameter (and any context constants used); locals start at 0, false or [].
/// Throws Error for unknown procedures or malformed inputs.
Trace run(const VerificationContext& ctx, const std::string& procedure, const Store& inputs,
          const RunOptions& opts = {});

/// Result of executing a single transition path.
struct StepOutcome {
    bool enabled = true;  // false when a guard failed
    std::optional<Violation> violation;
    Store vars;  // store after the path (meaningful when enabled without violation)
};

/// Executes transition `transition` of `procedure` once from `vars`, running
/// callees to completion. No invariant or variant is checked.
StepOutcome step_transition(const VerificationContext& ctx, const std::string& procedure, int transition,
                            const Store& vars, const Store& olds, const RunOptions& opts = {});

std::string trace_text(const Trace& t);
std::string trace_json(const Trace& t);

}  // namespace ibp
