#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibp/theory.hpp"
#include "ibp/value.hpp"
#include "ibp/vcgen.hpp"

namespace ibp {

// ---------------------------------------------------------------------------
// S-expressions, enough for solver output.

struct SExpr {
    std::string atom;  // empty for a list
    std::vector<SExpr> list;
    bool is_list = false;

    std::string to_string() const;
};

/// All top-level s-expressions in `text`. Throws Error on unbalanced input.
std::vector<SExpr> parse_sexprs(const std::string& text);

// ---------------------------------------------------------------------------

struct SolverConfig {
    /// Whitespace-separated command; the script is written to its stdin.
    std::string command = "z3 -in -smt2";
    int timeout_ms = 60000;
    std::string logic = "AUFLIA";
    std::optional<unsigned> seed;
    int workers = 1;
    /// When non-empty, every script is also written to `<dir>/<vc-id>.smt2`.
    std::string dump_dir;
    /// Vector elements requested per vector symbol when a model is retrieved.
    int model_elements = 16;

    /// `IBP_SOLVER` overrides the default command when set.
    static SolverConfig from_env();
};

struct Encoding {
    std::string script;
    /// Program symbol (as in VC::symbols) to solver symbol.
    std::map<std::string, std::string> symbol_of;
};

/// Validity of the VC as unsatisfiability of antecedents plus negated goal.
/// Transparent definitions are expanded; opaque ones are declared and only
/// constrained by their refinement and the active lemmas.
Encoding encode(const VC& vc, const TheoryEnv& env, const SolverConfig& cfg = {});

/// Transparent definitions expanded away, recursively.
ExprPtr expand_definitions(const ExprPtr& e, const TheoryEnv& env);

enum class VerdictKind { Proved, Refuted, Unknown, SolverError };

std::string_view to_string(VerdictKind k);

struct Model {
    Store values;
    /// Vectors longer than the retrieved prefix, or symbols that did not decode.
    bool partial = false;
    std::string raw;
};

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::optional<Model> model;  // Refuted only, when the solver supplied one
    std::string reason;          // Unknown / SolverError detail
    double ms = 0;
};

/// Runs one solver process. Exceeding the timeout kills it and yields Unknown("timeout").
Verdict run_solver(const std::string& script, const SolverConfig& cfg);

/// Interprets solver output given the symbol table of the script.
Verdict interpret_output(const std::string& out, const Encoding& enc, const VC& vc);

struct VcResult {
    VC vc;
    Verdict verdict;
};

struct Report {
    std::vector<VcResult> results;
    int proved = 0, refuted = 0, unknown = 0, errors = 0;

    bool all_proved() const { return refuted == 0 && unknown == 0 && errors == 0; }
};

/// Checks every VC using up to cfg.workers solver processes. `on_result` sees
/// results in VC order as soon as each prefix is complete.
Report check_all(const std::vector<VC>& vcs, const TheoryEnv& env, const SolverConfig& cfg,
                 const std::function<void(const VcResult&)>& on_result = {});

}  // namespace ibp
