#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ibp/diagnostics.hpp"
#include "ibp/expr.hpp"

namespace ibp {

struct FuncParam {
    std::string name;
    SemType type = SemType::Unknown;
    /// Extra domain restriction over earlier parameters (`index(a)`, `upto(e)`); may be null.
    ExprPtr domain;
};

struct FuncDef {
    std::string name;
    std::vector<FuncParam> params;
    SemType result = SemType::Unknown;
    ExprPtr body;          // null for uninterpreted and oracle-backed functions
    bool opaque = false;   // never expanded in solver scripts
    std::string oracle;    // runtime evaluation hook for opaque definitions without body
    /// Property of the result, phrased over the parameters and `result_var`; may be null.
    ExprPtr refinement;
    std::string result_var;
    std::string theory;
    SourceSpan span;

    bool uninterpreted() const { return !body && oracle.empty(); }
    std::size_t arity() const { return params.size(); }
    /// Conjunction of parameter domain predicates (nat parameters included), over param names.
    ExprPtr domain() const;
};

struct Lemma {
    std::string name;
    ExprPtr statement;
    /// Each entry is one multi-pattern over the lemma's leading universal variables.
    std::vector<std::vector<ExprPtr>> triggers;
    std::string theory;
    SourceSpan span;
};

class TheoryEnv {
public:
    const FuncDef* find(const std::string& name, std::size_t arity) const;
    bool has_function(const std::string& name) const;
    std::vector<const FuncDef*> overloads(const std::string& name) const;
    const Lemma* find_lemma(const std::string& name) const;

    const std::vector<FuncDef>& functions() const { return functions_; }
    const std::vector<Lemma>& lemmas() const { return lemmas_; }
    const std::vector<std::string>& active() const { return active_; }
    std::vector<const Lemma*> active_lemmas() const;
    const std::vector<std::string>& loaded() const { return loaded_; }

    /// Returns false (and leaves the env unchanged) on a duplicate name/arity.
    bool add_function(FuncDef f);
    bool add_lemma(Lemma l);
    Lemma* mutable_lemma(const std::string& name);
    void set_active(std::vector<std::string> names) { active_ = std::move(names); }
    void mark_loaded(const std::string& theory) { loaded_.push_back(theory); }
    bool is_loaded(const std::string& theory) const;

private:
    std::vector<FuncDef> functions_;
    std::vector<Lemma> lemmas_;
    std::vector<std::string> active_;
    std::vector<std::string> loaded_;
};

/// Source of the built-in `vector` and `sorting` theories in `.ibt` syntax.
const std::string& builtin_theory_source();

/// Built-in definitions and lemma library; no lemma active.
std::shared_ptr<const TheoryEnv> builtin_theory();

/// Parses `.ibt` text and adds its declarations to `env`.
void load_theory_text(TheoryEnv& env, const std::string& text, const std::string& file, Diagnostics& diags);

/// Builtin theory extended by every import that resolves to `<dir>/<name>.ibt`,
/// with `strategy` selecting the active lemmas. Names `vector` and `sorting`
/// need no file. Unknown lemmas and unresolvable imports are errors.
std::shared_ptr<const TheoryEnv> load_theory(const std::string& dir, const std::vector<std::string>& imports,
                                             const std::vector<std::pair<std::string, SourceSpan>>& strategy,
                                             Diagnostics& diags, const SourceSpan& where = {});

/// The six lemmas selected by the default sorting strategy.
const std::vector<std::string>& default_sorting_strategy();

}  // namespace ibp
