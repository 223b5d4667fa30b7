#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ibp/interpreter.hpp"
#include "ibp/theory.hpp"
#include "ibp/vcgen.hpp"

namespace ibp {

/// Finite universe for exhaustive checks: vectors up to `max_len` elements
/// drawn from [min_value, max_value]; integers range over a small window
/// around the vector lengths.
struct FiniteBounds {
    int max_len = 4;
    std::int64_t min_value = -2;
    std::int64_t max_value = 2;
    /// Stop after this many candidate assignments (0 = no limit).
    std::size_t budget = 0;
};

/// Outcome of searching for an assignment that satisfies every hypothesis
/// but falsifies the goal.
struct FiniteSearch {
    std::size_t assignments = 0;  // complete assignments evaluated
    std::size_t undefined = 0;    // skipped because evaluation failed
    bool complete = true;         // false when the budget ran out
    std::optional<Store> counterexample;
    std::string error;            // set when nothing could be evaluated
};

/// All values of `t` in the universe.
std::vector<Value> finite_domain(SemType t, const FiniteBounds& b);

/// Exhaustive search over `symbols`. Hypotheses are checked as soon as their
/// symbols are bound; `perm` and equality hypotheses generate candidates
/// directly instead of filtering the whole domain.
FiniteSearch finite_search(const std::vector<std::pair<std::string, SemType>>& symbols,
                           const std::vector<ExprPtr>& hypotheses, const ExprPtr& goal, const TheoryEnv& env,
                           const FiniteBounds& b);

struct LemmaCheck {
    std::string lemma;
    FiniteSearch search;

    bool holds() const { return !search.counterexample && search.error.empty(); }
};

/// Checks each named lemma (all lemmas when `names` is empty) over vectors of
/// length <= bound with the given element window.
std::vector<LemmaCheck> lemma_soundness_suite(const TheoryEnv& env, int bound, std::int64_t min_value = -2,
                                              std::int64_t max_value = 2, const std::vector<std::string>& names = {});

/// Looks for a finite countermodel of a VC: all antecedents true, consequent false.
FiniteSearch audit_vc(const VC& vc, const TheoryEnv& env, const FiniteBounds& b);

}  // namespace ibp
