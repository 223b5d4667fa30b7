#include "ibp/theory.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ibp/analysis.hpp"
#include "ibp/parser.hpp"

namespace ibp {

namespace {

const char* const kBuiltinSource = R"IBT(
theory vector {
  def eql(a, b: vector, l, r: nat): bool =
    forall (i: nat): l <= i and i < r and i < len(a) and i < len(b) => a[i] = b[i];
}

theory sorting {
  import vector;

  def sorted(a: vector): bool =
    forall (i, j: index(a)): i < j => a[i] <= a[j];

  def sorted(a: vector, n: upto(len(a))): bool =
    forall (i, j: index(a)): n <= i and i < j => a[i] <= a[j];

  def partitioned(a: vector, k: upto(len(a))): bool =
    forall (i, j: index(a)): i < k and k <= j => a[i] <= a[j];

  def l(i: nat): nat = 2 * i + 1;
  def r(i: nat): nat = 2 * i + 2;

  def heap(a: vector, m, n: nat): bool =
    m <= n and n <= len(a) and
    (forall (i: nat): m <= i =>
       (l(i) < n => a[i] >= a[l(i)]) and
       (r(i) < n => a[i] >= a[r(i)]));

  opaque def perm(a, b: vector): bool = oracle multiset_equal;

  opaque def swap(a: vector, i, j: index(a)): {b: vector | len(b) = len(a)} =
    a[i := a[j]][j := a[i]];

  lemma perm_len: forall (a, b: vector): perm(a, b) => len(a) = len(b);
  lemma perm_ref: forall (a: vector): perm(a, a);
  lemma perm_sym: forall (a, b: vector): perm(a, b) => perm(b, a);
  lemma perm_trs: forall (a, b, c: vector): perm(a, b) and perm(b, c) => perm(a, c);

  lemma swap_acc: forall (a: vector, i, j, k: index(a)):
    swap(a, i, j)[k] = a[if k = i then j elsif k = j then i else k endif];
  lemma swap_perm: forall (a: vector, i, j: index(a)): perm(a, swap(a, i, j));

  lemma heap_max: forall (a: vector, k: nat):
    heap(a, 0, k) => (forall (i: nat): i < k => a[i] <= a[0]);

  lemma perm_partitioned: forall (a, b: vector, k: upto(len(a))):
    perm(a, b) and partitioned(a, k) and eql(a, b, k, len(a)) => partitioned(b, k);
}
)IBT";

/// Leading universally quantified variables of a lemma, looking through range guards.
void leading_binders(const ExprPtr& e, std::map<std::string, SemType>& out) {
    if (e->kind == Expr::Kind::Quant && e->quant == Quantifier::Forall) {
        out[e->name] = e->bound_type;
        leading_binders(e->args[0], out);
    } else if (e->kind == Expr::Kind::Binary && e->binop == BinOp::Implies &&
               e->args[1]->kind == Expr::Kind::Quant) {
        leading_binders(e->args[1], out);
    }
}

bool add_raw_theory(TheoryEnv& env, const RawTheory& th, const std::string& dir, Diagnostics& diags);
void load_text(TheoryEnv& env, const std::string& text, const std::string& file, Diagnostics& diags);

bool load_file_theory(TheoryEnv& env, const std::string& dir, const std::string& name, const SourceSpan& where,
                      Diagnostics& diags, bool required) {
    if (env.is_loaded(name)) return true;
    std::filesystem::path path = std::filesystem::path(dir.empty() ? "." : dir) / (name + ".ibt");
    std::ifstream in(path);
    if (!in) {
        if (required) diags.push_back(make_error("RESOLVE011", "cannot find theory '" + name + "' (" + path.string() + ")", where));
        return !required;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::size_t before = diags.size();
    load_text(env, ss.str(), path.string(), diags);
    return diags.size() == before;
}

bool is_builtin_name(const std::string& n) { return n == "vector" || n == "sorting"; }

bool add_raw_theory(TheoryEnv& env, const RawTheory& th, const std::string& dir, Diagnostics& diags) {
    std::size_t before = diags.size();
    for (const auto& [imp, span] : th.imports) {
        if (is_builtin_name(imp) && env.is_loaded(imp)) continue;
        load_file_theory(env, dir, imp, span, diags, !is_builtin_name(imp));
    }
    env.mark_loaded(th.name);

    Scope empty;
    empty.theory = &env;
    for (const auto& rf : th.functions) {
        FuncDef f;
        f.name = rf.name;
        f.result = rf.result;
        f.opaque = rf.opaque;
        f.oracle = rf.oracle;
        f.theory = th.name;
        f.span = rf.span;
        f.result_var = rf.result_var;
        Scope scope = empty;
        bool ok = true;
        for (std::size_t i = 0; i < rf.param_names.size(); ++i) {
            FuncParam prm{rf.param_names[i], rf.param_types[i], nullptr};
            if (rf.param_domains[i]) {
                Scope dscope = scope;
                dscope.vars[prm.name] = prm.type;
                prm.domain = typecheck_bool(rf.param_domains[i], dscope, diags);
                ok &= prm.domain != nullptr;
            }
            scope.vars[prm.name] = prm.type;
            f.params.push_back(std::move(prm));
        }
        if (rf.body) {
            f.body = typecheck_expr(rf.body, scope, diags);
            if (!f.body) {
                ok = false;
            } else if (!(f.body->type == f.result || (is_numeric(f.body->type) && is_numeric(f.result)))) {
                diags.push_back(make_error("TYPE001",
                                           "body of '" + f.name + "' has type " + std::string(to_string(f.body->type)) +
                                               ", declared " + std::string(to_string(f.result)),
                                           rf.span));
                ok = false;
            }
        }
        if (rf.refinement) {
            Scope rscope = scope;
            rscope.vars[rf.result_var] = rf.result;
            f.refinement = typecheck_bool(rf.refinement, rscope, diags);
            ok &= f.refinement != nullptr;
        }
        if (f.opaque && !f.body && f.oracle.empty()) {
            diags.push_back(make_error("THEORY002", "opaque '" + f.name + "' needs a body or an oracle", rf.span));
            ok = false;
        }
        if (!f.oracle.empty() && f.oracle != "multiset_equal") {
            diags.push_back(make_error("THEORY003", "unknown oracle '" + f.oracle + "'", rf.span));
            ok = false;
        }
        if (ok && !env.add_function(std::move(f))) {
            diags.push_back(make_error("THEORY001",
                                       "duplicate definition of '" + rf.name + "' with " +
                                           std::to_string(rf.param_names.size()) + " parameter(s)",
                                       rf.span));
        }
    }
    for (const auto& rl : th.lemmas) {
        ExprPtr st = typecheck_bool(rl.statement, empty, diags);
        if (!st) continue;
        if (!env.add_lemma({rl.name, st, {}, th.name, rl.span})) {
            diags.push_back(make_error("THEORY001", "duplicate lemma '" + rl.name + "'", rl.span));
        }
    }
    for (const auto& rt : th.triggers) {
        Lemma* l = env.mutable_lemma(rt.lemma);
        if (!l) {
            diags.push_back(make_error("RESOLVE012", "trigger for unknown lemma '" + rt.lemma + "'", rt.span));
            continue;
        }
        Scope scope = empty;
        leading_binders(l->statement, scope.vars);
        std::vector<ExprPtr> pats;
        std::set<std::string> covered;
        bool ok = true;
        for (const auto& p : rt.patterns) {
            ExprPtr t = typecheck_expr(p, scope, diags);
            if (!t) {
                ok = false;
                continue;
            }
            if (t->kind != Expr::Kind::App && t->kind != Expr::Kind::Get && t->kind != Expr::Kind::Len) {
                diags.push_back(make_error("THEORY004", "trigger pattern must be a function application", p->span));
                ok = false;
            }
            auto fv = free_vars(t);
            covered.insert(fv.begin(), fv.end());
            pats.push_back(t);
        }
        for (const auto& [v, _] : scope.vars) {
            if (ok && !covered.count(v)) {
                diags.push_back(make_error("THEORY005", "trigger for '" + rt.lemma + "' does not mention '" + v + "'",
                                           rt.span));
                ok = false;
            }
        }
        if (ok) l->triggers.push_back(std::move(pats));
    }
    return !has_errors(Diagnostics(diags.begin() + static_cast<long>(before), diags.end()));
}

void load_text(TheoryEnv& env, const std::string& text, const std::string& file, Diagnostics& diags) {
    load_theory_text(env, text, file, diags);
}

}  // namespace

ExprPtr FuncDef::domain() const {
    std::vector<ExprPtr> items;
    for (const auto& p : params) {
        if (p.type == SemType::Nat) items.push_back(ex::ge(ex::var(p.name, SemType::Nat), ex::int_lit(0)));
        if (p.domain) items.push_back(p.domain);
    }
    return ex::conj(items);
}

const FuncDef* TheoryEnv::find(const std::string& name, std::size_t arity) const {
    for (const auto& f : functions_) {
        if (f.name == name && f.arity() == arity) return &f;
    }
    return nullptr;
}

bool TheoryEnv::has_function(const std::string& name) const {
    for (const auto& f : functions_) {
        if (f.name == name) return true;
    }
    return false;
}

std::vector<const FuncDef*> TheoryEnv::overloads(const std::string& name) const {
    std::vector<const FuncDef*> out;
    for (const auto& f : functions_) {
        if (f.name == name) out.push_back(&f);
    }
    return out;
}

const Lemma* TheoryEnv::find_lemma(const std::string& name) const {
    for (const auto& l : lemmas_) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

Lemma* TheoryEnv::mutable_lemma(const std::string& name) {
    for (auto& l : lemmas_) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

std::vector<const Lemma*> TheoryEnv::active_lemmas() const {
    std::vector<const Lemma*> out;
    for (const auto& n : active_) {
        if (const Lemma* l = find_lemma(n)) out.push_back(l);
    }
    return out;
}

bool TheoryEnv::add_function(FuncDef f) {
    if (find(f.name, f.arity())) return false;
    functions_.push_back(std::move(f));
    return true;
}

bool TheoryEnv::add_lemma(Lemma l) {
    if (find_lemma(l.name)) return false;
    lemmas_.push_back(std::move(l));
    return true;
}

bool TheoryEnv::is_loaded(const std::string& theory) const {
    for (const auto& t : loaded_) {
        if (t == theory) return true;
    }
    return false;
}

const std::string& builtin_theory_source() {
    static const std::string src = kBuiltinSource;
    return src;
}

void load_theory_text(TheoryEnv& env, const std::string& text, const std::string& file, Diagnostics& diags) {
    std::vector<RawTheory> raws;
    try {
        raws = parse_raw_theories(text, file);
    } catch (const DiagnosticError& e) {
        diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
        return;
    }
    std::string dir = std::filesystem::path(file).parent_path().string();
    for (const auto& raw : raws) add_raw_theory(env, raw, dir, diags);
}

std::shared_ptr<const TheoryEnv> builtin_theory() {
    static const std::shared_ptr<const TheoryEnv> env = [] {
        auto e = std::make_shared<TheoryEnv>();
        Diagnostics diags;
        load_theory_text(*e, builtin_theory_source(), "<builtin>", diags);
        if (has_errors(diags)) throw Error("builtin theory failed to load: " + diags.front().format());
        return e;
    }();
    return env;
}

std::shared_ptr<const TheoryEnv> load_theory(const std::string& dir, const std::vector<std::string>& imports,
                                             const std::vector<std::pair<std::string, SourceSpan>>& strategy,
                                             Diagnostics& diags, const SourceSpan& where) {
    auto env = std::make_shared<TheoryEnv>(*builtin_theory());
    for (const auto& imp : imports) {
        std::filesystem::path path = std::filesystem::path(dir.empty() ? "." : dir) / (imp + ".ibt");
        bool exists = std::filesystem::exists(path);
        if (is_builtin_name(imp) && !exists) continue;
        if (!exists) {
            diags.push_back(make_error("RESOLVE011", "cannot find theory '" + imp + "' (" + path.string() + ")", where));
            continue;
        }
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        load_theory_text(*env, ss.str(), path.string(), diags);
    }
    std::vector<std::string> active;
    for (const auto& [name, span] : strategy) {
        if (!env->find_lemma(name)) {
            diags.push_back(make_error("RESOLVE012", "unknown lemma '" + name + "' in strategy", span));
            continue;
        }
        active.push_back(name);
    }
    env->set_active(std::move(active));
    return env;
}

const std::vector<std::string>& default_sorting_strategy() {
    static const std::vector<std::string> names = {"perm_len", "perm_ref", "perm_sym",
                                                   "perm_trs", "swap_acc", "swap_perm"};
    return names;
}

}  // namespace ibp
