#include "ibp/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace ibp {

// ---------------------------------------------------------------------------
// S-expressions

std::string SExpr::to_string() const {
    if (!is_list) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < list.size(); ++i) s += (i ? " " : "") + list[i].to_string();
    return s + ")";
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
    std::vector<SExpr> stack(1);
    stack[0].is_list = true;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(') {
            SExpr l;
            l.is_list = true;
            stack.push_back(std::move(l));
            ++i;
        } else if (c == ')') {
            if (stack.size() < 2) throw Error("unbalanced ')' in solver output");
            SExpr done = std::move(stack.back());
            stack.pop_back();
            stack.back().list.push_back(std::move(done));
            ++i;
        } else if (c == '"') {
            std::string s = "\"";
            ++i;
            while (i < text.size()) {
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        s += "\"\"";
                        i += 2;
                        continue;
                    }
                    break;
                }
                s += text[i++];
            }
            if (i >= text.size()) throw Error("unterminated string in solver output");
            ++i;
            stack.back().list.push_back({s + "\"", {}, false});
        } else if (c == '|') {
            std::size_t end = text.find('|', i + 1);
            if (end == std::string::npos) throw Error("unterminated quoted symbol in solver output");
            stack.back().list.push_back({text.substr(i + 1, end - i - 1), {}, false});
            i = end + 1;
        } else {
            std::size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
                   text[i] != ')' && text[i] != ';') {
                ++i;
            }
            stack.back().list.push_back({text.substr(start, i - start), {}, false});
        }
    }
    if (stack.size() != 1) throw Error("unbalanced '(' in solver output");
    return std::move(stack[0].list);
}

// ---------------------------------------------------------------------------
// Configuration

SolverConfig SolverConfig::from_env() {
    SolverConfig c;
    if (const char* s = std::getenv("IBP_SOLVER"); s && *s) c.command = s;
    return c;
}

std::string_view to_string(VerdictKind k) {
    switch (k) {
    case VerdictKind::Proved: return "proved";
    case VerdictKind::Refuted: return "refuted";
    case VerdictKind::Unknown: return "unknown";
    case VerdictKind::SolverError: return "error";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Definition expansion

namespace {

using Signature = std::pair<std::string, std::size_t>;

ExprPtr expand_except(const ExprPtr& e, const TheoryEnv& env, const std::set<Signature>& keep) {
    if (e->args.empty()) return e;
    std::vector<ExprPtr> args;
    args.reserve(e->args.size());
    for (const auto& a : e->args) args.push_back(expand_except(a, env, keep));
    if (e->kind == Expr::Kind::App && !keep.count({e->name, args.size()})) {
        const FuncDef* f = env.find(e->name, args.size());
        if (f && f->body && !f->opaque) {
            std::map<std::string, ExprPtr> m;
            for (std::size_t i = 0; i < f->params.size(); ++i) m[f->params[i].name] = args[i];
            return expand_except(substitute(f->body, m), env, keep);
        }
    }
    return ex::with_args(e, std::move(args));
}

}  // namespace

ExprPtr expand_definitions(const ExprPtr& e, const TheoryEnv& env) { return expand_except(e, env, {}); }

namespace {

const std::set<std::string>& smt_reserved() {
    static const std::set<std::string> r = {
        "and",    "or",       "not",      "xor",       "ite",         "let",       "forall",       "exists",
        "true",   "false",    "distinct", "div",       "mod",         "abs",       "to_real",      "to_int",
        "is_int", "select",   "store",    "assert",    "check-sat",   "Int",       "Bool",         "Real",
        "Array",  "V",        "par",      "_",         "!",           "as",        "match",        "declare-fun",
        "define-fun", "push", "pop",      "exit",      "echo",        "reset",     "declare-const", "declare-sort"};
    return r;
}

std::string sort_of(SemType t) {
    switch (t) {
    case SemType::Bool: return "Bool";
    case SemType::Vector: return "V";
    default: return "Int";
    }
}

std::string int_text(std::int64_t v) {
    if (v < 0) {
        // Avoid overflow on the most negative value.
        std::string digits = std::to_string(v).substr(1);
        return "(- " + digits + ")";
    }
    return std::to_string(v);
}

class Encoder {
public:
    Encoder(const TheoryEnv& env, const SolverConfig& cfg) : env_(env), cfg_(cfg) {
        // Transparent functions named in an active trigger stay symbols so the
        // pattern has something to match; they get a definitional axiom instead.
        for (const Lemma* l : env_.active_lemmas()) {
            for (const auto& multi : l->triggers) {
                for (const auto& t : multi) collect_defined(t);
            }
        }
    }

    void collect_defined(const ExprPtr& e) {
        if (e->kind == Expr::Kind::App) {
            const FuncDef* f = env_.find(e->name, e->args.size());
            if (f && f->body && !f->opaque) defined_.insert({e->name, e->args.size()});
        }
        for (const auto& a : e->args) collect_defined(a);
    }

    ExprPtr expand(const ExprPtr& e) const { return expand_except(e, env_, defined_); }

    std::string var_symbol(const std::string& name) const {
        if (smt_reserved().count(name) || env_.has_function(name) || name.rfind("ibp.", 0) == 0 ||
            name.rfind("v.", 0) == 0) {
            return "v." + name;
        }
        return name;
    }

    std::string fn_symbol(const std::string& name, std::size_t arity) const {
        if (env_.overloads(name).size() > 1) return name + "." + std::to_string(arity);
        if (smt_reserved().count(name) || name.rfind("ibp.", 0) == 0) return "f." + name;
        return name;
    }

    void note_apps(const ExprPtr& e) {
        if (e->kind == Expr::Kind::App) used_.insert({e->name, e->args.size()});
        if (e->kind == Expr::Kind::Set) uses_upd_ = true;
        for (const auto& a : e->args) note_apps(a);
    }

    std::string bound_guard(const std::string& sym, SemType t) const {
        return t == SemType::Nat ? "(>= " + sym + " 0)" : "";
    }

    std::string emit(const ExprPtr& e) {
        switch (e->kind) {
        case Expr::Kind::IntLit: return int_text(e->value);
        case Expr::Kind::BoolLit: return e->value ? "true" : "false";
        case Expr::Kind::Var: return var_symbol(e->name);
        case Expr::Kind::Old: return var_symbol(old_symbol(e->name));
        case Expr::Kind::Unary:
            return e->unop == UnOp::Neg ? "(- " + emit(e->args[0]) + ")" : "(not " + emit(e->args[0]) + ")";
        case Expr::Kind::Binary: return binary(e);
        case Expr::Kind::Ite:
            return "(ite " + emit(e->args[0]) + " " + emit(e->args[1]) + " " + emit(e->args[2]) + ")";
        case Expr::Kind::Quant: {
            std::string s = var_symbol(e->name);
            std::string body = emit(e->args[0]);
            std::string g = bound_guard(s, e->bound_type);
            std::string head = "((" + s + " " + sort_of(e->bound_type) + "))";
            if (e->quant == Quantifier::Forall) {
                return "(forall " + head + " " + (g.empty() ? body : "(=> " + g + " " + body + ")") + ")";
            }
            return "(exists " + head + " " + (g.empty() ? body : "(and " + g + " " + body + ")") + ")";
        }
        case Expr::Kind::Len: return "(ibp.len " + emit(e->args[0]) + ")";
        case Expr::Kind::Get: return "(ibp.elem " + emit(e->args[0]) + " " + emit(e->args[1]) + ")";
        case Expr::Kind::Set:
            return "(ibp.upd " + emit(e->args[0]) + " " + emit(e->args[1]) + " " + emit(e->args[2]) + ")";
        case Expr::Kind::App: {
            std::string f = fn_symbol(e->name, e->args.size());
            if (e->args.empty()) return f;
            std::string s = "(" + f;
            for (const auto& a : e->args) s += " " + emit(a);
            return s + ")";
        }
        }
        throw Error("no encoding for expression " + to_string(e));
    }

    std::string binary(const ExprPtr& e) {
        const auto& a = e->args[0];
        const auto& b = e->args[1];
        if ((e->binop == BinOp::Eq || e->binop == BinOp::Ne) && a->type == SemType::Vector) {
            // Vectors are equal when they agree on length and on every index below it.
            std::string j = "ibp.j" + std::to_string(counter_++);
            std::string x = emit(a), y = emit(b);
            std::string eqv = "(and (= (ibp.len " + x + ") (ibp.len " + y + ")) (forall ((" + j + " Int)) (=> (and (<= 0 " +
                              j + ") (< " + j + " (ibp.len " + x + "))) (= (ibp.elem " + x + " " + j + ") (ibp.elem " + y +
                              " " + j + ")))))";
            return e->binop == BinOp::Eq ? eqv : "(not " + eqv + ")";
        }
        std::string x = emit(a), y = emit(b);
        switch (e->binop) {
        case BinOp::Add: return "(+ " + x + " " + y + ")";
        case BinOp::Sub: return "(- " + x + " " + y + ")";
        case BinOp::Mul: return "(* " + x + " " + y + ")";
        case BinOp::Div:
            // Floor division; SMT-LIB div is Euclidean and agrees for positive divisors.
            return "(ite (> " + y + " 0) (div " + x + " " + y + ") (div (- " + x + ") (- " + y + ")))";
        case BinOp::Eq: return "(= " + x + " " + y + ")";
        case BinOp::Ne: return "(not (= " + x + " " + y + "))";
        case BinOp::Lt: return "(< " + x + " " + y + ")";
        case BinOp::Le: return "(<= " + x + " " + y + ")";
        case BinOp::Gt: return "(> " + x + " " + y + ")";
        case BinOp::Ge: return "(>= " + x + " " + y + ")";
        case BinOp::And: return "(and " + x + " " + y + ")";
        case BinOp::Or: return "(or " + x + " " + y + ")";
        case BinOp::Implies: return "(=> " + x + " " + y + ")";
        case BinOp::Iff: return "(= " + x + " " + y + ")";
        }
        throw Error("no encoding for operator");
    }

    struct Prenex {
        std::vector<std::pair<std::string, SemType>> binders;
        std::vector<ExprPtr> guards;
        ExprPtr body;
        std::map<std::string, ExprPtr> renaming;
    };

    /// Pulls leading universal binders out through range implications.
    Prenex prenex(const ExprPtr& statement) {
        Prenex p;
        std::set<std::string> names;
        ExprPtr cur = statement;
        for (;;) {
            if (cur->kind == Expr::Kind::Quant && cur->quant == Quantifier::Forall) {
                std::string n = cur->name;
                ExprPtr body = cur->args[0];
                if (names.count(n)) {
                    std::string fresh = fresh_name(n, names, false);
                    body = substitute(body, {{n, ex::var(fresh, cur->bound_type)}});
                    n = fresh;
                } else {
                    p.renaming[n] = ex::var(n, cur->bound_type);
                }
                names.insert(n);
                p.binders.push_back({n, cur->bound_type});
                cur = body;
            } else if (cur->kind == Expr::Kind::Binary && cur->binop == BinOp::Implies &&
                       cur->args[1]->kind == Expr::Kind::Quant && cur->args[1]->quant == Quantifier::Forall) {
                p.guards.push_back(cur->args[0]);
                cur = cur->args[1];
            } else {
                break;
            }
        }
        p.body = cur;
        return p;
    }

    std::string lemma(const Lemma& l) {
        Prenex p = prenex(l.statement);
        std::vector<std::string> guards;
        std::string head;
        for (const auto& [n, t] : p.binders) {
            std::string s = var_symbol(n);
            head += "(" + s + " " + sort_of(t) + ")";
            if (t == SemType::Nat) guards.push_back("(>= " + s + " 0)");
        }
        for (const auto& g : p.guards) guards.push_back(emit(expand(g)));
        std::string body = emit(expand(p.body));
        if (!guards.empty()) {
            std::string all = guards.size() == 1 ? guards[0] : "(and";
            if (guards.size() > 1) {
                for (const auto& g : guards) all += " " + g;
                all += ")";
            }
            body = "(=> " + all + " " + body + ")";
        }
        std::string pats;
        for (const auto& multi : l.triggers) {
            std::string terms;
            bool ok = true;
            for (const auto& t : multi) {
                ExprPtr x = expand(t);
                // A pattern over a transparent definition has no counterpart after expansion.
                ok &= x->kind == Expr::Kind::App || x->kind == Expr::Kind::Get || x->kind == Expr::Kind::Len;
                terms += (terms.empty() ? "" : " ") + emit(x);
            }
            if (ok) pats += " :pattern (" + terms + ")";
        }
        if (p.binders.empty()) return body;
        if (!pats.empty()) body = "(! " + body + pats + ")";
        return "(forall (" + head + ") " + body + ")";
    }

    std::string function_axiom(const FuncDef& f) {
        std::vector<ExprPtr> args;
        std::string head;
        for (const auto& prm : f.params) {
            args.push_back(ex::var(prm.name, prm.type));
            head += "(" + var_symbol(prm.name) + " " + sort_of(prm.type) + ")";
        }
        ExprPtr call = ex::app(f.name, args, f.result);
        std::vector<ExprPtr> facts;
        if (f.refinement) facts.push_back(substitute(f.refinement, {{f.result_var, call}}));
        if (f.result == SemType::Nat) facts.push_back(ex::le(ex::int_lit(0), call));
        if (facts.empty()) return "";
        ExprPtr body = ex::implies(f.domain(), ex::conj(facts));
        std::string text = emit(expand(simplify(body)));
        if (f.params.empty()) return text;
        return "(forall (" + head + ") " + text + ")";
    }

    std::string definition_axiom(const FuncDef& f) {
        std::vector<ExprPtr> args;
        std::string head;
        for (const auto& prm : f.params) {
            args.push_back(ex::var(prm.name, prm.type));
            head += "(" + var_symbol(prm.name) + " " + sort_of(prm.type) + ")";
        }
        std::string call = emit(ex::app(f.name, args, f.result));
        std::string eq = "(= " + call + " " + emit(expand(f.body)) + ")";
        if (f.params.empty()) return eq;
        return "(forall (" + head + ") (! " + eq + " :pattern (" + call + ")))";
    }

    Encoding encode(const VC& vc) {
        Encoding enc;
        std::vector<ExprPtr> ants;
        for (const auto& a : vc.antecedents) ants.push_back(expand(a));
        ExprPtr goal = expand(vc.consequent);
        for (const auto& a : ants) note_apps(a);
        note_apps(goal);
        std::vector<const Lemma*> lemmas = env_.active_lemmas();
        for (const Lemma* l : lemmas) note_apps(expand(l->statement));
        for (const Lemma* l : lemmas) {
            for (const auto& multi : l->triggers) {
                for (const auto& t : multi) note_apps(expand(t));
            }
        }

        std::ostringstream os;
        os << "; " << vc.id << "\n";
        os << "(set-option :produce-models true)\n";
        if (cfg_.seed) os << "(set-option :random-seed " << *cfg_.seed << ")\n";
        os << "(set-logic " << cfg_.logic << ")\n";
        os << "(declare-sort V 0)\n";
        os << "(declare-fun ibp.len (V) Int)\n";
        os << "(declare-fun ibp.elem (V Int) Int)\n";
        os << "(assert (forall ((v V)) (>= (ibp.len v) 0)))\n";

        // Definition bodies may mention further symbols.
        for (std::set<Signature> seen; seen != used_;) {
            seen = used_;
            for (const auto& sig : seen) {
                const FuncDef* f = env_.find(sig.first, sig.second);
                if (f && defined_.count(sig)) note_apps(expand(f->body));
            }
        }
        std::vector<std::string> axioms;
        for (const auto& [name, arity] : used_) {
            const FuncDef* f = env_.find(name, arity);
            if (!f) throw Error("no definition for function '" + name + "'");
            os << "(declare-fun " << fn_symbol(name, arity) << " (";
            for (std::size_t i = 0; i < f->params.size(); ++i) os << (i ? " " : "") << sort_of(f->params[i].type);
            os << ") " << sort_of(f->result) << ")\n";
            if (defined_.count({name, arity})) {
                axioms.push_back("; " + f->name + " definition\n(assert " + definition_axiom(*f) + ")\n");
                continue;
            }
            std::string ax = function_axiom(*f);
            if (!ax.empty()) axioms.push_back("; " + f->name + " result\n(assert " + ax + ")\n");
        }
        if (uses_upd_) {
            os << "(declare-fun ibp.upd (V Int Int) V)\n";
            os << "(assert (forall ((v V) (i Int) (x Int)) (= (ibp.len (ibp.upd v i x)) (ibp.len v))))\n";
            os << "(assert (forall ((v V) (i Int) (x Int) (j Int)) (= (ibp.elem (ibp.upd v i x) j) (ite (= j i) x "
                  "(ibp.elem v j)))))\n";
        }
        for (const auto& a : axioms) os << a;

        for (const auto& [name, type] : vc.symbols) {
            std::string s = var_symbol(name);
            enc.symbol_of[name] = s;
            os << "(declare-const " << s << " " << sort_of(type) << ")\n";
            if (type == SemType::Nat) os << "(assert (>= " << s << " 0))\n";
        }
        for (const Lemma* l : lemmas) os << "; lemma " << l->name << "\n(assert " << lemma(*l) << ")\n";
        for (std::size_t i = 0; i < ants.size(); ++i) os << "; [-" << i + 1 << "]\n(assert " << emit(ants[i]) << ")\n";
        os << "; goal\n(assert (not " << emit(goal) << "))\n";
        os << "(check-sat)\n";

        std::vector<std::string> terms;
        for (const auto& [name, type] : vc.symbols) {
            std::string s = enc.symbol_of[name];
            if (type == SemType::Vector) {
                terms.push_back("(ibp.len " + s + ")");
                for (int k = 0; k < cfg_.model_elements; ++k) terms.push_back("(ibp.elem " + s + " " + std::to_string(k) + ")");
            } else {
                terms.push_back(s);
            }
        }
        if (!terms.empty()) {
            os << "(get-value (";
            for (std::size_t i = 0; i < terms.size(); ++i) os << (i ? " " : "") << terms[i];
            os << "))\n";
        }
        enc.script = os.str();
        return enc;
    }

private:
    const TheoryEnv& env_;
    const SolverConfig& cfg_;
    std::set<Signature> used_;
    std::set<Signature> defined_;
    bool uses_upd_ = false;
    int counter_ = 0;
};

std::optional<std::int64_t> int_value(const SExpr& s) {
    try {
        if (!s.is_list) return std::stoll(s.atom);
        if (s.list.size() == 2 && !s.list[0].is_list && s.list[0].atom == "-") {
            auto v = int_value(s.list[1]);
            if (v) return -*v;
        }
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

std::string sanitize(const std::string& id) {
    std::string s = id;
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') c = '_';
    }
    return s;
}

void ignore_sigpipe() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

struct ProcessResult {
    std::string output;
    int status = 0;
    bool timed_out = false;
    bool spawn_failed = false;
    std::string error;
};

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, int timeout_ms) {
    ProcessResult r;
    ignore_sigpipe();
    int in[2], out[2];
    if (::pipe2(in, O_CLOEXEC) != 0) {
        r.spawn_failed = true;
        r.error = std::strerror(errno);
        return r;
    }
    if (::pipe2(out, O_CLOEXEC) != 0) {
        ::close(in[0]);
        ::close(in[1]);
        r.spawn_failed = true;
        r.error = std::strerror(errno);
        return r;
    }
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = ::fork();
    if (pid < 0) {
        r.spawn_failed = true;
        r.error = std::strerror(errno);
        for (int fd : {in[0], in[1], out[0], out[1]}) ::close(fd);
        return r;
    }
    if (pid == 0) {
        ::dup2(in[0], 0);
        ::dup2(out[1], 1);
        ::dup2(out[1], 2);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    ::fcntl(in[1], F_SETFL, O_NONBLOCK);
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    std::size_t written = 0;
    int wfd = in[1];
    if (input.empty()) {
        ::close(wfd);
        wfd = -1;
    }
    char buf[8192];
    bool open_out = true;
    while (open_out) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            r.timed_out = true;
            break;
        }
        int wait = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
        pollfd fds[2];
        int n = 0;
        fds[n++] = {out[0], POLLIN, 0};
        if (wfd >= 0) fds[n++] = {wfd, POLLOUT, 0};
        int rc = ::poll(fds, n, wait);
        if (rc < 0) {
            if (errno == EINTR) continue;
            r.error = std::strerror(errno);
            break;
        }
        if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
            ssize_t got = ::read(out[0], buf, sizeof buf);
            if (got > 0) {
                r.output.append(buf, static_cast<std::size_t>(got));
            } else if (got == 0 || errno != EINTR) {
                open_out = false;
            }
        }
        if (wfd >= 0 && n > 1 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
            ssize_t put = ::write(wfd, input.data() + written, input.size() - written);
            if (put > 0) written += static_cast<std::size_t>(put);
            if (put < 0 && errno != EAGAIN && errno != EINTR) written = input.size();
            if (written >= input.size()) {
                ::close(wfd);
                wfd = -1;
            }
        }
    }
    if (wfd >= 0) ::close(wfd);
    ::close(out[0]);
    if (r.timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    r.status = status;
    if (!r.timed_out && WIFEXITED(status) && WEXITSTATUS(status) == 127 && r.output.empty()) {
        r.spawn_failed = true;
        r.error = "cannot execute '" + argv[0] + "'";
    }
    return r;
}

std::vector<std::string> split_command(const std::string& cmd) {
    std::istringstream is(cmd);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

}  // namespace

Encoding encode(const VC& vc, const TheoryEnv& env, const SolverConfig& cfg) { return Encoder(env, cfg).encode(vc); }

Verdict run_solver(const std::string& script, const SolverConfig& cfg) {
    Verdict v;
    auto start = std::chrono::steady_clock::now();
    auto argv = split_command(cfg.command);
    if (argv.empty()) {
        v.kind = VerdictKind::SolverError;
        v.reason = "empty solver command";
        return v;
    }
    ProcessResult pr = run_process(argv, script, cfg.timeout_ms);
    v.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (pr.spawn_failed) {
        v.kind = VerdictKind::SolverError;
        v.reason = pr.error;
        return v;
    }
    if (pr.timed_out) {
        v.kind = VerdictKind::Unknown;
        v.reason = "timeout";
        return v;
    }
    VC none;
    Encoding enc;
    Verdict parsed = interpret_output(pr.output, enc, none);
    parsed.ms = v.ms;
    return parsed;
}

Verdict interpret_output(const std::string& out, const Encoding& enc, const VC& vc) {
    Verdict v;
    std::vector<SExpr> items;
    try {
        items = parse_sexprs(out);
    } catch (const Error& e) {
        v.kind = VerdictKind::SolverError;
        v.reason = std::string(e.what()) + ": " + out.substr(0, 200);
        return v;
    }
    std::size_t at = 0;
    std::string first_error;
    for (; at < items.size(); ++at) {
        const auto& s = items[at];
        if (!s.is_list && (s.atom == "sat" || s.atom == "unsat" || s.atom == "unknown")) break;
        if (s.is_list && !s.list.empty() && s.list[0].atom == "error" && first_error.empty()) {
            first_error = s.to_string();
        }
    }
    if (at == items.size()) {
        v.kind = VerdictKind::SolverError;
        v.reason = first_error.empty() ? "no verdict in solver output: " + out.substr(0, 200) : first_error;
        return v;
    }
    const std::string& verdict = items[at].atom;
    if (verdict == "unsat") {
        v.kind = VerdictKind::Proved;
        return v;
    }
    if (verdict == "unknown") {
        v.kind = VerdictKind::Unknown;
        v.reason = "solver returned unknown";
        return v;
    }
    v.kind = VerdictKind::Refuted;
    Model m;
    std::map<std::string, const SExpr*> answers;
    for (std::size_t i = at + 1; i < items.size(); ++i) {
        const auto& s = items[i];
        if (!s.is_list) continue;
        m.raw += s.to_string() + "\n";
        for (const auto& pair : s.list) {
            if (pair.is_list && pair.list.size() == 2) answers[pair.list[0].to_string()] = &pair.list[1];
        }
    }
    if (answers.empty()) {
        v.model = std::move(m);
        return v;
    }
    for (const auto& [name, type] : vc.symbols) {
        auto it = enc.symbol_of.find(name);
        if (it == enc.symbol_of.end()) continue;
        const std::string& s = it->second;
        if (type == SemType::Vector) {
            auto len = answers.find("(ibp.len " + s + ")");
            std::optional<std::int64_t> n = len == answers.end() ? std::nullopt : int_value(*len->second);
            if (!n) {
                m.partial = true;
                continue;
            }
            std::vector<std::int64_t> xs;
            bool ok = true;
            for (std::int64_t k = 0; k < *n; ++k) {
                auto el = answers.find("(ibp.elem " + s + " " + std::to_string(k) + ")");
                std::optional<std::int64_t> x = el == answers.end() ? std::nullopt : int_value(*el->second);
                if (!x) {
                    ok = false;
                    break;
                }
                xs.push_back(*x);
            }
            if (!ok) {
                m.partial = true;
                continue;
            }
            m.values[name] = Value::of_vector(std::move(xs));
        } else {
            auto a = answers.find(s);
            if (a == answers.end()) {
                m.partial = true;
                continue;
            }
            if (type == SemType::Bool) {
                m.values[name] = Value::of_bool(a->second->atom == "true");
            } else if (auto x = int_value(*a->second)) {
                m.values[name] = Value::of_int(*x);
            } else {
                m.partial = true;
            }
        }
    }
    v.model = std::move(m);
    return v;
}

Report check_all(const std::vector<VC>& vcs, const TheoryEnv& env, const SolverConfig& cfg,
                 const std::function<void(const VcResult&)>& on_result) {
    Report report;
    report.results.resize(vcs.size());
    std::vector<bool> done(vcs.size(), false);
    std::mutex mu;
    std::size_t next_emit = 0;
    std::atomic<std::size_t> next_job{0};
    if (!cfg.dump_dir.empty()) std::filesystem::create_directories(cfg.dump_dir);

    auto work = [&] {
        for (;;) {
            std::size_t i = next_job.fetch_add(1);
            if (i >= vcs.size()) return;
            VcResult r{vcs[i], {}};
            try {
                Encoding enc = encode(vcs[i], env, cfg);
                if (!cfg.dump_dir.empty()) {
                    std::ofstream(std::filesystem::path(cfg.dump_dir) / (sanitize(vcs[i].id) + ".smt2")) << enc.script;
                }
                auto start = std::chrono::steady_clock::now();
                auto argv = split_command(cfg.command);
                if (argv.empty()) throw Error("empty solver command");
                ProcessResult pr = run_process(argv, enc.script, cfg.timeout_ms);
                double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                if (pr.spawn_failed) {
                    r.verdict.kind = VerdictKind::SolverError;
                    r.verdict.reason = pr.error;
                } else if (pr.timed_out) {
                    r.verdict.kind = VerdictKind::Unknown;
                    r.verdict.reason = "timeout";
                } else {
                    r.verdict = interpret_output(pr.output, enc, vcs[i]);
                }
                r.verdict.ms = ms;
            } catch (const std::exception& e) {
                r.verdict.kind = VerdictKind::SolverError;
                r.verdict.reason = e.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            report.results[i] = std::move(r);
            done[i] = true;
            while (next_emit < vcs.size() && done[next_emit]) {
                if (on_result) on_result(report.results[next_emit]);
                ++next_emit;
            }
        }
    };
    int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(vcs.size())));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : report.results) {
        switch (r.verdict.kind) {
        case VerdictKind::Proved: ++report.proved; break;
        case VerdictKind::Refuted: ++report.refuted; break;
        case VerdictKind::Unknown: ++report.unknown; break;
        case VerdictKind::SolverError: ++report.errors; break;
        }
    }
    return report;
}

}  // namespace ibp
