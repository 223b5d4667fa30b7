#include <sstream>

#include "ibp/parser.hpp"

namespace ibp {

namespace {

void indent(std::ostream& os, int n) {
    for (int i = 0; i < n; ++i) os << "  ";
}

void print_situation(std::ostream& os, const Procedure& p, int idx, int depth) {
    const Situation& s = p.situations[idx];
    indent(os, depth);
    switch (s.kind) {
    case SituationKind::Precondition: os << "pre " << s.name; break;
    case SituationKind::Postcondition: os << "post " << s.name; break;
    case SituationKind::Intermediate:
        os << "situation " << s.name;
        if (s.variant) os << " variant " << to_string(s.variant);
        break;
    }
    os << " {\n";
    for (const auto& inv : s.invariants) {
        indent(os, depth + 1);
        os << to_string(inv) << ";\n";
    }
    for (int c : s.children) print_situation(os, p, c, depth + 1);
    indent(os, depth);
    os << "}\n";
}

void print_block(std::ostream& os, const Procedure& p, const TransitionBlock& b, int depth) {
    for (const auto& s : b.stmts) {
        indent(os, depth);
        os << to_string(s) << ";\n";
    }
    if (!b.branches.empty()) {
        indent(os, depth);
        os << "choice {\n";
        for (const auto& br : b.branches) {
            indent(os, depth + 1);
            os << "{\n";
            print_block(os, p, br, depth + 2);
            indent(os, depth + 1);
            os << "}\n";
        }
        indent(os, depth);
        os << "}\n";
    } else {
        indent(os, depth);
        os << "goto " << p.situations[b.target].name << ";\n";
    }
}

std::string type_name(SemType t) { return std::string(to_string(t)); }

bool same_opt(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return same(a, b);
}

bool same_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same(a[i], b[i])) return false;
    }
    return true;
}

bool same_stmt(const Statement& a, const Statement& b) {
    return a.kind == b.kind && a.target == b.target && same_opt(a.expr, b.expr) && same_exprs(a.args, b.args);
}

bool same_stmts(const std::vector<Statement>& a, const std::vector<Statement>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_stmt(a[i], b[i])) return false;
    }
    return true;
}

bool same_procedure(const Procedure& a, const Procedure& b) {
    if (a.name != b.name || a.params.size() != b.params.size() || a.locals.size() != b.locals.size()) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type ||
            a.params[i].mode != b.params[i].mode) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.locals.size(); ++i) {
        if (a.locals[i].name != b.locals[i].name || a.locals[i].type != b.locals[i].type) return false;
    }
    if (!same_opt(a.recursion_variant, b.recursion_variant)) return false;
    if (a.situations.size() != b.situations.size()) return false;
    for (std::size_t i = 0; i < a.situations.size(); ++i) {
        const auto& x = a.situations[i];
        const auto& y = b.situations[i];
        if (x.name != y.name || x.kind != y.kind || x.parent != y.parent || x.children != y.children ||
            !same_exprs(x.invariants, y.invariants) || !same_opt(x.variant, y.variant)) {
            return false;
        }
    }
    if (a.transitions.size() != b.transitions.size()) return false;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& x = a.transitions[i];
        const auto& y = b.transitions[i];
        if (x.source != y.source || x.target != y.target || x.decl != y.decl || x.branch != y.branch ||
            !same_stmts(x.body, y.body) || x.hypotheses.size() != y.hypotheses.size()) {
            return false;
        }
        for (std::size_t h = 0; h < x.hypotheses.size(); ++h) {
            if (x.hypotheses[h].position != y.hypotheses[h].position ||
                !same(x.hypotheses[h].expr, y.hypotheses[h].expr)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

std::string print_context(const VerificationContext& ctx) {
    std::ostringstream os;
    os << "context " << ctx.name << " {\n";
    if (!ctx.imports.empty()) {
        os << "  import ";
        for (std::size_t i = 0; i < ctx.imports.size(); ++i) os << (i ? ", " : "") << ctx.imports[i];
        os << ";\n";
    }
    if (!ctx.strategy.empty()) {
        os << "  strategy lemmas ";
        for (std::size_t i = 0; i < ctx.strategy.size(); ++i) os << (i ? ", " : "") << ctx.strategy[i].name;
        os << ";\n";
    }
    for (const auto& c : ctx.constants) os << "  const " << c.name << ": " << type_name(c.type) << ";\n";
    for (const auto& p : ctx.procedures) {
        os << "\n  procedure " << p.name << "(";
        for (std::size_t i = 0; i < p.params.size(); ++i) {
            const auto& prm = p.params[i];
            os << (i ? ", " : "") << (prm.mode == ParamMode::ValueResult ? "valres " : "") << prm.name << ": "
               << type_name(prm.type);
        }
        os << ") {\n";
        for (const auto& v : p.locals) os << "    var " << v.name << ": " << type_name(v.type) << ";\n";
        for (std::size_t i = 0; i < p.situations.size(); ++i) {
            const auto& s = p.situations[i];
            if (s.parent >= 0 || s.implicit) continue;
            print_situation(os, p, static_cast<int>(i), 2);
        }
        for (const auto& d : p.decls) {
            os << "    transition from " << p.situations[d.source].name << " {\n";
            print_block(os, p, d.block, 3);
            os << "    }\n";
        }
        if (p.recursion_variant) os << "    recursion variant " << to_string(p.recursion_variant) << ";\n";
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

bool same_context(const VerificationContext& a, const VerificationContext& b) {
    if (a.name != b.name || a.imports != b.imports || a.constants.size() != b.constants.size() ||
        a.strategy.size() != b.strategy.size() || a.procedures.size() != b.procedures.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.strategy.size(); ++i) {
        if (a.strategy[i].name != b.strategy[i].name) return false;
    }
    for (std::size_t i = 0; i < a.constants.size(); ++i) {
        if (a.constants[i].name != b.constants[i].name || a.constants[i].type != b.constants[i].type) return false;
    }
    for (std::size_t i = 0; i < a.procedures.size(); ++i) {
        if (!same_procedure(a.procedures[i], b.procedures[i])) return false;
    }
    return true;
}

}  // namespace ibp
