#include "ibp/model.hpp"

#include <algorithm>

namespace ibp {

std::string to_string(const Statement& s) {
    switch (s.kind) {
    case Statement::Kind::Guard: return "[" + to_string(s.expr) + "]";
    case Statement::Kind::Assert: return "{" + to_string(s.expr) + "}";
    case Statement::Kind::Assign: return s.target + " := " + to_string(s.expr);
    case Statement::Kind::Call: {
        std::string out = "call " + s.target + "(";
        for (std::size_t i = 0; i < s.args.size(); ++i) {
            if (i) out += ", ";
            out += to_string(s.args[i]);
        }
        return out + ")";
    }
    }
    return {};
}

std::string Transition::label() const { return "t" + std::to_string(decl) + "#" + std::to_string(branch); }

int Procedure::precondition() const {
    for (std::size_t i = 0; i < situations.size(); ++i) {
        if (situations[i].kind == SituationKind::Precondition) return static_cast<int>(i);
    }
    return -1;
}

std::vector<int> Procedure::postconditions() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < situations.size(); ++i) {
        if (situations[i].kind == SituationKind::Postcondition) out.push_back(static_cast<int>(i));
    }
    return out;
}

int Procedure::find_situation(const std::string& n) const {
    for (std::size_t i = 0; i < situations.size(); ++i) {
        if (situations[i].name == n) return static_cast<int>(i);
    }
    return -1;
}

const Param* Procedure::find_param(const std::string& n) const {
    for (const auto& p : params) {
        if (p.name == n) return &p;
    }
    return nullptr;
}

SemType Procedure::type_of(const std::string& n) const {
    if (const Param* p = find_param(n)) return p->type;
    for (const auto& v : locals) {
        if (v.name == n) return v.type;
    }
    return SemType::Unknown;
}

bool Procedure::is_valres(const std::string& n) const {
    const Param* p = find_param(n);
    return p && p->mode == ParamMode::ValueResult;
}

std::vector<int> Procedure::outgoing(int s) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        if (transitions[i].source == s) out.push_back(static_cast<int>(i));
    }
    return out;
}

bool Procedure::encloses(int outer, int inner) const {
    for (int s = inner; s >= 0; s = situations[s].parent) {
        if (s == outer) return true;
    }
    return false;
}

const Procedure* VerificationContext::find_procedure(const std::string& n) const {
    for (const auto& p : procedures) {
        if (p.name == n) return &p;
    }
    return nullptr;
}

std::vector<ExprPtr> effective_invariant_items(const Procedure& p, int s) {
    std::vector<int> chain;
    for (int cur = s; cur >= 0; cur = p.situations[cur].parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    std::vector<ExprPtr> out;
    for (int cur : chain) {
        const auto& inv = p.situations[cur].invariants;
        out.insert(out.end(), inv.begin(), inv.end());
    }
    return out;
}

ExprPtr effective_invariant(const Procedure& p, int s) { return ex::conj(effective_invariant_items(p, s)); }

}  // namespace ibp
