#include "ibp/dot.hpp"

#include <sstream>

namespace ibp {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

class DotWriter {
public:
    DotWriter(const Procedure& p, std::ostringstream& out) : p_(p), out_(out) {}

    void write() {
        out_ << "  subgraph " << quote("cluster_" + p_.name) << " {\n";
        out_ << "    label=" << quote("procedure " + p_.name) << ";\n";
        for (std::size_t s = 0; s < p_.situations.size(); ++s) {
            if (p_.situations[s].parent < 0 && shown(static_cast<int>(s))) situation(static_cast<int>(s), 2);
        }
        out_ << "  }\n";
        for (const auto& t : p_.transitions) edge(t);
    }

private:
    const Procedure& p_;
    std::ostringstream& out_;

    /// The implicit `true` precondition is left out when nothing leaves it.
    bool shown(int s) const { return !p_.situations[s].implicit || !p_.outgoing(s).empty(); }

    std::string node_id(int s) const { return p_.name + "." + p_.situations[s].name; }
    std::string cluster_id(int s) const { return "cluster_" + node_id(s); }

    std::string label(const Situation& s) const {
        std::string l = s.name;
        if (s.variant) l += "\nvariant " + to_string(s.variant);
        for (const auto& inv : s.invariants) l += "\n" + to_string(inv);
        return l;
    }

    void situation(int s, int indent) {
        const Situation& sit = p_.situations[s];
        std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        if (!sit.children.empty()) {
            out_ << pad << "subgraph " << quote(cluster_id(s)) << " {\n";
            out_ << pad << "  label=" << quote(label(sit)) << ";\n";
            out_ << pad << "  style=rounded;\n";
            out_ << pad << "  " << quote(node_id(s)) << " [shape=point, width=0.05, label=\"\"];\n";
            for (int c : sit.children) situation(c, indent + 1);
            out_ << pad << "}\n";
            return;
        }
        out_ << pad << quote(node_id(s)) << " [label=" << quote(label(sit));
        if (sit.kind == SituationKind::Precondition) out_ << ", style=\"rounded,bold\", penwidth=2";
        if (sit.kind == SituationKind::Postcondition) out_ << ", peripheries=2";
        out_ << "];\n";
    }

    void edge(const Transition& t) {
        std::string l = t.label() + ":";
        for (const auto& st : t.body) l += "\n" + to_string(st);
        out_ << "  " << quote(node_id(t.source)) << " -> " << quote(node_id(t.target)) << " [label=" << quote(l);
        bool nested = p_.encloses(t.source, t.target) || p_.encloses(t.target, t.source);
        if (!nested && !p_.situations[t.source].children.empty()) out_ << ", ltail=" << quote(cluster_id(t.source));
        if (!nested && !p_.situations[t.target].children.empty()) out_ << ", lhead=" << quote(cluster_id(t.target));
        out_ << "];\n";
    }
};

}  // namespace

std::string export_dot(const VerificationContext& ctx) {
    std::ostringstream out;
    out << "digraph " << quote(ctx.name) << " {\n";
    out << "  compound=true;\n";
    out << "  node [shape=box, style=rounded];\n";
    for (const auto& p : ctx.procedures) DotWriter(p, out).write();
    out << "}\n";
    return out.str();
}

}  // namespace ibp
