#include "ibp/diagnostics.hpp"

#include <algorithm>

namespace ibp {

std::string SourceSpan::to_string() const {
    std::string out = file.empty() ? "<input>" : file;
    if (valid()) {
        out += ":" + std::to_string(start_line) + ":" + std::to_string(start_col);
    }
    return out;
}

std::string Diagnostic::format() const {
    return span.to_string() + ": " + (is_error() ? "error" : "warning") + "[" + code + "]: " + message;
}

bool has_errors(const Diagnostics& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

static std::string summarize(const Diagnostics& diags) {
    if (diags.empty()) return "unknown error";
    return diags.front().format();
}

DiagnosticError::DiagnosticError(Diagnostics diags) : Error(summarize(diags)), diags_(std::move(diags)) {}

}  // namespace ibp
