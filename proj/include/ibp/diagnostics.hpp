#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibp {

/// Half-open region of an input file; lines and columns are 1-based.
struct SourceSpan {
    std::string file;
    int start_line = 0;
    int start_col = 0;
    int end_line = 0;
    int end_col = 0;

    bool valid() const { return start_line > 0; }
    std::string to_string() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourceSpan span;

    bool is_error() const { return severity == Severity::Error; }
    /// `file:line:col: severity[code]: message`
    std::string format() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);

inline Diagnostic make_error(std::string code, std::string message, SourceSpan span = {}) {
    return {Severity::Error, std::move(code), std::move(message), std::move(span)};
}

inline Diagnostic make_warning(std::string code, std::string message, SourceSpan span = {}) {
    return {Severity::Warning, std::move(code), std::move(message), std::move(span)};
}

/// Thrown when a pipeline stage is handed input that earlier stages should have rejected.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Carries diagnostics out of a stage that cannot continue.
class DiagnosticError : public Error {
public:
    explicit DiagnosticError(Diagnostics diags);
    const Diagnostics& diagnostics() const { return diags_; }

private:
    Diagnostics diags_;
};

}  // namespace ibp
