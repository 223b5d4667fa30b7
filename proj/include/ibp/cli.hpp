#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ibp/interpreter.hpp"
#include "ibp/smt.hpp"

namespace ibp {

enum ExitCode { kExitOk = 0, kExitUnproved = 1, kExitError = 2, kExitUsage = 3 };

enum class OutputFormat { Human, Jsonl };

struct CheckOptions {
    std::string procedure;
    bool termination = true;
    bool liveness = true;
    SolverConfig solver = SolverConfig::from_env();
    OutputFormat format = OutputFormat::Human;
    /// Wall times in the report. Off in jsonl by default so records are byte-stable.
    bool timing = false;
};

/// parse, analyze, generate and discharge. Verdicts and the summary go to
/// `out`, diagnostics to `err` (human) or `out` (jsonl).
int cmd_check(const std::string& file, const CheckOptions& opts, std::ostream& out, std::ostream& err);

struct VcsOptions {
    std::string procedure;
    bool termination = true;
    bool liveness = true;
    /// Only VCs whose id contains one of these (all when empty).
    std::vector<std::string> ids;
};

int cmd_vcs(const std::string& file, const VcsOptions& opts, std::ostream& out, std::ostream& err);

struct RunCommandOptions {
    /// May be omitted when the context has a single procedure.
    std::string procedure;
    std::string input;
    Policy policy = Policy::FirstEnabled;
    std::uint64_t seed = 0;
    std::size_t step_limit = 1000000;
    bool json = false;
};

int cmd_run(const std::string& file, const RunCommandOptions& opts, std::ostream& out, std::ostream& err);

int cmd_dot(const std::string& file, std::ostream& out, std::ostream& err);

/// Full command line (`argv[0]` is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ibp
