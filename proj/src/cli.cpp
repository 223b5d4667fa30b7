#include "ibp/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json_value.hpp"

#include "ibp/analysis.hpp"
#include "ibp/dot.hpp"
#include "ibp/parser.hpp"

namespace ibp {

namespace {

std::optional<VerificationContext> load(const std::string& file, Diagnostics& diags) {
    ParseResult r = parse_file(file);
    diags = std::move(r.diagnostics);
    if (!r.context || has_errors(diags)) return std::nullopt;
    return std::move(r.context);
}

void print_diagnostics(const Diagnostics& diags, std::ostream& os) {
    for (const auto& d : diags) os << d.format() << "\n";
}

nlohmann::json diagnostic_json(const Diagnostic& d) {
    return {{"type", "diagnostic"},
            {"severity", d.is_error() ? "error" : "warning"},
            {"code", d.code},
            {"message", d.message},
            {"span", d.span.valid() ? d.span.to_string() : ""}};
}

/// A cycle without a variant blocks termination checking; it only stays a
/// warning when termination is postponed.
void escalate_termination(Diagnostics& diags) {
    for (auto& d : diags) {
        if (d.code == "TERM001" || d.code == "TERM003") d.severity = Severity::Error;
    }
}

std::string primary_span(const VC& vc) {
    return vc.provenance.empty() ? std::string() : vc.provenance.front().to_string();
}

void human_result(const VcResult& r, bool timing, std::ostream& out) {
    const VC& vc = r.vc;
    std::string verdict(to_string(r.verdict.kind));
    out << std::left << std::setw(9) << verdict << vc.id;
    if (timing) out << "  (" << std::fixed << std::setprecision(1) << r.verdict.ms << " ms)";
    out << "\n";
    if (r.verdict.kind == VerdictKind::Proved) return;
    if (!r.verdict.reason.empty()) out << "    reason: " << r.verdict.reason << "\n";
    for (const auto& s : vc.provenance) out << "    at " << s.to_string() << "\n";
    if (!vc.origin.empty()) out << "    from: " << vc.origin << "\n";
    out << "    goal: " << to_string(vc.consequent) << "\n";
    if (r.verdict.model) {
        out << "    counterexample: " << to_string(r.verdict.model->values);
        if (r.verdict.model->partial) out << " (partial)";
        out << "\n";
    }
}

nlohmann::json result_json(const VcResult& r, bool timing) {
    const VC& vc = r.vc;
    nlohmann::json j{{"type", "vc"},
                     {"id", vc.id},
                     {"kind", std::string(to_string(vc.kind))},
                     {"procedure", vc.procedure},
                     {"situation", vc.situation},
                     {"transition", vc.transition},
                     {"verdict", std::string(to_string(r.verdict.kind))},
                     {"span", primary_span(vc)},
                     {"origin", vc.origin}};
    if (!r.verdict.reason.empty()) j["reason"] = r.verdict.reason;
    if (r.verdict.model) {
        j["model"] = to_json(r.verdict.model->values);
        j["model_partial"] = r.verdict.model->partial;
    }
    if (timing) j["ms"] = r.verdict.ms;
    return j;
}

}  // namespace

int cmd_check(const std::string& file, const CheckOptions& opts, std::ostream& out, std::ostream& err) {
    const bool jsonl = opts.format == OutputFormat::Jsonl;
    std::ostream& diag_out = jsonl ? out : err;
    auto emit_diags = [&](const Diagnostics& ds) {
        if (jsonl) {
            for (const auto& d : ds) out << diagnostic_json(d).dump() << "\n";
        } else {
            print_diagnostics(ds, diag_out);
        }
    };

    Diagnostics diags;
    auto ctx = load(file, diags);
    if (!ctx) {
        emit_diags(diags);
        return kExitError;
    }
    if (!opts.procedure.empty() && !ctx->find_procedure(opts.procedure)) {
        diags.push_back(make_error("CLI001", "no procedure named '" + opts.procedure + "'"));
        emit_diags(diags);
        return kExitError;
    }
    Diagnostics analysis = analyze(*ctx);
    if (opts.termination) escalate_termination(analysis);
    diags.insert(diags.end(), analysis.begin(), analysis.end());
    emit_diags(diags);
    if (has_errors(diags)) return kExitError;

    VcOptions vo;
    vo.termination = opts.termination;
    vo.liveness = opts.liveness;
    vo.procedure = opts.procedure;
    std::vector<VC> vcs;
    try {
        vcs = generate_all(*ctx, vo);
    } catch (const DiagnosticError& e) {
        emit_diags(e.diagnostics());
        return kExitError;
    }

    if (!opts.solver.dump_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(opts.solver.dump_dir, ec);
        if (ec) {
            emit_diags({make_error("IO002", "cannot create '" + opts.solver.dump_dir + "': " + ec.message())});
            return kExitError;
        }
    }

    auto start = std::chrono::steady_clock::now();
    Report report = check_all(vcs, *ctx->theory, opts.solver, [&](const VcResult& r) {
        if (jsonl) {
            out << result_json(r, opts.timing).dump() << "\n";
        } else {
            human_result(r, opts.timing, out);
        }
        out.flush();
    });
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    int code = report.errors > 0 ? kExitError : report.all_proved() ? kExitOk : kExitUnproved;
    const char* status = code == kExitOk ? "success" : code == kExitUnproved ? "unproved" : "error";
    if (jsonl) {
        nlohmann::json s{{"type", "summary"},     {"file", file},
                         {"vcs", vcs.size()},     {"proved", report.proved},
                         {"refuted", report.refuted}, {"unknown", report.unknown},
                         {"errors", report.errors}, {"status", status}};
        if (opts.timing) s["seconds"] = seconds;
        out << s.dump() << "\n";
    } else {
        out << report.proved << " proved, " << report.refuted << " refuted, " << report.unknown << " unknown, "
            << report.errors << " errors";
        if (opts.timing) out << " in " << std::fixed << std::setprecision(1) << seconds << " s";
        out << "\n" << status << "\n";
    }
    return code;
}

int cmd_vcs(const std::string& file, const VcsOptions& opts, std::ostream& out, std::ostream& err) {
    Diagnostics diags;
    auto ctx = load(file, diags);
    print_diagnostics(diags, err);
    if (!ctx) return kExitError;
    if (!opts.procedure.empty() && !ctx->find_procedure(opts.procedure)) {
        err << make_error("CLI001", "no procedure named '" + opts.procedure + "'").format() << "\n";
        return kExitError;
    }
    VcOptions vo;
    vo.termination = opts.termination;
    vo.liveness = opts.liveness;
    vo.procedure = opts.procedure;
    std::vector<VC> vcs;
    try {
        vcs = generate_all(*ctx, vo);
    } catch (const DiagnosticError& e) {
        print_diagnostics(e.diagnostics(), err);
        return kExitError;
    }
    bool first = true;
    for (const auto& vc : vcs) {
        if (!opts.ids.empty()) {
            bool keep = false;
            for (const auto& id : opts.ids) keep |= vc.id.find(id) != std::string::npos;
            if (!keep) continue;
        }
        if (!first) out << "\n";
        first = false;
        out << render(vc);
    }
    return kExitOk;
}

int cmd_run(const std::string& file, const RunCommandOptions& opts, std::ostream& out, std::ostream& err) {
    Diagnostics diags;
    auto ctx = load(file, diags);
    print_diagnostics(diags, err);
    if (!ctx) return kExitError;
    std::string proc = opts.procedure;
    if (proc.empty()) {
        if (ctx->procedures.size() != 1) {
            err << "error: --proc is required when the context has several procedures\n";
            return kExitError;
        }
        proc = ctx->procedures.front().name;
    }
    RunOptions ro;
    ro.policy = opts.policy;
    ro.seed = opts.seed;
    ro.step_limit = opts.step_limit;
    Trace t;
    try {
        t = run(*ctx, proc, parse_store(opts.input), ro);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    out << (opts.json ? trace_json(t) + "\n" : trace_text(t));
    if (t.violation) {
        const Violation& v = *t.violation;
        err << (v.span.valid() ? v.span.to_string() + ": " : std::string()) << to_string(v.kind) << ": " << v.message
            << "\n";
        return kExitUnproved;
    }
    return kExitOk;
}

int cmd_dot(const std::string& file, std::ostream& out, std::ostream& err) {
    Diagnostics diags;
    auto ctx = load(file, diags);
    print_diagnostics(diags, err);
    if (!ctx) return kExitError;
    out << export_dot(*ctx);
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Invariant-based program checker", args.empty() ? "ibp" : args.front()};
    app.require_subcommand(1);

    std::string file;
    CheckOptions check;
    std::string format = "human";
    int timeout = check.solver.timeout_ms;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool no_term = false, no_live = false;
    auto* c = app.add_subcommand("check", "verify every procedure of a context");
    c->add_option("file", file, "context file")->required();
    c->add_option("--proc", check.procedure, "only this procedure");
    c->add_flag("--no-termination", no_term, "postpone termination checking");
    c->add_flag("--no-liveness", no_live, "postpone liveness checking");
    c->add_option("--timeout", timeout, "solver timeout per VC in milliseconds")->check(CLI::PositiveNumber);
    c->add_option("--solver", check.solver.command, "solver command reading SMT-LIB from stdin");
    c->add_option("--jobs", jobs, "parallel solver processes")->check(CLI::PositiveNumber);
    c->add_option("--dump-smt", check.solver.dump_dir, "write each script to DIR/<vc-id>.smt2");
    c->add_option("--format", format, "report format")->check(CLI::IsMember({"human", "jsonl"}));
    c->add_flag("--timing", check.timing, "include wall times");

    VcsOptions vcs;
    auto* v = app.add_subcommand("vcs", "print verification conditions");
    v->add_option("file", file, "context file")->required();
    v->add_option("--proc", vcs.procedure, "only this procedure");
    v->add_flag("--no-termination", no_term, "omit termination conditions");
    v->add_flag("--no-liveness", no_live, "omit liveness conditions");
    v->add_option("--id", vcs.ids, "only VCs whose id contains this text");

    RunCommandOptions runo;
    std::string policy = "first-enabled", run_format = "text";
    auto* r = app.add_subcommand("run", "execute a procedure");
    r->add_option("file", file, "context file")->required();
    r->add_option("--proc", runo.procedure, "procedure to run");
    r->add_option("--input", runo.input, "initial store, e.g. \"a=[3,1,2]\"");
    r->add_option("--seed", runo.seed, "seed for the random policy");
    r->add_option("--policy", policy, "transition selection")->check(CLI::IsMember({"first-enabled", "random"}));
    r->add_option("--step-limit", runo.step_limit, "maximum situation arrivals");
    r->add_option("--format", run_format, "trace format")->check(CLI::IsMember({"text", "json"}));

    auto* d = app.add_subcommand("dot", "export situation graphs as DOT");
    d->add_option("file", file, "context file")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("ibp");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (c->parsed()) {
        check.termination = !no_term;
        check.liveness = !no_live;
        check.solver.timeout_ms = timeout;
        check.solver.workers = jobs;
        check.format = format == "jsonl" ? OutputFormat::Jsonl : OutputFormat::Human;
        return cmd_check(file, check, out, err);
    }
    if (v->parsed()) {
        vcs.termination = !no_term;
        vcs.liveness = !no_live;
        return cmd_vcs(file, vcs, out, err);
    }
    if (r->parsed()) {
        runo.policy = policy == "random" ? Policy::Random : Policy::FirstEnabled;
        runo.json = run_format == "json";
        return cmd_run(file, runo, out, err);
    }
    return cmd_dot(file, out, err);
}

}  // namespace ibp
