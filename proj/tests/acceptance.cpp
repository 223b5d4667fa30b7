// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ibp/cli.hpp"
#include "ibp/finite.hpp"
#include "ibp/interpreter.hpp"
#include "ibp/vcgen.hpp"
#include "test_util.hpp"
#include "wp_properties.hpp"

using namespace ibp;
using json = nlohmann::json;

namespace {

constexpr int kTimeoutMs = 60000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs", s);
    return buf;
}

struct CheckRun {
    int exit = -1;
    double seconds = 0;
    std::map<std::string, json> records;  // by VC id
    std::vector<json> diagnostics;
    std::map<std::string, VC> vcs;  // generated VCs by id

    std::string verdict(const std::string& id) const {
        auto it = records.find(id);
        return it == records.end() ? "missing" : it->second["verdict"].get<std::string>();
    }
    bool proved(const std::string& id) const { return verdict(id) == "proved"; }
    std::vector<std::string> unproved() const {
        std::vector<std::string> out;
        for (const auto& [id, r] : records) {
            if (r["verdict"] != "proved") out.push_back(id);
        }
        return out;
    }
    bool has_warning(const std::string& code) const {
        return std::any_of(diagnostics.begin(), diagnostics.end(),
                           [&](const json& d) { return d["code"] == code && d["severity"] == "warning"; });
    }
};

std::map<std::string, CheckRun> g_runs;

/// `ibp check --format jsonl` on a corpus file at the acceptance timeout, memoized.
const CheckRun& check(const std::string& name, bool termination = true) {
    std::string key = name + (termination ? "" : "#noterm");
    if (auto it = g_runs.find(key); it != g_runs.end()) return it->second;
    CheckOptions opts;
    opts.termination = termination;
    opts.solver.timeout_ms = kTimeoutMs;
    opts.format = OutputFormat::Jsonl;
    std::ostringstream out, err;
    CheckRun run;
    auto t0 = Clock::now();
    run.exit = cmd_check(testutil::corpus(name), opts, out, err);
    run.seconds = seconds_since(t0);
    std::stringstream ss(out.str());
    for (std::string line; std::getline(ss, line);) {
        if (line.empty()) continue;
        json r = json::parse(line);
        if (r["type"] == "vc") run.records[r["id"].get<std::string>()] = r;
        if (r["type"] == "diagnostic") run.diagnostics.push_back(r);
    }
    if (run.exit != kExitError) {
        auto ctx = testutil::load_corpus(name);
        VcOptions vo;
        vo.termination = termination;
        for (auto& vc : generate_all(ctx, vo)) run.vcs.emplace(vc.id, std::move(vc));
    }
    return g_runs.emplace(key, std::move(run)).first->second;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
    return out;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------

Outcome selection_sort_verifies() {
    const auto& r = check("selection_sort");
    bool ok = r.exit == kExitOk && r.seconds < 120 && r.unproved().empty() && !r.records.empty();
    return {ok, "exit " + std::to_string(r.exit) + ", " + std::to_string(r.records.size()) + " VCs in " +
                    fmt_seconds(r.seconds)};
}

Outcome selection_sort_bug_on_inner_loop() {
    const auto& r = check("selection_sort_bug");
    const std::string loop = "selection_sort/Inner/t3#0/";
    const std::string span = testutil::corpus("selection_sort_bug") + ":32:5";
    auto bad = r.unproved();
    bool ok = r.exit == kExitUnproved && !bad.empty();
    for (const auto& id : bad) {
        ok = ok && starts_with(id, loop) && r.records.at(id)["span"] == span;
    }
    // the other transitions of the loop keep their proofs
    int siblings = 0;
    for (const auto& [id, rec] : r.records) {
        if (starts_with(id, "selection_sort/Inner/") && !starts_with(id, loop)) {
            ++siblings;
            ok = ok && rec["verdict"] == "proved";
        }
    }
    return {ok, "exit " + std::to_string(r.exit) + ", unproved: " + join(bad) + ", " + std::to_string(siblings) +
                    " sibling VCs proved"};
}

Outcome buggy_siftdown_exit_goal() {
    const auto& r = check("siftdown_bug");
    const VC* exit_vc = nullptr;
    for (const auto& [id, vc] : r.vcs) {
        if (starts_with(id, "siftdown/Sift/t1#0/") && to_string(vc.consequent) == "heap(a, m, n)") exit_vc = &vc;
    }
    if (!exit_vc) return {false, "exit goal heap(a, m, n) not generated"};
    std::vector<std::string> ants;
    for (const auto& a : exit_vc->antecedents) ants.push_back(to_string(a));
    const std::vector<std::string> want = {"n <= r(k) or a[l(k)] <= a[k] and a[r(k)] <= a[k]", "", "perm(a, a_0)",
                                           "m <= k and k <= n and n <= len(a)", "eql(a, a_0, 0, m)",
                                           "eql(a, a_0, n, len(a))", "forall (i: nat): m <= i =>"};
    bool shape = ants.size() == 7;
    for (std::size_t i = 0; shape && i < want.size(); ++i) {
        if (!want[i].empty()) shape = starts_with(ants[i], want[i]);
    }
    std::string rendered = render(*exit_vc);
    shape = shape && rendered.find("[-7]") != std::string::npos && rendered.find("[-8]") == std::string::npos;
    auto bad = r.unproved();
    bool only = bad == std::vector<std::string>{exit_vc->id};
    return {shape && only && !r.proved(exit_vc->id),
            exit_vc->id + " " + r.verdict(exit_vc->id) + ", " + std::to_string(ants.size()) +
                " antecedents, unproved: " + join(bad)};
}

Outcome strengthened_guard_loses_liveness() {
    const auto& r = check("siftdown_strengthened");
    int consistency = 0;
    bool ok = true;
    for (const auto& [id, vc] : r.vcs) {
        if (starts_with(id, "siftdown/Sift/t1#0/") && vc.kind == VcKind::Consistency) {
            ++consistency;
            ok = ok && r.proved(id);
        }
    }
    const std::string live = "siftdown/Sift/live";
    std::string lv;
    for (const auto& [id, rec] : r.records) {
        if (starts_with(id, live)) lv = id;
    }
    ok = ok && consistency > 0 && !lv.empty() && !r.proved(lv);
    return {ok, std::to_string(consistency) + " exit consistency VCs proved, " + lv + " " + r.verdict(lv)};
}

Outcome final_siftdown_verifies() {
    const auto& r = check("siftdown_fixed");
    auto ctx = testutil::load_corpus("siftdown_fixed");
    std::size_t lemmas = ctx.theory->active_lemmas().size();
    bool ok = r.exit == kExitOk && r.unproved().empty() && r.seconds < 300 && lemmas == 6;
    return {ok, "exit " + std::to_string(r.exit) + ", " + std::to_string(r.records.size()) + " VCs, " +
                    std::to_string(lemmas) + " lemmas, " + fmt_seconds(r.seconds)};
}

Outcome heapsort_without_asserts() {
    const auto& r = check("heapsort_no_asserts");
    auto bad = r.unproved();
    bool ok = r.exit == kExitUnproved && bad.size() == 1 && starts_with(bad[0], "heapsort/TearHeap/t3#0/") &&
              to_string(r.vcs.at(bad[0]).consequent) == "partitioned(a_1, k - 1)";
    return {ok, "unproved: " + join(bad)};
}

Outcome heapsort_final_verifies() {
    const auto& r = check("heapsort_final");
    auto ctx = testutil::load_corpus("heapsort_final");
    const Procedure& p = *ctx.find_procedure("heapsort");
    int asserts = 0;
    for (const auto& t : p.transitions) {
        for (const auto& s : t.body) asserts += s.kind == Statement::Kind::Assert;
    }
    int assert_goals = 0;
    std::string partition;
    bool ok = r.exit == kExitOk && r.unproved().empty() && asserts == 2;
    for (const auto& [id, vc] : r.vcs) {
        if (!starts_with(id, "heapsort/")) continue;
        if (vc.origin == "assertion") {
            ++assert_goals;
            ok = ok && r.proved(id);
        }
        if (starts_with(id, "heapsort/TearHeap/t3#0/") && to_string(vc.consequent) == "partitioned(a_1, k - 1)") {
            partition = id;
        }
    }
    ok = ok && assert_goals >= 2 && !partition.empty() && r.proved(partition);
    return {ok, "exit " + std::to_string(r.exit) + ", " + std::to_string(asserts) + " asserts (" +
                    std::to_string(assert_goals) + " goals) proved, " + partition + " " + r.verdict(partition)};
}

Outcome skeleton_stages() {
    const auto& sk = check("heapsort_skeleton");
    bool ok = sk.exit == kExitOk && sk.unproved().empty() && sk.has_warning("LIVE001") && sk.has_warning("LIVE002");
    const auto& ac = check("heapsort_acyclic");
    int consistency = 0;
    std::vector<std::string> not_live;
    for (const auto& [id, vc] : ac.vcs) {
        if (vc.kind == VcKind::Consistency) {
            ++consistency;
            ok = ok && ac.proved(id);
        }
        if (vc.kind == VcKind::Liveness && !ac.proved(id)) not_live.push_back(id);
    }
    ok = ok && consistency > 0 && !not_live.empty();
    return {ok, "skeleton: LIVE001/LIVE002 warned; acyclic: " + std::to_string(consistency) +
                    " consistency VCs proved, not live: " + join(not_live)};
}

Outcome lemma_soundness() {
    auto t0 = Clock::now();
    auto ctx = testutil::load_corpus("heapsort_final");
    auto results = lemma_soundness_suite(*ctx.theory, 4, -2, 2);
    double s = seconds_since(t0);
    std::set<std::string> held;
    std::vector<std::string> failed;
    for (const auto& r : results) {
        if (r.holds() && r.search.complete) {
            held.insert(r.lemma);
        } else {
            failed.push_back(r.lemma);
        }
    }
    bool ok = failed.empty() && s < 60;
    for (const char* want : {"perm_ref", "perm_sym", "perm_trs", "perm_len", "swap_acc", "swap_perm", "heap_max",
                             "perm_partitioned"}) {
        ok = ok && held.count(want);
    }
    return {ok, std::to_string(held.size()) + " lemmas hold" + (failed.empty() ? "" : ", failed: " + join(failed)) +
                    ", " + fmt_seconds(s)};
}

Outcome heapsort_oracle() {
    auto t0 = Clock::now();
    auto ctx = testutil::load_corpus("heapsort_final");
    std::mt19937_64 rng(20111);
    int runs = 0, violations = 0, wrong = 0, variant_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::int64_t> v(std::uniform_int_distribution<std::size_t>(0, 12)(rng));
        for (auto& x : v) x = std::uniform_int_distribution<int>(-50, 50)(rng);
        std::vector<std::int64_t> want = v;
        std::sort(want.begin(), want.end());
        for (Policy policy : {Policy::FirstEnabled, Policy::Random}) {
            RunOptions opts;
            opts.policy = policy;
            opts.seed = static_cast<std::uint64_t>(i);
            auto t = run(ctx, "heapsort", {{"a", Value::of_vector(v)}}, opts);
            ++runs;
            if (!t.ok()) {
                ++violations;
                continue;
            }
            const auto& got = t.final_store.at("a").v;
            if (got != want || !multiset_equal(got, v)) ++wrong;
            for (const auto& st : t.steps) {
                for (const auto& s : st.variants) {
                    if (s.before < 0 || (s.strict && s.after >= s.before) || s.after > s.before) ++variant_bad;
                }
            }
        }
    }
    double s = seconds_since(t0);
    bool ok = violations == 0 && wrong == 0 && variant_bad == 0 && s < 30;
    return {ok, std::to_string(runs) + " runs, " + std::to_string(violations) + " violations, " +
                    std::to_string(wrong) + " wrong outputs, " + std::to_string(variant_bad) + " variant failures, " +
                    fmt_seconds(s)};
}

Outcome wp_properties() {
    auto rep = testutil::check_wp_properties(200, 11, kTimeoutMs);
    std::string detail = std::to_string(rep.cases) + " cases, " + std::to_string(rep.proved) + " equivalences proved, " +
                         std::to_string(rep.evaluated) + " evaluator probes";
    if (!rep.failures.empty()) detail += ", first failure: " + rep.failures.front();
    return {rep.ok(), detail};
}

Outcome soundness_audit() {
    auto t0 = Clock::now();
    FiniteBounds b;
    b.max_len = 4;
    b.min_value = 0;
    b.max_value = 3;
    std::size_t audited = 0, incomplete = 0;
    std::vector<std::string> countermodels;
    for (const char* name : {"selection_sort", "selection_sort_bug", "siftdown_bug", "siftdown_fixed",
                             "siftdown_strengthened", "heapsort_skeleton", "heapsort_acyclic", "heapsort_no_asserts",
                             "heapsort_final", "heapsort_buggy_sift"}) {
        const auto& r = check(name);
        auto ctx = testutil::load_corpus(name);
        for (const auto& [id, vc] : r.vcs) {
            if (!r.proved(id)) continue;
            auto s = audit_vc(vc, *ctx.theory, b);
            ++audited;
            if (!s.complete) ++incomplete;
            if (s.counterexample) countermodels.push_back(std::string(name) + ":" + id);
        }
    }
    const auto& partial = check("partial", false);
    auto pctx = testutil::load_corpus("partial");
    for (const auto& [id, vc] : partial.vcs) {
        if (!partial.proved(id)) continue;
        auto s = audit_vc(vc, *pctx.theory, b);
        ++audited;
        if (!s.complete) ++incomplete;
        if (s.counterexample) countermodels.push_back("partial:" + id);
    }
    bool ok = countermodels.empty() && incomplete == 0 && audited > 0;
    return {ok, std::to_string(audited) + " proved VCs audited, " + std::to_string(countermodels.size()) +
                    " countermodels, " + std::to_string(incomplete) + " incomplete, " +
                    fmt_seconds(seconds_since(t0)) +
                    (countermodels.empty() ? "" : ", first: " + countermodels.front())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"selection sort verifies", selection_sort_verifies},
        {"selection sort bug is confined to the inner loop", selection_sort_bug_on_inner_loop},
        {"buggy siftdown exit goal unproved with seven antecedents", buggy_siftdown_exit_goal},
        {"strengthened exit guard proves consistency but not liveness", strengthened_guard_loses_liveness},
        {"final siftdown verifies", final_siftdown_verifies},
        {"heapsort without asserts misses only the partition goal", heapsort_without_asserts},
        {"final heapsort verifies", heapsort_final_verifies},
        {"skeleton stages: placed transitions consistent, not live", skeleton_stages},
        {"shipped lemmas hold on finite models", lemma_soundness},
        {"heapsort runs agree with the reference sort", heapsort_oracle},
        {"wp conjunctivity and substitution", wp_properties},
        {"proved VCs have no finite countermodels", soundness_audit},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int n = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(n)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << criteria[i].first << " ("
                  << o.detail << ")" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
