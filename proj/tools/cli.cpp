#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xpm/analytic.hpp"
#include "xpm/config.hpp"
#include "xpm/errors.hpp"
#include "xpm/steady.hpp"
#include "xpm/symmetry.hpp"

namespace xpm::cli {

namespace {

using nlohmann::json;

struct Flags {
    std::string system, case_kind, config, out, axis, range, policy;
    std::vector<std::string> methods, sets;
    std::optional<double> tol;
};

std::vector<std::string> to_overrides(const Flags& f) {
    std::vector<std::string> o = f.sets;
    if (!f.system.empty()) o.push_back("system=\"" + f.system + "\"");
    if (!f.case_kind.empty()) o.push_back("case=\"" + f.case_kind + "\"");
    if (!f.axis.empty()) o.push_back("sweep.axis=\"" + f.axis + "\"");
    if (!f.range.empty()) {
        std::vector<std::string> parts;
        std::stringstream ss(f.range);
        for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
        if (parts.size() != 3) throw CLI::ValidationError("--range", "expected start:stop:points");
        o.push_back("sweep.start=" + parts[0]);
        o.push_back("sweep.stop=" + parts[1]);
        o.push_back("sweep.points=" + parts[2]);
    }
    if (!f.methods.empty()) {
        std::string list = "sweep.methods=[";
        for (std::size_t i = 0; i < f.methods.size(); ++i) list += (i ? ",\"" : "\"") + f.methods[i] + "\"";
        o.push_back(list + "]");
        o.push_back("compare.a=\"" + f.methods[0] + "\"");
        if (f.methods.size() > 1) o.push_back("compare.b=\"" + f.methods[1] + "\"");
    }
    if (!f.policy.empty()) o.push_back("compare.policy=\"" + f.policy + "\"");
    if (f.tol) {
        std::ostringstream os;
        os.precision(17);
        os << "tolerance=" << *f.tol;
        std::string s = os.str();
        if (s.find_first_of(".eE") == std::string::npos) s += ".0";
        o.push_back(s);
    }
    return o;
}

RunSettings settings_from(const Flags& f) {
    const auto overrides = to_overrides(f);
    return f.config.empty() ? default_settings(overrides) : load_settings(f.config, overrides);
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw Error("cannot open '" + path + "' for writing");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

bool json_path(const std::string& path) { return path.size() >= 5 && path.substr(path.size() - 5) == ".json"; }

int cmd_sweep(const Flags& f, std::ostream& out, std::ostream& err) {
    const RunSettings s = settings_from(f);
    const SweepResult r = run_sweep(s.sweep);
    Output o(f.out, out);
    if (json_path(f.out)) emit_json(r, o.stream());
    else emit_csv(r, o.stream());
    err << "sweep: " << r.rows.size() << " rows over " << s.sweep.range.points << " points\n";
    for (const auto& line : r.log) err << "  " << line << '\n';
    return kOk;
}

int cmd_compare(const Flags& f, std::ostream& out, std::ostream& err) {
    RunSettings s = settings_from(f);
    SweepSpec spec = s.sweep;
    spec.methods = {s.compare.a};
    const SweepResult a = run_sweep(spec);
    spec.methods = {s.compare.b};
    const SweepResult b = run_sweep(spec);
    json fields = json::array();
    for (const auto& c : compare(a, b, s.compare.policy)) {
        fields.push_back({{"field", to_string(c.field)},
                          {"a", to_string(c.method_a)},
                          {"b", to_string(c.method_b)},
                          {"rel_l2_im", c.metrics.rel_l2_im},
                          {"rel_l2_re", c.metrics.rel_l2_re},
                          {"max_abs_im", c.metrics.max_abs_im},
                          {"max_abs_re", c.metrics.max_abs_re},
                          {"points", c.metrics.points}});
        err << to_string(c.field) << ": rel L2 Im " << c.metrics.rel_l2_im << ", Re " << c.metrics.rel_l2_re << '\n';
    }
    json policy = {{"kind", s.compare.policy.kind == BackgroundPolicy::Kind::Raw ? "raw"
                            : s.compare.policy.kind == BackgroundPolicy::Kind::ExcludeWindow
                                ? "exclude-window"
                                : "subtract-linear-background"},
                   {"center", s.compare.policy.center},
                   {"width", s.compare.policy.width}};
    Output o(f.out, out);
    o.stream() << json{{"policy", policy}, {"fields", fields}}.dump(2) << '\n';
    return kOk;
}

SymmetryReport shared_report(const SystemParams& p, double tol) {
    std::vector<FieldTerm> terms;
    switch (p.scheme.system) {
    case SystemId::System1:
        if (p.case_kind == Case::CPT) {
            const auto c = signal_coherence_s1_cpt(p);
            terms.push_back({FieldId::Signal, c.term("dominant"), photon_flux(c, FieldId::Signal, p, "dominant")});
            terms.push_back(absent_counterpart(c.term("dominant"), FieldId::Coupling));
        } else {
            terms.push_back(shared_process_term(p, FieldId::Coupling));
            terms.push_back(shared_process_term(p, FieldId::Signal));
        }
        break;
    case SystemId::System2:
        for (FieldId id : {FieldId::FieldD, FieldId::FieldA, FieldId::FieldC})
            terms.push_back(shared_process_term(p, id));
        break;
    case SystemId::System3: {
        const auto c = perturbed_coherences_s3(p);
        terms.push_back({FieldId::WeakSignal24, c.b2db4.term("t2"), std::nullopt});
        terms.push_back(absent_counterpart(c.b2db4.term("t2"), FieldId::WeakSignal23));
        break;
    }
    }
    return check_field_symmetry(terms, tol);
}

int cmd_symmetry(const Flags& f, std::ostream& out, std::ostream& err) {
    const RunSettings s = settings_from(f);
    const SymmetryReport r = shared_report(s.params(), s.tolerance);
    Output o(f.out, out);
    o.stream() << to_json(r) << '\n';
    err << "symmetry: " << (r.all_symmetric() ? "symmetric" : "asymmetric") << " (" << r.signature << ")\n";
    return kOk;
}

int cmd_classify(const Flags& f, std::ostream& out, std::ostream& err) {
    const RunSettings s = settings_from(f);
    const SystemParams& p = s.params();
    const SymmetryReport r = shared_report(p, s.tolerance);
    const ProcessHypothesis h =
        classify_process(r, {p.scheme.system, p.scheme.system == SystemId::System3});
    Output o(f.out, out);
    o.stream() << to_json(h) << '\n';
    err << "classify: " << to_string(h.label) << '\n';
    return kOk;
}

int cmd_flux(const Flags& f, std::ostream& out, std::ostream& err) {
    const RunSettings s = settings_from(f);
    const SystemParams& p = s.params();
    std::vector<FieldId> fields;
    if (p.scheme.system == SystemId::System1 && p.case_kind == Case::EIT) fields = {FieldId::Coupling, FieldId::Signal};
    else if (p.scheme.system == SystemId::System2)
        fields = {FieldId::FieldA, FieldId::FieldB, FieldId::FieldC, FieldId::FieldD};
    else throw CaseError("flux balance needs System1 (eit) or System2");
    const FluxBalance b = flux_balance(p, fields, s.tolerance);
    Output o(f.out, out);
    o.stream() << to_json(b) << '\n';
    err << "flux: " << (b.equal ? "equal" : "unequal") << '\n';
    return b.equal ? kOk : kValidationFailure;
}

struct Check {
    std::string name;
    cplx analytic, oracle;
    double error;
    bool pass;
};

Check check(std::string name, const CoherenceResult& c, const SystemParams& p, double tol) {
    const cplx o = oracle_coherence(p, c.bra, c.ket);
    const double scale = std::abs(o);
    const double e = scale > 0.0 ? std::abs(c.total - o) / scale : std::abs(c.total);
    return {std::move(name), c.total, o, e, e < tol};
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
    const RunSettings s = settings_from(f);
    const SystemParams& p = s.params();
    const double tol = s.tolerance;
    std::vector<Check> checks;
    switch (p.scheme.system) {
    case SystemId::System1:
        if (p.case_kind == Case::CPT) {
            const auto branches = signal_coherence_s1_cpt_branches(p);
            std::optional<Check> best;
            for (const auto& c : branches) {
                Check k = check("signal_cpt_branch" + std::to_string(c.branch_id), c, p, tol);
                if (!best || k.error < best->error) best = k;
            }
            checks.push_back(*best);
        } else {
            checks.push_back(check("probe", probe_coherence_s1(p), p, tol));
            checks.push_back(check("coupling", coupling_coherence_s1(p), p, tol));
            checks.push_back(check("signal", signal_coherence_s1(p), p, tol));
        }
        break;
    case SystemId::System2: {
        const auto c = coherences_s2(p);
        checks.push_back(check("b1b3", c.b1b3, p, tol));
        checks.push_back(check("b1b2", c.b1b2, p, tol));
        checks.push_back(check("b2b3", c.b2b3, p, tol));
        break;
    }
    case SystemId::System3: {
        const auto c = perturbed_coherences_s3(p);
        checks.push_back(check("b2db4", c.b2db4, p, tol));
        checks.push_back(check("b4db2", c.b4db2, p, tol));
        for (const auto& w : c.warnings) err << "warning: " << w << '\n';
        break;
    }
    }
    bool ok = true;
    json rows = json::array();
    for (const auto& k : checks) {
        ok = ok && k.pass;
        rows.push_back({{"name", k.name},
                        {"analytic", {k.analytic.real(), k.analytic.imag()}},
                        {"oracle", {k.oracle.real(), k.oracle.imag()}},
                        {"relative_error", k.error},
                        {"pass", k.pass}});
        err << (k.pass ? "PASS " : "FAIL ") << k.name << " rel error " << k.error << '\n';
    }
    Output o(f.out, out);
    o.stream() << json{{"tolerance", tol}, {"checks", rows}, {"verdict", ok ? "pass" : "fail"}}.dump(2) << '\n';
    return ok ? kOk : kValidationFailure;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiphoton coherence sweeps and symmetry checks", "xpm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());
    Flags flags;

    const auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--system", flags.system, "System 1, 2 or 3")->check(CLI::IsMember({"1", "2", "3"}));
        sub->add_option("--case", flags.case_kind, "eit or cpt")->check(CLI::IsMember({"eit", "cpt"}));
        sub->add_option("--config", flags.config, "TOML configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "Output file (stdout when absent)");
        sub->add_option("--axis", flags.axis, "coupling or probe")->check(CLI::IsMember({"coupling", "probe"}));
        sub->add_option("--range", flags.range, "start:stop:points in MHz");
        sub->add_option("--method", flags.methods, "analytic, lindblad or oracle (repeatable)")
            ->check(CLI::IsMember({"analytic", "lindblad", "oracle"}));
        sub->add_option("--tol", flags.tol, "Tolerance for checks")->check(CLI::PositiveNumber);
        sub->add_option("--policy", flags.policy, "raw, subtract-linear-background or exclude-window")
            ->check(CLI::IsMember({"raw", "subtract-linear-background", "exclude-window"}));
        sub->add_option("--set", flags.sets, "key=value override (repeatable, last wins)");
    };

    using Handler = int (*)(const Flags&, std::ostream&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"sweep", "Run a detuning sweep and write CSV or JSON", cmd_sweep},
        {"compare", "Compare two methods over a sweep", cmd_compare},
        {"symmetry", "Cross-field symmetry report", cmd_symmetry},
        {"classify", "Process-type hypothesis", cmd_classify},
        {"flux", "Per-field photon flux and balance verdict", cmd_flux},
        {"validate", "Closed forms against the linear-solve oracle", cmd_validate},
    };
    std::vector<std::pair<CLI::App*, Handler>> subs;
    for (const auto& [name, help, handler] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        subs.emplace_back(sub, handler);
    }

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        for (const auto& [sub, handler] : subs)
            if (sub->parsed()) return handler(flags, out, err);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ValidationError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    return kUsageError;
}

} // namespace xpm::cli
