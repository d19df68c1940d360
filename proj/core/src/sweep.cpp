#include "xpm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>
#include <tuple>

#include "xpm/analytic.hpp"
#include "xpm/config.hpp"
#include "xpm/errors.hpp"

#ifndef XPM_VERSION_STRING
#define XPM_VERSION_STRING "0.0.0"
#endif

namespace xpm {

std::string library_version() { return XPM_VERSION_STRING; }

std::string_view to_string(Axis a) { return a == Axis::Coupling ? "coupling" : "probe"; }

std::string_view to_string(Method m) {
    switch (m) {
    case Method::Analytic: return "analytic";
    case Method::Lindblad: return "lindblad";
    case Method::Oracle: return "oracle";
    }
    return "?";
}

std::optional<Axis> parse_axis(std::string_view text) {
    if (text == "coupling") return Axis::Coupling;
    if (text == "probe") return Axis::Probe;
    return std::nullopt;
}

std::optional<Method> parse_method(std::string_view text) {
    if (text == "analytic") return Method::Analytic;
    if (text == "lindblad") return Method::Lindblad;
    if (text == "oracle") return Method::Oracle;
    return std::nullopt;
}

std::optional<BackgroundPolicy::Kind> parse_policy(std::string_view text) {
    if (text == "raw") return BackgroundPolicy::Kind::Raw;
    if (text == "subtract-linear-background") return BackgroundPolicy::Kind::SubtractLinearBackground;
    if (text == "exclude-window") return BackgroundPolicy::Kind::ExcludeWindow;
    return std::nullopt;
}

double Range::at(int i) const {
    if (i == points - 1) return stop;
    return start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
}

void Range::validate() const {
    if (points < 2) throw ValidationError("sweep range needs at least 2 points");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
        throw ValidationError("sweep range needs start < stop");
}

void SweepSpec::validate() const {
    range.validate();
    fixed.validate();
    if (methods.empty()) throw ValidationError("sweep needs at least one method");
    for (auto f : fields) (void)reported_pair(fixed, f);
}

SystemParams params_at(const SweepSpec& spec, double x) {
    SystemParams p = spec.fixed;
    if (p.scheme.system == SystemId::System2) {
        const double ab = p.detuning(FieldId::FieldA) + p.detuning(FieldId::FieldB);
        if (spec.axis == Axis::Probe) {
            p.set_detuning(FieldId::FieldD, x);
            p.set_detuning(FieldId::FieldC, x - ab);
        } else {
            p.set_detuning(FieldId::FieldA, x / 2.0);
            p.set_detuning(FieldId::FieldB, x / 2.0);
            p.set_detuning(FieldId::FieldC, p.detuning(FieldId::FieldD) - x);
        }
        return p;
    }
    const double split = p.scheme.splitting_mhz;
    if (spec.axis == Axis::Coupling) {
        const double dc = x + split;
        p.set_detuning(FieldId::Coupling, dc);
        p.set_detuning(FieldId::Probe, dc + spec.two_photon);
        if (spec.lock_signal_to_coupling) p.set_detuning(FieldId::Signal, x);
    } else {
        p.set_detuning(FieldId::Probe, x);
        if (spec.lock_signal_to_coupling) p.set_detuning(FieldId::Signal, p.detuning(FieldId::Coupling) - split);
    }
    if (p.scheme.system == SystemId::System3) {
        p.set_detuning(FieldId::WeakSignal23, p.detuning(FieldId::Coupling));
        p.set_detuning(FieldId::WeakSignal24, p.detuning(FieldId::Signal));
    }
    return p;
}

std::vector<FieldId> default_fields(const SystemParams& p) {
    switch (p.scheme.system) {
    case SystemId::System1:
        if (p.case_kind == Case::CPT) return {FieldId::Signal};
        return {FieldId::Probe, FieldId::Coupling, FieldId::Signal};
    case SystemId::System2: return {FieldId::FieldD, FieldId::FieldA, FieldId::FieldC};
    case SystemId::System3: return {FieldId::WeakSignal24};
    }
    return {};
}

std::pair<int, int> reported_pair(const SystemParams& p, FieldId field) {
    switch (p.scheme.system) {
    case SystemId::System1:
        if (field == FieldId::Probe) return {1, 3};
        if (field == FieldId::Coupling) return {2, 3};
        if (field == FieldId::Signal) return {2, 4};
        break;
    case SystemId::System2:
        if (field == FieldId::FieldD) return {1, 3};
        if (field == FieldId::FieldA || field == FieldId::FieldB) return {1, 2};
        if (field == FieldId::FieldC) return {2, 3};
        break;
    case SystemId::System3:
        if (field == FieldId::WeakSignal23) return {2, 3};
        if (field == FieldId::WeakSignal24) return {2, 4};
        break;
    }
    throw ValidationError("field '" + std::string(to_string(field)) + "' is not reported for " +
                          std::string(to_string(p.scheme.system)));
}

namespace {

struct Note {
    FieldId field;
    Method method;
    double x;
    std::string what;
};

struct PointOut {
    std::vector<SweepRow> rows;
    std::vector<Note> notes;
    /// analytic candidates per field when several branches exist
    std::map<FieldId, std::vector<cplx>> branches;
};

std::vector<cplx> analytic_branches(const SystemParams& p, FieldId field) {
    switch (p.scheme.system) {
    case SystemId::System1:
        if (p.case_kind == Case::CPT) {
            if (field != FieldId::Signal) throw CaseError("no closed form for this field in the CPT case");
            std::vector<cplx> out;
            for (const auto& c : signal_coherence_s1_cpt_branches(p)) out.push_back(c.total);
            return out;
        }
        if (field == FieldId::Probe) return {probe_coherence_s1(p).total};
        if (field == FieldId::Coupling) return {coupling_coherence_s1(p).total};
        return {signal_coherence_s1(p).total};
    case SystemId::System2: {
        const auto c = coherences_s2(p);
        if (field == FieldId::FieldD) return {c.b1b3.total};
        if (field == FieldId::FieldC) return {c.b2b3.total};
        return {c.b1b2.total};
    }
    case SystemId::System3:
        if (field != FieldId::WeakSignal24) throw CaseError("no closed form for this field in system3");
        return {perturbed_coherences_s3(p).b2db4.total};
    }
    return {};
}

PointOut evaluate_point(const SweepSpec& spec, const std::vector<FieldId>& fields, double x) {
    PointOut out;
    const SystemParams p = params_at(spec, x);
    const bool want_lindblad =
        std::find(spec.methods.begin(), spec.methods.end(), Method::Lindblad) != spec.methods.end();

    std::optional<DensityState> rho;
    std::string lindblad_error;
    if (want_lindblad) {
        try {
            if (p.scheme.system == SystemId::System3)
                throw CaseError("the first-order weak-field coherence has no density-matrix counterpart");
            rho = lindblad_steady_state(p, spec.steady).state;
        } catch (const Error& e) {
            lindblad_error = e.what();
        }
    }

    for (auto field : fields) {
        const auto [bra, ket] = reported_pair(p, field);
        for (auto method : spec.methods) {
            SweepRow row{x, field, method, 0, std::nullopt};
            try {
                switch (method) {
                case Method::Analytic: {
                    auto cands = analytic_branches(p, field);
                    row.value = cands.front();
                    if (cands.size() > 1) out.branches[field] = std::move(cands);
                    break;
                }
                case Method::Oracle: row.value = oracle_coherence(p, bra, ket); break;
                case Method::Lindblad:
                    if (!rho) throw Error(lindblad_error);
                    row.value = (*rho)(ket, bra);
                    break;
                }
                if (row.value && !(std::isfinite(row.value->real()) && std::isfinite(row.value->imag())))
                    throw Error("non-finite value");
            } catch (const Error& e) {
                row.value.reset();
                out.notes.push_back({field, method, x, e.what()});
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

int thread_count(const SweepSpec& spec, int work) {
    int n = spec.threads;
    if (n <= 0) {
        if (const char* env = std::getenv("XPM_THREADS")) n = std::atoi(env);
        if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::clamp(n, 1, std::max(1, work));
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<FieldId> fields = spec.fields.empty() ? default_fields(spec.fixed) : spec.fields;
    const int n = spec.range.points;
    std::vector<PointOut> points(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) points[static_cast<std::size_t>(i)] = evaluate_point(spec, fields, spec.range.at(i));
    };
    const int threads = thread_count(spec, n);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SweepResult result;
    result.version = library_version();
    result.params_json = params_to_json(spec.fixed);

    // branch selection against the density-matrix trace, crossings logged
    std::map<FieldId, int> last_branch;
    for (auto& pt : points) {
        for (auto& [field, cands] : pt.branches) {
            std::optional<cplx> ref;
            for (const auto& r : pt.rows)
                if (r.field == field && r.method == Method::Lindblad) ref = r.value;
            int best = 0;
            if (ref) {
                double dist = std::abs(cands[0] - *ref);
                for (std::size_t b = 1; b < cands.size(); ++b)
                    if (std::abs(cands[b] - *ref) < dist) {
                        dist = std::abs(cands[b] - *ref);
                        best = static_cast<int>(b);
                    }
            }
            for (auto& r : pt.rows)
                if (r.field == field && r.method == Method::Analytic) {
                    r.branch = best;
                    r.value = cands[static_cast<std::size_t>(best)];
                    auto it = last_branch.find(field);
                    if (it != last_branch.end() && it->second != best)
                        result.log.push_back("branch crossing in " + std::string(to_string(field)) + " at x = " +
                                             std::to_string(r.axis_mhz) + ": " + std::to_string(it->second) +
                                             " -> " + std::to_string(best));
                    last_branch[field] = best;
                }
        }
        result.rows.insert(result.rows.end(), pt.rows.begin(), pt.rows.end());
    }

    // gaps summarised per (field, method, reason)
    struct Gap {
        int count = 0;
        double first = 0.0;
    };
    std::map<std::tuple<int, int, std::string>, Gap> gaps;
    for (const auto& pt : points)
        for (const auto& note : pt.notes) {
            auto& g = gaps[{static_cast<int>(note.field), static_cast<int>(note.method), note.what}];
            if (g.count++ == 0) g.first = note.x;
        }
    for (const auto& [key, g] : gaps) {
        const auto& [f, m, what] = key;
        result.log.push_back(std::string(to_string(static_cast<FieldId>(f))) + "/" +
                             std::string(to_string(static_cast<Method>(m))) + ": " + std::to_string(g.count) +
                             " gap(s), first at x = " + std::to_string(g.first) + ": " + what);
    }
    return result;
}

Trace extract(const SweepResult& r, FieldId field, Method method) {
    Trace t;
    for (const auto& row : r.rows)
        if (row.field == field && row.method == method) {
            t.axis.push_back(row.axis_mhz);
            t.values.push_back(row.value);
        }
    return t;
}

ComparisonMetrics compare(const Trace& a, const Trace& b, const BackgroundPolicy& policy) {
    if (a.axis.size() != b.axis.size()) throw GridMismatch("traces have different lengths");
    for (std::size_t i = 0; i < a.axis.size(); ++i)
        if (std::abs(a.axis[i] - b.axis[i]) > 1e-9 * (1.0 + std::abs(a.axis[i])))
            throw GridMismatch("traces are sampled on different axes");

    using Kind = BackgroundPolicy::Kind;
    std::vector<std::size_t> use;
    for (std::size_t i = 0; i < a.axis.size(); ++i) {
        if (!a.values[i] || !b.values[i]) continue;
        if (policy.kind == Kind::ExcludeWindow && std::abs(a.axis[i] - policy.center) <= policy.width / 2.0) continue;
        use.push_back(i);
    }

    cplx coef{};
    auto lorentz = [&](double x) { return 1.0 / cplx(x - policy.center, -policy.width / 2.0); };
    if (policy.kind == Kind::SubtractLinearBackground && !use.empty()) {
        cplx num{};
        double den = 0.0;
        for (auto i : use) {
            const cplx f = lorentz(a.axis[i]);
            num += std::conj(f) * (*a.values[i] - *b.values[i]);
            den += std::norm(f);
        }
        if (den > 0.0) coef = num / den;
    }

    ComparisonMetrics m;
    m.points = static_cast<int>(use.size());
    double dim = 0.0, dre = 0.0, nim = 0.0, nre = 0.0;
    for (auto i : use) {
        cplx va = *a.values[i];
        if (policy.kind == Kind::SubtractLinearBackground) va -= coef * lorentz(a.axis[i]);
        const cplx vb = *b.values[i];
        const double di = va.imag() - vb.imag(), dr = va.real() - vb.real();
        dim += di * di;
        dre += dr * dr;
        nim += vb.imag() * vb.imag();
        nre += vb.real() * vb.real();
        m.max_abs_im = std::max(m.max_abs_im, std::abs(di));
        m.max_abs_re = std::max(m.max_abs_re, std::abs(dr));
    }
    auto rel = [](double d, double n) { return n > 0.0 ? std::sqrt(d / n) : std::sqrt(d); };
    m.rel_l2_im = rel(dim, nim);
    m.rel_l2_re = rel(dre, nre);
    return m;
}

std::vector<FieldComparison> compare(const SweepResult& a, const SweepResult& b, const BackgroundPolicy& policy) {
    if (a.rows.empty() || b.rows.empty()) throw GridMismatch("cannot compare an empty sweep");
    const Method ma = a.rows.front().method, mb = b.rows.front().method;
    std::vector<FieldId> fields;
    for (const auto& r : a.rows)
        if (std::find(fields.begin(), fields.end(), r.field) == fields.end()) fields.push_back(r.field);
    std::vector<FieldComparison> out;
    for (auto f : fields) {
        const Trace tb = extract(b, f, mb);
        if (tb.axis.empty()) continue;
        out.push_back({f, ma, mb, compare(extract(a, f, ma), tb, policy)});
    }
    if (out.empty()) throw GridMismatch("no field is present in both sweeps");
    return out;
}

} // namespace xpm
