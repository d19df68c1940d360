#include "xpm/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "xpm/analytic.hpp"
#include "xpm/errors.hpp"

namespace xpm {

using nlohmann::json;

FieldTerm absent_counterpart(const MultiphotonTerm& like, FieldId field) {
    MultiphotonTerm t = like;
    t.label = "absent";
    t.value = {};
    t.chi = {};
    return {field, std::move(t), 0.0};
}

bool SymmetryReport::all_symmetric() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const PairVerdict& v) { return v.verdict == Verdict::Symmetric; });
}

SymmetryReport check_field_symmetry(const std::vector<FieldTerm>& terms, double tol) {
    if (terms.size() < 2) throw ValidationError("symmetry check needs at least two fields");
    if (!(tol >= 0.0)) throw ValidationError("symmetry tolerance must be >= 0");
    for (std::size_t i = 1; i < terms.size(); ++i)
        if (!same_process(terms[0].term.signature, terms[i].term.signature))
            throw SignatureMismatch("fields '" + std::string(to_string(terms[0].field)) + "' and '" +
                                    std::string(to_string(terms[i].field)) + "' carry different processes " +
                                    to_string(terms[0].term.signature) + " vs " + to_string(terms[i].term.signature));

    SymmetryReport r;
    r.tolerance = tol;
    r.signature = to_string(terms[0].term.signature);
    for (const auto& t : terms) {
        r.fields.push_back(t.field);
        r.values.push_back(t.term.value);
        r.im_magnitudes.push_back(std::abs(t.term.chi.imag()));
        r.flux.push_back(t.flux);
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j) {
            PairVerdict v{r.fields[i], r.fields[j], Verdict::Symmetric, 0.0, std::nullopt};
            const double mi = r.im_magnitudes[i], mj = r.im_magnitudes[j];
            v.im_difference = std::abs(mi - mj);
            bool ok = v.im_difference <= tol * std::max(mi, mj);
            if (r.flux[i] && r.flux[j]) {
                v.flux_difference = std::abs(*r.flux[i] - *r.flux[j]);
                ok = ok && *v.flux_difference <= tol * std::max(*r.flux[i], *r.flux[j]);
            }
            v.verdict = ok ? Verdict::Symmetric : Verdict::Asymmetric;
            r.pairs.push_back(v);
        }
    return r;
}

FieldTerm shared_process_term(const SystemParams& p, FieldId field) {
    auto pick = [&](const CoherenceResult& c, const char* label) {
        return FieldTerm{field, c.term(label), photon_flux(c, field, p, label)};
    };
    if (p.scheme.system == SystemId::System1 && p.case_kind == Case::EIT) {
        if (field == FieldId::Coupling) return pick(coupling_coherence_s1(p), "term1");
        if (field == FieldId::Signal) return pick(signal_coherence_s1(p), "term1");
    } else if (p.scheme.system == SystemId::System2) {
        const auto c = coherences_s2(p);
        switch (field) {
        case FieldId::FieldD: return pick(c.b1b3, "nonlinear");
        case FieldId::FieldC: return pick(c.b2b3, "nonlinear");
        case FieldId::FieldA:
        case FieldId::FieldB: return pick(c.b1b2, "nonlinear");
        default: break;
        }
    }
    throw ValidationError("no shared process for field '" + std::string(to_string(field)) + "' in this configuration");
}

FluxBalance flux_balance(const SystemParams& p, const std::vector<FieldId>& fields, double tol) {
    if (fields.empty()) throw ValidationError("flux balance needs at least one field");
    FluxBalance b;
    b.tolerance = tol;
    for (auto f : fields) {
        b.fields.push_back(f);
        b.flux.push_back(*shared_process_term(p, f).flux);
    }
    if (p.scheme.system == SystemId::System1) b.closed_form = photon_flux_closed_form_s1(p);
    const double hi = *std::max_element(b.flux.begin(), b.flux.end());
    const double lo = *std::min_element(b.flux.begin(), b.flux.end());
    b.equal = hi - lo <= tol * hi;
    return b;
}

std::string_view to_string(ProcessType t) {
    switch (t) {
    case ProcessType::Type1: return "type1";
    case ProcessType::Type2: return "type2";
    case ProcessType::Type3: return "type3";
    case ProcessType::Mixed: return "mixed";
    }
    return "?";
}

ProcessHypothesis classify_process(const SymmetryReport& report, const ProcessContext& context) {
    ProcessHypothesis h;
    const auto n = report.fields.size();
    const double top = report.im_magnitudes.empty()
                           ? 0.0
                           : *std::max_element(report.im_magnitudes.begin(), report.im_magnitudes.end());
    const bool symmetric = report.all_symmetric();
    const bool some_zero = std::any_of(report.im_magnitudes.begin(), report.im_magnitudes.end(),
                                       [&](double m) { return m <= report.tolerance * top; });

    auto fill = [&](bool keep_symmetric) {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx v = report.values[i];
            h.parts.push_back({report.fields[i], v, keep_symmetric ? v : cplx{}, keep_symmetric ? cplx{} : v});
        }
    };

    if (context.system == SystemId::System3 || context.reverse_process) {
        h.label = ProcessType::Type3;
        fill(false);
        h.rationale = "a simultaneous reverse process is present, so the term can stay invisible in the other "
                      "fields; structural rule, conjecture-level";
    } else if (symmetric) {
        h.label = ProcessType::Type1;
        fill(true);
        h.rationale = "Type1 candidate: |Im chi| (and flux where given) agree across all fields; symmetry is "
                      "necessary for Type1, sufficiency is not established";
    } else if (some_zero) {
        h.label = ProcessType::Type2;
        fill(false);
        h.rationale = "the process is absent from at least one field and no reverse process is present; "
                      "absorb-and-reemit reading, conjecture-level";
    } else {
        h.label = ProcessType::Mixed;
        const double common = *std::min_element(report.im_magnitudes.begin(), report.im_magnitudes.end());
        for (std::size_t i = 0; i < n; ++i) {
            const cplx v = report.values[i];
            const cplx sym = v * (common / report.im_magnitudes[i]);
            h.parts.push_back({report.fields[i], v, sym, v - sym});
        }
        h.rationale = "unequal |Im chi| in every field: split into a symmetric part at the common magnitude and an "
                      "asymmetric remainder";
    }
    return h;
}

bool squeezing_capability(const Signature& signature, FieldId observed_field) {
    return photon_count(signature, observed_field) >= 2;
}

namespace {

json parts_json(const ProcessHypothesis& h) {
    json parts = json::array();
    for (const auto& p : h.parts)
        parts.push_back({{"field", to_string(p.field)},
                         {"original", {p.original.real(), p.original.imag()}},
                         {"symmetric", {p.symmetric_part.real(), p.symmetric_part.imag()}},
                         {"asymmetric", {p.asymmetric_part.real(), p.asymmetric_part.imag()}}});
    return {{"label", to_string(h.label)}, {"parts", parts}, {"rationale", h.rationale}};
}

} // namespace

std::string to_json(const SymmetryReport& r, const ProcessHypothesis* h) {
    json j;
    j["signature"] = r.signature;
    j["tolerance"] = r.tolerance;
    json fields = json::array();
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        json f = {{"field", to_string(r.fields[i])}, {"im_chi_magnitude", r.im_magnitudes[i]}};
        f["flux"] = r.flux[i] ? json(*r.flux[i]) : json(nullptr);
        fields.push_back(f);
    }
    j["fields"] = fields;
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        json v = {{"a", to_string(p.a)},
                  {"b", to_string(p.b)},
                  {"verdict", p.verdict == Verdict::Symmetric ? "symmetric" : "asymmetric"},
                  {"im_difference", p.im_difference}};
        v["flux_difference"] = p.flux_difference ? json(*p.flux_difference) : json(nullptr);
        pairs.push_back(v);
    }
    j["pairs"] = pairs;
    j["verdict"] = r.all_symmetric() ? "symmetric" : "asymmetric";
    if (h) {
        j["hypothesis"] = parts_json(*h);
        j["rationale"] = h->rationale;
    }
    return j.dump(2);
}

std::string to_json(const ProcessHypothesis& h) { return parts_json(h).dump(2); }

std::string to_json(const FluxBalance& b) {
    json j;
    for (std::size_t i = 0; i < b.fields.size(); ++i) j["n_" + std::string(to_string(b.fields[i]))] = b.flux[i];
    j["closed_form"] = b.closed_form ? json(*b.closed_form) : json(nullptr);
    j["tolerance"] = b.tolerance;
    j["verdict"] = b.equal ? "equal" : "unequal";
    return j.dump(2);
}

} // namespace xpm
