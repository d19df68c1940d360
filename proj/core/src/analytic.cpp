#include "xpm/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "xpm/errors.hpp"

namespace xpm {

namespace {

using F = FieldId;

double norm2(cplx z) { return std::norm(z); }

void guard(cplx z, const char* name) {
    if (std::abs(z) < kPoleGuard) throw PoleError(name, std::abs(z));
}

void require_system(const SystemParams& p, SystemId id, const char* op) {
    if (p.scheme.system != id)
        throw CaseError(std::string(op) + " applies to " + std::string(to_string(id)) + " only");
}

void require_eit(const SystemParams& p, const char* op) {
    if (p.case_kind != Case::EIT) throw CaseError(std::string(op) + " needs the EIT case (b1* b1 = 1)");
}

// pairs of a field and its conjugate, i.e. |Omega|^2 photon bookkeeping
void pair(std::vector<Factor>& v, F f, int times = 1) {
    for (int i = 0; i < times; ++i) {
        v.push_back(emit(f));
        v.push_back(absorb(f));
    }
}

std::vector<Factor> factors(std::initializer_list<Factor> head, std::initializer_list<std::pair<F, int>> pairs = {}) {
    std::vector<Factor> v(head);
    for (auto [f, n] : pairs) pair(v, f, n);
    return v;
}

CoherenceResult result(int bra, int ket, std::vector<MultiphotonTerm> terms, int branch = 0) {
    CoherenceResult r;
    r.bra = bra;
    r.ket = ket;
    r.terms = std::move(terms);
    r.branch_id = branch;
    r.sum_terms();
    return r;
}

} // namespace

cplx d_factor(const SystemParams& p) {
    const auto s = system1_symbols(p);
    guard(s.B, "B");
    return 4.0 * s.d21 * s.A - norm2(s.signal) * s.A / s.B - norm2(s.coupling);
}

CoherenceResult probe_coherence_s1(const SystemParams& p) {
    require_eit(p, "probe coherence");
    const auto s = system1_symbols(p);
    const double c2 = norm2(s.coupling), s2 = norm2(s.signal);
    std::vector<MultiphotonTerm> terms;
    if (std::abs(s.d21) <= kResonanceTolerance) {
        const cplx den = 2.0 * s2 * s.A + 2.0 * c2 * s.B;
        guard(den, "2|Omega24|^2 A + 2|Omega_c|^2 B");
        const double d2 = norm2(den);
        terms.push_back(make_term("chi5_signal", 2.0 * std::conj(s.A) / d2,
                                  factors({absorb(F::Probe)}, {{F::Signal, 2}}), {F::Probe}, p));
        terms.push_back(make_term("chi5_coupling", 2.0 * std::conj(s.B) / d2,
                                  factors({absorb(F::Probe)}, {{F::Signal, 1}, {F::Coupling, 1}}), {F::Probe}, p));
    } else {
        const cplx den = 8.0 * s.d21 * s.A * s.B - 2.0 * s2 * s.A - 2.0 * c2 * s.B;
        guard(den, "2BD");
        terms.push_back(make_term("linear", 4.0 * s.d21 * s.B / den, {absorb(F::Probe)}, {F::Probe}, p));
        terms.push_back(make_term("chi3", -1.0 / den, factors({absorb(F::Probe)}, {{F::Signal, 1}}), {F::Probe}, p));
    }
    return result(1, 3, std::move(terms));
}

CoherenceResult coupling_coherence_s1(const SystemParams& p) {
    require_eit(p, "coupling coherence");
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    guard(D, "D");
    const double dd = norm2(D);
    std::vector<MultiphotonTerm> terms;
    terms.push_back(make_term("term1", -std::conj(s.B) / (2.0 * norm2(s.B) * dd),
                              factors({absorb(F::Coupling)}, {{F::Probe, 1}, {F::Signal, 1}}), {F::Coupling}, p));
    terms.push_back(make_term("term2", cplx(2.0 * s.d21 / dd), factors({absorb(F::Coupling)}, {{F::Probe, 1}}),
                              {F::Coupling}, p));
    return result(2, 3, std::move(terms));
}

CoherenceResult signal_coherence_s1(const SystemParams& p) {
    require_eit(p, "signal coherence");
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    guard(D, "D");
    std::vector<MultiphotonTerm> terms;
    terms.push_back(make_term("term1", std::conj(s.B) / (2.0 * norm2(s.B) * norm2(D)),
                              factors({absorb(F::Signal)}, {{F::Coupling, 1}, {F::Probe, 1}}), {F::Signal}, p));
    return result(2, 4, std::move(terms));
}

CoherenceResult signal_coherence_s1_cpt(const SystemParams& p, int branch) {
    require_system(p, SystemId::System1, "CPT signal coherence");
    if (p.case_kind != Case::CPT) throw CaseError("CPT signal coherence needs the CPT case");
    if (branch != 0 && branch != 1) throw ValidationError("CPT signal coherence has branches 0 and 1");
    const auto s = system1_symbols(p);
    if (std::abs(s.d21) > kResonanceTolerance)
        throw CaseError("CPT signal coherence is defined at zero two-photon detuning only");
    guard(s.B, "B");
    const double c2 = norm2(s.coupling), p2 = norm2(s.probe), s2 = norm2(s.signal), b2 = norm2(s.B);
    const cplx G = c2 * s.B + s.A * s2;
    const double S = b2 * c2 * p2 + norm2(G);
    if (S < kPoleGuard) throw PoleError("S", S);

    // nonlinear part of branch 0 is -Omega24* |G|^2 B* / (2 |B|^2 S); branch 1 flips it
    const double sign = branch == 0 ? -1.0 : 1.0;
    const cplx base = std::conj(s.B) / (2.0 * b2 * S);
    std::vector<MultiphotonTerm> terms;
    if (branch == 0)
        terms.push_back(make_term("linear", 1.0 / (2.0 * s.B), {absorb(F::Signal)}, {F::Signal}, p, {1.0, 0.0}));
    terms.push_back(make_term("dominant", sign * norm2(s.A) * base, factors({absorb(F::Signal)}, {{F::Signal, 2}}),
                              {F::Signal}, p));
    terms.push_back(make_term("coupling4", sign * b2 * base, factors({absorb(F::Signal)}, {{F::Coupling, 2}}),
                              {F::Signal}, p));
    terms.push_back(make_term("mixed", sign * 2.0 * (s.A * std::conj(s.B)).real() * base,
                              factors({absorb(F::Signal)}, {{F::Coupling, 1}, {F::Signal, 1}}), {F::Signal}, p));
    return result(2, 4, std::move(terms), branch);
}

std::vector<CoherenceResult> signal_coherence_s1_cpt_branches(const SystemParams& p) {
    return {signal_coherence_s1_cpt(p, 0), signal_coherence_s1_cpt(p, 1)};
}

cplx cpt_nonlinear_part(const CoherenceResult& c) {
    cplx sum{};
    for (const auto& t : c.terms)
        if (t.label != "linear") sum += t.value;
    return sum;
}

double chi5_symmetric_magnitude(const SystemParams& p) {
    require_eit(p, "chi5 magnitude");
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    guard(D, "D");
    const auto& ph = p.physical;
    const double mu = norm2(ph.dipole({2, 3})) * norm2(ph.dipole({1, 3})) * norm2(ph.dipole({2, 4}));
    return mu * (s.gamma4 / 2.0) / (2.0 * norm2(s.B) * norm2(D));
}

System2Coherences coherences_s2(const SystemParams& p) {
    require_system(p, SystemId::System2, "system2 coherences");
    const auto s = system2_symbols(p);
    const cplx Q = 4.0 * s.d31 * s.d21 - norm2(s.o23);
    guard(Q, "4 d31 d21 - |Omega23|^2");
    const double q2 = norm2(Q);

    System2Coherences r;
    r.b1b3 = result(1, 3, {make_term("nonlinear", 1.0 / Q, {absorb(F::FieldC), absorb(F::FieldA), absorb(F::FieldB)},
                                     {F::FieldD}, p),
                           make_term("linear", 2.0 * s.d21 / Q, {absorb(F::FieldD)}, {F::FieldD}, p)});
    r.b1b2 = result(1, 2, {make_term("nonlinear", 1.0 / Q, {absorb(F::FieldD), emit(F::FieldC)},
                                     {F::FieldA, F::FieldB}, p),
                           make_term("linear", 2.0 * s.d31 / Q, {absorb(F::FieldA), absorb(F::FieldB)},
                                     {F::FieldA, F::FieldB}, p)});

    // The c-field term is observed through mu23 rather than mu23*, so its
    // observed photon enters with + sign and a phase Omega23*/Omega23 remains.
    std::vector<MultiphotonTerm> terms;
    if (std::abs(s.o23) >= kPoleGuard) {
        const cplx phase = std::conj(s.o23) / s.o23;
        terms.push_back(make_term("nonlinear", -1.0 / std::conj(Q),
                                  {absorb(F::FieldA), absorb(F::FieldB), emit(F::FieldD)}, {F::FieldC}, p, phase, +1));
        const cplx u = std::conj(s.o23) * s.o13 + 2.0 * std::conj(s.d31) * s.o12;
        auto linear = make_term("linear", 2.0 * s.d21 * norm2(u) / (s.o23 * q2), {}, {F::FieldC}, p);
        auto rest = make_term("remainder", -2.0 * std::conj(s.d31) * norm2(s.o12) / (s.o23 * std::conj(Q)), {},
                              {F::FieldC}, p);
        terms.push_back(std::move(linear));
        terms.push_back(std::move(rest));
    } else {
        // Omega23 -> 0: the nonlinear term is undefined (0/0) and set to zero;
        // the product reduces to 4 d31* d21 Omega12 Omega13* / |Q|^2
        auto nl = make_term("nonlinear", -1.0 / std::conj(Q), {absorb(F::FieldA), absorb(F::FieldB), emit(F::FieldD)},
                            {F::FieldC}, p, {0.0, 0.0}, +1);
        terms.push_back(std::move(nl));
        terms.push_back(make_term("linear", 4.0 * std::conj(s.d31) * s.d21 / q2,
                                  {emit(F::FieldA), emit(F::FieldB), absorb(F::FieldD)}, {F::FieldC}, p));
    }
    r.b2b3 = result(2, 3, std::move(terms));
    return r;
}

cplx chi3_s2(const SystemParams& p) {
    require_system(p, SystemId::System2, "system2 chi3");
    const auto s = system2_symbols(p);
    const cplx Q = 4.0 * s.d31 * s.d21 - norm2(s.o23);
    guard(Q, "4 d31 d21 - |Omega23|^2");
    const auto& ph = p.physical;
    const cplx mu = std::conj(ph.dipole({2, 3})) * std::conj(ph.dipole({1, 2})) * ph.dipole({1, 3});
    return mu * Q / norm2(Q);
}

Amplitudes unperturbed_s1(const SystemParams& p) {
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    guard(D, "D");
    const cplx E = 2.0 * s.d21 - norm2(s.signal) / (2.0 * s.B);
    Amplitudes a;
    a.b.resize(4);
    a.b(0) = 1.0;
    a.b(1) = s.coupling * std::conj(s.probe) / D;
    a.b(2) = std::conj(s.probe) * E / D;
    a.b(3) = std::conj(s.signal) * a.b(1) / (2.0 * s.B);
    return a;
}

System3Coherences perturbed_coherences_s3_frozen(const SystemParams& p, cplx D, double K) {
    require_system(p, SystemId::System3, "perturbed coherences");
    const auto s = system3_symbols(p).base;
    if (std::abs(s.d21) > kResonanceTolerance)
        throw CaseError("perturbed coherences are defined at zero two-photon detuning only");
    guard(s.B, "B");
    guard(D, "D");
    if (K < kPoleGuard) throw PoleError("K", K);

    const cplx A = s.A, B = s.B;
    const cplx n25 = 1.0 / (2.0 * B * K);
    const cplx n26 = 1.0 / (2.0 * norm2(B) * K);
    const auto C = F::Coupling, P = F::Probe, S = F::Signal, W3 = F::WeakSignal23, W4 = F::WeakSignal24;

    System3Coherences r;
    r.b2db4 = result(
        2, 4,
        {
            make_term("t1", n25 / D, factors({absorb(S), absorb(W3), emit(C)}, {{C, 1}, {P, 1}}), {W4}, p),
            make_term("t2", n25 / norm2(D), factors({absorb(W4)}, {{C, 2}, {P, 2}}), {W4}, p),
            make_term("t3", n25 * A / (B * D), factors({absorb(S), absorb(S), emit(W4)}, {{C, 1}, {P, 1}}), {W4}, p),
            make_term("t4", -n25 * A / (B * D), factors({absorb(S), absorb(C), emit(W3)}, {{S, 1}, {P, 1}}), {W4}, p),
            make_term("t5", -n25 / D, factors({absorb(W4)}, {{C, 2}, {P, 1}}), {W4}, p),
        });
    r.b4db2 = result(
        4, 2,
        {
            make_term("t1", n26 * A / D, factors({emit(S), emit(S), absorb(W4)}, {{C, 1}, {P, 1}}), {W4}, p),
            make_term("t2", n26 * B / D, factors({emit(S), emit(C), absorb(W3)}, {{C, 1}, {P, 1}}), {W4}, p),
            make_term("t3", -n26 * A / D, factors({emit(S), absorb(C), emit(W3)}, {{S, 1}, {P, 1}}), {W4}, p),
            make_term("t4", n26 * A / D, factors({emit(W4)}, {{S, 1}, {C, 1}, {P, 1}}), {W4}, p),
        });

    const double weak = std::max(std::abs(p.rabi(W3)), std::abs(p.rabi(W4)));
    double strong = 0.0;
    for (auto f : {P, C, S}) {
        const double m = std::abs(p.rabi(f));
        if (m > 0.0) strong = strong == 0.0 ? m : std::min(strong, m);
    }
    if (weak > 0.1 * strong)
        r.warnings.push_back("weak fields are not small against the strong fields; first-order result may be poor");
    return r;
}

System3Coherences perturbed_coherences_s3(const SystemParams& p) {
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    return perturbed_coherences_s3_frozen(p, D, norm2(D) + norm2(s.coupling) * norm2(s.probe));
}

System3Coherences perturbed_coherences_s3(const SystemParams& p, const Amplitudes& unperturbed) {
    const Amplitudes ref = unperturbed_s1(p);
    if (unperturbed.b.size() != 4 || (unperturbed.b - ref.b).norm() > 1e-9 * (1.0 + ref.b.norm()))
        throw ValidationError("unperturbed amplitudes are not the b1 = 1 system1 solution");
    return perturbed_coherences_s3(p);
}

std::optional<FieldId> observed_field(SystemId system, int bra, int ket) {
    const Transition t{std::min(bra, ket), std::max(bra, ket)};
    if (system == SystemId::System2) {
        if (t == Transition{1, 3}) return F::FieldD;
        if (t == Transition{1, 2}) return F::FieldA;
        if (t == Transition{2, 3}) return F::FieldC;
        return std::nullopt;
    }
    if (t == Transition{1, 3}) return F::Probe;
    if (t == Transition{2, 3}) return F::Coupling;
    if (t == Transition{2, 4}) return F::Signal;
    return std::nullopt;
}

double photon_flux(const CoherenceResult& c, FieldId field, const SystemParams& p, std::optional<std::string_view> term) {
    const FieldDrive* f = p.find(field);
    const Transition t = f ? f->transition : default_transition(field);
    const cplx raw = term ? c.term(*term).value : c.total;
    cplx v;
    if (c.bra == t.lower && c.ket == t.upper)
        v = raw;
    else if (c.bra == t.upper && c.ket == t.lower)
        v = std::conj(raw);
    else
        throw PairingError("coherence (" + std::to_string(c.bra) + "," + std::to_string(c.ket) +
                           ") is not on the transition of field '" + std::string(to_string(field)) + "'");
    cplx omega = p.rabi(field);
    if (field == F::FieldA || field == F::FieldB) omega = p.rabi(F::FieldA) * p.rabi(F::FieldB);
    return 0.5 * p.physical.atom_density() * std::abs((v * omega).imag());
}

double photon_flux_closed_form_s1(const SystemParams& p) {
    const auto s = system1_symbols(p);
    const cplx D = d_factor(p);
    guard(D, "D");
    return p.physical.atom_density() * norm2(s.coupling) * norm2(s.probe) * norm2(s.signal) * (s.gamma4 / 2.0) /
           (4.0 * norm2(s.B) * norm2(D));
}

} // namespace xpm
