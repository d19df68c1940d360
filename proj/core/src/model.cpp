#include "xpm/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "xpm/errors.hpp"

namespace xpm {

namespace {

constexpr std::array<std::pair<FieldId, std::string_view>, 9> kFieldNames{{
    {FieldId::Probe, "probe"},
    {FieldId::Coupling, "coupling"},
    {FieldId::Signal, "signal"},
    {FieldId::WeakSignal23, "weak23"},
    {FieldId::WeakSignal24, "weak24"},
    {FieldId::FieldA, "a"},
    {FieldId::FieldB, "b"},
    {FieldId::FieldC, "c"},
    {FieldId::FieldD, "d"},
}};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_rate(std::optional<double> v, const char* name) {
    if (v && (!std::isfinite(*v) || *v < 0.0))
        throw ValidationError(std::string("decay rate ") + name + " must be finite and >= 0");
}

void require_fraction(std::optional<double> v, const char* name) {
    if (v && (!std::isfinite(*v) || *v < 0.0 || *v > 1.0))
        throw ValidationError(std::string(name) + " must lie in [0, 1]");
}

void add_decay(LevelScheme& s, int from, int to, double rate) {
    if (rate > 0.0) s.decays.push_back({from, to, rate});
}

bool allowed_in(SystemId sys, FieldId id) {
    switch (sys) {
    case SystemId::System1:
        return id == FieldId::Probe || id == FieldId::Coupling || id == FieldId::Signal;
    case SystemId::System3:
        return id == FieldId::Probe || id == FieldId::Coupling || id == FieldId::Signal ||
               id == FieldId::WeakSignal23 || id == FieldId::WeakSignal24;
    case SystemId::System2:
        return id == FieldId::FieldA || id == FieldId::FieldB || id == FieldId::FieldC || id == FieldId::FieldD;
    }
    return false;
}

void fill_hermitian(Eigen::MatrixXcd& h) {
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = i + 1; j < h.cols(); ++j) h(j, i) = std::conj(h(i, j));
}

void flag_rank(RwaSystem& sys, bool all_fields_zero) {
    const auto& m = sys.matrix;
    bool deficient = all_fields_zero;
    for (Eigen::Index i = 0; i < m.rows() && !deficient; ++i)
        deficient = m.row(i).cwiseAbs().maxCoeff() == 0.0 || m.col(i).cwiseAbs().maxCoeff() == 0.0;
    sys.rank_deficient = deficient;
}

} // namespace

std::string_view to_string(SystemId id) {
    switch (id) {
    case SystemId::System1: return "system1";
    case SystemId::System2: return "system2";
    case SystemId::System3: return "system3";
    }
    return "?";
}

std::string_view to_string(FieldId id) {
    for (const auto& [f, name] : kFieldNames)
        if (f == id) return name;
    return "?";
}

std::string_view to_string(Case c) { return c == Case::EIT ? "eit" : "cpt"; }

std::string_view to_string(DecayModel m) { return m == DecayModel::Branching ? "branching" : "ground-reservoir"; }

std::optional<FieldId> parse_field_id(std::string_view text) {
    for (const auto& [f, name] : kFieldNames)
        if (name == text) return f;
    return std::nullopt;
}

std::optional<SystemId> parse_system_id(std::string_view text) {
    if (text == "1" || text == "system1") return SystemId::System1;
    if (text == "2" || text == "system2") return SystemId::System2;
    if (text == "3" || text == "system3") return SystemId::System3;
    return std::nullopt;
}

std::optional<Case> parse_case(std::string_view text) {
    if (text == "eit" || text == "EIT") return Case::EIT;
    if (text == "cpt" || text == "CPT") return Case::CPT;
    return std::nullopt;
}

std::optional<DecayModel> parse_decay_model(std::string_view text) {
    if (text == "branching") return DecayModel::Branching;
    if (text == "ground-reservoir" || text == "reservoir") return DecayModel::GroundReservoir;
    return std::nullopt;
}

Transition default_transition(FieldId id) {
    switch (id) {
    case FieldId::Probe: return {1, 3};
    case FieldId::Coupling: return {2, 3};
    case FieldId::Signal: return {2, 4};
    case FieldId::WeakSignal23: return {2, 3};
    case FieldId::WeakSignal24: return {2, 4};
    case FieldId::FieldA:
    case FieldId::FieldB: return {1, 2};
    case FieldId::FieldC: return {2, 3};
    case FieldId::FieldD: return {1, 3};
    }
    return {};
}

double LevelScheme::decay_rate(int level) const {
    double total = 0.0;
    for (const auto& d : decays)
        if (d.from == level) total += d.rate;
    return total;
}

bool LevelScheme::has_transition(const Transition& t) const {
    return std::find(transitions.begin(), transitions.end(), t) != transitions.end();
}

void LevelScheme::validate() const {
    const int expected = system == SystemId::System2 ? 3 : 4;
    if (size() != expected)
        throw ValidationError(std::string(to_string(system)) + " needs " + std::to_string(expected) + " levels");
    if (!(splitting_mhz > 0.0) || !std::isfinite(splitting_mhz))
        throw ValidationError("excited-state splitting must be positive");
    for (const auto& d : decays) {
        if (d.from < 1 || d.from > size() || d.to < 1 || d.to > size())
            throw ValidationError("decay channel references a missing level");
        if (levels[d.from - 1].role == LevelRole::Ground)
            throw ValidationError("decay channel must start on an excited level");
        if (d.to >= d.from) throw ValidationError("decay channel must end on a lower level");
        if (!(d.rate >= 0.0) || !std::isfinite(d.rate)) throw ValidationError("decay rates must be finite and >= 0");
    }
    for (const auto& t : transitions)
        if (t.lower < 1 || t.upper > size() || t.lower >= t.upper)
            throw ValidationError("transition must join two distinct levels, lower first");
}

LevelScheme make_scheme(SystemId id, const SchemeOverrides& o) {
    require_rate(o.gamma2, "gamma2");
    require_rate(o.gamma3, "gamma3");
    require_rate(o.gamma4, "gamma4");
    require_fraction(o.branch_3_to_1, "branch_3_to_1");
    require_fraction(o.branch_4_to_2, "branch_4_to_2");
    if (o.splitting_mhz && (!std::isfinite(*o.splitting_mhz) || *o.splitting_mhz <= 0.0))
        throw ValidationError("excited-state splitting must be positive");

    LevelScheme s;
    s.system = id;
    s.splitting_mhz = o.splitting_mhz.value_or(kDefaultSplitting);
    const double g3 = o.gamma3.value_or(kDefaultGamma);
    const DecayModel model = o.decay_model.value_or(DecayModel::Branching);

    if (id == SystemId::System2) {
        s.levels = {{"|1>", LevelRole::Ground}, {"|2>", LevelRole::Excited}, {"|3>", LevelRole::Excited}};
        s.transitions = {{1, 2}, {2, 3}, {1, 3}};
        add_decay(s, 2, 1, o.gamma2.value_or(kDefaultGamma));
        add_decay(s, 3, 1, g3);
        return s;
    }

    const double g4 = o.gamma4.value_or(kDefaultGamma);
    double b31 = model == DecayModel::Branching ? 0.5 : 1.0;
    double b42 = model == DecayModel::Branching ? 1.0 : 0.0;
    if (o.branch_3_to_1) b31 = *o.branch_3_to_1;
    if (o.branch_4_to_2) b42 = *o.branch_4_to_2;

    s.levels = {{"|1>", LevelRole::Ground}, {"|2>", LevelRole::Ground}, {"|3>", LevelRole::Excited},
                {"|4>", LevelRole::Excited}};
    s.transitions = {{1, 3}, {2, 3}, {2, 4}};
    add_decay(s, 3, 1, g3 * b31);
    add_decay(s, 3, 2, g3 * (1.0 - b31));
    add_decay(s, 4, 1, g4 * (1.0 - b42));
    add_decay(s, 4, 2, g4 * b42);
    return s;
}

cplx polar_rabi(double magnitude, double phase_degrees) {
    return std::polar(magnitude, phase_degrees * std::numbers::pi / 180.0);
}

cplx Physical::dipole(const Transition& t) const {
    if (dimensionless) return {1.0, 0.0};
    for (const auto& d : dipoles)
        if (d.transition == t) return d.mu;
    return {1.0, 0.0};
}

const FieldDrive* SystemParams::find(FieldId id) const noexcept {
    for (const auto& f : fields)
        if (f.id == id) return &f;
    return nullptr;
}

cplx SystemParams::rabi(FieldId id) const noexcept {
    const auto* f = find(id);
    return f ? f->rabi : cplx{};
}

double SystemParams::detuning(FieldId id) const noexcept {
    const auto* f = find(id);
    return f ? f->detuning : 0.0;
}

void SystemParams::set_rabi(FieldId id, cplx value) {
    for (auto& f : fields)
        if (f.id == id) {
            f.rabi = value;
            return;
        }
    fields.push_back({id, value, 0.0, default_transition(id)});
}

void SystemParams::set_detuning(FieldId id, double value) {
    for (auto& f : fields)
        if (f.id == id) {
            f.detuning = value;
            return;
        }
    fields.push_back({id, {}, value, default_transition(id)});
}

void SystemParams::validate() const {
    scheme.validate();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (!allowed_in(scheme.system, f.id))
            throw ValidationError("field '" + std::string(to_string(f.id)) + "' does not belong to " +
                                  std::string(to_string(scheme.system)));
        if (!scheme.has_transition(f.transition))
            throw ValidationError("field '" + std::string(to_string(f.id)) + "' drives a transition not in the scheme");
        if (!finite(f.rabi) || !std::isfinite(f.detuning))
            throw ValidationError("field '" + std::string(to_string(f.id)) + "' has a non-finite value");
        for (std::size_t j = 0; j < i; ++j)
            if (fields[j].id == f.id) throw ValidationError("duplicate field '" + std::string(to_string(f.id)) + "'");
    }
    if (case_kind == Case::CPT && scheme.system != SystemId::System1)
        throw ValidationError("the CPT case is defined for system1 only");
    if (scheme.system == SystemId::System2) {
        const double open = detuning(FieldId::FieldD) - detuning(FieldId::FieldA) - detuning(FieldId::FieldB) -
                            detuning(FieldId::FieldC);
        const double scale = 1.0 + std::abs(detuning(FieldId::FieldD));
        if (std::abs(open) > 1e-9 * scale)
            throw ValidationError("system2 detunings must close the loop: d = a + b + c");
    }
    if (!(physical.density > 0.0) || !(physical.hbar > 0.0) || !(physical.eps0 > 0.0))
        throw ValidationError("physical constants must be positive");
}

System1Symbols system1_symbols(const SystemParams& p) {
    System1Symbols s;
    s.probe = p.rabi(FieldId::Probe);
    s.coupling = p.rabi(FieldId::Coupling);
    s.signal = p.rabi(FieldId::Signal);
    s.da = p.detuning(FieldId::Probe);
    s.d21 = s.da - p.detuning(FieldId::Coupling);
    s.db = s.d21 + p.detuning(FieldId::Signal);
    s.gamma3 = p.scheme.decay_rate(3);
    s.gamma4 = p.scheme.decay_rate(4);
    s.A = {s.da, -s.gamma3 / 2.0};
    s.B = {s.db, -s.gamma4 / 2.0};
    return s;
}

System2Symbols system2_symbols(const SystemParams& p) {
    System2Symbols s;
    s.o12 = p.rabi(FieldId::FieldA) * p.rabi(FieldId::FieldB);
    s.o13 = p.rabi(FieldId::FieldD);
    s.o23 = p.rabi(FieldId::FieldC);
    s.gamma2 = p.scheme.decay_rate(2);
    s.gamma3 = p.scheme.decay_rate(3);
    s.d21 = {p.detuning(FieldId::FieldA) + p.detuning(FieldId::FieldB), -s.gamma2 / 2.0};
    s.d31 = {p.detuning(FieldId::FieldD), -s.gamma3 / 2.0};
    return s;
}

System3Symbols system3_symbols(const SystemParams& p) {
    return {system1_symbols(p), p.rabi(FieldId::WeakSignal23), p.rabi(FieldId::WeakSignal24)};
}

SystemParams make_system1(Case c, cplx probe, cplx coupling, cplx signal, EquationDetunings det,
                          const SchemeOverrides& overrides) {
    SystemParams p;
    p.scheme = make_scheme(SystemId::System1, overrides);
    p.case_kind = c;
    p.fields = {
        {FieldId::Probe, probe, det.da, default_transition(FieldId::Probe)},
        {FieldId::Coupling, coupling, det.da - det.d21, default_transition(FieldId::Coupling)},
        {FieldId::Signal, signal, det.db - det.d21, default_transition(FieldId::Signal)},
    };
    return p;
}

SystemParams make_system2(cplx a, cplx b, cplx c, cplx d, double two_photon, double d31,
                          const SchemeOverrides& overrides) {
    SystemParams p;
    p.scheme = make_scheme(SystemId::System2, overrides);
    p.fields = {
        {FieldId::FieldA, a, two_photon / 2.0, default_transition(FieldId::FieldA)},
        {FieldId::FieldB, b, two_photon / 2.0, default_transition(FieldId::FieldB)},
        {FieldId::FieldC, c, d31 - two_photon, default_transition(FieldId::FieldC)},
        {FieldId::FieldD, d, d31, default_transition(FieldId::FieldD)},
    };
    return p;
}

SystemParams make_system3(cplx probe, cplx coupling, cplx signal, cplx weak23, cplx weak24, EquationDetunings det,
                          const SchemeOverrides& overrides) {
    SystemParams p = make_system1(Case::EIT, probe, coupling, signal, det, overrides);
    p.scheme.system = SystemId::System3;
    // weak fields share the frequencies of their strong partners
    p.fields.push_back({FieldId::WeakSignal23, weak23, det.da - det.d21, default_transition(FieldId::WeakSignal23)});
    p.fields.push_back({FieldId::WeakSignal24, weak24, det.db - det.d21, default_transition(FieldId::WeakSignal24)});
    return p;
}

SystemParams strong_part(const SystemParams& p) {
    SystemParams out = p;
    out.scheme.system = SystemId::System1;
    out.case_kind = Case::EIT;
    std::erase_if(out.fields, [](const FieldDrive& f) {
        return f.id == FieldId::WeakSignal23 || f.id == FieldId::WeakSignal24;
    });
    return out;
}

RwaSystem rwa_matrix(const SystemParams& p) {
    RwaSystem sys;
    switch (p.scheme.system) {
    case SystemId::System1: {
        const auto s = system1_symbols(p);
        const bool zero = s.probe == 0.0 && s.coupling == 0.0 && s.signal == 0.0;
        if (p.case_kind == Case::EIT) {
            // rows: equations of |2>, |3>, |4>; b1 = 1 moved to the rhs
            sys.matrix.resize(3, 3);
            sys.matrix << -2.0 * s.d21, s.coupling, s.signal,
                std::conj(s.coupling), -2.0 * s.A, 0.0,
                std::conj(s.signal), 0.0, -2.0 * s.B;
            sys.rhs.resize(3);
            sys.rhs << 0.0, -std::conj(s.probe), 0.0;
            sys.unknowns = {"b2", "b3", "b4"};
            sys.normalization = Normalization::GroundFixed;
        } else {
            // gauge b2 = 1; unknowns b1, b3, b4 from the same three equations
            sys.matrix.resize(3, 3);
            sys.matrix << 0.0, s.coupling, s.signal,
                std::conj(s.probe), -2.0 * s.A, 0.0,
                0.0, 0.0, -2.0 * s.B;
            sys.rhs.resize(3);
            sys.rhs << 2.0 * s.d21, -std::conj(s.coupling), -std::conj(s.signal);
            sys.unknowns = {"b1", "b3", "b4"};
            sys.normalization = Normalization::CptPair;
        }
        flag_rank(sys, zero);
        return sys;
    }
    case SystemId::System2: {
        const auto s = system2_symbols(p);
        sys.matrix.resize(2, 2);
        sys.matrix << -2.0 * s.d21, s.o23,
            std::conj(s.o23), -2.0 * s.d31;
        sys.rhs.resize(2);
        sys.rhs << -std::conj(s.o12), -std::conj(s.o13);
        sys.unknowns = {"b2", "b3"};
        sys.normalization = Normalization::GroundFixed;
        flag_rank(sys, s.o12 == 0.0 && s.o13 == 0.0 && s.o23 == 0.0);
        return sys;
    }
    case SystemId::System3:
        throw CaseError("system3 equations need the unperturbed system1 amplitudes");
    }
    return sys;
}

RwaSystem rwa_matrix(const SystemParams& p, const Amplitudes& u) {
    if (p.scheme.system != SystemId::System3) return rwa_matrix(p);
    if (u.b.size() != 4) throw ValidationError("system3 needs four unperturbed amplitudes");
    const auto s = system3_symbols(p);
    const auto& o = s.base;
    RwaSystem sys;
    sys.matrix.resize(4, 4);
    sys.matrix << 0.0, -2.0 * o.d21, o.coupling, o.signal,
        std::conj(o.probe), std::conj(o.coupling), -2.0 * o.A, 0.0,
        0.0, std::conj(o.signal), 0.0, -2.0 * o.B,
        std::conj(u(1)), std::conj(u(2)), 0.0, 0.0;
    sys.rhs.resize(4);
    sys.rhs << -(s.weak23 * u(3) + s.weak24 * u(4)), -std::conj(s.weak23) * u(2), -std::conj(s.weak24) * u(2), 0.0;
    sys.unknowns = {"db1", "db2", "db3", "db4"};
    sys.normalization = Normalization::Perturbative;
    flag_rank(sys, o.probe == 0.0 && o.coupling == 0.0 && o.signal == 0.0);
    return sys;
}

Eigen::MatrixXcd rwa_hamiltonian(const SystemParams& p) {
    const int n = p.scheme.size();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    if (p.scheme.system == SystemId::System2) {
        const auto s = system2_symbols(p);
        h(1, 1) = s.d21.real();
        h(2, 2) = s.d31.real();
        h(0, 1) = -s.o12 / 2.0;
        h(1, 2) = -s.o23 / 2.0;
        h(0, 2) = -s.o13 / 2.0;
    } else {
        const auto s = system1_symbols(p);
        h(1, 1) = s.d21;
        h(2, 2) = s.da;
        h(3, 3) = s.db;
        h(0, 2) = -s.probe / 2.0;
        h(1, 2) = -(s.coupling + p.rabi(FieldId::WeakSignal23)) / 2.0;
        h(1, 3) = -(s.signal + p.rabi(FieldId::WeakSignal24)) / 2.0;
    }
    fill_hermitian(h);
    return h;
}

Eigen::MatrixXcd effective_hamiltonian(const SystemParams& p) {
    Eigen::MatrixXcd h = rwa_hamiltonian(p);
    for (int k = 1; k <= p.scheme.size(); ++k) h(k - 1, k - 1) -= cplx(0.0, p.scheme.decay_rate(k) / 2.0);
    return h;
}

} // namespace xpm
