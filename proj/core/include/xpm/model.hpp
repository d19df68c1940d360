#pragma once

// Level schemes, laser fields and the rotating-wave steady-state equations
// for the three atom-laser systems.
//
// Conventions used throughout the library:
//  * levels are numbered from 1, as in |1>, |2>, ...; Eigen storage is 0-based
//  * every frequency (Rabi, detuning, decay rate) is in MHz, no 2*pi applied
//  * a field detuning is laser frequency minus transition frequency
//  * Rabi frequencies are complex; Omega enters the amplitude equation of the
//    lower level of its transition, conj(Omega) the equation of the upper level

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace xpm {

using cplx = std::complex<double>;

enum class SystemId { System1, System2, System3 };
enum class LevelRole { Ground, Excited, Intermediate };
enum class Case { EIT, CPT };

/// Field identities. System1/3 use Probe (|1>-|3>), Coupling (|2>-|3>),
/// Signal (|2>-|4>) plus the two weak perturbing fields of System3.
/// System2 uses FieldA and FieldB (two-photon |1>-|2>), FieldC (|2>-|3>)
/// and FieldD (|1>-|3>).
enum class FieldId { Probe, Coupling, Signal, WeakSignal23, WeakSignal24, FieldA, FieldB, FieldC, FieldD };

std::string_view to_string(SystemId id);
std::string_view to_string(FieldId id);
std::string_view to_string(Case c);
std::optional<FieldId> parse_field_id(std::string_view text);
std::optional<SystemId> parse_system_id(std::string_view text);
std::optional<Case> parse_case(std::string_view text);

struct Transition {
    int lower = 0;
    int upper = 0;
    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Canonical transition each field drives.
Transition default_transition(FieldId id);

struct Level {
    std::string label;
    LevelRole role = LevelRole::Ground;
};

struct DecayChannel {
    int from = 0;
    int to = 0;
    double rate = 0.0;
};

struct LevelScheme {
    SystemId system = SystemId::System1;
    std::vector<Level> levels;
    /// Upper minus lower excited-state splitting (System1/3: |4> above |3>).
    double splitting_mhz = 121.0;
    std::vector<DecayChannel> decays;
    std::vector<Transition> transitions;

    int size() const noexcept { return static_cast<int>(levels.size()); }
    /// Total population decay rate out of `level`.
    double decay_rate(int level) const;
    bool has_transition(const Transition& t) const;
    /// Throws ValidationError when an invariant is broken.
    void validate() const;
};

inline constexpr double kDefaultGamma = 6.0;
inline constexpr double kDefaultSplitting = 121.0;

/// Decay branching presets. Branching sends |3> half to |1> and half to |2>
/// and |4> fully to |2>. GroundReservoir returns every excited level to |1>,
/// the dissipative counterpart of the b1*b1 = 1 premise.
enum class DecayModel { Branching, GroundReservoir };

std::string_view to_string(DecayModel m);
std::optional<DecayModel> parse_decay_model(std::string_view text);

struct SchemeOverrides {
    std::optional<double> gamma2;
    std::optional<double> gamma3;
    std::optional<double> gamma4;
    std::optional<double> splitting_mhz;
    std::optional<DecayModel> decay_model;
    /// Fraction of Gamma3 going to |1> (rest to |2>); overrides decay_model.
    std::optional<double> branch_3_to_1;
    /// Fraction of Gamma4 going to |2> (rest to |1>); overrides decay_model.
    std::optional<double> branch_4_to_2;
};

LevelScheme make_scheme(SystemId id, const SchemeOverrides& overrides = {});

struct FieldDrive {
    FieldId id = FieldId::Probe;
    cplx rabi{0.0, 0.0};
    double detuning = 0.0;
    Transition transition{};
};

/// Rabi frequency from (magnitude, phase in degrees).
cplx polar_rabi(double magnitude, double phase_degrees);

struct DipoleEntry {
    Transition transition;
    cplx mu{1.0, 0.0};
};

/// Physical constants. Dimensionless mode (the default) sets N = mu = hbar = eps0 = 1.
struct Physical {
    bool dimensionless = true;
    double density = 1.0;
    double hbar = 1.0;
    double eps0 = 1.0;
    std::vector<DipoleEntry> dipoles;

    cplx dipole(const Transition& t) const;
    double atom_density() const noexcept { return dimensionless ? 1.0 : density; }
};

struct SystemParams {
    LevelScheme scheme;
    std::vector<FieldDrive> fields;
    Case case_kind = Case::EIT;
    Physical physical;

    const FieldDrive* find(FieldId id) const noexcept;
    /// Rabi frequency of a field, zero when the field is absent.
    cplx rabi(FieldId id) const noexcept;
    double detuning(FieldId id) const noexcept;
    void set_rabi(FieldId id, cplx value);
    void set_detuning(FieldId id, double value);
    void validate() const;
};

/// Equation-level symbols of System1 (and the strong part of System3).
/// d21 is the two-photon detuning, da and db the diagonal detunings of |3>
/// and |4>; A = da - i*Gamma3/2, B = db - i*Gamma4/2.
struct System1Symbols {
    cplx probe, coupling, signal;
    double d21 = 0.0, da = 0.0, db = 0.0;
    double gamma3 = 0.0, gamma4 = 0.0;
    cplx A, B;
};

/// System2 symbols: Omega12 = Omega_a * Omega_b, Omega13 (field d),
/// Omega23 (field c), and the complex detunings d21 = D21 - i*Gamma2/2,
/// d31 = D31 - i*Gamma3/2.
struct System2Symbols {
    cplx o12, o13, o23;
    cplx d21, d31;
    double gamma2 = 0.0, gamma3 = 0.0;
};

struct System3Symbols {
    System1Symbols base;
    cplx weak23, weak24;
};

System1Symbols system1_symbols(const SystemParams& p);
System2Symbols system2_symbols(const SystemParams& p);
System3Symbols system3_symbols(const SystemParams& p);

/// Detunings as they appear in the System1 amplitude equations.
struct EquationDetunings {
    double d21 = 0.0;
    double da = 0.0;
    double db = 0.0;
};

/// Builds System1 parameters from equation-level detunings; the field
/// detunings are back-computed (probe = da, coupling = da - d21, signal = db - d21).
SystemParams make_system1(Case c, cplx probe, cplx coupling, cplx signal, EquationDetunings det,
                          const SchemeOverrides& overrides = {});

/// System2 parameters. `two_photon` is the |1>-|2> detuning split evenly over
/// fields a and b; field c's detuning closes the loop (d31 - two_photon).
SystemParams make_system2(cplx a, cplx b, cplx c, cplx d, double two_photon, double d31,
                          const SchemeOverrides& overrides = {});

SystemParams make_system3(cplx probe, cplx coupling, cplx signal, cplx weak23, cplx weak24, EquationDetunings det,
                          const SchemeOverrides& overrides = {});

/// The System1 (EIT) part of System3 parameters: weak fields dropped.
SystemParams strong_part(const SystemParams& p);

/// Probability amplitudes b1..bN.
struct Amplitudes {
    Eigen::VectorXcd b;

    cplx operator()(int level) const { return b(level - 1); }
    /// conj(b_bra) * b_ket
    cplx product(int bra, int ket) const { return std::conj(b(bra - 1)) * b(ket - 1); }
};

enum class Normalization {
    GroundFixed, ///< b1 = 1 (Case I, System2)
    CptPair,     ///< gauge b2 = 1, rescale to |b1|^2 + |b2|^2 = 1
    Perturbative ///< unknowns are first-order corrections
};

/// Linear system M * x = rhs whose solution gives the steady-state amplitudes.
struct RwaSystem {
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd rhs;
    std::vector<std::string> unknowns;
    Normalization normalization = Normalization::GroundFixed;
    /// Set when the construction is structurally rank deficient (a zero row or column).
    bool rank_deficient = false;
};

/// Steady-state amplitude equations. System3 needs the unperturbed System1
/// amplitudes (b1..b4) and uses the overload below.
RwaSystem rwa_matrix(const SystemParams& p);
RwaSystem rwa_matrix(const SystemParams& p, const Amplitudes& unperturbed);

/// Hermitian RWA Hamiltonian with the same detunings and couplings as rwa_matrix.
Eigen::MatrixXcd rwa_hamiltonian(const SystemParams& p);

/// Effective non-Hermitian Hamiltonian H - i/2 diag(Gamma_k).
Eigen::MatrixXcd effective_hamiltonian(const SystemParams& p);

} // namespace xpm
