#pragma once

// Closed-form steady-state coherence products for the three systems, split
// into multiphoton terms, and the photon absorption flux of a coherence.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xpm/model.hpp"
#include "xpm/multiphoton.hpp"

namespace xpm {

/// |B|, |D| and the System2 denominator below this raise PoleError.
inline constexpr double kPoleGuard = 1e-9;
/// Two-photon detuning treated as exactly zero.
inline constexpr double kResonanceTolerance = 1e-12;

/// D = 4*d21*A - |Omega24|^2 A/B - |Omega_c|^2.
cplx d_factor(const SystemParams& p);

/// b1* b3 with b1 = 1. At d21 = 0 two fifth-order terms ("chi5_signal",
/// "chi5_coupling"); otherwise a "linear" and a "chi3" term.
CoherenceResult probe_coherence_s1(const SystemParams& p);

/// b2* b3: "term1" (fifth order, shared with the signal field) and "term2" (prop. to d21).
CoherenceResult coupling_coherence_s1(const SystemParams& p);

/// b2* b4: single "term1".
CoherenceResult signal_coherence_s1(const SystemParams& p);

/// b2* b4 under |b1|^2 + |b2|^2 = 1 at d21 = 0. Branch 0 is the solution of
/// the amplitude equations: "linear" plus the nonlinear terms "dominant"
/// (Omega24* |Omega24|^4, five signal photons), "coupling4" and "mixed".
/// Branch 1 is the nonlinear part alone with reversed sign.
CoherenceResult signal_coherence_s1_cpt(const SystemParams& p, int branch = 0);
std::vector<CoherenceResult> signal_coherence_s1_cpt_branches(const SystemParams& p);

/// Sum of the nonlinear terms of a CPT signal coherence (everything but "linear").
cplx cpt_nonlinear_part(const CoherenceResult& c);

/// |Im chi5| of the term shared by the coupling and signal fields.
double chi5_symmetric_magnitude(const SystemParams& p);

struct System2Coherences {
    CoherenceResult b1b3; ///< field d
    CoherenceResult b1b2; ///< fields a and b
    CoherenceResult b2b3; ///< field c
};

/// Each result holds a "nonlinear" first term and a "linear" second term;
/// b2* b3 carries a third "remainder" term that completes the exact product.
System2Coherences coherences_s2(const SystemParams& p);

/// chi3 = mu23* mu12* mu13 / conj(Q), Q = 4 d31 d21 - |Omega23|^2.
cplx chi3_s2(const SystemParams& p);

/// Closed-form System1 EIT amplitudes b1..b4 (b1 = 1).
Amplitudes unperturbed_s1(const SystemParams& p);

struct System3Coherences {
    CoherenceResult b2db4; ///< b2* db4, terms "t1".."t5"
    CoherenceResult b4db2; ///< b4* db2, terms "t1".."t4"
    std::vector<std::string> warnings;
};

/// First-order weak-field coherences at zero two-photon detuning.
System3Coherences perturbed_coherences_s3(const SystemParams& p);
/// Same, after checking `unperturbed` is the b1 = 1 solution of the strong part.
System3Coherences perturbed_coherences_s3(const SystemParams& p, const Amplitudes& unperturbed);
/// Terms evaluated with D and K = |D|^2 + |Omega_c|^2 |Omega13|^2 held fixed.
System3Coherences perturbed_coherences_s3_frozen(const SystemParams& p, cplx D, double K);

/// Field whose polarization a coherence pair belongs to.
std::optional<FieldId> observed_field(SystemId system, int bra, int ket);

/// Photon rate n = N/2 |Im(rho_lu * Omega)| of a coherence (or one labeled
/// term), with rho_lu the coherence ordered lower-then-upper along the field's
/// transition. Two-photon fields a and b use Omega12 = Omega_a Omega_b.
double photon_flux(const CoherenceResult& c, FieldId field, const SystemParams& p,
                   std::optional<std::string_view> term = std::nullopt);

/// N |Omega_c|^2 |Omega13|^2 |Omega24|^2 (Gamma4/2) / (4 |B|^2 |D|^2).
double photon_flux_closed_form_s1(const SystemParams& p);

} // namespace xpm
