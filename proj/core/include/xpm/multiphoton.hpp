#pragma once

// Coherence products split into labeled multiphoton terms.
//
// A term value is chi * phase * monomial, where the monomial is the product of
// Rabi factors listed in the signature (a conjugated Omega is an absorbed
// photon, sign +1; a plain Omega an emitted one, sign -1). Each signature also
// carries the observed photon(s) of the field whose polarization the
// coherence describes; those slots are flagged `observed` and are not part
// of the monomial.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "xpm/model.hpp"

namespace xpm {

struct Photon {
    FieldId field = FieldId::Probe;
    int sign = +1;
    bool observed = false;
    friend bool operator==(const Photon&, const Photon&) = default;
};

using Signature = std::vector<Photon>;

struct MultiphotonTerm {
    std::string label;
    cplx value{};
    /// Field-independent coefficient left after pulling out phase and monomial.
    cplx chi{};
    /// Unit-modulus prefactor not tied to photons (e.g. Omega23*/Omega23).
    cplx phase{1.0, 0.0};
    Signature signature;
    int order = 0;
};

/// One Rabi factor of a monomial: Omega_field, or its conjugate.
struct Factor {
    FieldId field;
    bool conjugated;
};

inline Factor absorb(FieldId f) { return {f, true}; }
inline Factor emit(FieldId f) { return {f, false}; }

/// Builds a term from its coefficient and monomial. `observed` lists the field
/// slots of the observed photon(s), each with the given sign.
MultiphotonTerm make_term(std::string label, cplx chi, const std::vector<Factor>& monomial,
                          const std::vector<FieldId>& observed, const SystemParams& p, cplx phase = {1.0, 0.0},
                          int observed_sign = -1);

/// Product of the Rabi factors of a signature (observed slots skipped).
cplx monomial(const Signature& sig, const SystemParams& p);

/// Count of monomial photons belonging to `field` (observed slots skipped).
int photon_count(const Signature& sig, FieldId field);

/// Exponents (a, b) such that scaling Omega_field -> s*Omega_field scales the
/// monomial by s^a * conj(s)^b.
std::pair<int, int> scaling_exponents(const Signature& sig, FieldId field);

/// Multiset equality of two signatures, optionally allowing a global sign flip.
bool same_process(const Signature& a, const Signature& b, bool allow_flip = true);

std::string to_string(const Signature& sig);

struct CoherenceResult {
    int bra = 0;
    int ket = 0;
    cplx total{};
    std::vector<MultiphotonTerm> terms;
    int branch_id = 0;

    /// Recomputes total as the exact sum of term values.
    void sum_terms();
    /// The reversed pair b_ket* b_bra: every value conjugated, signatures flipped.
    CoherenceResult conjugate() const;
    const MultiphotonTerm& term(std::string_view label) const;
};

} // namespace xpm
