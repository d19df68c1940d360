#pragma once

// Cross-field symmetry checks, photon-flux balance and the Type1/2/3
// process classification.

#include <optional>
#include <string>
#include <vector>

#include "xpm/model.hpp"
#include "xpm/multiphoton.hpp"

namespace xpm {

inline constexpr double kAnalyticSymmetryTol = 1e-9;
inline constexpr double kSimulationSymmetryTol = 1e-3;

/// One field's view of a process: the term seen in that field's polarization
/// and, optionally, the photon flux attributed to it.
struct FieldTerm {
    FieldId field;
    MultiphotonTerm term;
    std::optional<double> flux;
};

/// Zero-valued stand-in for a field in which a process has no counterpart.
FieldTerm absent_counterpart(const MultiphotonTerm& like, FieldId field);

enum class Verdict { Symmetric, Asymmetric };

struct PairVerdict {
    FieldId a, b;
    Verdict verdict;
    double im_difference = 0.0;
    std::optional<double> flux_difference;
};

struct SymmetryReport {
    std::vector<FieldId> fields;
    std::vector<cplx> values;
    std::vector<double> im_magnitudes;
    std::vector<std::optional<double>> flux;
    std::vector<PairVerdict> pairs;
    double tolerance = kAnalyticSymmetryTol;
    std::string signature;

    bool all_symmetric() const;
};

/// Compares |Im chi| (and flux, when both sides carry one) over every pair.
/// Throws SignatureMismatch unless all terms describe the same process.
SymmetryReport check_field_symmetry(const std::vector<FieldTerm>& terms, double tol = kAnalyticSymmetryTol);

struct FluxBalance {
    std::vector<FieldId> fields;
    std::vector<double> flux;
    /// Closed-form value where one exists (System1), else empty.
    std::optional<double> closed_form;
    bool equal = false;
    double tolerance = 1e-12;
};

/// Photon flux of the shared process in each field: the fifth-order term of
/// System1 (coupling, signal) or the System2 first terms (a, b, c, d).
FluxBalance flux_balance(const SystemParams& p, const std::vector<FieldId>& fields, double tol = 1e-12);

/// The shared-process term of `field` with its flux filled in.
FieldTerm shared_process_term(const SystemParams& p, FieldId field);

enum class ProcessType { Type1, Type2, Type3, Mixed };
std::string_view to_string(ProcessType t);

struct ProcessContext {
    SystemId system = SystemId::System1;
    /// A simultaneous reverse process is present in the other fields.
    bool reverse_process = false;
};

struct FieldDecomposition {
    FieldId field;
    cplx original;
    cplx symmetric_part;
    cplx asymmetric_part;
};

struct ProcessHypothesis {
    ProcessType label = ProcessType::Type1;
    std::vector<FieldDecomposition> parts;
    std::string rationale;
};

ProcessHypothesis classify_process(const SymmetryReport& report, const ProcessContext& context);

/// True when the observed field contributes at least two photons to the term.
bool squeezing_capability(const Signature& signature, FieldId observed_field);

std::string to_json(const SymmetryReport& report, const ProcessHypothesis* hypothesis = nullptr);
std::string to_json(const ProcessHypothesis& hypothesis);
std::string to_json(const FluxBalance& balance);

} // namespace xpm
