#pragma once

// Detuning sweeps with analytic, oracle and Lindblad evaluation, trace
// comparison and tabular export.
//
// Axis conventions (System1/3, S = excited-state splitting):
//   coupling axis: x is the coupling detuning from the upper excited level
//     |4>, so delta_c = x + S; the signal shares the coupling frequency
//     (delta_s = x when locked) and the probe follows the EIT point,
//     delta_p = delta_c + two_photon.
//   probe axis: delta_p = x measured from the lower excited level; the
//     coupling keeps its configured detuning (delta_s = delta_c - S when locked).
// System2: the probe axis moves field d (c closes the loop), the coupling
// axis moves the a+b two-photon detuning (c closes the loop).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xpm/model.hpp"
#include "xpm/steady.hpp"

namespace xpm {

enum class Axis { Coupling, Probe };
enum class Method { Analytic, Lindblad, Oracle };

std::string_view to_string(Axis a);
std::string_view to_string(Method m);
std::optional<Axis> parse_axis(std::string_view text);
std::optional<Method> parse_method(std::string_view text);

struct Range {
    double start = -20.0;
    double stop = 20.0;
    int points = 401;

    double at(int i) const;
    void validate() const;
};

struct SweepSpec {
    Axis axis = Axis::Coupling;
    Range range;
    /// omega_b = omega_c: the signal tracks the coupling.
    bool lock_signal_to_coupling = true;
    /// Two-photon detuning held along the coupling axis (System1/3).
    double two_photon = 0.0;
    SystemParams fixed;
    std::vector<Method> methods{Method::Analytic};
    /// Observed fields; empty selects the natural set for the system.
    std::vector<FieldId> fields;
    SteadyOptions steady;
    /// 0: XPM_THREADS, else hardware concurrency.
    int threads = 0;

    void validate() const;
};

/// Parameters at one axis point.
SystemParams params_at(const SweepSpec& spec, double x);

/// Fields reported by default for a configuration.
std::vector<FieldId> default_fields(const SystemParams& p);

/// Coherence pair (bra, ket) whose product b_bra* b_ket is reported for a field.
std::pair<int, int> reported_pair(const SystemParams& p, FieldId field);

struct SweepRow {
    double axis_mhz = 0.0;
    FieldId field = FieldId::Probe;
    Method method = Method::Analytic;
    int branch = 0;
    /// Empty for a gap (pole, inapplicable case, solver failure).
    std::optional<cplx> value;
    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string params_json;
    std::string version;
    std::vector<std::string> log;
};

SweepResult run_sweep(const SweepSpec& spec);

struct Trace {
    std::vector<double> axis;
    std::vector<std::optional<cplx>> values;
};

/// Rows of one (field, method) in axis order.
Trace extract(const SweepResult& r, FieldId field, Method method);

struct BackgroundPolicy {
    enum class Kind { Raw, SubtractLinearBackground, ExcludeWindow } kind = Kind::ExcludeWindow;
    double center = 0.0;
    /// Full width of the excluded window, or the Lorentzian FWHM of the background.
    double width = 4.0 * kDefaultGamma;

    static BackgroundPolicy raw() { return {Kind::Raw, 0.0, 0.0}; }
    static BackgroundPolicy exclude(double center, double width) { return {Kind::ExcludeWindow, center, width}; }
    static BackgroundPolicy subtract(double center, double fwhm) { return {Kind::SubtractLinearBackground, center, fwhm}; }
};

std::optional<BackgroundPolicy::Kind> parse_policy(std::string_view text);

struct ComparisonMetrics {
    double rel_l2_im = 0.0;
    double rel_l2_re = 0.0;
    double max_abs_im = 0.0;
    double max_abs_re = 0.0;
    int points = 0;
};

/// Differences of `a` against the reference `b`. Throws GridMismatch when
/// the axes differ.
ComparisonMetrics compare(const Trace& a, const Trace& b, const BackgroundPolicy& policy);

struct FieldComparison {
    FieldId field;
    Method method_a;
    Method method_b;
    ComparisonMetrics metrics;
};

/// Compares every field present in both results (first method of each).
std::vector<FieldComparison> compare(const SweepResult& a, const SweepResult& b, const BackgroundPolicy& policy);

enum class Format { Csv, Json };

void emit_csv(const SweepResult& r, std::ostream& os);
void emit_json(const SweepResult& r, std::ostream& os);
void emit(const SweepResult& r, Format format, const std::filesystem::path& path);

/// Reads the CSV written by emit_csv. Throws ValidationError on malformed input.
std::vector<SweepRow> parse_csv(std::istream& is);

inline constexpr const char* kCsvHeader = "axis_mhz,field,method,branch,re,im";

std::string library_version();

} // namespace xpm
