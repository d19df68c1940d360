#pragma once

// TOML run configuration.
//
//   system = 1                  # 1, 2 or 3
//   case = "eit"                # eit | cpt (system1)
//   tolerance = 1e-9
//   [scheme]                    # gamma2, gamma3, gamma4, splitting, decay_model,
//                               # branch_3_to_1, branch_4_to_2
//   [fields.probe]              # one table per field id
//   rabi = [0.1, 0.0]           # magnitude MHz, phase degrees (or a bare magnitude)
//   detuning = 0.0
//   [physical]                  # dimensionless, density, hbar, eps0,
//                               # dipoles = [{lower, upper, mu = [mag, deg]}]
//   [sweep]                     # axis, start, stop, points, lock, two_photon,
//                               # methods, fields, threads
//   [compare]                   # policy, center, width, a, b
//
// Overrides are "dotted.key=value" strings applied in order (last wins);
// a value that is not valid TOML is taken as a string.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "xpm/sweep.hpp"

namespace xpm {

struct CompareSettings {
    BackgroundPolicy policy;
    Method a = Method::Analytic;
    Method b = Method::Lindblad;
};

struct RunSettings {
    SweepSpec sweep;
    CompareSettings compare;
    double tolerance = 1e-9;

    const SystemParams& params() const { return sweep.fixed; }
};

RunSettings parse_settings(std::string_view toml_text, const std::vector<std::string>& overrides = {});
RunSettings load_settings(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Settings from overrides alone (no file).
RunSettings default_settings(const std::vector<std::string>& overrides = {});

std::string params_to_json(const SystemParams& p);

} // namespace xpm
