#pragma once

// Random parameter sets away from poles.

#include "oracle.hpp"
#include "xpm/model.hpp"

namespace xpm_test {

inline xpm::SchemeOverrides random_gammas(Rng& rng) {
    xpm::SchemeOverrides o;
    o.gamma2 = rng.uniform(0.5, 8.0);
    o.gamma3 = rng.uniform(1.0, 10.0);
    o.gamma4 = rng.uniform(1.0, 10.0);
    return o;
}

inline xpm::SystemParams draw_system1(Rng& rng, xpm::Case c, bool two_photon_resonant) {
    const double d21 = two_photon_resonant ? 0.0 : rng.uniform(-15.0, 15.0);
    const xpm::EquationDetunings det{d21, rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0)};
    return xpm::make_system1(c, rng.rabi(0.2, 8.0), rng.rabi(0.2, 8.0), rng.rabi(0.2, 8.0), det, random_gammas(rng));
}

inline xpm::SystemParams draw_system2(Rng& rng) {
    return xpm::make_system2(rng.rabi(0.5, 3.0), rng.rabi(0.5, 3.0), rng.rabi(0.2, 8.0), rng.rabi(0.2, 8.0),
                             rng.uniform(-10.0, 10.0), rng.uniform(-15.0, 15.0), random_gammas(rng));
}

inline xpm::SystemParams draw_system3(Rng& rng) {
    const xpm::EquationDetunings det{0.0, rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0)};
    return xpm::make_system3(rng.rabi(0.2, 8.0), rng.rabi(0.2, 8.0), rng.rabi(0.2, 8.0), rng.rabi(0.001, 0.02),
                             rng.rabi(0.001, 0.02), det, random_gammas(rng));
}

} // namespace xpm_test
