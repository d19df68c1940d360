#include <doctest.h>

#include "draws.hpp"
#include "oracle.hpp"
#include "xpm/analytic.hpp"
#include "xpm/errors.hpp"
#include "xpm/symmetry.hpp"

using namespace xpm;
using xpm_test::reference_coherence;
using xpm_test::rel_err;
using xpm_test::Rng;

namespace {

SystemParams fig4(double d21 = 0.0) { return make_system1(Case::EIT, 0.1, 3.55, 5.0, {d21, 2.0, 2.0 + d21}); }

} // namespace

TEST_CASE("probe coherence") {
    auto p = fig4(0.7);
    CHECK(rel_err(probe_coherence_s1(p).total, reference_coherence(p, 1, 3)) < 1e-9);

    p.set_rabi(FieldId::Probe, 0.0);
    CHECK(std::abs(probe_coherence_s1(p).total) == 0.0);

    auto q = fig4();
    q.set_rabi(FieldId::Signal, 0.0);
    CHECK(std::abs(probe_coherence_s1(q).total) == 0.0);

    SUBCASE("two fifth-order terms at two-photon resonance") {
        const auto c = probe_coherence_s1(fig4());
        REQUIRE(c.terms.size() == 2);
        CHECK(c.terms[0].order == 5);
        CHECK(c.terms[1].order == 5);
        CHECK(photon_count(c.term("chi5_signal").signature, FieldId::Signal) == 4);
        CHECK(photon_count(c.term("chi5_coupling").signature, FieldId::Coupling) == 2);
        CHECK(photon_count(c.term("chi5_coupling").signature, FieldId::Signal) == 2);
        CHECK(rel_err(c.total, reference_coherence(fig4(), 1, 3)) < 1e-9);
    }
}

TEST_CASE("coupling coherence") {
    const auto p = fig4();
    const auto c = coupling_coherence_s1(p);
    CHECK(c.term("term2").value == cplx(0.0));
    CHECK(rel_err(c.total, reference_coherence(p, 2, 3)) < 1e-9);

    auto q = fig4(1.3);
    q.set_rabi(FieldId::Signal, 0.0);
    CHECK(std::abs(coupling_coherence_s1(q).term("term1").value) == 0.0);
    CHECK(rel_err(coupling_coherence_s1(q).total, reference_coherence(q, 2, 3)) < 1e-9);
    CHECK_THROWS_AS(coupling_coherence_s1(make_system1(Case::CPT, 0.1, 0.1, 0.1, {})), CaseError);
}

TEST_CASE("signal coherence and its conjugate") {
    const auto p = fig4(0.4);
    const auto c = signal_coherence_s1(p);
    CHECK(c.terms.size() == 1);
    CHECK(rel_err(c.total, reference_coherence(p, 2, 4)) < 1e-9);
    const auto r = c.conjugate();
    CHECK(r.bra == 4);
    CHECK(r.ket == 2);
    CHECK(r.total == std::conj(c.total));
    CHECK(rel_err(r.total, reference_coherence(p, 4, 2)) < 1e-9);

    auto q = p;
    q.set_rabi(FieldId::Coupling, 0.0);
    CHECK(std::abs(signal_coherence_s1(q).total) == 0.0);
}

TEST_CASE("poles raise instead of returning infinities") {
    SchemeOverrides o;
    o.gamma4 = 0.0;
    const auto p = make_system1(Case::EIT, 0.1, 3.55, 5.0, {0.0, 1.0, 0.0}, o);
    CHECK_THROWS_AS(coupling_coherence_s1(p), PoleError);
    CHECK_THROWS_AS(signal_coherence_s1(p), PoleError);
}

TEST_CASE("CPT signal coherence") {
    const auto p = make_system1(Case::CPT, 0.1, 0.1, 0.1, {0.0, 2.0, 1.0});
    const auto branches = signal_coherence_s1_cpt_branches(p);
    REQUIRE(branches.size() == 2);
    CHECK(rel_err(branches[0].total, reference_coherence(p, 2, 4)) < 1e-9);
    CHECK(branches[0].term("dominant").value != cplx(0.0));
    CHECK(squeezing_capability(branches[0].term("dominant").signature, FieldId::Signal));
    // both branches share the linear-free nonlinear part up to sign
    CHECK(rel_err(cpt_nonlinear_part(branches[1]), -cpt_nonlinear_part(branches[0])) < 1e-12);

    auto q = p;
    q.set_rabi(FieldId::Signal, 0.0);
    CHECK(std::abs(signal_coherence_s1_cpt(q).total) == 0.0);

    const auto off = make_system1(Case::CPT, 0.1, 0.1, 0.1, {0.5, 2.0, 1.0});
    CHECK_THROWS_AS(signal_coherence_s1_cpt(off), CaseError);
    CHECK_THROWS_AS(signal_coherence_s1_cpt(fig4()), CaseError);
}

TEST_CASE("fifth-order magnitude matches both coherence terms") {
    Rng rng(8);
    for (int n = 0; n < 50; ++n) {
        const auto p = xpm_test::draw_system1(rng, Case::EIT, false);
        const double m = chi5_symmetric_magnitude(p);
        CHECK(m > 0.0);
        CHECK(rel_err(std::abs(coupling_coherence_s1(p).term("term1").chi.imag()), m) < 1e-12);
        CHECK(rel_err(std::abs(signal_coherence_s1(p).term("term1").chi.imag()), m) < 1e-12);
    }
    SchemeOverrides o;
    o.gamma4 = 0.0;
    CHECK(chi5_symmetric_magnitude(make_system1(Case::EIT, 0.1, 3.55, 5.0, {0.0, 1.0, 2.0}, o)) == 0.0);
}

TEST_CASE("loop coherences") {
    Rng rng(9);
    for (int n = 0; n < 30; ++n) {
        const auto p = xpm_test::draw_system2(rng);
        const auto c = coherences_s2(p);
        CHECK(rel_err(c.b1b3.total, reference_coherence(p, 1, 3)) < 1e-10);
        CHECK(rel_err(c.b1b2.total, reference_coherence(p, 1, 2)) < 1e-10);
        CHECK(rel_err(c.b2b3.total, reference_coherence(p, 2, 3)) < 1e-9);
    }

    auto p = make_system2(1.0, 1.5, 0.0, 2.0, 1.0, -3.0);
    auto c = coherences_s2(p);
    CHECK(c.b1b3.term("nonlinear").value == cplx(0.0));
    CHECK(c.b2b3.term("nonlinear").value == cplx(0.0));
    CHECK(rel_err(c.b2b3.total, reference_coherence(p, 2, 3)) < 1e-9);

    auto q = make_system2(0.0, 1.5, 2.0, 2.0, 1.0, -3.0);
    c = coherences_s2(q);
    CHECK(c.b1b3.term("nonlinear").value == cplx(0.0));
    CHECK(c.b1b2.term("linear").value == cplx(0.0));
}

TEST_CASE("shared third-order susceptibility") {
    SchemeOverrides o;
    o.gamma2 = 0.0;
    o.gamma3 = 0.0;
    const auto p = make_system2(1.0, 1.0, 2.0, 0.5, 1.0, 3.0, o);
    CHECK(chi3_s2(p).imag() == doctest::Approx(0.0));

    const auto q = make_system2(1.0, 1.0, 2.0, 0.5, 1.0, 3.0);
    const auto c = coherences_s2(q);
    const double ref = std::abs(chi3_s2(q).imag());
    CHECK(ref > 0.0);
    CHECK(rel_err(std::abs(c.b1b3.term("nonlinear").chi.imag()), ref) < 1e-12);
    CHECK(rel_err(std::abs(c.b2b3.term("nonlinear").chi.imag()), ref) < 1e-12);
    CHECK(rel_err(std::abs(c.b1b2.term("nonlinear").chi.imag()), ref) < 1e-12);
    const auto r = c.b1b3.conjugate();
    CHECK(r.term("nonlinear").chi.imag() == doctest::Approx(-c.b1b3.term("nonlinear").chi.imag()));
}

TEST_CASE("weak-field coherences") {
    Rng rng(10);
    for (int n = 0; n < 20; ++n) {
        const auto p = xpm_test::draw_system3(rng);
        const auto c = perturbed_coherences_s3(p);
        const auto r = xpm_test::reference_perturbation(p);
        CHECK(rel_err(c.b2db4.total, std::conj(r.b(1)) * r.db(3)) < 1e-9);
        CHECK(rel_err(c.b4db2.total, std::conj(r.b(3)) * r.db(1)) < 1e-9);
        CHECK(c.b2db4.terms.size() == 5);
        CHECK(c.b4db2.terms.size() == 4);
    }
    auto p = make_system3(0.1, 3.0, 5.0, 0.0, 0.0, {0.0, 1.0, 2.0});
    const auto zero = perturbed_coherences_s3(p);
    CHECK(zero.b2db4.total == cplx(0.0));
    CHECK(zero.b4db2.total == cplx(0.0));

    const auto off = make_system3(0.1, 3.0, 5.0, 0.01, 0.01, {0.3, 1.0, 2.0});
    CHECK_THROWS_AS(perturbed_coherences_s3(off), CaseError);

    const auto strong = make_system3(0.1, 3.0, 5.0, 2.0, 0.01, {0.0, 1.0, 2.0});
    CHECK_FALSE(perturbed_coherences_s3(strong).warnings.empty());

    const auto u = unperturbed_s1(strong_part(p));
    CHECK(u(1) == cplx(1.0));
    CHECK_NOTHROW(perturbed_coherences_s3(make_system3(0.1, 3.0, 5.0, 0.01, 0.01, {0.0, 1.0, 2.0}), u));
}

TEST_CASE("unperturbed closed form matches the reference amplitudes") {
    Rng rng(11);
    const auto p = xpm_test::draw_system1(rng, Case::EIT, false);
    const auto u = unperturbed_s1(p);
    const auto ref = xpm_test::reference_amplitudes(p);
    for (int k = 1; k <= 4; ++k) CHECK(rel_err(u(k), ref(k - 1)) < 1e-9);
}

TEST_CASE("photon flux") {
    const auto p = fig4(0.5);
    const auto cc = coupling_coherence_s1(p);
    const auto sc = signal_coherence_s1(p);
    const double nc = photon_flux(cc, FieldId::Coupling, p, "term1");
    const double ns = photon_flux(sc, FieldId::Signal, p, "term1");
    CHECK(rel_err(nc, ns) < 1e-12);
    CHECK(rel_err(nc, photon_flux_closed_form_s1(p)) < 1e-12);
    CHECK(rel_err(photon_flux(sc.conjugate(), FieldId::Signal, p, "term1"), ns) < 1e-12);
    CHECK_THROWS_AS(photon_flux(cc, FieldId::Signal, p), PairingError);

    auto q = p;
    q.set_rabi(FieldId::Probe, 0.0);
    CHECK(photon_flux(coupling_coherence_s1(q), FieldId::Coupling, q, "term1") == 0.0);
    CHECK(photon_flux_closed_form_s1(q) == 0.0);

    auto phys = p;
    phys.physical.dimensionless = false;
    phys.physical.density = 3.0;
    CHECK(rel_err(photon_flux_closed_form_s1(phys), 3.0 * photon_flux_closed_form_s1(p)) < 1e-12);
}

TEST_CASE("observed field of a coherence pair") {
    CHECK(observed_field(SystemId::System1, 2, 4) == FieldId::Signal);
    CHECK(observed_field(SystemId::System1, 3, 2) == FieldId::Coupling);
    CHECK(observed_field(SystemId::System2, 1, 3) == FieldId::FieldD);
    CHECK_FALSE(observed_field(SystemId::System1, 3, 4).has_value());
}

TEST_CASE("squeezing needs at least two photons of the observed field") {
    const auto p = fig4();
    const auto c = probe_coherence_s1(p);
    CHECK_FALSE(squeezing_capability(c.term("chi5_signal").signature, FieldId::Probe));
    CHECK_FALSE(squeezing_capability(c.term("chi5_coupling").signature, FieldId::Probe));
    CHECK_FALSE(squeezing_capability({}, FieldId::Signal));
}
