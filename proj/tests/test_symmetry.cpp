#include <doctest.h>

#include <json.hpp>

#include "draws.hpp"
#include "xpm/analytic.hpp"
#include "xpm/errors.hpp"
#include "xpm/symmetry.hpp"

using namespace xpm;
using xpm_test::Rng;

namespace {

SystemParams fig4(double d21 = 0.0) { return make_system1(Case::EIT, 0.1, 3.55, 5.0, {d21, 2.0, 2.0 + d21}); }

} // namespace

TEST_CASE("fifth-order pair is symmetric") {
    const auto p = fig4(0.8);
    const auto r = check_field_symmetry({shared_process_term(p, FieldId::Coupling), shared_process_term(p, FieldId::Signal)},
                                        1e-12);
    CHECK(r.all_symmetric());
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].flux_difference.has_value());

    const auto h = classify_process(r, {SystemId::System1, false});
    CHECK(h.label == ProcessType::Type1);
    CHECK(h.rationale.find("candidate") != std::string::npos);
}

TEST_CASE("a term without counterpart is asymmetric") {
    const auto p = make_system1(Case::CPT, 0.1, 0.1, 0.1, {0.0, 2.0, 1.0});
    const auto c = signal_coherence_s1_cpt(p);
    const auto dominant = c.term("dominant");
    const auto r = check_field_symmetry({{FieldId::Signal, dominant, photon_flux(c, FieldId::Signal, p, "dominant")},
                                         absent_counterpart(dominant, FieldId::Coupling)});
    CHECK_FALSE(r.all_symmetric());
    CHECK(classify_process(r, {SystemId::System1, false}).label == ProcessType::Type2);
}

TEST_CASE("the detuning-proportional coupling term is purely dispersive") {
    // no counterpart in the signal, yet nothing absorbed either
    const auto term2 = coupling_coherence_s1(fig4(1.5)).term("term2");
    CHECK(std::abs(term2.value) > 0.0);
    CHECK(term2.chi.imag() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("loop first terms are symmetric in all fields") {
    // phase-locked loop: fluxes agree along with |Im chi|
    const auto p = make_system2(std::polar(1.0, 0.2), std::polar(1.3, 0.5), std::polar(2.0, -0.4),
                                std::polar(0.7, 0.2 + 0.5 - 0.4), 1.0, -2.0);
    std::vector<FieldTerm> terms;
    for (FieldId f : {FieldId::FieldD, FieldId::FieldA, FieldId::FieldC}) terms.push_back(shared_process_term(p, f));
    const auto r = check_field_symmetry(terms, 1e-12);
    CHECK(r.pairs.size() == 3);
    CHECK(r.all_symmetric());

    // arbitrary phases: the susceptibilities still agree
    Rng rng(31);
    const auto q = xpm_test::draw_system2(rng);
    terms.clear();
    for (FieldId f : {FieldId::FieldD, FieldId::FieldA, FieldId::FieldC}) {
        auto t = shared_process_term(q, f);
        t.flux.reset();
        terms.push_back(t);
    }
    CHECK(check_field_symmetry(terms, 1e-12).all_symmetric());
}

TEST_CASE("different processes cannot be compared") {
    const auto p = fig4();
    const auto probe = probe_coherence_s1(p).term("chi5_signal");
    CHECK_THROWS_AS(check_field_symmetry({shared_process_term(p, FieldId::Coupling), {FieldId::Probe, probe, std::nullopt}}),
                    SignatureMismatch);
    CHECK_THROWS_AS(check_field_symmetry({shared_process_term(p, FieldId::Coupling)}), ValidationError);
}

TEST_CASE("unequal strengths give a mixed hypothesis with an exact split") {
    Rng rng(32);
    const auto p = xpm_test::draw_system2(rng);
    auto a = shared_process_term(p, FieldId::FieldA);
    auto b = shared_process_term(p, FieldId::FieldC);
    // an extra contribution in one field on top of the shared process
    b.term.value *= 1.7;
    b.term.chi *= 1.7;
    b.flux.reset();
    a.flux.reset();
    const auto r = check_field_symmetry({a, b});
    const auto h = classify_process(r, {SystemId::System2, false});
    CHECK(h.label == ProcessType::Mixed);
    REQUIRE(h.parts.size() == 2);
    bool remainder = false;
    for (const auto& part : h.parts) {
        CHECK(part.symmetric_part + part.asymmetric_part == part.original);
        remainder = remainder || std::abs(part.asymmetric_part) > 0.0;
    }
    CHECK(remainder);
}

TEST_CASE("weak-field terms are attributed to a reverse process") {
    const auto p = make_system3(0.1, 3.0, 5.0, 0.01, 0.01, {0.0, 1.0, 2.0});
    const auto t = perturbed_coherences_s3(p).b2db4.term("t2");
    const auto r = check_field_symmetry({{FieldId::WeakSignal24, t, std::nullopt}, absent_counterpart(t, FieldId::WeakSignal23)});
    const auto h = classify_process(r, {SystemId::System3, true});
    CHECK(h.label == ProcessType::Type3);
    for (const auto& part : h.parts) CHECK(part.symmetric_part + part.asymmetric_part == part.original);
}

TEST_CASE("loosening the tolerance never breaks symmetry") {
    Rng rng(33);
    for (int n = 0; n < 50; ++n) {
        const auto p = xpm_test::draw_system1(rng, Case::EIT, false);
        auto c = shared_process_term(p, FieldId::Coupling);
        auto s = shared_process_term(p, FieldId::Signal);
        s.term.chi *= 1.0 + 1e-6 * n;
        s.flux.reset();
        bool was = false;
        for (double tol : {1e-12, 1e-9, 1e-6, 1e-4, 1e-2}) {
            const bool now = check_field_symmetry({c, s}, tol).all_symmetric();
            CHECK((!was || now));
            was = now;
        }
    }
}

TEST_CASE("flux balance") {
    const auto b = flux_balance(fig4(), {FieldId::Coupling, FieldId::Signal});
    CHECK(b.equal);
    REQUIRE(b.closed_form.has_value());
    CHECK(b.flux[0] == doctest::Approx(*b.closed_form).epsilon(1e-12));

    SchemeOverrides o;
    o.gamma4 = 0.0;
    const auto z = flux_balance(make_system1(Case::EIT, 0.1, 3.55, 5.0, {0.0, 1.0, 2.0}, o),
                                {FieldId::Coupling, FieldId::Signal});
    CHECK(z.flux[0] == 0.0);
    CHECK(z.flux[1] == 0.0);

    // phase-locked loop: every field sees the same photon rate
    const auto loop = make_system2(std::polar(1.0, 0.3), std::polar(1.2, -0.4), std::polar(2.0, 0.9),
                                   std::polar(0.5, 0.3 - 0.4 + 0.9), 1.0, 3.0);
    CHECK(flux_balance(loop, {FieldId::FieldA, FieldId::FieldB, FieldId::FieldC, FieldId::FieldD}, 1e-12).equal);
}

TEST_CASE("report serialization") {
    const auto p = fig4(0.3);
    const auto r = check_field_symmetry({shared_process_term(p, FieldId::Coupling), shared_process_term(p, FieldId::Signal)});
    const auto h = classify_process(r, {SystemId::System1, false});
    const auto j = nlohmann::json::parse(to_json(r, &h));
    CHECK(j.contains("pairs"));
    CHECK(j.contains("fields"));
    CHECK(j["verdict"] == "symmetric");
    CHECK(j["hypothesis"]["label"] == "type1");
    CHECK(j["hypothesis"].contains("rationale"));

    const auto fb = nlohmann::json::parse(to_json(flux_balance(p, {FieldId::Coupling, FieldId::Signal})));
    CHECK(fb["verdict"] == "equal");
    CHECK(fb["n_coupling"].get<double>() == doctest::Approx(fb["n_signal"].get<double>()).epsilon(1e-12));
}
