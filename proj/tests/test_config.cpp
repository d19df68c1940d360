#include <doctest.h>

#include "xpm/config.hpp"
#include "xpm/errors.hpp"

using namespace xpm;

TEST_CASE("defaults") {
    const auto s = default_settings();
    CHECK(s.params().scheme.system == SystemId::System1);
    CHECK(s.params().rabi(FieldId::Coupling) == cplx(3.55));
    CHECK(s.sweep.range.points == 401);
    CHECK(s.sweep.range.start == -20.0);
    CHECK(s.compare.policy.kind == BackgroundPolicy::Kind::ExcludeWindow);
}

TEST_CASE("fields, scheme and sweep tables") {
    const auto s = parse_settings(R"(
system = 1
case = "eit"
[scheme]
gamma3 = 5.0
decay_model = "ground-reservoir"
[fields.probe]
rabi = [0.2, 90.0]
detuning = 1.5
[sweep]
axis = "probe"
methods = ["analytic", "oracle"]
fields = ["probe"]
)");
    const auto& p = s.params();
    CHECK(p.scheme.decay_rate(3) == 5.0);
    CHECK(std::abs(p.rabi(FieldId::Probe) - cplx(0.0, 0.2)) < 1e-15);
    CHECK(p.detuning(FieldId::Probe) == 1.5);
    CHECK(s.sweep.axis == Axis::Probe);
    CHECK(s.sweep.range.start == 0.0);
    CHECK(s.sweep.range.stop == 200.0);
    CHECK(s.sweep.methods.size() == 2);
    CHECK(s.sweep.fields == std::vector<FieldId>{FieldId::Probe});
}

TEST_CASE("loop detuning closes automatically") {
    const auto s = parse_settings("system = 2\n[fields.a]\ndetuning = 1.0\n[fields.d]\ndetuning = 4.0\n");
    CHECK(s.params().detuning(FieldId::FieldC) == doctest::Approx(3.0));
}

TEST_CASE("overrides apply in order") {
    const auto s = default_settings({"fields.coupling.rabi=1.0", "fields.coupling.rabi=2.0", "sweep.axis=probe",
                                     "sweep.points=11", "tolerance=1e-6"});
    CHECK(s.params().rabi(FieldId::Coupling) == cplx(2.0));
    CHECK(s.sweep.axis == Axis::Probe);
    CHECK(s.sweep.range.points == 11);
    CHECK(s.tolerance == 1e-6);
}

TEST_CASE("bad input is rejected") {
    CHECK_THROWS_AS(parse_settings("colour = 3"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[fields.laser]\nrabi = 1.0"), ValidationError);
    CHECK_THROWS_AS(parse_settings("system = 4"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[sweep]\npoints = 1"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[fields.probe]\nrabi = \"strong\""), ValidationError);
    CHECK_THROWS_AS(parse_settings("system = ["), ValidationError);
    CHECK_THROWS_AS(default_settings({"novalue"}), ValidationError);
    CHECK_THROWS_AS(load_settings("/nonexistent/x.toml"), ValidationError);
}

TEST_CASE("shipped configurations load") {
    for (const char* name : {"fig4.toml", "fig7.toml", "fig9.toml"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_settings(std::string(XPM_CONFIG_DIR) + "/" + name));
    }
    const auto s = load_settings(std::string(XPM_TEST_DATA_DIR) + "/loop.toml");
    CHECK(s.params().scheme.system == SystemId::System2);
}

TEST_CASE("parameter snapshot") {
    const auto json = params_to_json(default_settings().params());
    CHECK(json.find("\"coupling\"") != std::string::npos);
    CHECK(json.find("\"splitting_mhz\"") != std::string::npos);
}
