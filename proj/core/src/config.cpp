#include "xpm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>
#include <json.hpp>

#include "xpm/errors.hpp"

namespace xpm {

namespace {

void merge(toml::table& into, const toml::table& from) {
    for (const auto& [key, node] : from) {
        auto* dst = into.get(key);
        if (dst && dst->is_table() && node.is_table()) merge(*dst->as_table(), *node.as_table());
        else into.insert_or_assign(key, node);
    }
}

toml::table parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + text + "' is not key=value");
    try {
        return toml::parse(text);
    } catch (const toml::parse_error&) {
        std::string key = text.substr(0, eq), value = text.substr(eq + 1);
        std::string quoted;
        for (char c : value) {
            if (c == '"' || c == '\\') quoted += '\\';
            quoted += c;
        }
        try {
            return toml::parse(key + "=\"" + quoted + "\"");
        } catch (const toml::parse_error& e) {
            throw ValidationError("override '" + text + "': " + std::string(e.description()));
        }
    }
}

void check_keys(const toml::table& t, const std::set<std::string_view>& allowed, const std::string& where) {
    for (const auto& [key, node] : t)
        if (!allowed.contains(key.str())) throw ValidationError("unknown key '" + where + std::string(key.str()) + "'");
}

double number(const toml::node& n, const std::string& what) {
    if (auto v = n.value<double>()) return *v;
    throw ValidationError("'" + what + "' must be a number");
}

std::optional<double> opt_number(const toml::table& t, std::string_view key, const std::string& where) {
    if (const auto* n = t.get(key)) return number(*n, where + std::string(key));
    return std::nullopt;
}

std::string text(const toml::node& n, const std::string& what) {
    if (auto v = n.value<std::string>()) return *v;
    if (auto i = n.value<int64_t>()) return std::to_string(*i);
    throw ValidationError("'" + what + "' must be a string");
}

cplx rabi_value(const toml::node& n, const std::string& what) {
    if (const auto* arr = n.as_array()) {
        if (arr->size() != 2) throw ValidationError("'" + what + "' must be [magnitude, phase_degrees]");
        return polar_rabi(number(*arr->get(0), what), number(*arr->get(1), what));
    }
    return {number(n, what), 0.0};
}

std::vector<std::pair<FieldId, cplx>> default_rabis(SystemId id) {
    switch (id) {
    case SystemId::System1:
        return {{FieldId::Probe, 0.1}, {FieldId::Coupling, 3.55}, {FieldId::Signal, 5.0}};
    case SystemId::System2:
        return {{FieldId::FieldA, 1.0}, {FieldId::FieldB, 1.0}, {FieldId::FieldC, 2.0}, {FieldId::FieldD, 0.5}};
    case SystemId::System3:
        return {{FieldId::Probe, 0.1},         {FieldId::Coupling, 3.55},    {FieldId::Signal, 5.0},
                {FieldId::WeakSignal23, 0.01}, {FieldId::WeakSignal24, 0.01}};
    }
    return {};
}

RunSettings build(const toml::table& root) {
    check_keys(root, {"system", "case", "tolerance", "scheme", "fields", "physical", "sweep", "compare"}, "");
    RunSettings s;
    SystemId system = SystemId::System1;
    if (const auto* n = root.get("system")) {
        const auto parsed = parse_system_id(text(*n, "system"));
        if (!parsed) throw ValidationError("unknown system '" + text(*n, "system") + "'");
        system = *parsed;
    }
    Case kind = Case::EIT;
    if (const auto* n = root.get("case")) {
        const auto parsed = parse_case(text(*n, "case"));
        if (!parsed) throw ValidationError("unknown case '" + text(*n, "case") + "'");
        kind = *parsed;
    }
    if (auto t = opt_number(root, "tolerance", "")) s.tolerance = *t;

    SchemeOverrides o;
    if (const auto* sch = root.get_as<toml::table>("scheme")) {
        check_keys(*sch, {"gamma2", "gamma3", "gamma4", "splitting", "decay_model", "branch_3_to_1", "branch_4_to_2"},
                   "scheme.");
        o.gamma2 = opt_number(*sch, "gamma2", "scheme.");
        o.gamma3 = opt_number(*sch, "gamma3", "scheme.");
        o.gamma4 = opt_number(*sch, "gamma4", "scheme.");
        o.splitting_mhz = opt_number(*sch, "splitting", "scheme.");
        o.branch_3_to_1 = opt_number(*sch, "branch_3_to_1", "scheme.");
        o.branch_4_to_2 = opt_number(*sch, "branch_4_to_2", "scheme.");
        if (const auto* n = sch->get("decay_model")) {
            const auto m = parse_decay_model(text(*n, "scheme.decay_model"));
            if (!m) throw ValidationError("unknown decay model '" + text(*n, "scheme.decay_model") + "'");
            o.decay_model = m;
        }
    }

    SystemParams& p = s.sweep.fixed;
    p.scheme = make_scheme(system, o);
    p.case_kind = kind;
    for (auto [id, rabi] : default_rabis(system)) p.fields.push_back({id, rabi, 0.0, default_transition(id)});

    bool c_detuning_given = false;
    if (const auto* fields = root.get_as<toml::table>("fields")) {
        for (const auto& [key, node] : *fields) {
            const std::string name(key.str());
            const auto id = parse_field_id(name);
            if (!id) throw ValidationError("unknown field '" + name + "'");
            const auto* ft = node.as_table();
            if (!ft) throw ValidationError("'fields." + name + "' must be a table");
            check_keys(*ft, {"rabi", "detuning"}, "fields." + name + ".");
            if (const auto* r = ft->get("rabi")) p.set_rabi(*id, rabi_value(*r, "fields." + name + ".rabi"));
            if (const auto* d = ft->get("detuning")) {
                p.set_detuning(*id, number(*d, "fields." + name + ".detuning"));
                if (*id == FieldId::FieldC) c_detuning_given = true;
            }
        }
    }
    if (system == SystemId::System2 && !c_detuning_given)
        p.set_detuning(FieldId::FieldC, p.detuning(FieldId::FieldD) - p.detuning(FieldId::FieldA) -
                                            p.detuning(FieldId::FieldB));

    if (const auto* ph = root.get_as<toml::table>("physical")) {
        check_keys(*ph, {"dimensionless", "density", "hbar", "eps0", "dipoles"}, "physical.");
        if (const auto* n = ph->get("dimensionless")) {
            auto v = n->value<bool>();
            if (!v) throw ValidationError("'physical.dimensionless' must be a boolean");
            p.physical.dimensionless = *v;
        }
        if (auto v = opt_number(*ph, "density", "physical.")) p.physical.density = *v;
        if (auto v = opt_number(*ph, "hbar", "physical.")) p.physical.hbar = *v;
        if (auto v = opt_number(*ph, "eps0", "physical.")) p.physical.eps0 = *v;
        if (const auto* arr = ph->get_as<toml::array>("dipoles")) {
            for (const auto& item : *arr) {
                const auto* t = item.as_table();
                if (!t) throw ValidationError("'physical.dipoles' entries must be tables");
                DipoleEntry d;
                d.transition.lower = static_cast<int>(number(*t->get("lower"), "dipole lower"));
                d.transition.upper = static_cast<int>(number(*t->get("upper"), "dipole upper"));
                if (const auto* mu = t->get("mu")) d.mu = rabi_value(*mu, "dipole mu");
                p.physical.dipoles.push_back(d);
            }
        }
    }

    SweepSpec& sw = s.sweep;
    if (const auto* st = root.get_as<toml::table>("sweep")) {
        check_keys(*st, {"axis", "start", "stop", "points", "lock", "two_photon", "methods", "fields", "threads"},
                   "sweep.");
        if (const auto* n = st->get("axis")) {
            const auto a = parse_axis(text(*n, "sweep.axis"));
            if (!a) throw ValidationError("unknown axis '" + text(*n, "sweep.axis") + "'");
            sw.axis = *a;
        }
        if (sw.axis == Axis::Probe) sw.range = {0.0, 200.0, 401};
        if (auto v = opt_number(*st, "start", "sweep.")) sw.range.start = *v;
        if (auto v = opt_number(*st, "stop", "sweep.")) sw.range.stop = *v;
        if (auto v = opt_number(*st, "points", "sweep.")) sw.range.points = static_cast<int>(*v);
        if (auto v = opt_number(*st, "two_photon", "sweep.")) sw.two_photon = *v;
        if (auto v = opt_number(*st, "threads", "sweep.")) sw.threads = static_cast<int>(*v);
        if (const auto* n = st->get("lock")) {
            auto v = n->value<bool>();
            if (!v) throw ValidationError("'sweep.lock' must be a boolean");
            sw.lock_signal_to_coupling = *v;
        }
        if (const auto* arr = st->get_as<toml::array>("methods")) {
            sw.methods.clear();
            for (const auto& item : *arr) {
                const auto m = parse_method(text(item, "sweep.methods"));
                if (!m) throw ValidationError("unknown method '" + text(item, "sweep.methods") + "'");
                sw.methods.push_back(*m);
            }
        }
        if (const auto* arr = st->get_as<toml::array>("fields")) {
            for (const auto& item : *arr) {
                const auto f = parse_field_id(text(item, "sweep.fields"));
                if (!f) throw ValidationError("unknown field '" + text(item, "sweep.fields") + "'");
                sw.fields.push_back(*f);
            }
        }
    }

    auto& cmp = s.compare;
    cmp.policy = BackgroundPolicy::exclude(0.0, 4.0 * p.scheme.decay_rate(system == SystemId::System2 ? 3 : 4));
    if (const auto* ct = root.get_as<toml::table>("compare")) {
        check_keys(*ct, {"policy", "center", "width", "a", "b"}, "compare.");
        if (const auto* n = ct->get("policy")) {
            const auto k = parse_policy(text(*n, "compare.policy"));
            if (!k) throw ValidationError("unknown policy '" + text(*n, "compare.policy") + "'");
            cmp.policy.kind = *k;
        }
        if (auto v = opt_number(*ct, "center", "compare.")) cmp.policy.center = *v;
        if (auto v = opt_number(*ct, "width", "compare.")) cmp.policy.width = *v;
        for (auto [key, slot] : {std::pair{"a", &cmp.a}, std::pair{"b", &cmp.b}})
            if (const auto* n = ct->get(key)) {
                const auto m = parse_method(text(*n, std::string("compare.") + key));
                if (!m) throw ValidationError("unknown method '" + text(*n, "compare") + "'");
                *slot = *m;
            }
    }

    p.validate();
    sw.validate();
    return s;
}

} // namespace

RunSettings parse_settings(std::string_view toml_text, const std::vector<std::string>& overrides) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "config: " << e.description() << " at line " << e.source().begin.line;
        throw ValidationError(os.str());
    }
    for (const auto& o : overrides) merge(root, parse_override(o));
    return build(root);
}

RunSettings load_settings(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_settings(ss.str(), overrides);
}

RunSettings default_settings(const std::vector<std::string>& overrides) { return parse_settings("", overrides); }

std::string params_to_json(const SystemParams& p) {
    using nlohmann::json;
    json levels = json::array();
    for (const auto& l : p.scheme.levels)
        levels.push_back({{"label", l.label},
                          {"role", l.role == LevelRole::Ground ? "ground"
                                   : l.role == LevelRole::Excited ? "excited"
                                                                   : "intermediate"}});
    json decays = json::array();
    for (const auto& d : p.scheme.decays) decays.push_back({{"from", d.from}, {"to", d.to}, {"rate", d.rate}});
    json fields = json::array();
    for (const auto& f : p.fields)
        fields.push_back({{"id", to_string(f.id)},
                          {"rabi", {f.rabi.real(), f.rabi.imag()}},
                          {"detuning", f.detuning},
                          {"transition", {f.transition.lower, f.transition.upper}}});
    json j = {{"system", to_string(p.scheme.system)},
              {"case", to_string(p.case_kind)},
              {"scheme", {{"levels", levels}, {"splitting_mhz", p.scheme.splitting_mhz}, {"decays", decays}}},
              {"fields", fields},
              {"physical",
               {{"dimensionless", p.physical.dimensionless},
                {"density", p.physical.density},
                {"hbar", p.physical.hbar},
                {"eps0", p.physical.eps0}}}};
    return j.dump();
}

} // namespace xpm
