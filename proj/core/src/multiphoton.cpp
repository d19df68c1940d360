#include "xpm/multiphoton.hpp"

#include <algorithm>
#include <sstream>

#include "xpm/errors.hpp"

namespace xpm {

MultiphotonTerm make_term(std::string label, cplx chi, const std::vector<Factor>& factors,
                          const std::vector<FieldId>& observed, const SystemParams& p, cplx phase, int observed_sign) {
    MultiphotonTerm t;
    t.label = std::move(label);
    t.chi = chi;
    t.phase = phase;
    t.signature.reserve(factors.size() + observed.size());
    for (const auto& f : factors) t.signature.push_back({f.field, f.conjugated ? +1 : -1, false});
    for (auto f : observed) t.signature.push_back({f, observed_sign, true});
    t.order = static_cast<int>(t.signature.size()) - 1;
    t.value = chi * phase * monomial(t.signature, p);
    return t;
}

cplx monomial(const Signature& sig, const SystemParams& p) {
    cplx m{1.0, 0.0};
    for (const auto& ph : sig) {
        if (ph.observed) continue;
        const cplx omega = p.rabi(ph.field);
        m *= ph.sign > 0 ? std::conj(omega) : omega;
    }
    return m;
}

int photon_count(const Signature& sig, FieldId field) {
    return static_cast<int>(
        std::count_if(sig.begin(), sig.end(), [&](const Photon& ph) { return !ph.observed && ph.field == field; }));
}

std::pair<int, int> scaling_exponents(const Signature& sig, FieldId field) {
    int plain = 0, conj = 0;
    for (const auto& ph : sig) {
        if (ph.observed || ph.field != field) continue;
        (ph.sign > 0 ? conj : plain)++;
    }
    return {plain, conj};
}

namespace {

std::vector<std::pair<int, int>> canonical(const Signature& s, int flip) {
    std::vector<std::pair<int, int>> v;
    v.reserve(s.size());
    for (const auto& ph : s) v.emplace_back(static_cast<int>(ph.field), ph.sign * flip);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

bool same_process(const Signature& a, const Signature& b, bool allow_flip) {
    if (a.size() != b.size()) return false;
    const auto ca = canonical(a, 1);
    if (ca == canonical(b, 1)) return true;
    return allow_flip && ca == canonical(b, -1);
}

std::string to_string(const Signature& sig) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (i) os << ',';
        os << (sig[i].sign > 0 ? '+' : '-') << to_string(sig[i].field);
        if (sig[i].observed) os << '*';
    }
    os << ')';
    return os.str();
}

void CoherenceResult::sum_terms() {
    total = {};
    for (const auto& t : terms) total += t.value;
}

CoherenceResult CoherenceResult::conjugate() const {
    CoherenceResult r;
    r.bra = ket;
    r.ket = bra;
    r.branch_id = branch_id;
    r.total = std::conj(total);
    r.terms = terms;
    for (auto& t : r.terms) {
        t.value = std::conj(t.value);
        t.chi = std::conj(t.chi);
        t.phase = std::conj(t.phase);
        for (auto& ph : t.signature) ph.sign = -ph.sign;
    }
    return r;
}

const MultiphotonTerm& CoherenceResult::term(std::string_view label) const {
    for (const auto& t : terms)
        if (t.label == label) return t;
    throw Error("no term labeled '" + std::string(label) + "'");
}

} // namespace xpm
