#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/rational.hpp"

namespace ckn {

enum class Mode { isotropic, anisotropic };

/// Exponent tuple of the weighted interpolation inequality
///   || |x|^g1 |x'|^alpha u ||_s <= C || |x|^g2 |x'|^mu grad u ||_p^a || |x|^g3 |x'|^beta u ||_q^(1-a).
struct ParameterSet {
    int n = 2;
    Rational s{1}, p{1}, q{1}, a{0};
    Rational gamma1{0}, gamma2{0}, gamma3{0};
    Rational alpha{0}, mu{0}, beta{0};
    Mode mode = Mode::anisotropic;

    void validate() const {
        if (n < 1) throw InputError("dimension n must be at least 1");
        if (mode == Mode::anisotropic && n < 2) throw InputError("anisotropic tuples need n >= 2");
        if (mode == Mode::isotropic && !(alpha.is_zero() && mu.is_zero() && beta.is_zero())) {
            throw InputError("isotropic tuples must have alpha = mu = beta = 0");
        }
        if (s.is_zero() || p.is_zero() || q.is_zero()) {
            throw InputError("exponents s, p, q must be nonzero");
        }
    }

    bool operator==(const ParameterSet&) const = default;
};

enum class ConditionId { A1, A2, A3, A5, A6_1, A6_2, A6_3, A7, B1, B2, B3, B4, B5 };

inline std::string_view to_string(ConditionId id) {
    static constexpr std::array<std::string_view, 13> names{
        "A1", "A2", "A3", "A5", "A6_1", "A6_2", "A6_3", "A7", "B1", "B2", "B3", "B4", "B5"};
    return names[static_cast<std::size_t>(id)];
}

inline ConditionId condition_from_string(std::string_view text) {
    for (int i = 0; i <= static_cast<int>(ConditionId::B5); ++i) {
        auto id = static_cast<ConditionId>(i);
        if (to_string(id) == text) return id;
    }
    throw InputError("unknown condition id '" + std::string(text) + "'");
}

/// How the slack is compared with zero. `vacuous` marks a guarded condition
/// whose guard is inactive.
enum class Relation { positive, nonnegative, zero, vacuous };

inline std::string_view to_string(Relation r) {
    switch (r) {
        case Relation::positive: return ">0";
        case Relation::nonnegative: return ">=0";
        case Relation::zero: return "=0";
        case Relation::vacuous: return "vacuous";
    }
    return "?";
}

inline bool meets(const Rational& slack, Relation r) {
    switch (r) {
        case Relation::positive: return slack.sign() > 0;
        case Relation::nonnegative: return slack.sign() >= 0;
        case Relation::zero: return slack.is_zero();
        case Relation::vacuous: return true;
    }
    return false;
}

struct ConditionEntry {
    ConditionId id;
    bool satisfied;
    Rational slack;
    Relation relation;
};

enum class Verdict { holds, fails, invalid_standing };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "HOLDS";
        case Verdict::fails: return "FAILS";
        case Verdict::invalid_standing: return "INVALID_STANDING";
    }
    return "?";
}

struct ConditionReport {
    std::vector<ConditionEntry> entries;
    Verdict verdict = Verdict::holds;

    const ConditionEntry& at(ConditionId id) const {
        for (const auto& e : entries) {
            if (e.id == id) return e;
        }
        throw InputError("condition " + std::string(to_string(id)) + " not in report");
    }
    bool has(ConditionId id) const {
        return std::any_of(entries.begin(), entries.end(), [id](const auto& e) { return e.id == id; });
    }
    bool satisfied(ConditionId id) const { return at(id).satisfied; }

    std::vector<ConditionId> failed() const {
        std::vector<ConditionId> out;
        for (const auto& e : entries) {
            if (!e.satisfied) out.push_back(e.id);
        }
        return out;
    }
};

enum class Regime { subcritical, supercritical };

inline std::string_view to_string(Regime r) {
    return r == Regime::subcritical ? "SUBCRITICAL" : "SUPERCRITICAL";
}

namespace detail {

struct Component {
    Rational slack;
    Relation relation;
};

// A compound condition reports its binding component: the smallest slack,
// preferring strict components on ties so that failure is preserved.
inline ConditionEntry combine(ConditionId id, const std::vector<Component>& parts) {
    const Component* binding = &parts.front();
    bool ok = true;
    for (const auto& c : parts) {
        ok = ok && meets(c.slack, c.relation);
        if (c.slack < binding->slack ||
            (c.slack == binding->slack && c.relation == Relation::positive)) {
            binding = &c;
        }
    }
    return ConditionEntry{id, ok, binding->slack, binding->relation};
}

inline ConditionEntry single(ConditionId id, Rational slack, Relation rel) {
    bool ok = meets(slack, rel);
    return ConditionEntry{id, ok, std::move(slack), rel};
}

inline Rational recip(const Rational& r) { return Rational(1) / r; }

}  // namespace detail

/// Common sub-expressions of the conditions, evaluated once.
struct Balance {
    Rational lhs;        // 1/s + (g1+alpha)/n
    Rational grad_term;  // 1/p + (g2+mu-1)/n
    Rational q_term;     // 1/q + (g3+beta)/n
    Rational rhs;        // a*grad_term + (1-a)*q_term

    explicit Balance(const ParameterSet& P) {
        using detail::recip;
        Rational n(P.n);
        lhs = recip(P.s) + (P.gamma1 + P.alpha) / n;
        grad_term = recip(P.p) + (P.gamma2 + P.mu - 1) / n;
        q_term = recip(P.q) + (P.gamma3 + P.beta) / n;
        rhs = P.a * grad_term + (1 - P.a) * q_term;
    }
};

/// Axial balance 1/s + alpha/(n-1) against a(1/p + (mu-1)/(n-1)) + (1-a)(1/q + beta/(n-1)).
struct AxialBalance {
    Rational lhs, grad_term, q_term, rhs;

    explicit AxialBalance(const ParameterSet& P) {
        using detail::recip;
        Rational m(P.n - 1);
        lhs = recip(P.s) + P.alpha / m;
        grad_term = recip(P.p) + (P.mu - 1) / m;
        q_term = recip(P.q) + P.beta / m;
        rhs = P.a * grad_term + (1 - P.a) * q_term;
    }
};

/// a/p + (1-a)/q - 1/s: nonnegative exactly in the subcritical regime.
inline Rational critical_gap(const ParameterSet& P) {
    using detail::recip;
    return P.a * recip(P.p) + (1 - P.a) * recip(P.q) - recip(P.s);
}

namespace detail {

inline ConditionEntry basic_ranges(ConditionId id, const ParameterSet& P) {
    return combine(id, {{P.s, Relation::positive},
                        {P.q, Relation::positive},
                        {P.p - 1, Relation::nonnegative},
                        {P.a, Relation::nonnegative},
                        {1 - P.a, Relation::nonnegative}});
}

inline ConditionEntry radial_finiteness(ConditionId id, const ParameterSet& P) {
    Rational n(P.n);
    return combine(id, {{recip(P.s) + (P.alpha + P.gamma1) / n, Relation::positive},
                        {recip(P.p) + (P.mu + P.gamma2) / n, Relation::positive},
                        {recip(P.q) + (P.beta + P.gamma3) / n, Relation::positive}});
}

inline Verdict verdict_of(const std::vector<ConditionEntry>& entries, std::initializer_list<ConditionId> standing) {
    bool standing_ok = true;
    bool all_ok = true;
    for (const auto& e : entries) {
        all_ok = all_ok && e.satisfied;
        if (std::find(standing.begin(), standing.end(), e.id) != standing.end()) {
            standing_ok = standing_ok && e.satisfied;
        }
    }
    if (!standing_ok) return Verdict::invalid_standing;
    return all_ok ? Verdict::holds : Verdict::fails;
}

}  // namespace detail

/// Standing assumptions only: A1-A3 (anisotropic) or B1-B2 (isotropic).
inline ConditionReport check_standing(const ParameterSet& P) {
    using namespace detail;
    P.validate();
    ConditionReport report;
    if (P.mode == Mode::anisotropic) {
        Rational m(P.n - 1);
        report.entries.push_back(basic_ranges(ConditionId::A1, P));
        report.entries.push_back(combine(ConditionId::A2, {{recip(P.s) + P.alpha / m, Relation::positive},
                                                           {recip(P.p) + P.mu / m, Relation::positive},
                                                           {recip(P.q) + P.beta / m, Relation::positive}}));
        report.entries.push_back(radial_finiteness(ConditionId::A3, P));
        report.verdict = verdict_of(report.entries, {ConditionId::A1, ConditionId::A2, ConditionId::A3});
    } else {
        report.entries.push_back(basic_ranges(ConditionId::B1, P));
        report.entries.push_back(radial_finiteness(ConditionId::B2, P));
        report.verdict = verdict_of(report.entries, {ConditionId::B1, ConditionId::B2});
    }
    return report;
}

/// Guard of A7: a = 0, a = 1, the triple equality, or equality in A6_3.
inline bool a7_guard(const ParameterSet& P) {
    Balance b(P);
    AxialBalance ax(P);
    return P.a.is_zero() || P.a == 1 || (b.grad_term == b.q_term && b.q_term == b.lhs) || ax.lhs == ax.rhs;
}

/// Guard of B5: a = 0, a = 1, or the triple equality.
inline bool b5_guard(const ParameterSet& P) {
    Balance b(P);
    return P.a.is_zero() || P.a == 1 || (b.grad_term == b.q_term && b.q_term == b.lhs);
}

/// Full decision procedure for anisotropic tuples (n >= 2).
inline ConditionReport check_anisotropic(const ParameterSet& P) {
    using namespace detail;
    if (P.mode != Mode::anisotropic) throw InputError("check_anisotropic needs an anisotropic tuple");
    ConditionReport report = check_standing(P);
    Balance b(P);
    AxialBalance ax(P);
    report.entries.push_back(single(ConditionId::A5, b.lhs - b.rhs, Relation::zero));
    report.entries.push_back(single(ConditionId::A6_1, P.a * P.gamma2 + (1 - P.a) * P.gamma3 - P.gamma1,
                                    Relation::nonnegative));
    report.entries.push_back(single(ConditionId::A6_2,
                                    P.a * (P.gamma2 + P.mu) + (1 - P.a) * (P.gamma3 + P.beta) -
                                        (P.gamma1 + P.alpha),
                                    Relation::nonnegative));
    report.entries.push_back(single(ConditionId::A6_3, ax.lhs - ax.rhs, Relation::nonnegative));
    report.entries.push_back(
        single(ConditionId::A7, critical_gap(P), a7_guard(P) ? Relation::nonnegative : Relation::vacuous));
    report.verdict = verdict_of(report.entries, {ConditionId::A1, ConditionId::A2, ConditionId::A3});
    return report;
}

/// Decision procedure for isotropic tuples (n >= 1).
inline ConditionReport check_isotropic(const ParameterSet& P) {
    using namespace detail;
    if (P.mode != Mode::isotropic) throw InputError("check_isotropic needs an isotropic tuple");
    ConditionReport report = check_standing(P);
    Balance b(P);
    report.entries.push_back(single(ConditionId::B3, b.lhs - b.rhs, Relation::zero));
    report.entries.push_back(
        single(ConditionId::B4, P.a * P.gamma2 + (1 - P.a) * P.gamma3 - P.gamma1, Relation::nonnegative));
    report.entries.push_back(
        single(ConditionId::B5, critical_gap(P), b5_guard(P) ? Relation::nonnegative : Relation::vacuous));
    report.verdict = verdict_of(report.entries, {ConditionId::B1, ConditionId::B2});
    return report;
}

/// Dispatches on the tuple's mode.
inline ConditionReport check(const ParameterSet& P) {
    return P.mode == Mode::anisotropic ? check_anisotropic(P) : check_isotropic(P);
}

/// Folds the axial weights into the radial ones.
inline ParameterSet reduce_to_isotropic(const ParameterSet& P) {
    if (P.mode != Mode::anisotropic) throw InputError("reduce_to_isotropic needs an anisotropic tuple");
    ParameterSet out = P;
    out.gamma1 = P.gamma1 + P.alpha;
    out.gamma2 = P.gamma2 + P.mu;
    out.gamma3 = P.gamma3 + P.beta;
    out.alpha = out.mu = out.beta = Rational(0);
    out.mode = Mode::isotropic;
    return out;
}

inline Regime classify_regime(const ParameterSet& P) {
    if (check_standing(P).verdict == Verdict::invalid_standing) {
        throw DomainError("classify_regime requires the standing assumptions");
    }
    return critical_gap(P).sign() >= 0 ? Regime::subcritical : Regime::supercritical;
}

}  // namespace ckn
