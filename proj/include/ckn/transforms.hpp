#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ckn/params.hpp"

namespace ckn {

enum class TransformKind { bar, hat, radial_flatten, change_2d };

inline std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::bar: return "BAR";
        case TransformKind::hat: return "HAT";
        case TransformKind::radial_flatten: return "RADIAL_FLATTEN";
        case TransformKind::change_2d: return "CHANGE_2D";
    }
    return "?";
}

struct TransformedParams {
    ParameterSet source;
    ParameterSet target;
    TransformKind kind;
    std::map<std::string, Rational> aux;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError("precondition failed: " + what);
}

inline void ensure(bool ok, const std::string& what) {
    if (!ok) throw std::logic_error("postcondition violated: " + what);
}

inline bool holds(const ParameterSet& P) { return check(P).verdict == Verdict::holds; }

}  // namespace detail

/// Reduction to p = 1. With 1/p' = 1 - 1/p:
///   1/sb = 1/s + 1/p', 1/qb = s/(q sb), ab = a s/((1-a) sb + a s),
///   g1b = g1 s/sb, g2b = g1 s/p' + g2, g3b = g3 s/sb, and the axial weights alike.
inline TransformedParams bar_transform(const ParameterSet& P) {
    using detail::recip;
    P.validate();
    detail::require(check_standing(P).entries.front().satisfied, "s, q > 0, p >= 1, 0 <= a <= 1");

    const Rational inv_pp = 1 - recip(P.p);  // 1/p'
    const Rational inv_sb = recip(P.s) + inv_pp;
    const Rational sb = recip(inv_sb);
    const Rational ratio = P.s / sb;  // s/sb = s * (1/sb)

    ParameterSet T = P;
    T.s = sb;
    T.p = Rational(1);
    T.q = P.q * sb / P.s;
    T.a = P.a * P.s / ((1 - P.a) * sb + P.a * P.s);
    T.gamma1 = P.gamma1 * ratio;
    T.gamma2 = P.gamma1 * P.s * inv_pp + P.gamma2;
    T.gamma3 = P.gamma3 * ratio;
    T.alpha = P.alpha * ratio;
    T.mu = P.alpha * P.s * inv_pp + P.mu;
    T.beta = P.beta * ratio;

    detail::ensure(T.s.sign() > 0 && T.s <= P.s, "0 < sb <= s");
    if (detail::holds(P)) detail::ensure(detail::holds(T), "bar image of an admissible tuple is admissible");
    detail::ensure((critical_gap(P).sign() >= 0) == (critical_gap(T).sign() >= 0), "criticality preserved");

    TransformedParams out{P, T, TransformKind::bar, {}};
    out.aux.emplace("inv_p_prime", inv_pp);
    return out;
}

/// Slice map to dimension n-1 for p = 1 and vanishing radial weights.
inline TransformedParams hat_transform(const ParameterSet& P) {
    using detail::recip;
    using detail::require;
    P.validate();
    require(P.mode == Mode::anisotropic, "anisotropic tuple");
    require(P.gamma1.is_zero() && P.gamma2.is_zero() && P.gamma3.is_zero(), "gamma1 = gamma2 = gamma3 = 0");
    require(P.p == 1, "p = 1");
    require(P.a.sign() > 0, "a > 0");
    const Rational ab = recip(P.s) - (1 - P.a) / P.q;
    require(ab < 1, "1/s - (1-a)/q < 1");
    require(detail::holds(P), "tuple satisfies all conditions A1-A7");
    require(critical_gap(P).sign() >= 0, "subcritical regime 1/s <= a + (1-a)/q");

    const Rational b = ab / P.a;
    const Rational lambda = P.a * (1 - b) / (1 - ab);
    const int m = P.n - 1;

    ParameterSet T;
    T.n = m;
    T.mode = Mode::isotropic;
    T.s = P.s;
    T.p = Rational(1);
    T.q = recip(lambda + (1 - lambda) / P.q);
    T.a = ab;
    T.gamma1 = P.alpha;
    T.gamma2 = P.mu;
    T.gamma3 = lambda * P.mu + (1 - lambda) * P.beta;

    using detail::ensure;
    ensure(Rational(m, P.n) <= b && b <= 1, "(n-1)/n <= b <= 1");
    ensure(lambda.sign() >= 0 && lambda <= 1, "0 <= lambda <= 1");
    ensure(T.a.sign() > 0 && T.a < 1, "0 < a_hat < 1");
    auto rep = check_isotropic(T);
    ensure(rep.satisfied(ConditionId::B1) && rep.satisfied(ConditionId::B2) && rep.satisfied(ConditionId::B3) &&
               rep.satisfied(ConditionId::B4),
           "hat image satisfies the standing and balance conditions in dimension n-1");
    ensure(critical_gap(T).sign() >= 0, "hat image is subcritical");

    TransformedParams out{P, T, TransformKind::hat, {}};
    out.aux.emplace("b", b);
    out.aux.emplace("lambda", lambda);
    return out;
}

/// Radial change of variables y = |x|^(g1 s/n) x, which removes the weight on the left.
inline TransformedParams radial_flatten(const ParameterSet& P) {
    P.validate();
    detail::require(P.mode == Mode::isotropic, "isotropic tuple");
    const Rational n(P.n);
    const Rational denom = P.gamma1 * P.s + n;
    detail::require(denom.sign() > 0, "gamma1 s + n > 0");

    ParameterSet T = P;
    T.gamma1 = Rational(0);
    T.gamma2 = (P.gamma2 * n + P.gamma1 * P.s * (1 - n)) / denom;
    T.gamma3 = (P.gamma3 * P.q - P.gamma1 * P.s) * n / (denom * P.q);

    // a(1 + (g2-1)/n) + (1-a)(1/q + g3/n) picks up exactly the factor n/(g1 s + n).
    const Rational scale = n / denom;
    auto balance_p1 = [&](const ParameterSet& X) {
        return X.a * (1 + (X.gamma2 - 1) / n) + (1 - X.a) * (detail::recip(X.q) + X.gamma3 / n);
    };
    detail::ensure(balance_p1(T) == scale * balance_p1(P), "flattened balance scales by n/(g1 s + n)");
    if (P.p == 1 && Balance(P).lhs == Balance(P).rhs) {
        detail::ensure(balance_p1(T) == detail::recip(P.s), "flattened balance equals 1/s");
    }

    TransformedParams out{P, T, TransformKind::radial_flatten, {}};
    out.aux.emplace("scale", scale);
    return out;
}

/// Exponent of the two-dimensional change of variables y1 = x1^(2 alpha + 1).
inline Rational anisotropic_2d_change(const Rational& alpha) {
    detail::require(alpha > Rational(-1, 2), "alpha > -1/2");
    Rational beta = alpha / (2 * alpha + 1);
    detail::ensure(beta < Rational(1, 2), "beta < 1/2");
    return beta;
}

struct SplitPart {
    Rational a, alpha, s, gamma1;
    ParameterSet tuple;
};

struct SplitResult {
    SplitPart first;
    SplitPart second;
    Rational step;
};

namespace detail {

struct SplitConstraints {
    const ParameterSet& P;

    Rational G(const Rational& t) const {
        return Rational(P.n - 1) * (recip(P.s) - t / P.p - (1 - t) / P.q) + P.alpha;
    }
    Rational F1(const Rational& t) const { return -Rational(P.n - 1) * (t / P.p + (1 - t) / P.q); }
    Rational F2(const Rational& t) const { return t * (P.mu - 1) + (1 - t) * P.beta; }

    SplitPart part(const Rational& t) const {
        Rational lo = max(F1(t), F2(t));
        Rational alpha = (lo + G(t)) / 2;
        Rational s = recip(t / P.p + (1 - t) / P.q);
        Rational g1 = t * (P.gamma2 + P.mu - 1) + (1 - t) * (P.gamma3 + P.beta) - alpha;
        ParameterSet T = P;
        T.a = t;
        T.alpha = alpha;
        T.s = s;
        T.gamma1 = g1;
        return SplitPart{t, alpha, s, g1, T};
    }

    bool valid(const SplitPart& lower, const SplitPart& upper) const {
        Rational n(P.n), m(P.n - 1);
        auto radial = [&](const SplitPart& x) { return recip(x.s) + (x.gamma1 + x.alpha) / n; };
        auto axial = [&](const SplitPart& x) { return recip(x.s) + x.alpha / m; };
        const Rational mid = radial(SplitPart{P.a, P.alpha, P.s, P.gamma1, P});
        for (const auto* x : {&lower, &upper}) {
            if (!(x->a.sign() > 0 && x->a < 1)) return false;
            if (!(recip(x->s) < recip(P.s))) return false;
            if (!(axial(*x) < axial(SplitPart{P.a, P.alpha, P.s, P.gamma1, P}))) return false;
            if (!(max(F1(x->a), F2(x->a)) < x->alpha && x->alpha < G(x->a))) return false;
            if (!holds(x->tuple)) return false;
        }
        return radial(lower) < mid && mid < radial(upper);
    }
};

}  // namespace detail

/// Splits a supercritical admissible tuple into two critical ones on either side of a.
inline SplitResult split_parameters(const ParameterSet& P) {
    using detail::require;
    P.validate();
    require(P.mode == Mode::anisotropic, "anisotropic tuple");
    require(detail::holds(P), "tuple satisfies all conditions A1-A7");
    require(critical_gap(P).sign() < 0, "supercritical regime 1/s > a/p + (1-a)/q");
    Balance bal(P);
    const Rational D = bal.grad_term - bal.q_term;
    require(!D.is_zero(), "1/p + (g2+mu-1)/n != 1/q + (g3+beta)/n");
    detail::SplitConstraints c{P};
    require(c.F2(P.a) < c.G(P.a), "F2(a) < G(a), strict inequality in A6_3");
    require(c.F1(P.a) < c.G(P.a), "F1(a) < G(a)");

    // D > 0 makes the radial balance increasing in a, so the first part sits below a.
    const int dir = D.sign() > 0 ? -1 : 1;
    Rational h = min(P.a, 1 - P.a) / 4;
    for (int iter = 0; iter < 512; ++iter, h /= 2) {
        auto first = c.part(P.a + Rational(dir) * h);
        auto second = c.part(P.a - Rational(dir) * h);
        // In both orientations the first part has the smaller radial balance.
        bool ok = c.valid(first, second);
        if (ok) return SplitResult{std::move(first), std::move(second), h};
    }
    throw std::logic_error("split_parameters: no admissible step found");
}

}  // namespace ckn
