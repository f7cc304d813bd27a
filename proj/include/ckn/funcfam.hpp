#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/params.hpp"

namespace ckn {

// ==== one-dimensional profiles ====

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0,1].
inline double smoothstep(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (10 + t * (-15 + 6 * t));
}

inline double smoothstep_slope(double t) {
    if (t <= 0 || t >= 1) return 0;
    double u = t * (1 - t);
    return 30 * u * u;
}

/// The fixed cutoff g: 0 outside (1,4), 1 on [2,3], smoothstep ramps between.
struct Cutoff {
    static constexpr double max_slope = 15.0 / 8.0;

    static double value(double t) {
        if (t <= 1 || t >= 4) return 0;
        if (t < 2) return smoothstep(t - 1);
        if (t <= 3) return 1;
        return smoothstep(4 - t);
    }
    static double slope(double t) {
        if (t <= 1 || t >= 4) return 0;
        if (t < 2) return smoothstep_slope(t - 1);
        if (t <= 3) return 0;
        return -smoothstep_slope(4 - t);
    }
    static std::vector<double> breakpoints() { return {2.0, 3.0}; }
};

/// Radial plateau: 1 on [0,1], smoothstep down to 0 on [1,2].
struct Plateau {
    static double value(double t) { return t <= 1 ? 1.0 : (t >= 2 ? 0.0 : smoothstep(2 - t)); }
    static double slope(double t) { return (t <= 1 || t >= 2) ? 0.0 : -smoothstep_slope(2 - t); }
};

/// Smoothstep bump on (lo, hi): up on the first half, down on the second, peak 1.
struct Bump {
    double lo, hi;

    double value(double t) const {
        double tau = (t - lo) / (hi - lo);
        if (tau <= 0 || tau >= 1) return 0;
        return tau <= 0.5 ? smoothstep(2 * tau) : smoothstep(2 - 2 * tau);
    }
    double slope(double t) const {
        double tau = (t - lo) / (hi - lo);
        if (tau <= 0 || tau >= 1) return 0;
        double d = tau <= 0.5 ? 2 * smoothstep_slope(2 * tau) : -2 * smoothstep_slope(2 - 2 * tau);
        return d / (hi - lo);
    }
    double mid() const { return 0.5 * (lo + hi); }
};

/// Power profile r^k on (0,1], 1 on [1,2], (4-r)/2 on [2,4].
struct PowerProfile {
    double k;

    double value(double r) const {
        if (r <= 0 || r >= 4) return 0;
        if (r < 1) return std::pow(r, k);
        if (r <= 2) return 1;
        return 0.5 * (4 - r);
    }
    double slope(double r) const {
        if (r <= 0 || r >= 4) return 0;
        if (r < 1) return k * std::pow(r, k - 1);
        if (r <= 2) return 0;
        return -0.5;
    }
};

// ==== chart coordinates ====

/// Integration charts. Polar: (theta, r) with theta the angle to the x_n axis.
/// Cylindrical: (z = x_n, rho = |x'|). Box: (x_1, x_n, sigma) with sigma the
/// length of the middle coordinates, used for bumps centred off the axis.
enum class Chart { polar, cylindrical, box };

/// A coordinate interval with interior kinks.
struct Span1 {
    double lo = 0, hi = 0;
    std::vector<double> kinks;
};

/// Product region in chart coordinates. `outer` is theta / z / x_1, `inner`
/// is r / rho / x_n, `third` is sigma (box chart in n >= 3 only).
struct Region {
    Chart chart;
    Span1 outer;
    Span1 inner;
    Span1 third;
};

/// Value and gradient length at a chart point.
struct Sample {
    double value;
    double grad;
};

/// Value and chart partial derivatives (polar: d/dr, d/dtheta; cylindrical: d/drho, d/dz).
struct Partials {
    double value = 0;
    double d_inner = 0;
    double d_outer = 0;
};

enum class FamilyKind {
    scaled_bump,
    translated_bump_r,
    translated_bump_s,
    cone_collapse,
    radial_log,
    cyl_log,
    dyadic_sum,
    cone_boundary_bump
};

inline std::string_view to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::scaled_bump: return "SCALED_BUMP";
        case FamilyKind::translated_bump_r: return "TRANSLATED_BUMP_R";
        case FamilyKind::translated_bump_s: return "TRANSLATED_BUMP_S";
        case FamilyKind::cone_collapse: return "CONE_COLLAPSE";
        case FamilyKind::radial_log: return "RADIAL_LOG";
        case FamilyKind::cyl_log: return "CYL_LOG";
        case FamilyKind::dyadic_sum: return "DYADIC_SUM";
        case FamilyKind::cone_boundary_bump: return "CONE_BOUNDARY_BUMP";
    }
    return "?";
}

inline FamilyKind family_kind_from_string(std::string_view s) {
    for (int i = 0; i <= static_cast<int>(FamilyKind::cone_boundary_bump); ++i) {
        auto k = static_cast<FamilyKind>(i);
        if (to_string(k) == s) return k;
    }
    throw InputError("unknown family kind '" + std::string(s) + "'");
}

/// True for families whose parameter is sent to 0 in the necessity argument.
inline bool limit_at_zero(FamilyKind k) {
    return k == FamilyKind::cone_collapse || k == FamilyKind::radial_log || k == FamilyKind::cyl_log;
}

// ==== concrete profiles ====

namespace family {

struct ScaledBump {
    double lambda;

    Partials polar(double, double r) const {
        return {Plateau::value(lambda * r), lambda * Plateau::slope(lambda * r), 0};
    }
    std::vector<Region> regions() const {
        return {{Chart::polar, {0, std::numbers::pi, {}}, {0, 2 / lambda, {1 / lambda}}, {}}};
    }
};

/// (1 - |x - x0|^2)^4 on the unit ball around x0 = (S, 0, ..., 0, R).
struct TranslatedBump {
    double S, R;

    static double profile(double t2) {
        if (t2 >= 1) return 0;
        double w = 1 - t2;
        return w * w * w * w;
    }
    // |grad| = 8 (1-t^2)^3 t
    static double profile_grad(double t2) {
        if (t2 >= 1) return 0;
        double w = 1 - t2;
        return 8 * w * w * w * std::sqrt(t2);
    }
    std::vector<Region> regions(int n) const {
        Span1 third = n >= 3 ? Span1{0, 1, {}} : Span1{};
        if (n == 1) return {{Chart::box, {0, 0, {}}, {R - 1, R + 1, {R}}, third}};
        return {{Chart::box, {S - 1, S + 1, {S}}, {R - 1, R + 1, {R}}, third}};
    }
};

/// f1(|x'|) g(x_n) with f1 = eps on [0,eps], 2 eps - rho on [eps, 2 eps].
struct ConeCollapse {
    double eps;

    Partials cylindrical(double z, double rho) const {
        double f = rho <= eps ? eps : (rho < 2 * eps ? 2 * eps - rho : 0);
        double df = (rho > eps && rho < 2 * eps) ? -1 : 0;
        return {f * Cutoff::value(z), df * Cutoff::value(z), f * Cutoff::slope(z)};
    }
    std::vector<Region> regions() const {
        return {{Chart::cylindrical, {1, 4, Cutoff::breakpoints()}, {0, 2 * eps, {eps}}, {}}};
    }
};

/// f2(|x|) times g(|x_n|/|x'|) (angular factor omitted in the isotropic version).
struct RadialLog {
    PowerProfile radial;
    bool angular;

    static double cot_abs(double theta) { return std::abs(std::cos(theta) / std::sin(theta)); }

    Partials polar(double theta, double r) const {
        double G = 1, dG = 0;
        if (angular) {
            double s = std::sin(theta);
            if (s <= 0) return {};
            double c = cot_abs(theta);
            G = Cutoff::value(c);
            // d|cot|/dtheta = -csc^2 * sign(cot)
            double sign = std::cos(theta) >= 0 ? 1.0 : -1.0;
            dG = Cutoff::slope(c) * (-1.0 / (s * s)) * sign;
        }
        double f = radial.value(r);
        return {f * G, radial.slope(r) * G, f * dG};
    }
    std::vector<Region> regions() const {
        Span1 rspan{0, 4, {1, 2}};
        if (!angular) return {{Chart::polar, {0, std::numbers::pi, {}}, rspan, {}}};
        // |cot theta| in (1,4) on both sides of the equator, kinks where |cot| = 2, 3
        auto at = [](double c) { return std::atan(1 / c); };
        const double pi = std::numbers::pi;
        return {{Chart::polar, {at(4), at(1), {at(3), at(2)}}, rspan, {}},
                {Chart::polar, {pi - at(1), pi - at(4), {pi - at(2), pi - at(3)}}, rspan, {}}};
    }
};

/// f3(|x'|) g(x_n).
struct CylLog {
    PowerProfile axial;

    Partials cylindrical(double z, double rho) const {
        double f = axial.value(rho);
        return {f * Cutoff::value(z), axial.slope(rho) * Cutoff::value(z), f * Cutoff::slope(z)};
    }
    std::vector<Region> regions() const {
        return {{Chart::cylindrical, {1, 4, Cutoff::breakpoints()}, {0, 4, {1, 2}}, {}}};
    }
};

/// Sum of rescaled copies of a bump living on {1 < r < 2, delta < |theta'| < width*delta}
/// in the upper half space, with |theta'| = sin(theta).
struct DyadicSum {
    int m;
    double delta;
    double width;
    double kappa;
    double amplitude_exp;  // b1 kappa + d1

    Bump radial_bump(int j) const {
        double lo = std::exp2(-kappa * j);
        return {lo, 2 * lo};
    }
    Bump angular_bump(int j) const {
        double lo = std::exp2(-j) * delta;
        return {lo, width * lo};
    }

    Partials component(int j, double theta, double r) const {
        double amp = std::exp2(amplitude_exp * j);
        Bump br = radial_bump(j), bs = angular_bump(j);
        double sg = std::sin(theta);
        double Br = br.value(r), Bs = bs.value(sg);
        return {amp * Br * Bs, amp * br.slope(r) * Bs, amp * Br * bs.slope(sg) * std::cos(theta)};
    }

    Partials polar(double theta, double r) const {
        if (theta >= std::numbers::pi / 2) return {};
        Partials acc;
        for (int j = 1; j <= m; ++j) {
            auto c = component(j, theta, r);
            acc.value += c.value;
            acc.d_inner += c.d_inner;
            acc.d_outer += c.d_outer;
        }
        return acc;
    }

    std::vector<Region> regions() const {
        std::vector<Region> out;
        for (int j = 1; j <= m; ++j) {
            Bump br = radial_bump(j), bs = angular_bump(j);
            double t_lo = std::asin(bs.lo), t_hi = std::asin(bs.hi);
            out.push_back({Chart::polar, {t_lo, t_hi, {std::asin(bs.mid())}}, {br.lo, br.hi, {br.mid()}}, {}});
        }
        return out;
    }
};

/// g(lambda |x|) (1 - (sin(theta)/eps)^2)^2 on the cone sin(theta) < eps, both nappes.
struct ConeBoundaryBump {
    double cone_eps;
    double lambda;

    Partials polar(double theta, double r) const {
        double t = std::sin(theta) / cone_eps;
        if (t >= 1) return {};
        double w = 1 - t * t;
        double psi = w * w;
        double dpsi = -4 * w * t * std::cos(theta) / cone_eps;
        double gr = Cutoff::value(lambda * r);
        return {gr * psi, lambda * Cutoff::slope(lambda * r) * psi, gr * dpsi};
    }
    std::vector<Region> regions() const {
        const double pi = std::numbers::pi;
        Span1 rspan{1 / lambda, 4 / lambda, {2 / lambda, 3 / lambda}};
        if (cone_eps >= 1) return {{Chart::polar, {0, pi, {pi / 2}}, rspan, {}}};
        double edge = std::asin(cone_eps);
        return {{Chart::polar, {0, edge, {}}, rspan, {}}, {Chart::polar, {pi - edge, pi, {}}, rspan, {}}};
    }
};

}  // namespace family

/// Inputs for the Subcase-2.2 construction.
struct DyadicOptions {
    double delta = 0.125;
    double width = 2.0;
    std::optional<double> kappa_override;
};

/// A member of one of the analytic test-function families.
class FamilyInstance {
public:
    using Profile = std::variant<family::ScaledBump, family::TranslatedBump, family::ConeCollapse, family::RadialLog,
                                 family::CylLog, family::DyadicSum, family::ConeBoundaryBump>;

    FamilyInstance(FamilyKind kind, int n, double parameter, Profile profile, double amplitude = 1.0)
        : kind_(kind), n_(n), parameter_(parameter), amplitude_(amplitude), profile_(std::move(profile)) {
        if (n_ < 1) throw InputError("family dimension must be at least 1");
    }

    FamilyKind kind() const { return kind_; }
    int n() const { return n_; }
    double parameter() const { return parameter_; }
    double amplitude() const { return amplitude_; }
    const Profile& profile() const { return profile_; }

    /// The same function multiplied by c.
    FamilyInstance scaled(double c) const { return FamilyInstance(kind_, n_, parameter_, profile_, amplitude_ * c); }

    std::vector<Region> regions() const {
        return std::visit(
            [this](const auto& f) -> std::vector<Region> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::TranslatedBump>) {
                    return f.regions(n_);
                } else {
                    return f.regions();
                }
            },
            profile_);
    }

    /// Value and gradient length at chart coordinates of region `index`.
    Sample sample(std::size_t index, double outer, double inner, double third = 0) const {
        return std::visit(
            [&](const auto& f) -> Sample {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::TranslatedBump>) {
                    double d1 = n_ == 1 ? 0 : outer - f.S;
                    double dn = inner - f.R;
                    double t2 = d1 * d1 + dn * dn + third * third;
                    return {amplitude_ * T::profile(t2), amplitude_ * T::profile_grad(t2)};
                } else if constexpr (std::is_same_v<T, family::ConeCollapse> || std::is_same_v<T, family::CylLog>) {
                    auto d = f.cylindrical(outer, inner);
                    return {amplitude_ * d.value, amplitude_ * std::hypot(d.d_inner, d.d_outer)};
                } else if constexpr (std::is_same_v<T, family::DyadicSum>) {
                    auto d = f.component(static_cast<int>(index) + 1, outer, inner);
                    return {amplitude_ * d.value, amplitude_ * std::hypot(d.d_inner, d.d_outer / inner)};
                } else {
                    auto d = f.polar(outer, inner);
                    double tangential = n_ == 1 ? 0.0 : d.d_outer / inner;
                    return {amplitude_ * d.value, amplitude_ * std::hypot(d.d_inner, tangential)};
                }
            },
            profile_);
    }

    double evaluate(std::span<const double> x) const { return eval(x, nullptr); }

    std::vector<double> gradient(std::span<const double> x) const {
        std::vector<double> g(x.size(), 0.0);
        eval(x, &g);
        return g;
    }

    /// True when x lies on a kink set of the piecewise formula, where the
    /// gradient is a one-sided value.
    bool on_kink(std::span<const double> x) const {
        auto c = coordinates(x);
        for (const auto& reg : regions()) {
            auto hits = [](const Span1& s, double v) {
                if (v == s.lo || v == s.hi) return true;
                return std::find(s.kinks.begin(), s.kinks.end(), v) != s.kinks.end();
            };
            double o = 0, i = 0;
            switch (reg.chart) {
                case Chart::polar: o = c.theta; i = c.r; break;
                case Chart::cylindrical: o = c.z; i = c.rho; break;
                case Chart::box: continue;
            }
            if (hits(reg.outer, o) || hits(reg.inner, i)) return true;
        }
        return false;
    }

private:
    struct Coords {
        double r, rho, z, theta;
    };

    Coords coordinates(std::span<const double> x) const {
        check_point(x);
        double rho2 = 0;
        for (int i = 0; i + 1 < n_; ++i) rho2 += x[i] * x[i];
        double z = x[n_ - 1];
        double rho = std::sqrt(rho2);
        double r = std::hypot(rho, z);
        return {r, rho, z, std::atan2(rho, z)};
    }

    void check_point(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != n_) throw InputError("point dimension does not match family");
        for (double v : x) {
            if (!std::isfinite(v)) throw InputError("point must be finite");
        }
    }

    double eval(std::span<const double> x, std::vector<double>* grad) const {
        Coords c = coordinates(x);
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, family::TranslatedBump>) {
                    std::vector<double> d(x.begin(), x.end());
                    if (n_ >= 2) d[0] -= f.S;
                    d[n_ - 1] -= f.R;
                    double t2 = 0;
                    for (double v : d) t2 += v * v;
                    if (grad && t2 < 1) {
                        double w = 1 - t2;
                        for (int i = 0; i < n_; ++i) (*grad)[i] = amplitude_ * (-8 * w * w * w) * d[i];
                    }
                    return amplitude_ * T::profile(t2);
                } else if constexpr (std::is_same_v<T, family::ConeCollapse> || std::is_same_v<T, family::CylLog>) {
                    auto d = f.cylindrical(c.z, c.rho);
                    if (grad) {
                        for (int i = 0; i + 1 < n_; ++i) {
                            (*grad)[i] = c.rho > 0 ? amplitude_ * d.d_inner * x[i] / c.rho : 0.0;
                        }
                        (*grad)[n_ - 1] = amplitude_ * d.d_outer;
                    }
                    return amplitude_ * d.value;
                } else {
                    auto d = f.polar(c.theta, c.r);
                    if (grad && c.r > 0) {
                        double r2 = c.r * c.r;
                        for (int i = 0; i + 1 < n_; ++i) {
                            double dr = x[i] / c.r;
                            double dth = c.rho > 0 ? c.z * x[i] / (c.rho * r2) : 0.0;
                            (*grad)[i] = amplitude_ * (d.d_inner * dr + d.d_outer * dth);
                        }
                        (*grad)[n_ - 1] = amplitude_ * (d.d_inner * c.z / c.r - d.d_outer * c.rho / r2);
                    }
                    return amplitude_ * d.value;
                }
            },
            profile_);
    }

    FamilyKind kind_;
    int n_;
    double parameter_;
    double amplitude_;
    Profile profile_;
};

// ==== constructors ====

inline FamilyInstance scaled_bump(int n, double lambda) {
    if (!(lambda > 0)) throw InputError("SCALED_BUMP needs lambda > 0");
    return FamilyInstance(FamilyKind::scaled_bump, n, lambda, family::ScaledBump{lambda});
}

/// Bump on the unit ball centred at (S, 0, ..., 0, R). The closed support must
/// avoid the origin.
inline FamilyInstance translated_bump(int n, double S, double R, FamilyKind kind = FamilyKind::translated_bump_r) {
    if (kind != FamilyKind::translated_bump_r && kind != FamilyKind::translated_bump_s) {
        throw InputError("translated bump kind must be TRANSLATED_BUMP_R or TRANSLATED_BUMP_S");
    }
    if (n == 1 && S != 0) throw InputError("TRANSLATED_BUMP in one dimension needs S = 0");
    if (std::hypot(S, R) <= 1) throw InputError("TRANSLATED_BUMP support must avoid the origin");
    double t = kind == FamilyKind::translated_bump_r ? R : S;
    return FamilyInstance(kind, n, t, family::TranslatedBump{S, R});
}

inline FamilyInstance cone_collapse(int n, double eps) {
    if (n < 2) throw InputError("CONE_COLLAPSE needs n >= 2");
    if (!(eps > 0 && eps <= 0.5)) throw InputError("CONE_COLLAPSE needs 0 < eps <= 1/2");
    return FamilyInstance(FamilyKind::cone_collapse, n, eps, family::ConeCollapse{eps});
}

/// Radial exponent -alpha - g1 - n/s + eps, so that |x|^g1 |x'|^alpha u has
/// s-th power ~ r^(eps s - 1) near the origin.
inline FamilyInstance radial_log(const ParameterSet& P, double eps) {
    if (!(eps > 0)) throw InputError("RADIAL_LOG needs eps > 0");
    double k = -P.alpha.to_double() - P.gamma1.to_double() - P.n / P.s.to_double() + eps;
    bool angular = P.mode == Mode::anisotropic;
    return FamilyInstance(FamilyKind::radial_log, P.n, eps, family::RadialLog{{k}, angular});
}

/// Axial exponent -alpha - (n-1)/s + eps.
inline FamilyInstance cyl_log(const ParameterSet& P, double eps) {
    if (P.n < 2) throw InputError("CYL_LOG needs n >= 2");
    if (!(eps > 0)) throw InputError("CYL_LOG needs eps > 0");
    double k = -P.alpha.to_double() - (P.n - 1) / P.s.to_double() + eps;
    return FamilyInstance(FamilyKind::cyl_log, P.n, eps, family::CylLog{{k}});
}

/// Exponents of the dyadic construction.
struct DyadicExponents {
    Rational b1, d1, b2, d2, kappa;
};

inline DyadicExponents dyadic_exponents(const ParameterSet& P) {
    Rational n(P.n), m(P.n - 1);
    Rational is = Rational(1) / P.s, ip = Rational(1) / P.p;
    DyadicExponents e;
    e.b1 = n * is + P.gamma1 + P.alpha;
    e.d1 = m * is + P.alpha;
    e.b2 = n * ip + P.gamma2 + P.mu - 1;
    e.d2 = m * ip + P.mu - 1;
    if (e.b1 == e.b2) throw DomainError("dyadic construction needs b1 != b2");
    e.kappa = (e.d2 - e.d1) / (e.b1 - e.b2);
    return e;
}

/// w = sum_{j=1..m} 2^((b1 kappa + d1) j) u(2^(kappa j) r, 2^j theta').
inline FamilyInstance dyadic_sum_build(const ParameterSet& P, int m, const DyadicOptions& opt = {}) {
    if (P.n < 2) throw DomainError("dyadic construction needs n >= 2");
    if (m < 1) throw InputError("dyadic construction needs m >= 1");
    if (!(opt.delta > 0) || !(opt.width > 1) || opt.width * opt.delta >= 0.5) {
        throw InputError("dyadic construction needs delta > 0, width > 1, width*delta < 1/2");
    }
    AxialBalance ax(P);
    if (ax.grad_term == ax.q_term) throw DomainError("dyadic construction needs 1/p+(mu-1)/(n-1) != 1/q+beta/(n-1)");
    Balance bal(P);
    if (bal.grad_term == bal.q_term) throw DomainError("dyadic construction needs 1/p+(g2+mu-1)/n != 1/q+(g3+beta)/n");
    auto e = dyadic_exponents(P);
    if (e.d1 == e.d2) throw DomainError("dyadic construction needs d1 != d2");
    double kappa = opt.kappa_override.value_or(e.kappa.to_double());
    double amp = e.b1.to_double() * kappa + e.d1.to_double();
    family::DyadicSum sum{m, opt.delta, opt.width, kappa, amp};

    auto regs = sum.regions();
    for (std::size_t i = 0; i < regs.size(); ++i) {
        for (std::size_t j = i + 1; j < regs.size(); ++j) {
            auto overlap = [](const Span1& a, const Span1& b) { return a.lo < b.hi && b.lo < a.hi; };
            if (overlap(regs[i].outer, regs[j].outer) && overlap(regs[i].inner, regs[j].inner)) {
                throw ConstructionError("dyadic components " + std::to_string(i + 1) + " and " +
                                        std::to_string(j + 1) + " have overlapping supports");
            }
        }
    }
    return FamilyInstance(FamilyKind::dyadic_sum, P.n, m, sum);
}

inline FamilyInstance cone_boundary_bump(int n, double cone_eps, double lambda) {
    if (n < 2) throw InputError("CONE_BOUNDARY_BUMP needs n >= 2");
    if (!(cone_eps > 0 && cone_eps <= 1)) throw InputError("CONE_BOUNDARY_BUMP needs 0 < eps <= 1");
    if (!(lambda > 0)) throw InputError("CONE_BOUNDARY_BUMP needs lambda > 0");
    return FamilyInstance(FamilyKind::cone_boundary_bump, n, lambda, family::ConeBoundaryBump{cone_eps, lambda});
}

/// Aperture of the cone used by CONE_BOUNDARY_BUMP sweeps.
inline constexpr double kDefaultConeAperture = 0.5;

/// Family member for parameter t, with the conventions of the necessity
/// constructions (S = 2 for R-sweeps of anisotropic tuples, R = 0 for S-sweeps).
inline FamilyInstance make_family(const ParameterSet& P, FamilyKind kind, double t) {
    switch (kind) {
        case FamilyKind::scaled_bump: return scaled_bump(P.n, t);
        case FamilyKind::translated_bump_r:
            return translated_bump(P.n, P.mode == Mode::anisotropic ? 2.0 : 0.0, t, kind);
        case FamilyKind::translated_bump_s:
            if (P.n < 2) throw InputError("TRANSLATED_BUMP_S needs n >= 2");
            return translated_bump(P.n, t, 0.0, kind);
        case FamilyKind::cone_collapse: return cone_collapse(P.n, t);
        case FamilyKind::radial_log: return radial_log(P, t);
        case FamilyKind::cyl_log: return cyl_log(P, t);
        case FamilyKind::dyadic_sum: return dyadic_sum_build(P, static_cast<int>(std::lround(t)));
        case FamilyKind::cone_boundary_bump: return cone_boundary_bump(P.n, kDefaultConeAperture, t);
    }
    throw InputError("unknown family kind");
}

}  // namespace ckn
