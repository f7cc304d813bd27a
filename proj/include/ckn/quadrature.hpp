#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/funcfam.hpp"

namespace ckn {

/// Integration domains. Cones contain both nappes; cylinders sit on the upper
/// half axis, {|x'| <= delta, 0 <= x_n <= h}.
struct Domain {
    enum class Kind { full_space, ball, cone, cone_complement, cylinder, shell };

    Kind kind = Kind::full_space;
    double radius = 0;                                       // ball
    double r1 = 0, r2 = std::numeric_limits<double>::infinity();  // cone
    double eps = 1;                                          // cone, cone complement
    double delta = 0, height = 0;                            // cylinder
    int shell_index = 0;                                     // shell {2^(k-1) <= |x| <= 2^k}

    static Domain full_space() { return {}; }
    static Domain ball(double R) {
        Domain d;
        d.kind = Kind::ball;
        d.radius = R;
        d.validate();
        return d;
    }
    static Domain cone(double r1, double r2, double eps) {
        Domain d;
        d.kind = Kind::cone;
        d.r1 = r1;
        d.r2 = r2;
        d.eps = eps;
        d.validate();
        return d;
    }
    static Domain cone_complement(double eps) {
        Domain d;
        d.kind = Kind::cone_complement;
        d.eps = eps;
        d.validate();
        return d;
    }
    static Domain cylinder(double delta, double h) {
        Domain d;
        d.kind = Kind::cylinder;
        d.delta = delta;
        d.height = h;
        d.validate();
        return d;
    }
    static Domain shell(int k) {
        Domain d;
        d.kind = Kind::shell;
        d.shell_index = k;
        return d;
    }

    void validate() const {
        switch (kind) {
            case Kind::full_space:
            case Kind::shell: return;
            case Kind::ball:
                if (!(radius > 0)) throw InputError("BALL needs R > 0");
                return;
            case Kind::cone:
                if (!(r1 >= 0 && r1 < r2)) throw InputError("CONE needs 0 <= r1 < r2");
                [[fallthrough]];
            case Kind::cone_complement:
                if (!(eps > 0 && eps <= 1)) throw InputError("cone aperture must satisfy 0 < eps <= 1");
                return;
            case Kind::cylinder:
                if (!(delta > 0 && height > 0)) throw InputError("CYLINDER needs delta, h > 0");
                return;
        }
    }

    /// Radial range [lo, hi] of the domain.
    std::pair<double, double> radial_range() const {
        const double inf = std::numeric_limits<double>::infinity();
        switch (kind) {
            case Kind::ball: return {0, radius};
            case Kind::shell: return {std::ldexp(1.0, shell_index - 1), std::ldexp(1.0, shell_index)};
            case Kind::cone: return {r1, r2};
            case Kind::cylinder: return {0, std::hypot(delta, height)};
            default: return {0, inf};
        }
    }

    std::string str() const {
        auto num = [](double v) {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        };
        switch (kind) {
            case Kind::full_space: return "FULL_SPACE";
            case Kind::ball: return "BALL:" + num(radius);
            case Kind::cone: return "CONE:" + num(r1) + ":" + num(r2) + ":" + num(eps);
            case Kind::cone_complement: return "CONE_COMPLEMENT:" + num(eps);
            case Kind::cylinder: return "CYLINDER:" + num(delta) + ":" + num(height);
            case Kind::shell: return "SHELL:" + std::to_string(shell_index);
        }
        return "?";
    }

    /// Inverse of str(): NAME[:arg[:arg...]], "inf" allowed for the outer cone radius.
    static Domain parse(std::string_view text) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto pos = text.find(':', start);
            parts.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        auto number = [&](std::size_t i) {
            const std::string& s = parts.at(i);
            if (s == "inf") return std::numeric_limits<double>::infinity();
            double v = 0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
                throw InputError("bad number '" + s + "' in domain '" + std::string(text) + "'");
            }
            return v;
        };
        auto expect = [&](std::size_t count) {
            if (parts.size() != count + 1) {
                throw InputError("domain '" + parts[0] + "' takes " + std::to_string(count) + " arguments");
            }
        };
        const std::string& name = parts[0];
        if (name == "FULL_SPACE") {
            expect(0);
            return full_space();
        }
        if (name == "BALL") {
            expect(1);
            return ball(number(1));
        }
        if (name == "CONE") {
            expect(3);
            return cone(number(1), number(2), number(3));
        }
        if (name == "CONE_COMPLEMENT") {
            expect(1);
            return cone_complement(number(1));
        }
        if (name == "CYLINDER") {
            expect(2);
            return cylinder(number(1), number(2));
        }
        if (name == "SHELL") {
            expect(1);
            double k = number(1);
            if (k != std::floor(k) || std::abs(k) > 1000) throw InputError("SHELL index must be an integer");
            return shell(static_cast<int>(k));
        }
        throw InputError("unknown domain '" + name + "'");
    }
};

/// ||  |x|^gamma |x'|^alpha f ||_{L^e(domain)}.
struct NormSpec {
    double e = 1;
    double gamma = 0;
    double alpha = 0;
    Domain domain{};
};

struct QuadResult {
    double value = 0;
    double abs_error_estimate = 0;
    std::size_t cells = 0;
};

struct QuadOptions {
    int depth = 24;        // geometric cells toward singular endpoints
    int soft_depth = 6;    // geometric cells toward kinks and support ends
    int angular_cells = 4; // uniform angular cells around off-axis bumps
    int level = 0;         // each level doubles every cell count
    bool estimate_error = true;
};

enum class Integrand { value, gradient };

/// Surface area of the unit sphere S^k in R^(k+1).
inline double sphere_area(int k) {
    if (k < 0) return 1;
    double h = 0.5 * (k + 1);
    return 2 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace detail {

// 8-point Gauss-Legendre on [-1, 1], symmetric half.
inline constexpr std::array<double, 4> kGaussX{0.1834346424956498049, 0.5255324099163289858, 0.7966664774136267396,
                                               0.9602898564975362317};
inline constexpr std::array<double, 4> kGaussW{0.3626837833783619830, 0.3137066458778872873, 0.2223810344533744706,
                                               0.1012285362903762592};

enum class End { soft, singular };

struct Piece {
    double lo, hi;
    End lo_end = End::soft, hi_end = End::soft;
};

/// Pieces of `span` clipped to [lo, hi], split at its kinks and at `extra`.
template <class SingularAt>
std::vector<Piece> pieces(const Span1& span, double lo, double hi, const std::vector<double>& extra,
                          SingularAt singular_at) {
    lo = std::max(lo, span.lo);
    hi = std::min(hi, span.hi);
    std::vector<Piece> out;
    if (!(lo < hi)) return out;
    std::vector<double> cuts{lo};
    for (double k : span.kinks) {
        if (k > lo && k < hi) cuts.push_back(k);
    }
    for (double k : extra) {
        if (k > lo && k < hi) cuts.push_back(k);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Piece p{cuts[i], cuts[i + 1]};
        if (singular_at(p.lo)) p.lo_end = End::singular;
        if (singular_at(p.hi)) p.hi_end = End::singular;
        out.push_back(p);
    }
    return out;
}

/// One-dimensional composite Gauss rule with geometric grading toward piece ends.
class Rule {
public:
    Rule(int depth, int soft_depth, int level) : depth_(depth), soft_depth_(soft_depth), sub_(1 << level) {}

    template <class F>
    double piece(F&& f, const Piece& p) const {
        double mid = 0.5 * (p.lo + p.hi);
        return toward(f, mid, p.lo, p.lo_end) + toward(f, mid, p.hi, p.hi_end);
    }

    /// Uniform cells only.
    template <class F>
    double uniform(F&& f, double lo, double hi, int cells) const {
        double sum = 0, w = (hi - lo) / cells;
        for (int i = 0; i < cells; ++i) sum += cell(f, lo + i * w, lo + (i + 1) * w);
        return sum;
    }

    std::size_t cells() const { return cells_; }

private:
    template <class F>
    double cell(F& f, double a, double b) const {
        if (a > b) std::swap(a, b);
        double sum = 0, w = (b - a) / sub_;
        for (int s = 0; s < sub_; ++s) {
            double lo = a + s * w, hi = s + 1 == sub_ ? b : a + (s + 1) * w;
            double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
            double acc = 0;
            for (std::size_t i = 0; i < kGaussX.size(); ++i) {
                acc += kGaussW[i] * (f(c - h * kGaussX[i]) + f(c + h * kGaussX[i]));
            }
            sum += h * acc;
        }
        cells_ += static_cast<std::size_t>(sub_);
        return sum;
    }

    template <class F>
    double toward(F& f, double from, double end, End kind) const {
        int depth = kind == End::singular ? depth_ : soft_depth_;
        double span = from - end;
        double sum = 0, prev = 0, last = 0;
        for (int k = 0; k < depth; ++k) {
            double a = end + span * std::ldexp(1.0, -k - 1);
            double b = end + span * std::ldexp(1.0, -k);
            double I = cell(f, a, b);
            sum += I;
            prev = last;
            last = I;
        }
        if (kind == End::soft) return sum + cell(f, end, end + span * std::ldexp(1.0, -depth));
        return sum + tail(prev, last, end);
    }

    // Remaining cells near a singular end form a geometric series for power-law integrands.
    static double tail(double prev, double last, double at) {
        if (last == 0) return 0;
        if (!(prev > 0)) throw DivergenceError("integrand grows toward singular point " + std::to_string(at));
        double ratio = last / prev;
        if (!(ratio < 1 - 1e-12)) {
            throw DivergenceError("integrand is not integrable at singular point " + std::to_string(at));
        }
        return last * ratio / (1 - ratio);
    }

    int depth_, soft_depth_, sub_;
    mutable std::size_t cells_ = 0;
};

/// Evaluates the e-th power integral of a family member on one refinement level.
class PowerIntegral {
public:
    PowerIntegral(const FamilyInstance& F, const NormSpec& spec, Integrand what, const QuadOptions& opt, int level)
        : F_(F), spec_(spec), what_(what), opt_(opt), rule_(opt.depth, opt.soft_depth, level), n_(F.n()) {}

    double run() {
        double total = 0;
        for (double v : run_regions()) total += v;
        return total;
    }

    std::vector<double> run_regions() {
        check_local_integrability();
        auto regs = F_.regions();
        std::vector<double> out(regs.size(), 0.0);
        for (std::size_t i = 0; i < regs.size(); ++i) {
            switch (regs[i].chart) {
                case Chart::polar: out[i] = polar(i, regs[i]); break;
                case Chart::cylindrical: out[i] = cylindrical(i, regs[i]); break;
                case Chart::box: out[i] = box(i, regs[i]); break;
            }
        }
        return out;
    }

    std::size_t cells() const { return rule_.cells(); }

private:
    using Kind = Domain::Kind;

    double magnitude(const Sample& s) const { return std::abs(what_ == Integrand::value ? s.value : s.grad); }

    double powered(double m) const { return m == 0 ? 0.0 : std::pow(m, spec_.e); }

    // Constant-one model near the origin and near the axis.
    void check_local_integrability() const {
        auto [rlo, rhi] = spec_.domain.radial_range();
        (void)rhi;
        double alpha = n_ >= 2 ? spec_.alpha : 0.0;
        bool origin = false, axis = false;
        for (const auto& reg : F_.regions()) {
            if (reg.chart == Chart::polar) {
                origin |= reg.inner.lo == 0 && rlo == 0;
                axis |= n_ >= 2 && (reg.outer.lo == 0 || reg.outer.hi == std::numbers::pi);
            } else if (reg.chart == Chart::cylindrical) {
                axis |= reg.inner.lo == 0;
                origin |= reg.inner.lo == 0 && reg.outer.lo <= 0 && reg.outer.hi >= 0 && rlo == 0;
            }
        }
        if (origin && !(spec_.e * (spec_.gamma + alpha) + n_ > 0)) {
            throw DivergenceError("weight |x|^gamma |x'|^alpha is not locally L^e-integrable at the origin");
        }
        if (axis && !(spec_.e * alpha + n_ - 1 > 0)) {
            throw DivergenceError("weight |x'|^alpha is not locally L^e-integrable near the x_n axis");
        }
    }

    // ---- polar chart ----

    std::vector<std::pair<double, double>> polar_angles() const {
        const double pi = std::numbers::pi;
        const Domain& d = spec_.domain;
        switch (d.kind) {
            case Kind::cone: {
                if (d.eps >= 1) return {{0, pi}};
                double a = std::asin(d.eps);
                return {{0, a}, {pi - a, pi}};
            }
            case Kind::cone_complement: {
                if (d.eps >= 1) return {};
                double a = std::asin(d.eps);
                return {{a, pi - a}};
            }
            case Kind::cylinder: return {{0, pi / 2}};
            default: return {{0, pi}};
        }
    }

    std::pair<double, double> polar_radii(double theta) const {
        const Domain& d = spec_.domain;
        if (d.kind != Kind::cylinder) return d.radial_range();
        double s = std::sin(theta), c = std::cos(theta);
        double hi = std::numeric_limits<double>::infinity();
        if (s > 0) hi = std::min(hi, d.delta / s);
        if (c > 0) hi = std::min(hi, d.height / c);
        return {0, hi};
    }

    // Angles where the cylinder's radial bound has a corner or crosses a kink of `inner`.
    std::vector<double> polar_breaks(const Span1& inner) const {
        const Domain& d = spec_.domain;
        std::vector<double> out;
        if (d.kind != Kind::cylinder) return out;
        out.push_back(std::atan2(d.delta, d.height));
        std::vector<double> radii(inner.kinks);
        radii.push_back(inner.lo);
        radii.push_back(inner.hi);
        for (double k : radii) {
            if (k > d.delta) out.push_back(std::asin(d.delta / k));
            if (k > d.height) out.push_back(std::acos(d.height / k));
        }
        return out;
    }

    double polar(std::size_t index, const Region& reg) {
        const double pi = std::numbers::pi;
        const double e = spec_.e;
        const double alpha = n_ >= 2 ? spec_.alpha : 0.0;
        if (n_ == 1 && spec_.alpha != 0) throw InputError("axial weight is undefined in one dimension");
        const double r_pow = e * (spec_.gamma + alpha) + n_ - 1;
        const double s_pow = e * alpha + n_ - 2;

        auto radial = [&](double theta) {
            auto [lo, hi] = polar_radii(theta);
            auto ps = pieces(reg.inner, lo, hi, {}, [](double r) { return r == 0; });
            auto f = [&](double r) {
                double m = magnitude(F_.sample(index, theta, r));
                if (m == 0) return 0.0;
                return std::exp(r_pow * std::log(r)) * powered(m);
            };
            double sum = 0;
            for (const auto& p : ps) sum += rule_.piece(f, p);
            return sum;
        };

        if (n_ == 1) {
            // two rays, theta = 0 (x > 0) and theta = pi (x < 0)
            double sum = 0;
            for (double theta : {0.0, pi}) {
                if (theta < reg.outer.lo || theta > reg.outer.hi) continue;
                bool allowed = false;
                for (auto [a, b] : polar_angles()) allowed |= theta >= a && theta <= b;
                if (allowed) sum += radial(theta);
            }
            return sum;
        }

        auto angular = [&](double theta) {
            double s = theta > pi / 2 ? std::sin(pi - theta) : std::sin(theta);
            return std::exp(s_pow * std::log(s)) * radial(theta);
        };
        double sum = 0;
        auto extra = polar_breaks(reg.inner);
        for (auto [a, b] : polar_angles()) {
            auto ps = pieces(reg.outer, a, b, extra, [pi](double t) { return t == 0 || t == pi; });
            for (const auto& p : ps) sum += rule_.piece(angular, p);
        }
        return sphere_area(n_ - 2) * sum;
    }

    // ---- cylindrical chart ----

    // Slope c of the cone boundary rho = c |z|.
    double cone_slope() const {
        double eps = spec_.domain.eps;
        return eps >= 1 ? std::numeric_limits<double>::infinity() : eps / std::sqrt(1 - eps * eps);
    }

    std::pair<double, double> cyl_z_range() const {
        const Domain& d = spec_.domain;
        const double inf = std::numeric_limits<double>::infinity();
        switch (d.kind) {
            case Kind::ball: return {-d.radius, d.radius};
            case Kind::shell: {
                double r = std::ldexp(1.0, d.shell_index);
                return {-r, r};
            }
            case Kind::cone: return {-d.r2, d.r2};
            case Kind::cylinder: return {0, d.height};
            default: return {-inf, inf};
        }
    }

    std::pair<double, double> cyl_rho_range(double z) const {
        const Domain& d = spec_.domain;
        const double inf = std::numeric_limits<double>::infinity();
        auto circle = [z](double r) { return r * r > z * z ? std::sqrt(r * r - z * z) : 0.0; };
        double lo = 0, hi = inf;
        switch (d.kind) {
            case Kind::ball: hi = circle(d.radius); break;
            case Kind::shell: {
                auto [a, b] = d.radial_range();
                lo = circle(a);
                hi = circle(b);
                break;
            }
            case Kind::cone:
                lo = circle(d.r1);
                hi = std::min(circle(d.r2), cone_slope() * std::abs(z));
                break;
            case Kind::cone_complement: lo = cone_slope() * std::abs(z); break;
            case Kind::cylinder: hi = d.delta; break;
            default: break;
        }
        return {lo, hi};
    }

    // Heights where a radial bound hits zero, meets another bound, or crosses a kink of `inner`.
    std::vector<double> cyl_breaks(const Span1& inner) const {
        const Domain& d = spec_.domain;
        std::vector<double> circles, out;
        bool has_cone = d.kind == Kind::cone || d.kind == Kind::cone_complement;
        switch (d.kind) {
            case Kind::ball: circles = {d.radius}; break;
            case Kind::shell: {
                auto [a, b] = d.radial_range();
                circles = {a, b};
                break;
            }
            case Kind::cone:
                circles = {d.r1, d.r2};
                if (std::isinf(d.r2)) circles.pop_back();
                break;
            default: break;
        }
        std::vector<double> rhos(inner.kinks);
        rhos.push_back(inner.lo);
        rhos.push_back(inner.hi);
        double c = has_cone ? cone_slope() : 0;
        for (double R : circles) {
            out.push_back(R);
            for (double k : rhos) {
                if (k < R) out.push_back(std::sqrt(R * R - k * k));
            }
            if (has_cone && std::isfinite(c)) out.push_back(R / std::sqrt(1 + c * c));
        }
        if (has_cone && std::isfinite(c) && c > 0) {
            for (double k : rhos) out.push_back(k / c);
        }
        std::vector<double> both;
        for (double z : out) {
            both.push_back(z);
            both.push_back(-z);
        }
        both.push_back(0);
        return both;
    }

    double cylindrical(std::size_t index, const Region& reg) {
        const double e = spec_.e;
        const double gamma = spec_.gamma, alpha = spec_.alpha;
        auto radial = [&](double z) {
            auto [lo, hi] = cyl_rho_range(z);
            auto ps = pieces(reg.inner, lo, hi, {}, [](double r) { return r == 0; });
            auto f = [&](double rho) {
                double m = magnitude(F_.sample(index, z, rho));
                if (m == 0) return 0.0;
                double lw = 0.5 * e * gamma * std::log(rho * rho + z * z) + (e * alpha + n_ - 2) * std::log(rho);
                return std::exp(lw) * powered(m);
            };
            double sum = 0;
            for (const auto& p : ps) sum += rule_.piece(f, p);
            return sum;
        };
        auto [zlo, zhi] = cyl_z_range();
        auto ps = pieces(reg.outer, zlo, zhi, cyl_breaks(reg.inner), [](double) { return false; });
        double sum = 0;
        for (const auto& p : ps) sum += rule_.piece(radial, p);
        return sphere_area(n_ - 2) * sum;
    }

    // ---- off-axis bump, polar coordinates about its centre ----
    // x = c + t w, with w = (sin chi cos phi, cos chi * w', sin chi sin phi) on
    // S^(n-1); surface measure |S^(n-3)| cos^(n-3) chi sin chi dchi dphi.

    double box(std::size_t index, const Region& reg) {
        if (spec_.domain.kind != Kind::full_space) {
            throw InputError("translated bumps are integrated over FULL_SPACE only");
        }
        if (n_ == 1 && spec_.alpha != 0) throw InputError("axial weight is undefined in one dimension");
        const double e = spec_.e, gamma = spec_.gamma, alpha = n_ >= 2 ? spec_.alpha : 0.0;
        const auto& bump = std::get<family::TranslatedBump>(F_.profile());
        const double S = bump.S, R = bump.R;
        const double pi = std::numbers::pi;

        auto weight = [&](double x1, double sigma, double xn) {
            double rho2 = x1 * x1 + sigma * sigma;
            double lw = 0.5 * e * gamma * std::log(rho2 + xn * xn);
            if (alpha != 0) lw += 0.5 * e * alpha * std::log(rho2);
            return std::exp(lw);
        };
        // radial integral from the centre along direction (u1, um, un)
        auto ray = [&](double u1, double um, double un) {
            auto f = [&](double t) {
                double x1 = S + t * u1, sigma = t * um, xn = R + t * un;
                double m = magnitude(F_.sample(index, x1, xn, sigma));
                return m == 0 ? 0.0 : weight(x1, sigma, xn) * powered(m) * std::pow(t, n_ - 1);
            };
            double sum = 0;
            for (const auto& p : pieces(Span1{0, 1, {}}, 0, 1, {}, [](double) { return false; })) {
                sum += rule_.piece(f, p);
            }
            return sum;
        };
        (void)reg;
        const int cells = opt_.angular_cells;
        if (n_ == 1) return ray(0, 0, 1) + ray(0, 0, -1);
        if (n_ == 2) {
            return rule_.uniform([&](double phi) { return ray(std::cos(phi), 0, std::sin(phi)); }, 0, 2 * pi, cells);
        }
        auto sphere = [&](double chi) {
            double sc = std::sin(chi), cc = std::cos(chi);
            auto around = [&](double phi) { return ray(sc * std::cos(phi), cc, sc * std::sin(phi)); };
            return std::pow(cc, n_ - 3) * sc * rule_.uniform(around, 0, 2 * pi, cells);
        };
        return sphere_area(n_ - 3) * rule_.uniform(sphere, 0, pi / 2, std::max(1, cells / 2));
    }

    const FamilyInstance& F_;
    const NormSpec& spec_;
    Integrand what_;
    const QuadOptions& opt_;
    Rule rule_;
    int n_;
};

inline void validate(const NormSpec& spec) {
    if (!(spec.e > 0) || !std::isfinite(spec.e)) throw InputError("norm exponent must be positive and finite");
    if (!std::isfinite(spec.gamma) || !std::isfinite(spec.alpha)) throw InputError("weight powers must be finite");
    spec.domain.validate();
}

}  // namespace detail

/// Integral of (|x|^gamma |x'|^alpha |f|)^e, f = u or |grad u|.
inline QuadResult weighted_power(const FamilyInstance& F, const NormSpec& spec, Integrand what,
                                 const QuadOptions& opt = {}) {
    detail::validate(spec);
    detail::PowerIntegral base(F, spec, what, opt, opt.level);
    QuadResult out;
    out.value = base.run();
    out.cells = base.cells();
    if (opt.estimate_error) {
        detail::PowerIntegral fine(F, spec, what, opt, opt.level + 1);
        double v = fine.run();
        out.abs_error_estimate = std::abs(v - out.value);
    }
    return out;
}

/// weighted_power split by the family's support regions, without error estimate.
inline std::vector<double> weighted_power_by_region(const FamilyInstance& F, const NormSpec& spec, Integrand what,
                                                    const QuadOptions& opt = {}) {
    detail::validate(spec);
    return detail::PowerIntegral(F, spec, what, opt, opt.level).run_regions();
}

namespace detail {
inline QuadResult to_norm(const QuadResult& power, double e) {
    QuadResult out = power;
    out.value = std::pow(power.value, 1 / e);
    // d(I^(1/e)) = (1/e) I^(1/e - 1) dI
    out.abs_error_estimate = power.value > 0 ? out.value * power.abs_error_estimate / (e * power.value) : 0.0;
    return out;
}
}  // namespace detail

inline QuadResult weighted_norm(const FamilyInstance& F, const NormSpec& spec, const QuadOptions& opt = {}) {
    return detail::to_norm(weighted_power(F, spec, Integrand::value, opt), spec.e);
}

inline QuadResult weighted_gradient_norm(const FamilyInstance& F, const NormSpec& spec, const QuadOptions& opt = {}) {
    return detail::to_norm(weighted_power(F, spec, Integrand::gradient, opt), spec.e);
}

/// Radial extent [lo, hi] of the family's support.
inline std::pair<double, double> support_radii(const FamilyInstance& F) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& reg : F.regions()) {
        switch (reg.chart) {
            case Chart::polar:
                lo = std::min(lo, reg.inner.lo);
                hi = std::max(hi, reg.inner.hi);
                break;
            case Chart::cylindrical: {
                double zmin = (reg.outer.lo <= 0 && reg.outer.hi >= 0)
                                  ? 0.0
                                  : std::min(std::abs(reg.outer.lo), std::abs(reg.outer.hi));
                double zmax = std::max(std::abs(reg.outer.lo), std::abs(reg.outer.hi));
                lo = std::min(lo, std::hypot(reg.inner.lo, zmin));
                hi = std::max(hi, std::hypot(reg.inner.hi, zmax));
                break;
            }
            case Chart::box: {
                const auto& bump = std::get<family::TranslatedBump>(F.profile());
                double c = std::hypot(bump.S, bump.R);
                lo = std::min(lo, c - 1);
                hi = std::max(hi, c + 1);
                break;
            }
        }
    }
    return {lo, hi};
}

/// Dyadic shells {2^(k-1) <= |x| <= 2^k} covering the family's support, as
/// SHELL (full space) or CONE (cone domain) specs. A support reaching the
/// origin is closed off by one core ball below the 40 finest shells.
inline std::vector<NormSpec> shell_decompose(const FamilyInstance& F, const NormSpec& spec) {
    using Kind = Domain::Kind;
    if (spec.domain.kind != Kind::full_space && spec.domain.kind != Kind::cone) {
        throw InputError("shell decomposition needs a FULL_SPACE or CONE domain");
    }
    auto [lo, hi] = support_radii(F);
    if (spec.domain.kind == Kind::cone) {
        lo = std::max(lo, spec.domain.r1);
        hi = std::min(hi, spec.domain.r2);
    }
    std::vector<NormSpec> out;
    if (!(lo < hi)) return out;
    int k_hi = static_cast<int>(std::ceil(std::log2(hi)));
    int k_lo = lo > 0 ? static_cast<int>(std::floor(std::log2(lo))) + 1 : k_hi - 39;
    // floating log2 may be off by one at exact powers of two
    while (std::ldexp(1.0, k_hi - 1) >= hi) --k_hi;
    while (lo > 0 && std::ldexp(1.0, k_lo - 1) > lo) --k_lo;
    while (lo > 0 && std::ldexp(1.0, k_lo) <= lo) ++k_lo;
    auto make = [&](double a, double b, int k) {
        NormSpec s = spec;
        if (spec.domain.kind == Kind::cone) {
            s.domain = Domain::cone(std::max(a, spec.domain.r1), std::min(b, spec.domain.r2), spec.domain.eps);
        } else {
            s.domain = a == 0 ? Domain::ball(b) : Domain::shell(k);
        }
        return s;
    };
    if (lo == 0) out.push_back(make(0, std::ldexp(1.0, k_lo - 1), k_lo - 1));
    for (int k = k_lo; k <= k_hi; ++k) out.push_back(make(std::ldexp(1.0, k - 1), std::ldexp(1.0, k), k));
    return out;
}

}  // namespace ckn
