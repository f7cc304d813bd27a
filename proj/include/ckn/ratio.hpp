#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckn/errors.hpp"
#include "ckn/funcfam.hpp"
#include "ckn/parallel.hpp"
#include "ckn/params.hpp"
#include "ckn/quadrature.hpp"

namespace ckn {

// ==== the ratio ====

/// The three norms of the inequality for a tuple on a domain.
struct RatioSpecs {
    NormSpec lhs;   // ||  |x|^g1 |x'|^alpha u ||_s
    NormSpec grad;  // || |x|^g2 |x'|^mu grad u ||_p
    NormSpec q;     // || |x|^g3 |x'|^beta u ||_q
    double a = 0;
};

inline RatioSpecs ratio_specs(const ParameterSet& P, const Domain& domain = {}) {
    P.validate();
    bool aniso = P.mode == Mode::anisotropic;
    auto axial = [aniso](const Rational& r) { return aniso ? r.to_double() : 0.0; };
    RatioSpecs out;
    out.lhs = {P.s.to_double(), P.gamma1.to_double(), axial(P.alpha), domain};
    out.grad = {P.p.to_double(), P.gamma2.to_double(), axial(P.mu), domain};
    out.q = {P.q.to_double(), P.gamma3.to_double(), axial(P.beta), domain};
    out.a = P.a.to_double();
    return out;
}

struct RatioParts {
    double lhs = 0;
    double grad_factor = 1;  // ||grad u||^a, 1 when a = 0
    double q_factor = 1;     // ||u||_q^(1-a), 1 when a = 1
    double ratio = 0;
};

inline QuadOptions sweep_quadrature() {
    QuadOptions opt;
    opt.estimate_error = false;
    return opt;
}

namespace detail {

inline void require_standing(const ParameterSet& P, const char* what) {
    if (check_standing(P).verdict == Verdict::invalid_standing) {
        throw DomainError(std::string(what) + " requires the standing assumptions");
    }
}

inline RatioParts assemble(double lhs, double grad_norm, double q_norm, const RatioSpecs& specs) {
    RatioParts out;
    out.lhs = lhs;
    if (specs.a != 0) out.grad_factor = std::pow(grad_norm, specs.a);
    if (specs.a != 1) out.q_factor = std::pow(q_norm, 1 - specs.a);
    double den = out.grad_factor * out.q_factor;
    if (!(den > 0)) throw DegenerateInputError("ratio denominator vanishes (the test function is identically zero)");
    out.ratio = lhs / den;
    return out;
}

}  // namespace detail

/// LHS and both right-hand factors. Unused factors (exponent 0) are not
/// integrated, so their finiteness is not required.
inline RatioParts ratio_parts(const ParameterSet& P, const FamilyInstance& F, const Domain& domain = {},
                              const QuadOptions& opt = sweep_quadrature()) {
    detail::require_standing(P, "ckn_ratio");
    if (F.n() != P.n) throw InputError("family dimension differs from the tuple's n");
    auto specs = ratio_specs(P, domain);
    double lhs = weighted_norm(F, specs.lhs, opt).value;
    double grad = specs.a != 0 ? weighted_gradient_norm(F, specs.grad, opt).value : 1.0;
    double q = specs.a != 1 ? weighted_norm(F, specs.q, opt).value : 1.0;
    return detail::assemble(lhs, grad, q, specs);
}

inline double ckn_ratio(const ParameterSet& P, const FamilyInstance& F, const Domain& domain = {},
                        const QuadOptions& opt = sweep_quadrature()) {
    return ratio_parts(P, F, domain, opt).ratio;
}

// ==== predicted exponents ====

namespace detail {

inline bool triple_equality(const Balance& b) { return b.grad_term == b.q_term && b.q_term == b.lhs; }

inline void guard(bool ok, FamilyKind kind, const std::string& what) {
    if (!ok) throw DomainError(std::string(to_string(kind)) + " not applicable: needs " + what);
}

}  // namespace detail

/// Exact exponent of ratio ~ t^slope along the family, t the raw parameter.
inline Rational predict_slope(const ParameterSet& P, FamilyKind kind) {
    P.validate();
    using detail::guard;
    Rational n(P.n), one(1);
    Rational is = one / P.s, ip = one / P.p, iq = one / P.q;
    Rational alpha = P.alpha, mu = P.mu, beta = P.beta;  // zero for isotropic tuples
    Balance b(P);
    switch (kind) {
        case FamilyKind::scaled_bump:
        case FamilyKind::cone_boundary_bump:
            if (kind == FamilyKind::cone_boundary_bump) guard(P.n >= 2, kind, "n >= 2");
            return n * (b.rhs - b.lhs);
        case FamilyKind::translated_bump_r: return P.gamma1 - P.a * P.gamma2 - (1 - P.a) * P.gamma3;
        case FamilyKind::translated_bump_s:
            guard(P.n >= 2, kind, "n >= 2");
            return (P.gamma1 + alpha) - P.a * (P.gamma2 + mu) - (1 - P.a) * (P.gamma3 + beta);
        case FamilyKind::cone_collapse: {
            guard(P.n >= 2, kind, "n >= 2");
            Rational m(P.n - 1);
            return (alpha + 1 + m * is) - P.a * (mu + m * ip) - (1 - P.a) * (beta + 1 + m * iq);
        }
        case FamilyKind::radial_log:
            guard(b.lhs == b.rhs, kind, "the balance equality");
            guard(P.a.is_zero() || P.a == 1 || detail::triple_equality(b), kind,
                  "a = 0, a = 1 or 1/s+(g1+alpha)/n = 1/p+(g2+mu-1)/n = 1/q+(g3+beta)/n");
            return -is + P.a * ip + (1 - P.a) * iq;
        case FamilyKind::cyl_log: {
            guard(P.n >= 2, kind, "n >= 2");
            AxialBalance ax(P);
            guard(P.a.is_zero() || ax.lhs == ax.grad_term, kind, "1/s+alpha/(n-1) = 1/p+(mu-1)/(n-1)");
            guard(P.a == 1 || ax.lhs == ax.q_term, kind, "1/s+alpha/(n-1) = 1/q+beta/(n-1)");
            return -is + P.a * ip + (1 - P.a) * iq;
        }
        case FamilyKind::dyadic_sum: {
            guard(P.n >= 2, kind, "n >= 2");
            guard(b.lhs == b.rhs, kind, "the balance equality");
            AxialBalance ax(P);
            guard(ax.lhs == ax.rhs, kind, "equality in the axial balance");
            guard(b.grad_term != b.q_term, kind, "1/p+(g2+mu-1)/n != 1/q+(g3+beta)/n");
            guard(ax.grad_term != ax.q_term, kind, "1/p+(mu-1)/(n-1) != 1/q+beta/(n-1)");
            auto e = dyadic_exponents(P);
            guard(e.d1 != e.d2, kind, "d1 != d2");
            return is - P.a * ip - (1 - P.a) * iq;
        }
    }
    throw InputError("unknown family kind");
}

/// Whether an exponent means the ratio is unbounded in the family's limit
/// (t -> 0 for eps-families, t -> infinity for R, S, m; either way for scalings).
inline bool blows_up(FamilyKind kind, double slope) {
    if (kind == FamilyKind::scaled_bump || kind == FamilyKind::cone_boundary_bump) return slope != 0;
    return limit_at_zero(kind) ? slope < 0 : slope > 0;
}

/// Growth exponent toward the family's limit: positive means growth.
inline double oriented_slope(FamilyKind kind, double slope) {
    if (kind == FamilyKind::scaled_bump || kind == FamilyKind::cone_boundary_bump) return std::abs(slope);
    return limit_at_zero(kind) ? -slope : slope;
}

// ==== sweeps ====

struct RatioSample {
    double t = 0;
    double lhs = 0, grad_factor = 1, q_factor = 1, ratio = 0;
};

struct LineFit {
    double slope = 0, intercept = 0, slope_stderr = 0, r_squared = 1;
};

/// Least squares y = intercept + slope x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs at least two matching points");
    const double N = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= N;
    my /= N;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0)) throw InputError("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = std::max(0.0, syy - f.slope * sxy);
    f.r_squared = syy > 0 ? 1 - ssr / syy : 1.0;
    f.slope_stderr = x.size() > 2 ? std::sqrt(ssr / (N - 2) / sxx) : 0.0;
    return f;
}

struct SweepResult {
    FamilyKind kind = FamilyKind::scaled_bump;
    std::vector<RatioSample> samples;
    double slope = 0, slope_stderr = 0, r_squared = 1;

    double max_ratio() const {
        double m = 0;
        for (const auto& s : samples) m = std::max(m, s.ratio);
        return m;
    }
};

struct SweepOptions {
    Domain domain{};
    QuadOptions quad = sweep_quadrature();
    DyadicOptions dyadic{};
    unsigned threads = 0;
};

/// t0, t0 r, ..., t0 r^(count-1).
inline std::vector<double> geometric_grid(double t0, double ratio, int count) {
    if (!(t0 > 0) || !(ratio > 0) || ratio == 1 || count < 1) {
        throw InputError("geometric grid needs t0 > 0, ratio > 0, ratio != 1, count >= 1");
    }
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(t0 * std::pow(ratio, i));
    return g;
}

/// Grid on which each family's limit behaviour is visible at moderate cost.
inline std::vector<double> default_grid(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::scaled_bump:
        case FamilyKind::cone_boundary_bump: return geometric_grid(0.125, 2, 7);
        case FamilyKind::translated_bump_r:
        case FamilyKind::translated_bump_s: return geometric_grid(16, 2, 7);
        case FamilyKind::cone_collapse: return geometric_grid(std::ldexp(1.0, -4), 0.5, 7);
        case FamilyKind::radial_log:
        case FamilyKind::cyl_log: return geometric_grid(std::ldexp(1.0, -12), 0.5, 7);
        case FamilyKind::dyadic_sum: return {1, 2, 4, 8, 16};
    }
    throw InputError("unknown family kind");
}

inline const std::vector<FamilyKind>& all_family_kinds() {
    static const std::vector<FamilyKind> kinds{
        FamilyKind::scaled_bump,   FamilyKind::translated_bump_r, FamilyKind::translated_bump_s,
        FamilyKind::cone_collapse, FamilyKind::radial_log,        FamilyKind::cyl_log,
        FamilyKind::dyadic_sum,    FamilyKind::cone_boundary_bump};
    return kinds;
}

namespace detail {

inline void check_grid(FamilyKind kind, std::span<const double> grid) {
    if (grid.size() < 4) throw InputError("sweep needs at least 4 grid points");
    for (double t : grid) {
        if (!(t > 0) || !std::isfinite(t)) throw InputError("sweep grid values must be positive and finite");
    }
    double r = grid[1] / grid[0];
    if (r == 1) throw InputError("sweep grid must not repeat values");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i] / grid[i - 1] - r) > 1e-9 * r) throw InputError("sweep grid must be geometric");
    }
    if (kind == FamilyKind::dyadic_sum) {
        for (double t : grid) {
            if (t != std::round(t)) throw InputError("DYADIC_SUM grid values must be integers");
        }
    }
}

/// Disjoint components: the m-term power integrals are prefix sums of the
/// per-component ones, so one evaluation of the largest m serves the grid.
inline std::vector<RatioSample> dyadic_samples(const ParameterSet& P, std::span<const double> grid,
                                               const SweepOptions& opt) {
    int m_max = static_cast<int>(*std::max_element(grid.begin(), grid.end()));
    auto F = dyadic_sum_build(P, m_max, opt.dyadic);
    auto specs = ratio_specs(P, opt.domain);
    std::vector<std::vector<double>> parts(3);
    const NormSpec* spec_of[3] = {&specs.lhs, &specs.grad, &specs.q};
    bool needed[3] = {true, specs.a != 0, specs.a != 1};
    parallel_for(
        3,
        [&](std::size_t i) {
            if (!needed[i]) return;
            auto what = i == 1 ? Integrand::gradient : Integrand::value;
            parts[i] = weighted_power_by_region(F, *spec_of[i], what, opt.quad);
        },
        opt.threads);
    std::vector<RatioSample> out;
    for (double t : grid) {
        int m = static_cast<int>(t);
        double norm[3] = {1, 1, 1};
        for (int i = 0; i < 3; ++i) {
            if (!needed[i]) continue;
            double sum = 0;
            for (int j = 0; j < m; ++j) sum += parts[i][j];
            norm[i] = std::pow(sum, 1 / spec_of[i]->e);
        }
        auto r = assemble(norm[0], norm[1], norm[2], specs);
        out.push_back({t, r.lhs, r.grad_factor, r.q_factor, r.ratio});
    }
    return out;
}

}  // namespace detail

/// Samples the ratio along a geometric grid and fits the log-log slope.
inline SweepResult sweep(const ParameterSet& P, FamilyKind kind, std::span<const double> grid,
                         const SweepOptions& opt = {}) {
    detail::require_standing(P, "sweep");
    detail::check_grid(kind, grid);
    SweepResult res;
    res.kind = kind;
    if (kind == FamilyKind::dyadic_sum) {
        res.samples = detail::dyadic_samples(P, grid, opt);
    } else {
        res.samples.resize(grid.size());
        parallel_for(
            grid.size(),
            [&](std::size_t i) {
                auto F = make_family(P, kind, grid[i]);
                auto r = ratio_parts(P, F, opt.domain, opt.quad);
                res.samples[i] = {grid[i], r.lhs, r.grad_factor, r.q_factor, r.ratio};
            },
            opt.threads);
    }
    std::vector<double> x, y;
    for (const auto& s : res.samples) {
        if (!(s.ratio > 0) || !std::isfinite(s.ratio)) {
            throw DegenerateInputError("sweep produced a non-positive or non-finite ratio at t = " +
                                       std::to_string(s.t));
        }
        x.push_back(std::log(s.t));
        y.push_back(std::log(s.ratio));
    }
    auto fit = fit_line(x, y);
    res.slope = fit.slope;
    res.slope_stderr = fit.slope_stderr;
    res.r_squared = fit.r_squared;
    return res;
}

inline SweepResult sweep(const ParameterSet& P, FamilyKind kind, const SweepOptions& opt = {}) {
    auto grid = default_grid(kind);
    return sweep(P, kind, grid, opt);
}

// ==== necessity ====

inline constexpr double kSlopeTolerance = 0.05;

struct NecessityEntry {
    ConditionId condition = ConditionId::A5;
    FamilyKind family = FamilyKind::scaled_bump;
    std::optional<Rational> predicted;  // empty when the family's guards fail
    double fitted = std::numeric_limits<double>::quiet_NaN();
    bool confirmed = false;
    std::string note;
    std::optional<SweepResult> sweep;
};

struct NecessityReport {
    std::vector<NecessityEntry> entries;

    bool any_confirmed() const {
        return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.confirmed; });
    }
    bool all_confirmed() const {
        return !entries.empty() &&
               std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.confirmed; });
    }
};

/// Test-function family that exhibits the failure of a condition.
inline FamilyKind necessity_family(const ParameterSet& P, ConditionId id) {
    switch (id) {
        case ConditionId::A5:
        case ConditionId::B3: return FamilyKind::scaled_bump;
        case ConditionId::A6_1:
        case ConditionId::B4: return FamilyKind::translated_bump_r;
        case ConditionId::A6_2: return FamilyKind::translated_bump_s;
        case ConditionId::A6_3: return FamilyKind::cone_collapse;
        case ConditionId::A7:
        case ConditionId::B5: {
            if (P.mode == Mode::isotropic || b5_guard(P)) return FamilyKind::radial_log;
            AxialBalance ax(P);
            return ax.grad_term == ax.q_term ? FamilyKind::cyl_log : FamilyKind::dyadic_sum;
        }
        default: break;
    }
    throw DomainError("condition " + std::string(to_string(id)) + " has no test-function family");
}

/// Confirmed: fitted slope within tolerance of the prediction, which points
/// toward growth in the family's limit.
inline bool confirms(FamilyKind kind, const Rational& predicted, double fitted, double tol = kSlopeTolerance) {
    double p = predicted.to_double();
    return blows_up(kind, p) && std::abs(fitted - p) <= tol;
}

inline NecessityReport verify_necessity(const ParameterSet& P, const SweepOptions& opt = {}) {
    auto report = check(P);
    if (report.verdict == Verdict::invalid_standing) {
        throw DomainError("verify_necessity requires the standing assumptions");
    }
    auto failed = report.failed();
    if (failed.empty()) throw DomainError("verify_necessity needs a tuple with a failing condition");
    NecessityReport out;
    for (auto id : failed) {
        NecessityEntry e;
        e.condition = id;
        e.family = necessity_family(P, id);
        try {
            e.predicted = predict_slope(P, e.family);
        } catch (const DomainError& err) {
            e.note = err.what();
            out.entries.push_back(std::move(e));
            continue;
        }
        e.sweep = sweep(P, e.family, opt);
        e.fitted = e.sweep->slope;
        e.confirmed = confirms(e.family, *e.predicted, e.fitted);
        out.entries.push_back(std::move(e));
    }
    return out;
}

// ==== constants ====

struct FamilySup {
    FamilyKind family = FamilyKind::scaled_bump;
    double sup = 0;
    double at = 0;
    std::string skipped;  // reason, when the family could not be evaluated
};

struct ConstantEstimate {
    double value = 0;  // lower bound for the best constant
    FamilyKind family = FamilyKind::scaled_bump;
    double at = 0;
    std::vector<FamilySup> per_family;
};

/// Supremum of the ratio over the family catalogue on the default grids.
/// Families whose norms diverge or whose construction is unavailable for the
/// tuple are skipped and reported.
inline ConstantEstimate estimate_constant(const ParameterSet& P, std::span<const FamilyKind> families,
                                          const SweepOptions& opt = {}) {
    if (check(P).verdict != Verdict::holds) throw DomainError("estimate_constant needs a tuple whose verdict is HOLDS");
    ConstantEstimate out;
    bool any = false;
    for (auto kind : families) {
        FamilySup fs;
        fs.family = kind;
        try {
            auto res = sweep(P, kind, opt);
            for (const auto& s : res.samples) {
                if (s.ratio > fs.sup) {
                    fs.sup = s.ratio;
                    fs.at = s.t;
                }
            }
        } catch (const DivergenceError& e) {
            fs.skipped = e.what();
        } catch (const DomainError& e) {
            fs.skipped = e.what();
        } catch (const InputError& e) {
            fs.skipped = e.what();
        } catch (const ConstructionError& e) {
            fs.skipped = e.what();
        }
        if (fs.skipped.empty() && (!any || fs.sup > out.value)) {
            out.value = fs.sup;
            out.family = kind;
            out.at = fs.at;
            any = true;
        }
        out.per_family.push_back(std::move(fs));
    }
    if (!any) throw DomainError("no family could be evaluated for this tuple");
    return out;
}

inline ConstantEstimate estimate_constant(const ParameterSet& P, const SweepOptions& opt = {}) {
    return estimate_constant(P, all_family_kinds(), opt);
}

// ==== two-gradient inequality on the unit square ====
//
// ||x1^a u||_2^2 <= C ||x1^a d1 u||_1 ||x1^a d2 u||_1 on [0,1]^2 for u vanishing
// on {x1 = 1} and {x2 = 1}, a > -1/2. Checked with cell-centred sums whose
// weights are integrated exactly per cell.

namespace square {

/// 1 on [0, lo], smoothstep down to 0 on [lo, hi].
struct Ramp {
    double lo, hi;
    double value(double t) const { return 1 - smoothstep((t - lo) / (hi - lo)); }
    double slope(double t) const { return -smoothstep_slope((t - lo) / (hi - lo)) / (hi - lo); }
};

/// Smoothstep up on [lo, mid], down on [mid, hi].
struct Hat {
    double lo, hi;
    double value(double t) const { return Bump{lo, hi}.value(t); }
    double slope(double t) const { return Bump{lo, hi}.slope(t); }
};

struct Profile1 {
    bool hat = false;
    double lo = 0, hi = 1;
    double value(double t) const { return hat ? Hat{lo, hi}.value(t) : Ramp{lo, hi}.value(t); }
    double slope(double t) const { return hat ? Hat{lo, hi}.slope(t) : Ramp{lo, hi}.slope(t); }
};

/// Profiles vanishing at 1; products of two of them are the test functions.
inline const std::vector<Profile1>& catalogue() {
    static const std::vector<Profile1> c{{false, 0, 1},      {false, 0, 0.25},   {false, 0.5, 1},
                                         {false, 0.75, 0.875}, {true, 0, 1},     {true, 0.25, 0.75}};
    return c;
}

}  // namespace square

enum class SquareChart { x, y };

struct SquareQuotient {
    double lhs = 0;      // ||x1^a u||_2^2
    double d1_norm = 0;  // ||x1^a d1 u||_1
    double d2_norm = 0;  // ||x1^a d2 u||_1
    double quotient = 0;
};

/// Quotient for u = f(x1) g(x2) on a cells x cells grid. The y chart works in
/// y1 = x1^(2a+1), where the weights become y1^(+-b) with b = a/(2a+1); the
/// continuous quotient is the same in both charts.
inline SquareQuotient square_quotient(double alpha, int cells, const square::Profile1& f, const square::Profile1& g,
                                      SquareChart chart = SquareChart::x) {
    if (!(alpha > -0.5)) throw DomainError("the two-gradient inequality needs alpha > -1/2");
    if (cells < 2) throw InputError("square grid needs at least 2 cells per side");
    const double h = 1.0 / cells;
    // exact integral of t^k over [lo, hi]
    auto moment = [](double k, double lo, double hi) {
        return (std::pow(hi, k + 1) - (lo > 0 ? std::pow(lo, k + 1) : 0.0)) / (k + 1);
    };
    double A = 2 * alpha + 1;
    double beta = alpha / A;
    // per column: weights for value^2, |d1|, |d2|, and f, f' at the centre
    std::vector<double> w0(cells), w1(cells), w2(cells), fv(cells), fs(cells);
    for (int i = 0; i < cells; ++i) {
        double lo = i * h, hi = (i + 1) * h, c = (i + 0.5) * h;
        if (chart == SquareChart::x) {
            w0[i] = moment(2 * alpha, lo, hi);
            w1[i] = w2[i] = moment(alpha, lo, hi);
            fv[i] = f.value(c);
            fs[i] = f.slope(c);
        } else {
            double x1 = std::pow(c, 1 / A);
            w0[i] = h;
            // y^b |f'(x1)| dx1/dy1 = y^(-b) |f'(x1)| / (2a+1)
            w1[i] = moment(-beta, lo, hi) / A;
            w2[i] = moment(-beta, lo, hi);
            fv[i] = f.value(x1);
            fs[i] = f.slope(x1);
        }
    }
    SquareQuotient out;
    for (int j = 0; j < cells; ++j) {
        double y = (j + 0.5) * h;
        double gv = g.value(y), gs = g.slope(y);
        for (int i = 0; i < cells; ++i) {
            out.lhs += w0[i] * h * fv[i] * fv[i] * gv * gv;
            out.d1_norm += w1[i] * h * std::abs(fs[i] * gv);
            out.d2_norm += w2[i] * h * std::abs(fv[i] * gs);
        }
    }
    if (chart == SquareChart::y) {
        // back to the x-chart normalisation: lhs and d2 carry a factor 2a+1
        out.lhs /= A;
        out.d2_norm /= A;
    }
    double den = out.d1_norm * out.d2_norm;
    if (!(den > 0)) throw DegenerateInputError("two-gradient quotient with a vanishing derivative");
    out.quotient = out.lhs / den;
    return out;
}

/// Largest quotient over all products of catalogue profiles.
inline double square_constant(double alpha, int cells, SquareChart chart = SquareChart::x) {
    const auto& cat = square::catalogue();
    double best = 0;
    for (const auto& f : cat) {
        for (const auto& g : cat) best = std::max(best, square_quotient(alpha, cells, f, g, chart).quotient);
    }
    return best;
}

}  // namespace ckn
