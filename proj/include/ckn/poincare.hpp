#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ckn/errors.hpp"

namespace ckn {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Nonnegative samples on a tensor lattice over a box, with a node subset S.
/// Values are row-major (last axis fastest).
class GridFunction {
public:
    GridFunction(std::vector<std::vector<double>> axes, std::vector<double> values, std::vector<std::uint8_t> in_subset)
        : axes_(std::move(axes)), values_(std::move(values)), in_subset_(std::move(in_subset)) {
        if (axes_.empty() || axes_.size() > 3) throw InputError("grid dimension must be 1, 2 or 3");
        std::size_t total = 1;
        for (const auto& ax : axes_) {
            if (ax.size() < 2) throw InputError("every grid axis needs at least two nodes");
            for (std::size_t i = 0; i + 1 < ax.size(); ++i) {
                if (!(ax[i] < ax[i + 1])) throw InputError("grid axis coordinates must increase strictly");
            }
            total *= ax.size();
        }
        if (values_.size() != total) throw InputError("value count does not match the grid");
        if (in_subset_.size() != total) throw InputError("subset mask size does not match the grid");
        std::size_t stride = 1;
        strides_.assign(axes_.size(), 0);
        for (std::size_t k = axes_.size(); k-- > 0;) {
            strides_[k] = stride;
            stride *= axes_[k].size();
        }
    }

    /// Zero values on `axes`; S is the sub-box where every coordinate is >= 0.
    explicit GridFunction(std::vector<std::vector<double>> axes)
        : GridFunction(axes, std::vector<double>(count_nodes(axes)), std::vector<std::uint8_t>(count_nodes(axes))) {
        select_nonnegative_orthant();
    }

    /// Uniform lattice on [lo, hi]^n with `cells` cells per axis.
    static GridFunction uniform(int n, std::size_t cells, double lo = -1.0, double hi = 1.0) {
        if (cells < 1) throw InputError("a uniform grid needs at least one cell");
        std::vector<double> ax(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) ax[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
        ax.back() = hi;
        return GridFunction(std::vector<std::vector<double>>(static_cast<std::size_t>(std::max(n, 0)), ax));
    }

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return values_.size(); }
    const std::vector<double>& axis(int k) const { return axes_.at(static_cast<std::size_t>(k)); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const std::uint8_t> subset() const { return in_subset_; }
    std::span<std::uint8_t> subset() { return in_subset_; }

    std::array<double, 3> point(std::size_t node) const {
        std::array<double, 3> x{};
        for (std::size_t k = 0; k < axes_.size(); ++k) x[k] = axes_[k][(node / strides_[k]) % axes_[k].size()];
        return x;
    }

    /// Sets every value to f(x), x holding dim() coordinates.
    void sample(const std::function<double(std::span<const double>)>& f) {
        for (std::size_t i = 0; i < size(); ++i) {
            auto x = point(i);
            values_[i] = f(std::span<const double>(x.data(), axes_.size()));
        }
    }

    void select_nonnegative_orthant() {
        for (std::size_t i = 0; i < size(); ++i) {
            auto x = point(i);
            bool inside = true;
            for (int k = 0; k < dim(); ++k) inside = inside && x[static_cast<std::size_t>(k)] >= 0.0;
            in_subset_[i] = inside ? 1 : 0;
        }
    }

    void select_all() { std::fill(in_subset_.begin(), in_subset_.end(), std::uint8_t{1}); }

    /// Product trapezoid weights.
    std::vector<double> node_weights() const {
        std::vector<std::vector<double>> per_axis;
        for (const auto& ax : axes_) {
            std::vector<double> w(ax.size());
            for (std::size_t i = 0; i < ax.size(); ++i) {
                double left = i > 0 ? ax[i] - ax[i - 1] : 0.0;
                double right = i + 1 < ax.size() ? ax[i + 1] - ax[i] : 0.0;
                w[i] = 0.5 * (left + right);
            }
            per_axis.push_back(std::move(w));
        }
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            double w = 1.0;
            for (std::size_t k = 0; k < axes_.size(); ++k) w *= per_axis[k][(i / strides_[k]) % axes_[k].size()];
            out[i] = w;
        }
        return out;
    }

    double volume() const {
        double v = 1.0;
        for (const auto& ax : axes_) v *= ax.back() - ax.front();
        return v;
    }

    /// Euclidean length of the forward-difference gradient (backward at the last node of an axis).
    std::vector<double> gradient_magnitude() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            double sq = 0.0;
            for (std::size_t k = 0; k < axes_.size(); ++k) {
                const auto& ax = axes_[k];
                std::size_t j = (i / strides_[k]) % ax.size();
                double d = j + 1 < ax.size() ? (values_[i + strides_[k]] - values_[i]) / (ax[j + 1] - ax[j])
                                             : (values_[i] - values_[i - strides_[k]]) / (ax[j] - ax[j - 1]);
                sq += d * d;
            }
            out[i] = std::sqrt(sq);
        }
        return out;
    }

    /// Throws InputError unless values are finite and nonnegative and S is nonempty.
    void validate() const {
        for (double v : values_) {
            if (!std::isfinite(v) || v < 0.0) throw InputError("grid values must be finite and nonnegative");
        }
        if (std::none_of(in_subset_.begin(), in_subset_.end(), [](std::uint8_t b) { return b != 0; })) {
            throw InputError("subset S is empty");
        }
    }

private:
    static std::size_t count_nodes(const std::vector<std::vector<double>>& axes) {
        std::size_t total = 1;
        for (const auto& ax : axes) total *= ax.size();
        return total;
    }

    std::vector<std::vector<double>> axes_;
    std::vector<double> values_;
    std::vector<std::uint8_t> in_subset_;
    std::vector<std::size_t> strides_;
};

/// Norms are p-th roots of the integrals (quasi-norms for p < 1). For p = infinity
/// the integral fields repeat the max norms.
struct PoincareResult {
    double power_mean = 0.0;
    double deviation_norm = 0.0;
    double gradient_norm = 0.0;
    double ratio = 0.0;
    double deviation_integral = 0.0;
    double gradient_integral = 0.0;
    double integral_ratio = 0.0;
    bool subunit_p = false;
};

namespace detail {

inline void check_exponent(double p) {
    if (!(p > 0.0)) throw DomainError("exponent p must be positive or infinity");
}

inline double safe_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den == 0.0) return kInfinity;
    return num / den;
}

/// (sum wt f^e / sum wt)^(1/e) over entries with keep[i] != 0 (all when keep is empty), e > 0.
/// Values are scaled by their maximum first, so a constant input returns itself exactly.
inline double scaled_power_mean(std::span<const double> vals, std::span<const double> weights,
                                std::span<const std::uint8_t> keep, double e) {
    double top = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (keep.empty() || keep[i]) top = std::max(top, vals[i]);
    }
    if (top == 0.0) return 0.0;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!keep.empty() && !keep[i]) continue;
        num += weights[i] * std::pow(vals[i] / top, e);
        den += weights[i];
    }
    return top * std::pow(num / den, 1.0 / e);
}

inline double subset_power_mean(const GridFunction& w, std::span<const double> weights, double e) {
    return scaled_power_mean(w.values(), weights, w.subset(), e);
}

inline double integral_of_power(std::span<const double> f, std::span<const double> weights, double p) {
    double acc = 0.0;
    if (std::isinf(p)) {
        for (double v : f) acc = std::max(acc, std::abs(v));
        return acc;
    }
    for (std::size_t i = 0; i < f.size(); ++i) acc += weights[i] * std::pow(std::abs(f[i]), p);
    return acc;
}

inline double root(double integral, double p) { return std::isinf(p) ? integral : std::pow(integral, 1.0 / p); }

}  // namespace detail

/// (avg_S w^(1/lambda))^lambda with trapezoid weights.
inline double power_mean(const GridFunction& w, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
    w.validate();
    auto weights = w.node_weights();
    return detail::subset_power_mean(w, weights, 1.0 / lambda);
}

/// Deviation of w from its lambda-power mean over S against the discrete gradient, both in L^p(grid).
inline PoincareResult grid_poincare_ratio(const GridFunction& w, double lambda, double p) {
    detail::check_exponent(p);
    PoincareResult r;
    r.power_mean = power_mean(w, lambda);
    r.subunit_p = p < 1.0;
    auto weights = w.node_weights();
    std::vector<double> dev(w.values().begin(), w.values().end());
    for (double& v : dev) v -= r.power_mean;
    auto grad = w.gradient_magnitude();
    r.deviation_integral = detail::integral_of_power(dev, weights, p);
    r.gradient_integral = detail::integral_of_power(grad, weights, p);
    r.deviation_norm = detail::root(r.deviation_integral, p);
    r.gradient_norm = detail::root(r.gradient_integral, p);
    r.ratio = detail::safe_ratio(r.deviation_norm, r.gradient_norm);
    r.integral_ratio = detail::safe_ratio(r.deviation_integral, r.gradient_integral);
    return r;
}

// ==== counterexamples ====

struct SpikeGridOptions {
    int cells_per_radius = 16;  ///< uniform cells across [0, eps] on each axis
    double growth = 1.15;       ///< geometric cell growth from eps out to 1
};

struct SpikeConstruction {
    GridFunction w;  ///< v + 1 = amplitude * (1 - |x|/eps)_+
    double amplitude = 0.0;
    double scaled_amplitude = 0.0;     ///< amplitude * eps^(n lambda)
    double continuum_amplitude = 0.0;  ///< eps -> 0 limit of scaled_amplitude for S = [0,1]^n
};

namespace detail {

/// Symmetric axis on [-1, 1]: uniform step h out to `fine`, then cells growing by `growth`.
inline std::vector<double> graded_axis(double h, double fine, double growth) {
    std::vector<double> half{0.0};
    double x = 0.0;
    while (x + h < fine - 1e-12 * fine) {
        x += h;
        half.push_back(x);
    }
    double step = h;
    while (x < 1.0) {
        step = std::max(step * growth, h);
        if (x + step >= 1.0 || 1.0 - (x + step) < 0.5 * step * growth) {
            x = 1.0;
        } else {
            x += step;
        }
        half.push_back(x);
    }
    std::vector<double> axis;
    for (std::size_t i = half.size(); i-- > 1;) axis.push_back(-half[i]);
    axis.insert(axis.end(), half.begin(), half.end());
    return axis;
}

inline double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        default: return 4.0 * std::numbers::pi;
    }
}

}  // namespace detail

/// Radial spike of radius eps at the origin of [-1, 1]^n, normalised so that
/// the grid mean over S = [0,1]^n of w^(1/lambda) is 1. The amplitude is solved
/// in closed form (the constraint is homogeneous in it).
inline SpikeConstruction spike_counterexample(int n, double lambda, double p, double eps,
                                              SpikeGridOptions opt = {}) {
    if (n < 1 || n > 3) throw InputError("spike construction supports n = 1, 2, 3");
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("spike regime needs 0 < lambda < 1");
    double threshold = n / (1.0 + n * lambda);
    if (!(p > 0.0 && p < threshold)) {
        throw DomainError("spike regime needs 0 < p < n/(1+n lambda) = " + std::to_string(threshold));
    }
    if (!(eps > 0.0) || eps > 1.0) throw ConstructionError("spike radius must lie in (0, 1] so the ball fits in the box");
    if (opt.cells_per_radius < 2 || !(opt.growth >= 1.0)) throw InputError("invalid spike grid options");

    auto axis = detail::graded_axis(eps / opt.cells_per_radius, eps, opt.growth);
    GridFunction w(std::vector<std::vector<double>>(static_cast<std::size_t>(n), axis));
    w.sample([&](std::span<const double> x) {
        double r = 0.0;
        for (double c : x) r += c * c;
        return std::max(0.0, 1.0 - std::sqrt(r) / eps);
    });

    auto weights = w.node_weights();
    double profile_mean = detail::subset_power_mean(w, weights, 1.0 / lambda);
    if (!(profile_mean > 0.0)) throw ConstructionError("spike is not resolved on S; refine the grid");

    SpikeConstruction out{std::move(w)};
    out.amplitude = 1.0 / profile_mean;
    for (double& v : out.w.values()) v *= out.amplitude;
    out.scaled_amplitude = out.amplitude * std::pow(eps, n * lambda);
    double k = 1.0 / lambda;
    double octant_integral = detail::sphere_area(n) * std::beta(static_cast<double>(n), k + 1.0) / std::ldexp(1.0, n);
    out.continuum_amplitude = std::pow(1.0 / octant_integral, lambda);
    if (!(out.scaled_amplitude < 2.0 * out.continuum_amplitude && out.scaled_amplitude > 0.5 * out.continuum_amplitude)) {
        throw ConstructionError("spike amplitude departs from its eps^(-n lambda) scaling; refine the grid");
    }
    return out;
}

struct FlatGridOptions {
    int n = 1;
    double min_step = 1e-10;   ///< first cell next to x1 = 0
    double growth = 1.02;      ///< cell growth away from x1 = 0
    std::size_t other_cells = 4;  ///< uniform cells on the remaining axes
};

/// w = (2 + f(x1))^lambda with f = |x1|^e for x1 < 0 and -|x1|^e otherwise, on
/// [-1, 1]^n with S the whole box. The x1 axis is graded toward 0.
inline GridFunction flat_counterexample(double lambda, double p, double exponent, FlatGridOptions opt = {}) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("flat regime needs 0 < p < 1");
    if (!(exponent > 0.0 && exponent < 1.0)) throw DomainError("flat exponent must lie in (0, 1)");
    if (opt.n < 1 || opt.n > 3 || opt.other_cells < 1) throw InputError("invalid flat grid options");

    std::vector<std::vector<double>> axes;
    axes.push_back(detail::graded_axis(opt.min_step, opt.min_step, opt.growth));
    std::vector<double> other(opt.other_cells + 1);
    for (std::size_t i = 0; i <= opt.other_cells; ++i) {
        other[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(opt.other_cells);
    }
    for (int k = 1; k < opt.n; ++k) axes.push_back(other);
    GridFunction w(std::move(axes));
    w.select_all();
    w.sample([&](std::span<const double> x) {
        double mag = std::pow(std::abs(x[0]), exponent);
        double f = x[0] < 0.0 ? mag : -mag;
        if (x[0] == 0.0) f = 0.0;
        return std::pow(2.0 + f, lambda);
    });
    return w;
}

/// Deviation integral of the flat family in the limit exponent -> 0 (n = 1):
/// |3^lambda - 2^lambda|^p + |1 - 2^lambda|^p.
inline double flat_deviation_limit(double lambda, double p) {
    double m = std::pow(2.0, lambda);
    return std::pow(std::abs(std::pow(3.0, lambda) - m), p) + std::pow(std::abs(1.0 - m), p);
}

// ==== corollary ====

struct CorollaryReport {
    double lhs = 0.0;            ///< ||w||_p
    double mean_term = 0.0;      ///< (avg_S w^q)^(1/q) |Omega|^(1/p)
    double gradient_term = 0.0;  ///< C ||grad w||_p
    double constant = 0.0;
    bool holds = false;
};

/// Power-mean exponent whose Poincare constant controls the corollary for this q
/// (q > 1 goes through q = 1 by Jensen).
inline double corollary_lambda(double q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
    return q <= 1.0 ? 1.0 / q : 1.0;
}

inline CorollaryReport corollary_bound(const GridFunction& w, double p, double q, double constant) {
    if (!(p >= 1.0)) throw DomainError("corollary needs p >= 1 or infinity");
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("q must be positive and finite");
    if (!(constant >= 0.0)) throw DomainError("constant must be nonnegative");
    w.validate();
    auto weights = w.node_weights();
    CorollaryReport r;
    r.constant = constant;
    r.lhs = detail::root(detail::integral_of_power(w.values(), weights, p), p);
    double omega = std::isinf(p) ? 1.0 : std::pow(w.volume(), 1.0 / p);
    r.mean_term = detail::subset_power_mean(w, weights, q) * omega;
    auto grad = w.gradient_magnitude();
    r.gradient_term = constant * detail::root(detail::integral_of_power(grad, weights, p), p);
    r.holds = r.lhs <= (r.mean_term + r.gradient_term) * (1.0 + 1e-12);  // summation roundoff
    return r;
}

/// Largest Poincare ratio over a corpus.
inline double calibrate_constant(std::span<const GridFunction> corpus, double lambda, double p) {
    double c = 0.0;
    for (const auto& w : corpus) c = std::max(c, grid_poincare_ratio(w, lambda, p).ratio);
    return c;
}

// ==== spherical averages ====

/// Samples on a polar grid of a ball: radii x angular nodes. For n = 2 the angles
/// are uniform in [0, 2 pi); for n = 3 polar angles are midpoints in (0, pi) and
/// azimuths uniform, weighted by sin(theta).
class PolarGrid {
public:
    PolarGrid(int n, std::vector<double> radii, std::size_t azimuth_count, std::size_t polar_count = 0)
        : n_(n), radii_(std::move(radii)), azimuth_count_(azimuth_count), polar_count_(n == 3 ? polar_count : 1) {
        if (n != 2 && n != 3) throw InputError("polar grids support n = 2 and n = 3");
        if (radii_.empty()) throw InputError("polar grid needs at least one radius");
        for (std::size_t i = 0; i < radii_.size(); ++i) {
            if (!(radii_[i] >= 0.0) || (i > 0 && !(radii_[i] > radii_[i - 1]))) {
                throw InputError("radii must be nonnegative and increasing");
            }
        }
        if (azimuth_count_ < 3 || polar_count_ < 1 || (n == 3 && polar_count < 2)) {
            throw InputError("too few angular nodes");
        }
        for (std::size_t i = 0; i < polar_count_; ++i) {
            for (std::size_t j = 0; j < azimuth_count_; ++j) {
                double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(azimuth_count_);
                if (n_ == 2) {
                    directions_.push_back({std::cos(phi), std::sin(phi), 0.0});
                    weights_.push_back(1.0);
                } else {
                    double theta = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(polar_count_);
                    directions_.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
                    weights_.push_back(std::sin(theta));
                }
            }
        }
        double total = 0.0;
        for (double w : weights_) total += w;
        for (double& w : weights_) w /= total;
        values_.assign(radii_.size() * directions_.size(), 0.0);
    }

    int dim() const { return n_; }
    const std::vector<double>& radii() const { return radii_; }
    std::size_t angular_count() const { return directions_.size(); }
    /// Unit vector of angular node j (third component 0 when n = 2).
    const std::array<double, 3>& direction(std::size_t j) const { return directions_.at(j); }
    /// Normalised spherical quadrature weights (sum 1).
    std::span<const double> angular_weights() const { return weights_; }
    double& at(std::size_t ring, std::size_t j) { return values_.at(ring * directions_.size() + j); }
    double at(std::size_t ring, std::size_t j) const { return values_.at(ring * directions_.size() + j); }
    std::span<const double> values() const { return values_; }

    /// Sets every value to f(r, omega).
    void sample(const std::function<double(double, const std::array<double, 3>&)>& f) {
        for (std::size_t k = 0; k < radii_.size(); ++k) {
            for (std::size_t j = 0; j < directions_.size(); ++j) at(k, j) = f(radii_[k], directions_[j]);
        }
    }

    /// Weighted mean of g(value) over ring k.
    double ring_mean(std::size_t ring, const std::function<double(double)>& g = [](double v) { return v; }) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < directions_.size(); ++j) acc += weights_[j] * g(at(ring, j));
        return acc;
    }

private:
    int n_;
    std::vector<double> radii_;
    std::size_t azimuth_count_;
    std::size_t polar_count_;
    std::vector<std::array<double, 3>> directions_;
    std::vector<double> weights_;
    std::vector<double> values_;
};

/// v = w - (mean over the sphere of radius |x| of w^(1/lambda))^lambda, ring by ring.
inline PolarGrid spherical_average_deviation(const PolarGrid& w, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
    for (double v : w.values()) {
        if (!std::isfinite(v) || v < 0.0) throw InputError("grid values must be finite and nonnegative");
    }
    PolarGrid v = w;
    double e = 1.0 / lambda;
    for (std::size_t k = 0; k < w.radii().size(); ++k) {
        auto ring = w.values().subspan(k * w.angular_count(), w.angular_count());
        double mean = detail::scaled_power_mean(ring, w.angular_weights(), {}, e);
        for (std::size_t j = 0; j < w.angular_count(); ++j) v.at(k, j) = w.at(k, j) - mean;
    }
    return v;
}

// ==== corpus ====

/// exp of a few nonconstant low cosine modes on [-1, 1]^n; strictly positive and smooth.
struct SmoothPositive {
    struct Mode {
        std::array<int, 3> wave{};
        double amplitude = 0.0;
        double phase = 0.0;
    };
    int n = 1;
    std::vector<Mode> modes;

    double operator()(std::span<const double> x) const {
        double s = 0.0;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (std::size_t k = 0; k < x.size(); ++k) arg += std::numbers::pi * m.wave[k] * x[k] / 2.0;
            s += m.amplitude * std::cos(arg);
        }
        return std::exp(s);
    }
};

/// Seeded corpus. Draws use raw mt19937_64 output so the sequence is the same on every standard library.
inline std::vector<SmoothPositive> smooth_positive_corpus(int n, std::size_t count, std::uint64_t seed,
                                                          std::size_t modes = 4) {
    if (n < 1 || n > 3) throw InputError("corpus dimension must be 1, 2 or 3");
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<SmoothPositive> out;
    for (std::size_t c = 0; c < count; ++c) {
        SmoothPositive f;
        f.n = n;
        for (std::size_t m = 0; m < modes; ++m) {
            SmoothPositive::Mode mode;
            do {
                for (int k = 0; k < n; ++k) mode.wave[static_cast<std::size_t>(k)] = static_cast<int>(rng() % 4);
            } while (mode.wave == std::array<int, 3>{});
            mode.amplitude = unit() - 0.5;
            mode.phase = 2.0 * std::numbers::pi * unit();
            f.modes.push_back(mode);
        }
        out.push_back(std::move(f));
    }
    return out;
}

// ==== serialisation ====

/// CSV with header x1[,x2[,x3]],value,in_s; one row per node in storage order.
inline void write_csv(std::ostream& os, const GridFunction& w) {
    for (int k = 0; k < w.dim(); ++k) os << 'x' << (k + 1) << ',';
    os << "value,in_s\n";
    auto old = os.precision(17);
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto x = w.point(i);
        for (int k = 0; k < w.dim(); ++k) os << x[static_cast<std::size_t>(k)] << ',';
        os << w.values()[i] << ',' << static_cast<int>(w.subset()[i]) << '\n';
    }
    os.precision(old);
}

inline GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InputError("empty grid CSV");
    int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 1;
    if (n < 1 || n > 3) throw InputError("grid CSV header must be x1[,x2[,x3]],value,in_s");
    std::vector<std::array<double, 5>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::array<double, 5> row{};
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col > n + 1) throw InputError("too many columns in grid CSV row");
            try {
                std::size_t used = 0;
                row[static_cast<std::size_t>(col)] = std::stod(cell, &used);
                if (used != cell.size()) throw InputError("bad number '" + cell + "' in grid CSV");
            } catch (const std::logic_error&) {
                throw InputError("bad number '" + cell + "' in grid CSV");
            }
            ++col;
        }
        if (col != n + 2) throw InputError("wrong column count in grid CSV row");
        rows.push_back(row);
    }
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        auto& ax = axes[static_cast<std::size_t>(k)];
        for (const auto& r : rows) ax.push_back(r[static_cast<std::size_t>(k)]);
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    }
    std::size_t total = 1;
    for (const auto& ax : axes) total *= ax.size();
    if (rows.size() != total) throw InputError("grid CSV rows do not form a full tensor lattice");
    std::vector<double> values(total);
    std::vector<std::uint8_t> mask(total);
    std::vector<std::uint8_t> seen(total);
    for (const auto& r : rows) {
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) {
            const auto& ax = axes[static_cast<std::size_t>(k)];
            auto pos = static_cast<std::size_t>(std::lower_bound(ax.begin(), ax.end(), r[static_cast<std::size_t>(k)]) - ax.begin());
            idx = idx * ax.size() + pos;
        }
        if (seen[idx]) throw InputError("duplicate node in grid CSV");
        seen[idx] = 1;
        values[idx] = r[static_cast<std::size_t>(n)];
        double flag = r[static_cast<std::size_t>(n + 1)];
        if (flag != 0.0 && flag != 1.0) throw InputError("in_s must be 0 or 1");
        mask[idx] = flag != 0.0 ? 1 : 0;
    }
    return GridFunction(std::move(axes), std::move(values), std::move(mask));
}

namespace detail {

inline constexpr char kGridMagic[8] = {'C', 'K', 'N', 'G', 'R', 'I', 'D', '1'};

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

inline std::uint64_t get_u(std::istream& is, int bytes) {
    unsigned char b[8] = {};
    if (!is.read(reinterpret_cast<char*>(b), bytes)) throw InputError("truncated grid file");
    std::uint64_t v = 0;
    for (int i = bytes; i-- > 0;) v = (v << 8) | b[i];
    return v;
}

inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u(is, 8)); }

}  // namespace detail

/// Binary layout, little-endian: "CKNGRID1", uint32 n, uint32 node count per
/// axis, float64 axis coordinates axis by axis, float64 values, uint8 S mask.
inline void write_binary(std::ostream& os, const GridFunction& w) {
    os.write(detail::kGridMagic, 8);
    detail::put_u32(os, static_cast<std::uint32_t>(w.dim()));
    for (int k = 0; k < w.dim(); ++k) detail::put_u32(os, static_cast<std::uint32_t>(w.axis(k).size()));
    for (int k = 0; k < w.dim(); ++k) {
        for (double x : w.axis(k)) detail::put_u64(os, std::bit_cast<std::uint64_t>(x));
    }
    for (double v : w.values()) detail::put_u64(os, std::bit_cast<std::uint64_t>(v));
    os.write(reinterpret_cast<const char*>(w.subset().data()), static_cast<std::streamsize>(w.size()));
}

inline GridFunction read_binary(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, detail::kGridMagic, 8) != 0) throw InputError("not a CKNGRID1 file");
    auto n = detail::get_u(is, 4);
    if (n < 1 || n > 3) throw InputError("grid file dimension must be 1, 2 or 3");
    std::vector<std::size_t> counts(n);
    std::size_t total = 1;
    for (auto& c : counts) {
        c = detail::get_u(is, 4);
        if (c < 2 || c > (1u << 24)) throw InputError("implausible axis length in grid file");
        total *= c;
        if (total > (std::size_t{1} << 32)) throw InputError("grid file too large");
    }
    std::vector<std::vector<double>> axes(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < counts[k]; ++i) axes[k].push_back(detail::get_f64(is));
    }
    std::vector<double> values(total);
    for (auto& v : values) v = detail::get_f64(is);
    std::vector<std::uint8_t> mask(total);
    if (!is.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(total))) {
        throw InputError("truncated grid file");
    }
    for (auto& b : mask) {
        if (b > 1) throw InputError("S mask bytes must be 0 or 1");
    }
    return GridFunction(std::move(axes), std::move(values), std::move(mask));
}

}  // namespace ckn
