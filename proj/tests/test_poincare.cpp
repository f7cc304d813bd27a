#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ckn/poincare.hpp"

using namespace ckn;

namespace {

GridFunction sampled(int n, std::size_t cells, const SmoothPositive& f) {
    auto g = GridFunction::uniform(n, cells);
    g.sample(f);
    return g;
}

double log_slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

}  // namespace

TEST(Grid, WeightsSumToVolume) {
    auto g = GridFunction::uniform(2, 10);
    double total = 0.0;
    for (double w : g.node_weights()) total += w;
    EXPECT_NEAR(total, 4.0, 1e-13);
    EXPECT_DOUBLE_EQ(g.volume(), 4.0);
}

TEST(Grid, DefaultSubsetIsNonnegativeOrthant) {
    auto g = GridFunction::uniform(2, 4);
    std::size_t count = 0;
    for (auto b : g.subset()) count += b;
    EXPECT_EQ(count, 9u);
}

TEST(Grid, ShapeErrors) {
    EXPECT_THROW(GridFunction::uniform(4, 4), InputError);
    EXPECT_THROW(GridFunction({{0.0, 1.0}}, {1.0}, {1, 1}), InputError);
    EXPECT_THROW(GridFunction({{0.0, 0.0}}, {1.0, 1.0}, {1, 1}), InputError);
}

TEST(Ratio, ConstantHasZeroDeviation) {
    auto g = GridFunction::uniform(2, 8);
    for (double& v : g.values()) v = 3.7;
    for (double lambda : {0.25, 1.0 / 3.0, 1.0, 2.0, 7.0}) {
        for (double p : {0.5, 1.0, 2.0, kInfinity}) {
            auto r = grid_poincare_ratio(g, lambda, p);
            EXPECT_EQ(r.deviation_norm, 0.0);
            EXPECT_EQ(r.gradient_norm, 0.0);
            EXPECT_EQ(r.ratio, 0.0);
            EXPECT_DOUBLE_EQ(r.power_mean, 3.7);
        }
    }
}

TEST(Ratio, AffineClosedForm) {
    for (std::size_t cells : {64u, 256u}) {
        double h = 2.0 / static_cast<double>(cells);
        auto g = GridFunction::uniform(1, cells);
        g.select_all();
        g.sample([](std::span<const double> x) { return x[0] + 2.0; });
        for (double p : {1.0, 2.0, 3.0}) {
            auto r = grid_poincare_ratio(g, 1.0, p);
            EXPECT_NEAR(r.power_mean, 2.0, 1e-12);
            double dev = std::pow(2.0 / (p + 1.0), 1.0 / p);
            double grad = std::pow(2.0, 1.0 / p);
            EXPECT_LE(std::abs(r.deviation_norm / dev - 1.0), h);
            EXPECT_LE(std::abs(r.gradient_norm / grad - 1.0), h);
            EXPECT_LE(std::abs(r.ratio / (dev / grad) - 1.0), h);
        }
        auto r = grid_poincare_ratio(g, 1.0, kInfinity);
        EXPECT_NEAR(r.deviation_norm, 1.0, 1e-12);
        EXPECT_NEAR(r.gradient_norm, 1.0, 1e-12);
    }
}

TEST(Ratio, ClassicalMeanDeviation) {
    auto corpus = smooth_positive_corpus(2, 5, 11);
    for (const auto& f : corpus) {
        auto g = sampled(2, 40, f);
        // independent trapezoid mean over [0,1]^2 and L^2 deviation over the box
        const std::size_t m = 41;
        auto wt = [&](std::size_t i) { return (i == 0 || i == m - 1) ? 0.025 : 0.05; };
        double num = 0.0, den = 0.0;
        for (std::size_t i = 20; i < m; ++i) {
            for (std::size_t j = 20; j < m; ++j) {
                double w1 = (i == 20 ? 0.05 : wt(i)) * (j == 20 ? 0.05 : wt(j));
                num += w1 * g.values()[i * m + j];
                den += w1;
            }
        }
        double mean = num / den;
        double dev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) dev += wt(i) * wt(j) * std::pow(g.values()[i * m + j] - mean, 2);
        }
        auto r = grid_poincare_ratio(g, 1.0, 2.0);
        EXPECT_NEAR(r.power_mean, mean, 1e-10 * mean);
        EXPECT_NEAR(r.deviation_norm, std::sqrt(dev), 1e-10 * std::sqrt(dev));
    }
}

TEST(Ratio, DeviationIsHomogeneous) {
    auto corpus = smooth_positive_corpus(2, 4, 5);
    for (const auto& f : corpus) {
        auto g = sampled(2, 24, f);
        auto h = g;
        for (double& v : h.values()) v *= 3.25;
        for (double lambda : {0.25, 0.5, 2.0}) {
            for (double p : {1.0, 2.0, kInfinity}) {
                double a = grid_poincare_ratio(g, lambda, p).deviation_norm;
                double b = grid_poincare_ratio(h, lambda, p).deviation_norm;
                EXPECT_NEAR(b, 3.25 * a, 1e-10 * b);
            }
        }
    }
}

TEST(Ratio, RefinementStable) {
    auto corpus = smooth_positive_corpus(2, 10, 99);
    for (const auto& f : corpus) {
        double coarse = grid_poincare_ratio(sampled(2, 32, f), 2.0, 2.0).ratio;
        double fine = grid_poincare_ratio(sampled(2, 64, f), 2.0, 2.0).ratio;
        EXPECT_LT(std::abs(fine / coarse - 1.0), 0.05);
    }
}

TEST(Ratio, SubunitFlag) {
    auto g = sampled(1, 16, smooth_positive_corpus(1, 1, 1)[0]);
    EXPECT_TRUE(grid_poincare_ratio(g, 1.0, 0.5).subunit_p);
    EXPECT_FALSE(grid_poincare_ratio(g, 1.0, 1.0).subunit_p);
}

TEST(Ratio, InputErrors) {
    auto g = GridFunction::uniform(1, 4);
    for (double& v : g.values()) v = 1.0;
    EXPECT_THROW(grid_poincare_ratio(g, 0.0, 2.0), DomainError);
    EXPECT_THROW(grid_poincare_ratio(g, 1.0, 0.0), DomainError);
    auto empty = g;
    for (auto& b : empty.subset()) b = 0;
    EXPECT_THROW(grid_poincare_ratio(empty, 1.0, 2.0), InputError);
    auto negative = g;
    negative.values()[1] = -1.0;
    EXPECT_THROW(grid_poincare_ratio(negative, 1.0, 2.0), InputError);
}

TEST(Spike, Normalisation) {
    for (double eps : {0.25, 0.0625}) {
        auto s = spike_counterexample(3, 0.25, 1.2, eps);
        EXPECT_NEAR(power_mean(s.w, 0.25), 1.0, 1e-8);
        EXPECT_NEAR(grid_poincare_ratio(s.w, 0.25, 1.2).power_mean, 1.0, 1e-8);
    }
}

TEST(Spike, AmplitudeScaling) {
    // closed-form continuum constant for S = [0,1]^3, lambda = 1/4: (210/pi)^(1/4)
    auto s = spike_counterexample(3, 0.25, 1.2, 0.125);
    EXPECT_NEAR(s.continuum_amplitude, std::pow(210.0 / std::numbers::pi, 0.25), 1e-12);
    EXPECT_LT(std::abs(s.scaled_amplitude / s.continuum_amplitude - 1.0), 0.1);
    double prev_err = 1.0;
    for (int cells : {8, 16, 32}) {
        auto t = spike_counterexample(3, 0.25, 1.2, 0.125, {cells, 1.15});
        double err = std::abs(t.scaled_amplitude / t.continuum_amplitude - 1.0);
        EXPECT_LT(err, 0.7 * prev_err);
        prev_err = err;
    }
    double a = spike_counterexample(3, 0.25, 1.2, 0.25).scaled_amplitude;
    double b = spike_counterexample(3, 0.25, 1.2, 1.0 / 64).scaled_amplitude;
    EXPECT_LT(std::abs(b / a - 1.0), 0.01);
}

TEST(Spike, RatioBlowsUp) {
    double lambda = 0.25, p = 1.2;
    std::vector<PoincareResult> rs;
    for (int k = 2; k <= 6; ++k) {
        auto s = spike_counterexample(3, lambda, p, std::ldexp(1.0, -k));
        rs.push_back(grid_poincare_ratio(s.w, lambda, p));
    }
    for (std::size_t i = 1; i < rs.size(); ++i) {
        EXPECT_GT(rs[i].ratio, rs[i - 1].ratio);
        EXPECT_GT(rs[i].integral_ratio, rs[i - 1].integral_ratio);
        EXPECT_GE(rs[i].deviation_integral, 8.0);
    }
    // gradient integral ~ eps^(n - (1 + n lambda) p) = eps^0.9
    double slope = log_slope(0.25, rs.front().gradient_integral, 1.0 / 64, rs.back().gradient_integral);
    EXPECT_NEAR(slope, 0.9, 0.05);
    EXPECT_GE(rs.back().integral_ratio / rs.front().integral_ratio, 10.0);
}

TEST(Spike, Guards) {
    EXPECT_THROW(spike_counterexample(3, 0.999, 0.76, 0.25), DomainError);
    EXPECT_THROW(spike_counterexample(3, 1.0, 0.5, 0.25), DomainError);
    EXPECT_THROW(spike_counterexample(3, 0.25, 1.75, 0.25), DomainError);
    EXPECT_THROW(spike_counterexample(3, 0.25, 1.2, 1.5), ConstructionError);
    EXPECT_THROW(spike_counterexample(4, 0.25, 1.2, 0.25), InputError);
}

TEST(Flat, MatchesContinuumOracle) {
    // mpmath values of the gradient integral over [-1,1], lambda = 2, p = 1/2
    const std::pair<int, double> oracle[] = {
        {2, 3.1410921464025443}, {4, 1.8311962557388914}, {5, 1.330062968352745}, {8, 0.48136795203341326}};
    for (auto [k, value] : oracle) {
        auto w = flat_counterexample(2.0, 0.5, std::ldexp(1.0, -k));
        EXPECT_NEAR(grid_poincare_ratio(w, 2.0, 0.5).gradient_integral / value, 1.0, 2e-3);
    }
}

TEST(Flat, GradientSlopeApproachesP) {
    auto grad = [](double lambda, int k) {
        return grid_poincare_ratio(flat_counterexample(lambda, 0.5, std::ldexp(1.0, -k)), lambda, 0.5).gradient_integral;
    };
    for (double lambda : {2.0, 1.0}) {
        EXPECT_NEAR(log_slope(1.0 / 32, grad(lambda, 5), 1.0 / 256, grad(lambda, 8)), 0.5, 0.1);
        // on alpha in {1/4, 1/16} the continuum slope is still 0.389 (lambda = 2) and 0.383 (lambda = 1)
        double wide = log_slope(0.25, grad(lambda, 2), 1.0 / 16, grad(lambda, 4));
        EXPECT_NEAR(wide, lambda == 2.0 ? 0.38924 : 0.38277, 5e-3);
    }
}

TEST(Flat, DeviationBoundedBelow) {
    for (double lambda : {2.0, 1.0}) {
        double limit = flat_deviation_limit(lambda, 0.5);
        double prev = 0.0;
        for (int k = 2; k <= 8; ++k) {
            auto r = grid_poincare_ratio(flat_counterexample(lambda, 0.5, std::ldexp(1.0, -k)), lambda, 0.5);
            EXPECT_NEAR(r.power_mean, std::pow(2.0, lambda), 1e-12);
            EXPECT_GE(r.deviation_integral, 0.85 * limit);
            EXPECT_GT(r.integral_ratio, prev);
            prev = r.integral_ratio;
        }
    }
}

TEST(Flat, HigherDimensionScalesByCrossSection) {
    auto one = grid_poincare_ratio(flat_counterexample(2.0, 0.5, 0.125), 2.0, 0.5);
    FlatGridOptions opt;
    opt.n = 2;
    auto two = grid_poincare_ratio(flat_counterexample(2.0, 0.5, 0.125, opt), 2.0, 0.5);
    EXPECT_NEAR(two.deviation_integral, 2.0 * one.deviation_integral, 1e-9);
    EXPECT_NEAR(two.gradient_integral, 2.0 * one.gradient_integral, 1e-9);
}

TEST(Flat, Guards) {
    EXPECT_THROW(flat_counterexample(2.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(flat_counterexample(2.0, 0.5, 0.0), DomainError);
    EXPECT_THROW(flat_counterexample(-1.0, 0.5, 0.1), DomainError);
}

TEST(Corollary, ConstantIsEquality) {
    auto g = GridFunction::uniform(2, 8);
    for (double& v : g.values()) v = 1.5;
    for (double p : {1.0, 2.0, kInfinity}) {
        for (double q : {0.5, 1.0, 3.0}) {
            auto r = corollary_bound(g, p, q, 0.0);
            EXPECT_TRUE(r.holds);
            EXPECT_NEAR(r.lhs, r.mean_term, 1e-12 * r.lhs);
            EXPECT_EQ(r.gradient_term, 0.0);
        }
    }
}

TEST(Corollary, HolderReduction) {
    auto corpus = smooth_positive_corpus(2, 8, 21);
    std::vector<GridFunction> grids;
    for (const auto& f : corpus) grids.push_back(sampled(2, 32, f));
    double c1 = calibrate_constant(grids, corollary_lambda(1.0), 2.0);
    for (const auto& g : grids) {
        for (double q : {1.5, 2.0, 4.0}) {
            auto hi = corollary_bound(g, 2.0, q, c1);
            auto one = corollary_bound(g, 2.0, 1.0, c1);
            EXPECT_GE(hi.mean_term, one.mean_term);
            EXPECT_TRUE(one.holds);
            EXPECT_TRUE(hi.holds);
        }
    }
}

TEST(Corollary, CalibratedConstantSurvivesRefinement) {
    auto corpus = smooth_positive_corpus(2, 12, 77);
    for (double q : {0.5, 1.0, 2.0}) {
        double lambda = corollary_lambda(q);
        std::vector<GridFunction> coarse;
        for (const auto& f : corpus) coarse.push_back(sampled(2, 32, f));
        double c = 1.1 * calibrate_constant(coarse, lambda, 2.0);
        for (std::size_t cells : {64u, 128u}) {
            for (const auto& f : corpus) {
                auto r = corollary_bound(sampled(2, cells, f), 2.0, q, c);
                EXPECT_TRUE(r.holds) << "q=" << q << " cells=" << cells;
            }
        }
    }
}

TEST(Corollary, Guards) {
    auto g = GridFunction::uniform(1, 4);
    EXPECT_THROW(corollary_bound(g, 0.5, 1.0, 1.0), DomainError);
    EXPECT_THROW(corollary_bound(g, 2.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(corollary_lambda(-1.0), DomainError);
}

TEST(Spherical, RadialFunctionHasZeroDeviation) {
    for (int n : {2, 3}) {
        PolarGrid w(n, {0.0, 0.25, 0.5, 1.0}, 16, 12);
        w.sample([](double r, const std::array<double, 3>&) { return std::exp(-r * r) + 0.5; });
        for (double lambda : {0.25, 1.0, 3.0}) {
            auto v = spherical_average_deviation(w, lambda);
            for (double x : v.values()) EXPECT_EQ(x, 0.0);
        }
    }
}

TEST(Spherical, LinearMeanMatchesDirectAverage) {
    PolarGrid w2(2, {0.5, 1.0}, 24);
    w2.sample([](double r, const std::array<double, 3>& om) { return 2.0 + r * om[0] + 0.3 * r * r * om[1] * om[1]; });
    auto v2 = spherical_average_deviation(w2, 1.0);
    for (std::size_t k = 0; k < 2; ++k) {
        double mean = 0.0;
        for (std::size_t j = 0; j < 24; ++j) mean += w2.at(k, j);
        mean /= 24.0;
        for (std::size_t j = 0; j < 24; ++j) EXPECT_NEAR(v2.at(k, j), w2.at(k, j) - mean, 1e-10);
    }
    const std::size_t polar = 10, az = 12;
    PolarGrid w3(3, {1.0}, az, polar);
    w3.sample([](double, const std::array<double, 3>& om) { return 1.0 + om[2] * om[2] + 0.5 * om[0]; });
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < polar; ++i) {
        double theta = std::numbers::pi * (i + 0.5) / polar;
        for (std::size_t j = 0; j < az; ++j) {
            num += std::sin(theta) * w3.at(0, i * az + j);
            den += std::sin(theta);
        }
    }
    auto v3 = spherical_average_deviation(w3, 1.0);
    for (std::size_t j = 0; j < w3.angular_count(); ++j) EXPECT_NEAR(v3.at(0, j), w3.at(0, j) - num / den, 1e-10);
}

TEST(Spherical, AngularPerturbationSeries) {
    const double delta = 1e-3;
    for (int n : {2, 3}) {
        PolarGrid w(n, {0.5, 1.0}, 64, 64);
        w.sample([&](double, const std::array<double, 3>& om) { return 1.0 + delta * om[0]; });
        for (double lambda : {0.25, 0.5, 2.0}) {
            auto v = spherical_average_deviation(w, lambda);
            double expected = -(1.0 / lambda - 1.0) * delta * delta / (2.0 * n);
            for (std::size_t k = 0; k < 2; ++k) {
                EXPECT_NEAR(v.ring_mean(k), expected, 0.02 * std::abs(expected));
                for (std::size_t j = 0; j < v.angular_count(); ++j) EXPECT_LE(std::abs(v.at(k, j)), 1.01 * delta);
            }
        }
    }
}

TEST(Spherical, Errors) {
    EXPECT_THROW(PolarGrid(1, {1.0}, 8), InputError);
    EXPECT_THROW(PolarGrid(2, {1.0, 0.5}, 8), InputError);
    EXPECT_THROW(PolarGrid(3, {1.0}, 8, 1), InputError);
    PolarGrid w(2, {1.0}, 8);
    EXPECT_THROW(spherical_average_deviation(w, 0.0), DomainError);
}

TEST(Corpus, SeededAndPositive) {
    auto a = smooth_positive_corpus(2, 20, 42);
    auto b = smooth_positive_corpus(2, 20, 42);
    auto c = smooth_positive_corpus(2, 20, 43);
    auto ga = sampled(2, 16, a[7]), gb = sampled(2, 16, b[7]), gc = sampled(2, 16, c[7]);
    EXPECT_TRUE(std::equal(ga.values().begin(), ga.values().end(), gb.values().begin()));
    EXPECT_FALSE(std::equal(ga.values().begin(), ga.values().end(), gc.values().begin()));
    for (const auto& f : a) {
        auto g = sampled(2, 16, f);
        for (double v : g.values()) EXPECT_GT(v, 0.0);
        EXPECT_GT(grid_poincare_ratio(g, 1.0, 2.0).gradient_norm, 0.0);
    }
}

TEST(Io, CsvRoundTrip) {
    auto g = spike_counterexample(2, 0.25, 1.0, 0.5, {4, 1.5}).w;
    std::stringstream ss;
    write_csv(ss, g);
    auto h = read_csv(ss);
    ASSERT_EQ(h.dim(), 2);
    for (int k = 0; k < 2; ++k) EXPECT_EQ(h.axis(k), g.axis(k));
    EXPECT_TRUE(std::equal(g.values().begin(), g.values().end(), h.values().begin()));
    EXPECT_TRUE(std::equal(g.subset().begin(), g.subset().end(), h.subset().begin()));
}

TEST(Io, BinaryRoundTrip) {
    auto g = sampled(3, 5, smooth_positive_corpus(3, 1, 3)[0]);
    std::stringstream ss;
    write_binary(ss, g);
    std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 8), "CKNGRID1");
    EXPECT_EQ(bytes.size(), 8u + 4u + 3u * 4u + 3u * 6u * 8u + 216u * 8u + 216u);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u);  // little-endian n
    auto h = read_binary(ss);
    EXPECT_TRUE(std::equal(g.values().begin(), g.values().end(), h.values().begin()));
    EXPECT_TRUE(std::equal(g.subset().begin(), g.subset().end(), h.subset().begin()));
}

TEST(Io, RejectsMalformed) {
    std::stringstream bad_magic("NOTAGRID");
    EXPECT_THROW(read_binary(bad_magic), InputError);
    auto g = GridFunction::uniform(1, 3);
    std::stringstream ss;
    write_binary(ss, g);
    std::stringstream truncated(ss.str().substr(0, ss.str().size() - 2));
    EXPECT_THROW(read_binary(truncated), InputError);
    std::stringstream holes("x1,x2,value,in_s\n0,0,1,1\n0,1,1,1\n1,0,1,0\n");
    EXPECT_THROW(read_csv(holes), InputError);
    std::stringstream junk("x1,value,in_s\n0,abc,1\n1,2,1\n");
    EXPECT_THROW(read_csv(junk), InputError);
}
