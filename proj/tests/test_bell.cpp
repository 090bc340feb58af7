#include "mesocat/bell.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mesocat;

namespace {

ChshSingleSettings random_single(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> th(0, 2 * pi), b(-3, 3);
    return {th(rng), th(rng), cplx(b(rng), b(rng))};
}

ChshTwoSettings random_two(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> b(-3, 3);
    return {cplx(b(rng), b(rng)), cplx(b(rng), b(rng)), cplx(b(rng), b(rng)), cplx(b(rng), b(rng))};
}

}  // namespace

TEST(ChshSingle, SeparableBound) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 1000; ++k) {
        const double d = std::uniform_real_distribution<double>(0, 2)(rng);
        auto c = [&](cplx b, double t) { return correlation_pure(b, t, d, 0.0); };
        EXPECT_LE(std::abs(chsh_single(c, random_single(rng))), 2.0 + 1e-12);
    }
}

TEST(ChshSingle, Antisymmetric) {
    std::mt19937_64 rng(5);
    auto c = [](cplx b, double t) { return correlation_pure(b, t, 1.0, 2.0); };
    auto mc = [&](cplx b, double t) { return -c(b, t); };
    for (int k = 0; k < 20; ++k) {
        const auto s = random_single(rng);
        EXPECT_EQ(chsh_single(mc, s), -chsh_single(c, s));
    }
}

TEST(ChshSingle, PureViolation) {
    auto c = [](cplx b, double t) { return correlation_pure(b, t, 1.0, 2.0); };
    const auto rep = optimize_chsh_single(c, 3.0, 8, 1, 3 * pi / 2);
    EXPECT_GT(rep.best_value, 2.0);
    EXPECT_LE(rep.best_value, 2 * std::sqrt(2.0) + 1e-6);
    EXPECT_NEAR(std::abs(chsh_single(c, rep.single())), rep.best_value, 1e-12);
}

TEST(ChshSingle, SplitOptimizerMatchesDirect) {
    const ThermalCorrelation tc(1.0, 2.0, 1.0);
    auto comp = [&](cplx b) { return tc.components(b); };
    const auto a = optimize_chsh_single_zx(comp, 3.0, 4, 9, 3 * pi / 2);
    EXPECT_NEAR(std::abs(chsh_single(tc, a.single())), a.best_value, 1e-12);
}

TEST(ChshSingle, ScanExceedsClassicalBound) {
    double best = 0;
    for (double d = 0.5; d <= 2.0; d += 0.5) {
        auto c = [&](cplx b, double t) { return correlation_pure(b, t, d, 2 * d); };
        best = std::max(best, optimize_chsh_single(c, 2 * d, 4, 2, 3 * pi / 2).best_value);
    }
    EXPECT_GT(best, 2.0);
}

TEST(ChshTwo, ProductThermalBound) {
    std::mt19937_64 rng(4);
    const ThermalEcsWigner w(0.0, 0.0, 2.0);
    for (int k = 0; k < 1000; ++k) EXPECT_LE(std::abs(chsh_two(w, random_two(rng))), 2.0 + 1e-12);
}

TEST(ChshTwo, TermsBounded) {
    std::mt19937_64 rng(6);
    const auto e = ecs_state(0.0, 0.0, 1.5, 1.5);
    std::uniform_real_distribution<double> b(-3, 3);
    for (int k = 0; k < 500; ++k) {
        const double v = pi * pi / 4 * e.wigner({cplx(b(rng), b(rng)), cplx(b(rng), b(rng))});
        EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
}

TEST(ChshTwo, PureEcsViolation) {
    double best = 0;
    for (double et : {0.5, 1.0, 1.5, 2.0}) {
        const auto e = ecs_state(0.0, 0.0, et, et);
        auto w = [&](cplx a, cplx b) { return e.wigner({a, b}); };
        const auto rep = optimize_chsh_two(w, et, 8, 1);
        EXPECT_LE(rep.best_value, 2 * std::sqrt(2.0) + 1e-6);
        best = std::max(best, rep.best_value);
    }
    EXPECT_GT(best, 2.0);
}

TEST(Optimizer, SeparableInputStaysClassical) {
    const ThermalEcsWigner w(0.0, 0.0, 1.0);
    EXPECT_LE(optimize_chsh_two(w, 1.0, 4, 2).best_value, 2.0 + 1e-3);
}

TEST(Optimizer, Deterministic) {
    auto c = [](cplx b, double t) { return correlation_pure(b, t, 1.0, 2.0); };
    const auto a = optimize_chsh_single(c, 3.0, 5, 42), b = optimize_chsh_single(c, 3.0, 5, 42);
    EXPECT_EQ(a.best_value, b.best_value);
    EXPECT_EQ(a.best_x, b.best_x);
    EXPECT_EQ(a.evaluations, b.evaluations);
    std::ostringstream sa, sb;
    write_report_csv(sa, a);
    write_report_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Optimizer, NeedsAStart) {
    auto g = [](const std::vector<double>&) { return 0.0; };
    EXPECT_THROW(maximize_abs(g, ParamBox{{0}, {1}}, 0, 1), DomainError);
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](const std::vector<double>& x) {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
    };
    NelderMeadOptions o;
    o.diameter_tol = 1e-10;
    o.max_evals = 20000;
    const auto r = nelder_mead(f, {-1.2, 1.0}, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Angles, Wrap) {
    EXPECT_NEAR(wrap_angle(-0.5), 2 * pi - 0.5, 1e-15);
    EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * pi, 1e-15);
}

TEST(Invariants, NeverWorseThanStart) {
    auto c = [](cplx b, double t) { return correlation_pure(b, t, 1.0, 2.0); };
    const auto rep = optimize_chsh_single(c, 3.0, 6, 8);
    for (auto& s : rep.starts) {
        EXPECT_GE(s.value, s.initial);
        EXPECT_GE(rep.best_value, s.initial);
        EXPECT_LE(s.value, 2 * std::sqrt(2.0) + 1e-6);
    }
}

TEST(Invariants, DegenerateSettingsBounded) {
    for (double d : {0.0, 1.0, 2.0})
        for (double th = 0; th < 2 * pi; th += 0.3) {
            auto c = [&](cplx b, double t) { return correlation_pure(b, t, d, 2 * d); };
            const double v = chsh_single(c, {th, th, 0.0});
            EXPECT_NEAR(v, 2 * c(0.0, th), 1e-14);
            EXPECT_LE(std::abs(v), 2.0 + 1e-12);
        }
}
