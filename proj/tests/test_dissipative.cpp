#include "mesocat/dissipative.hpp"
#include "mesocat/lindblad.hpp"

#include <gtest/gtest.h>

using namespace mesocat;

namespace {
const double h = 1 / std::sqrt(2.0);
}

TEST(Components, VacuumCovariance) {
    const auto s = initial_components(1.0, {0.0});
    for (auto& c : s.comp) {
        EXPECT_EQ(c.cov, RMatrix::Identity(2, 2) * 0.5);
        EXPECT_EQ(c.mean.norm(), 0.0);
    }
    EXPECT_NEAR(s.trace(), 1.0, 1e-15);
}

TEST(Components, ThermalScaling) {
    const auto a = initial_components(1.0, {0.0}), b = initial_components(3.0, {0.0});
    EXPECT_EQ(b.comp[0].cov, 3.0 * a.comp[0].cov);
}

TEST(Components, TwoModeBlockDiagonal) {
    const auto s = initial_components(2.0, {cplx(0.5, 0), cplx(0, -1)});
    const auto& c = s.comp[3];
    EXPECT_EQ(c.cov.rows(), 4);
    EXPECT_EQ(c.cov, RMatrix::Identity(4, 4));
    EXPECT_NEAR(c.mean(0).real(), std::sqrt(2.0) * 0.5, 1e-15);
    EXPECT_NEAR(c.mean(3).real(), -std::sqrt(2.0), 1e-15);
}

TEST(Components, InitialWignerIsThermal) {
    const double V = 2.5;
    const auto s = initial_components(V, {0.0});
    for (cplx m : {cplx(0), cplx(0.3, -0.8)})
        EXPECT_NEAR(s.postselected_wigner({m}), 2 / (pi * V) * std::exp(-2 * std::norm(m) / V), 1e-14);
    EXPECT_THROW(initial_components(0.9, {0.0}), DomainError);
}

TEST(FokkerPlanck, UnitaryDrift) {
    const double eta = 1.3, t = 0.8;
    const auto s = evolve_fp(initial_components(1.0, {0.0}), {eta}, 0.0, 1.0, t);
    EXPECT_NEAR(s.at(0, 0).mean(0).real(), 0.0, 1e-12);
    EXPECT_NEAR(s.at(0, 0).mean(1).real(), -std::sqrt(2.0) * eta * t, 1e-10);
    EXPECT_EQ(s.at(1, 1).mean.norm(), 0.0);
    EXPECT_NEAR(s.at(1, 1).log_weight.real(), std::log(0.25), 1e-15);
}

TEST(FokkerPlanck, UnitaryMatchesCat) {
    const auto s = evolve_fp(initial_components(1.0, {0.0}), {1.0}, 0.0, 1.0, 2.0);
    const auto cat = postselected_cat(0.0, 2.0, 0.0);
    for (double x = -2; x <= 2; x += 0.5)
        for (double y = -3; y <= 1; y += 0.5) EXPECT_NEAR(s.postselected_wigner({cplx(x, y)}), cat.wigner({cplx(x, y)}), 1e-12);
}

TEST(FokkerPlanck, ThermalUnitaryMatchesClosedForm) {
    const auto s = evolve_fp(initial_components(3.0, {0.0}), {1.0}, 0.0, 3.0, 2.0);
    for (double x = -2; x <= 2; x += 0.5)
        for (double y = -3; y <= 1; y += 0.5)
            EXPECT_NEAR(s.postselected_wigner({cplx(x, y)}), conditional_wigner_thermal(cplx(x, y), 2.0, 3.0), 1e-12);
}

TEST(FokkerPlanck, OrnsteinUhlenbeck) {
    const double g = 0.5, t = 2.0, V = 3.0;
    const auto s0 = initial_components(1.0, {cplx(1.0, -0.5)});
    const auto s = evolve_fp(s0, {0.0}, g, V, t);
    const double cov = V / 2 + (0.5 - V / 2) * std::exp(-g * t);
    for (auto& c : s.comp) {
        EXPECT_NEAR(c.cov(0, 0), cov, 1e-9);
        EXPECT_NEAR(c.cov(1, 1), cov, 1e-9);
        EXPECT_NEAR(std::abs(c.cov(0, 1)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(c.mean(0) - s0.comp[0].mean(0) * std::exp(-g * t / 2)), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(c.mean(1) - s0.comp[0].mean(1) * std::exp(-g * t / 2)), 0.0, 1e-9);
    }
}

TEST(FokkerPlanck, ConjugatePairingExact) {
    const auto s = evolve_fp(initial_components(2.0, {0.3, cplx(0, 0.2)}), {1.0, 0.7}, 0.2, 2.0, 1.5);
    EXPECT_EQ(s.at(1, 0).cov, s.at(0, 1).cov);
    EXPECT_EQ(s.at(1, 0).mean, s.at(0, 1).mean.conjugate().eval());
    EXPECT_EQ(s.at(1, 0).log_weight, std::conj(s.at(0, 1).log_weight));
}

TEST(FokkerPlanck, MatchesMasterEquation) {
    const int dim = 60;
    const double V = 3, g = 0.1, t = 1.0;
    const auto h0 = fock::product_mixed(h, h, fock::thermal_density(V, 0.0, dim));
    fock::MasterOptions o;
    o.dt = 0.02;
    const auto r = fock::integrate_master_equation(h0, 1.0, g, V, t, o);
    auto [m, p] = fock::postselect_atom(r.states.back(), h, h);
    const auto s = evolve_fp(initial_components(V, {0.0}), {1.0}, g, V, t);
    double worst = 0;
    for (double x = -2; x <= 2.01; x += 0.5)
        for (double y = -2.5; y <= 1.51; y += 0.5)
            worst = std::max(worst, std::abs(fock::wigner_point(m, cplx(x, y)) - s.postselected_wigner({cplx(x, y)})));
    EXPECT_LT(worst, 1e-6);
}

TEST(FokkerPlanck, SingleMirrorDampedNegativity) {
    const auto s = evolve_fp(initial_components(5.0, {0.0}), {1.0}, 0.1, 5.0, 1.0);
    double m = 1;
    for (double x = -3; x <= 3; x += 0.05)
        for (double y = -2; y <= 1; y += 0.05) m = std::min(m, s.postselected_wigner({cplx(x, y)}));
    EXPECT_LT(m, 0.0);
}

TEST(FokkerPlanck, TwoModeSliceNegativity) {
    const double g = 1, eta = 2, t = 1, V = 1;
    const auto s = evolve_fp(initial_components(V, {0.0, 0.0}), {eta, eta}, g, V, t);
    double m = 1;
    for (double x = -3; x <= 3; x += 0.05)
        for (double y = -3; y <= 2; y += 0.05) m = std::min(m, s.postselected_wigner({cplx(x, y), cplx(1, 1)}));
    EXPECT_LT(m, 0.0);
}

TEST(FokkerPlanck, TwoModeUnitaryMatchesEcs) {
    const auto s = evolve_fp(initial_components(1.0, {0.0, 0.0}), {1.0, 1.5}, 0.0, 1.0, 1.0);
    const auto e = ecs_state(0.0, 0.0, 1.0, 1.5);
    for (cplx a : {cplx(0), cplx(0.3, -0.5)})
        for (cplx b : {cplx(0), cplx(-0.2, 0.7)}) EXPECT_NEAR(s.postselected_wigner({a, b}), e.wigner({a, b}), 1e-12);
}

TEST(FokkerPlanck, RejectsBadInput) {
    const auto s = initial_components(1.0, {0.0});
    EXPECT_THROW(evolve_fp(s, {1.0, 1.0}, 0.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(evolve_fp(s, {1.0}, -0.1, 1.0, 1.0), DomainError);
}

TEST(Trotter, UnitaryLimitExactForAnyN) {
    const auto e = ecs_state(0.0, 0.0, 1.2, 1.2);
    for (int N : {1, 7, 32}) {
        const auto m = trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), {1.2, 1.2}, 0.0, 1.0, N).postselect_plus();
        for (cplx a : {cplx(0), cplx(0.4, -0.6)})
            EXPECT_NEAR(m.wigner({a, cplx(0.1, 0.5)}), e.wigner({a, cplx(0.1, 0.5)}), 1e-12) << N;
    }
}

TEST(Trotter, OneDampingStep) {
    const double g = 0.3, t = 0.5;
    HybridDyadicState s;
    s.modes = 1;
    const cplx k(1.0, 0.2), b(0.0, 0.5);
    s.terms.push_back({0, 1, 0.0, {k}, {b}});
    const auto r = trotter_evolve(s, {0.0}, g, t, 1);
    const cplx ov = std::exp(-std::norm(k) / 2 - std::norm(b) / 2 + std::conj(b) * k);
    EXPECT_LT(std::abs(r.terms[0].log_coef - g * t * std::log(ov)), 1e-14);
    EXPECT_LT(std::abs(r.terms[0].ket[0] - k * std::exp(-g * t)), 1e-15);
    EXPECT_LT(std::abs(r.terms[0].bra[0] - b * std::exp(-g * t)), 1e-15);
}

TEST(Trotter, FirstOrderConvergence) {
    const double g = 1, t = 1;
    const std::vector<double> etas{2.0, 2.0};
    const double G = decoherence_exponent(t, g, etas);
    std::vector<double> lx, ly;
    for (int N : {64, 128, 256, 512}) {
        const auto x = trotter_exponents(trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), etas, g, t, N));
        lx.push_back(std::log(double(N)));
        ly.push_back(std::log(std::abs(x.Gamma - G) / G));
    }
    const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double order = -sxy / sxx;
    EXPECT_GT(order, 0.8);
    EXPECT_LT(order, 1.2);
}

TEST(Trotter, PhaseVanishesFromVacuum) {
    const auto x = trotter_exponents(trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), {2.0, 2.0}, 1.0, 1.0, 128));
    EXPECT_NEAR(x.theta, dissipative_phase(1.0, 1.0, {2.0, 2.0}, {0.0, 0.0}), 1e-12);
}

TEST(Trotter, LindbladRuleMatchesClosedFormAmplitudes) {
    const double g = 0.7, t = 1.1;
    const auto s = trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), {1.0, 1.0}, g, t, 2000, TrotterRule::lindblad);
    const auto& b = s.term(0, 0).ket;
    const double amp = 2 * (-std::expm1(-g * t / 2)) / g;
    EXPECT_NEAR(std::abs(b[0] - cplx(0, -amp)), 0.0, 2e-3);
}

TEST(Trotter, Validation) {
    auto s = HybridDyadicState::plus_coherent({0.0, 0.0});
    EXPECT_THROW(trotter_evolve(s, {1.0, 1.0}, 1.0, 1.0, 0), DomainError);
    EXPECT_THROW(trotter_evolve(s, {1.0}, 1.0, 1.0, 4), DomainError);
    EXPECT_NEAR(std::abs(s.trace() - 1.0), 0.0, 1e-15);
}

TEST(ChshTime, StartsAtClassicalBound) {
    const auto c = chsh_vs_time({5.0, 5.0}, 1.0, {0.0}, {});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].best, 2.0);
}

TEST(ChshTime, ViolationWidthInterpolates) {
    std::vector<ChshTimePoint> c(4);
    const double v[4] = {2.0, 2.2, 2.1, 1.9};
    for (int k = 0; k < 4; ++k) {
        c[k].gamma_t = 0.1 * k;
        c[k].best = v[k];
    }
    EXPECT_NEAR(violation_width(c), 0.1 + 0.1 + 0.05, 1e-12);
    EXPECT_EQ(violation_width(c, 3.0), 0.0);
}

TEST(ChshTime, Deterministic) {
    const std::vector<double> ts{0.05, 0.1};
    ChshTimeOptions o;
    o.multistarts = 3;
    const auto a = chsh_vs_time({2.0, 2.0}, 1.0, ts, o), b = chsh_vs_time({2.0, 2.0}, 1.0, ts, o);
    for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_EQ(a[k].best, b[k].best);
}

TEST(Invariants, TrotterTraceBookkeeping) {
    const auto s = trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), {2.0, 2.0}, 1.0, 1.0, 64, TrotterRule::lindblad);
    EXPECT_NEAR(std::abs(s.trace() - 1.0), 0.0, 1e-10);
    const auto l = trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), {2.0, 2.0}, 1.0, 1.0, 64);
    EXPECT_NEAR(std::abs(l.postselect_plus().trace() - 1.0), 0.0, 1e-10);
}

TEST(Invariants, TrotterMatchesFokkerPlanck) {
    for (double ratio : {0.1, 0.5}) {
        const double eta = 1.0, g = ratio * eta;
        for (double gt : {0.5, 1.0}) {
            const double t = gt / g;
            const auto m = trotter_evolve(HybridDyadicState::plus_coherent({0.0}), {eta}, g, t, 4000, TrotterRule::lindblad)
                               .postselect_plus();
            const auto s = evolve_fp(initial_components(1.0, {0.0}), {eta}, g, 1.0, t);
            double worst = 0;
            for (double x = -3; x <= 3; x += 0.25)
                for (double y = -9; y <= 2; y += 0.25)
                    worst = std::max(worst, std::abs(m.wigner({cplx(x, y)}) - s.postselected_wigner({cplx(x, y)})));
            EXPECT_LT(worst, 2e-3) << "gamma/eta=" << ratio << " gamma t=" << gt;
        }
    }
}

TEST(Invariants, TrotterLargeNExponent) {
    const std::vector<double> etas{2.0, 2.0};
    const auto x = trotter_exponents(trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), etas, 1.0, 1.0, 512));
    EXPECT_LT(std::abs(x.Gamma / decoherence_exponent(1.0, 1.0, etas) - 1), 5e-3);
}
