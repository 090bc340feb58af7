#include "mesocat/params.hpp"

#include <gtest/gtest.h>

using namespace mesocat;

TEST(Params, RadiationPressureCoupling) {
    const double chi = radiation_pressure_coupling(1e15, 0.01, 5e-11, 2 * pi * 3e5);
    // independent arithmetic: (1e17) * sqrt(hbar / (2 * 5e-11 * 2 pi 3e5))
    const double ref = 1e17 * std::sqrt(1.054571817e-34 / (2.0 * 5e-11 * 2.0 * 3.141592653589793 * 3e5));
    EXPECT_NEAR(chi, ref, 1e-12 * ref);
    EXPECT_NEAR(chi, 74.8, 0.1);
    EXPECT_NEAR(radiation_pressure_coupling(1e15, 0.01, 2e-10, 2 * pi * 3e5), chi / 2, 1e-12);
    EXPECT_NEAR(radiation_pressure_coupling(1e15, 0.02, 5e-11, 2 * pi * 3e5), chi / 2, 1e-12);
    EXPECT_THROW(radiation_pressure_coupling(0, 0.01, 5e-11, 1), DomainError);
    EXPECT_THROW(radiation_pressure_coupling(1, -1, 5e-11, 1), DomainError);
}

TEST(Params, EffectiveCoupling) {
    EXPECT_NEAR(effective_coupling(74.8, 1.0, std::sqrt(0.1), 1.0, 1.0), 7.48, 1e-12);
    EXPECT_EQ(effective_coupling(74.8, 1.0, 0.0, 1.0, 1.0), 0.0);
    EXPECT_EQ(effective_coupling(0.0, 1.0, 1.0, 1.0, 1.0), 0.0);
    EXPECT_THROW(effective_coupling(1, 1, 1, 0, 1), DomainError);
    EXPECT_THROW(effective_coupling(1, 1, 1, 1, 0), DomainError);
    // homogeneous of degree 2 in g
    const double a = effective_coupling(3.0, 0.7, 2.0, 5.0, 9.0), b = effective_coupling(3.0, 2.1, 2.0, 5.0, 9.0);
    EXPECT_NEAR(b / a, 9.0, 1e-12);
}

TEST(Params, ThermalVariance) {
    EXPECT_EQ(thermal_variance(1.0, 0.0), 1.0);
    const double w = 2 * pi * 5e6;
    const double v1 = thermal_variance(w, 1e-3), v2 = thermal_variance(w, 1e-2);
    EXPECT_GT(v1, 10 / 1.5);
    EXPECT_LT(v1, 10 * 1.5);
    EXPECT_GT(v2, 100 / 1.5);
    EXPECT_LT(v2, 100 * 1.5);
    double prev = 1.0;
    for (double T = 1e-6; T < 1; T *= 2) {
        const double v = thermal_variance(w, T);
        EXPECT_GT(v, prev - 1e-15);
        prev = v;
    }
    EXPECT_NEAR(thermal_variance(w, 1e-7), 1.0, 1e-12);
    EXPECT_THROW(thermal_variance(w, -1), DomainError);
}

TEST(Params, TemperatureRoundTrip) {
    const double w = 2 * pi * 5e6;
    EXPECT_EQ(temperature_from_variance(w, 1.0), 0.0);
    const double T = temperature_from_variance(w, 10.0);
    EXPECT_GT(T, 1e-3 / 1.5);
    EXPECT_LT(T, 1e-3 * 1.5);
    EXPECT_NEAR(thermal_variance(w, temperature_from_variance(w, 3.7)), 3.7, 1e-10 * 3.7);
    EXPECT_THROW(temperature_from_variance(w, 0.5), DomainError);
}

TEST(Params, RegimeValidation) {
    PhysicalParams p;
    p.Omega = 1;
    p.g = 1;
    p.delta = 100;
    p.Delta = 1e4;
    EXPECT_TRUE(validate_regime(p).all_pass());
    p.delta = 2;
    auto r = validate_regime(p);
    EXPECT_FALSE(r.checks[0].pass);
    EXPECT_NEAR(r.checks[0].ratio, 2.0, 1e-15);
    p.delta = 100;
    const double chi = radiation_pressure_coupling(p.omega_c, p.L, p.m, p.omega_m);
    p.Delta = 5 * chi;
    r = validate_regime(p);
    EXPECT_FALSE(r.checks[3].pass);
    EXPECT_TRUE(validate_regime(p, 4.0).checks[3].pass);
}

TEST(Params, PureAndDeterministic) {
    PhysicalParams p;
    p.T = 1e-3;
    const auto a = derive_effective(p), b = derive_effective(p);
    EXPECT_EQ(a.eta, b.eta);
    EXPECT_EQ(a.V, b.V);
    EXPECT_EQ(a.chi, b.chi);
}
