#include "mesocat/phasespace.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mesocat;

namespace {

WignerGrid vacuum_grid(int n) {
    return build_grid_2d([](cplx m) { return coherent::wigner(0.0, m); }, {-4, 4, n}, {-4, 4, n});
}

double cat2d(const SuperposedCoherentState& c, const std::vector<double>& p) { return c.wigner({cplx(p[0], p[1])}); }

}  // namespace

TEST(Grid, VacuumNormalisation) {
    const auto g = vacuum_grid(101);
    EXPECT_NEAR(g.normalization, 1.0, 1e-4);
    EXPECT_LT(std::abs(vacuum_grid(201).normalization - g.normalization), 1e-5);
}

TEST(Grid, RejectsCoarseResolution) {
    EXPECT_THROW(vacuum_grid(5), DomainError);
}

TEST(Grid, AxisEndpointsExact) {
    const Axis a{-1.3, 2.9, 17};
    EXPECT_EQ(a.at(0), -1.3);
    EXPECT_EQ(a.at(16), 2.9);
    double s = 0;
    for (int i = 0; i < a.n; ++i) s += a.trap(i);
    EXPECT_NEAR(s, 4.2, 1e-14);
}

TEST(GridMin, GaussianStatesAreNonNegative) {
    const auto coh = build_grid_2d([](cplx m) { return coherent::wigner(cplx(1, -0.5), m); }, {-4, 4, 41}, {-4, 4, 41});
    EXPECT_GE(grid_min(coh).value, 0.0);
    const auto th = build_grid_2d([](cplx m) { return conditional_wigner_thermal(m, 0.0, 3.0); }, {-5, 5, 41}, {-5, 5, 41});
    EXPECT_GE(grid_min(th).value, 0.0);
    const auto mix = build_grid_2d(
        [](cplx m) { return 0.5 * (coherent::wigner(cplx(-3, 0), m) + coherent::wigner(cplx(3, 0), m)); },
        {-6, 6, 61}, {-4, 4, 41});
    EXPECT_GE(grid_min(mix).value, 0.0);
}

TEST(GridMin, ThermalCatIsNegative) {
    const auto g = build_grid_2d([](cplx m) { return conditional_wigner_thermal(m, 3.0, 3.0); }, {-3, 3, 61},
                                 {-4.5, 1.5, 61});
    const auto m = grid_min(g);
    EXPECT_LT(m.value, 0.0);
    ASSERT_EQ(m.location.size(), 2u);
    EXPECT_EQ(conditional_wigner_thermal(cplx(m.location[0], m.location[1]), 3.0, 3.0), m.value);
}

TEST(GridMin, TiesPickFirstIndex) {
    WignerGrid g;
    g.axes = {Axis{0, 1, 3}};
    g.values = {1.0, -2.0, -2.0};
    EXPECT_EQ(grid_min(g).location[0], 0.5);
}

TEST(NegativeVolume, GaussianIsZero) {
    const auto r = negative_volume_grid([](const std::vector<double>& p) { return coherent::wigner(0.5, cplx(p[0], p[1])); },
                                        {Axis{-4, 5, 81}, Axis{-4.5, 4.5, 81}});
    EXPECT_LE(r.value, r.error + 1e-15);
    EXPECT_NEAR(r.normalization, 1.0, 1e-6);
}

TEST(NegativeVolume, MissingSupportThrows) {
    EXPECT_THROW(
        negative_volume_grid([](const std::vector<double>& p) { return coherent::wigner(0.0, cplx(p[0], p[1])); },
                             {Axis{0, 3, 21}, Axis{0, 3, 21}}),
        BoundsError);
}

TEST(NegativeVolume, TranslationInvariant) {
    const auto c = postselected_cat(0.0, 2.0, 0.0);
    const auto a = negative_volume_grid([&](const std::vector<double>& p) { return cat2d(c, p); },
                                        {Axis{-4, 4, 121}, Axis{-6, 2, 121}});
    const auto b = negative_volume_grid([&](const std::vector<double>& p) { return cat2d(c, {p[0] - 1.0, p[1] - 0.5}); },
                                        {Axis{-3, 5, 121}, Axis{-5.5, 2.5, 121}});
    EXPECT_GT(a.value, 0.01);
    EXPECT_LT(std::abs(a.value - b.value), 2 * std::max(a.error, b.error) + 1e-12);
}

TEST(NegativeVolume, MonteCarloAgreesWithGrid) {
    const auto c = postselected_cat(0.0, 2.0, 0.0);
    auto f = [&](const std::vector<double>& p) { return cat2d(c, p); };
    const std::vector<Axis> box{Axis{-4, 4, 121}, Axis{-6, 2, 121}};
    const auto g = negative_volume_grid(f, box);
    const auto m = negative_volume_mc(f, box, 200, 11);
    EXPECT_LT(std::abs(m.value - g.value), 3 * m.error + g.error);
    const auto m2 = negative_volume_mc(f, box, 200, 11);
    EXPECT_EQ(m.value, m2.value);
    EXPECT_EQ(m.error, m2.error);
}

TEST(NegativeVolume, FringeResolution) {
    EXPECT_EQ(fringe_resolution(1.0, 0.0, 21), 21);
    for (double et : {0.5, 2.0, 5.0, 7.3}) {
        const int n = fringe_resolution(6.0, et, 21);
        EXPECT_EQ(n % 2, 1);
        EXPECT_GE(n, 21);
        EXPECT_GE((n - 1) * pi / (6.0 * et), 6.0 - 1e-12);
    }
}

TEST(NegativeVolume, StreamedMatchesStoredGrid) {
    const ThermalEcsWigner w(1.5, 1.0, 1.5);
    const auto ax = ecs_axes(1.5, 1.0, 1.5, 15);
    const auto a = negative_volume_ecs(w, ax);
    const auto b = negative_volume_from_grid(build_grid_ecs(w, ax));
    EXPECT_NEAR(a.value, b.value, 1e-12);
    EXPECT_NEAR(a.error, b.error, 1e-12);
}

TEST(NegativeVolume, PureEcsSignificant) {
    const auto r = negative_volume_ecs(5.0, 5.0, 1.0, 21);
    EXPECT_GT(r.value, 3 * r.error);
}

TEST(Csv, GridOutputDeterministic) {
    const auto g = vacuum_grid(9);
    std::ostringstream a, b;
    write_csv(a, g);
    write_csv(b, vacuum_grid(9));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, 24), "mu_r[1],mu_i[1],W[1]\n-4,");
}
