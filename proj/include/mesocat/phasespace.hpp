#pragma once

// Sampled Wigner functions on 2D / 4D tensor grids, negative volume, minima.

#include "mesocat/analytic.hpp"

#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace mesocat {

struct Axis {
    double lo = -1, hi = 1;
    int n = 41;
    std::string name = "x";

    double h() const { return (hi - lo) / (n - 1); }
    double at(int i) const { return i == n - 1 ? hi : lo + i * h(); }
    double trap(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h() : h(); }
};

struct WignerGrid {
    std::vector<Axis> axes;
    std::vector<double> values;  // row-major, last axis fastest
    double normalization = 0;
    bool full_support = false;
    std::string provenance;

    std::size_t size() const { return values.size(); }
    std::vector<int> unravel(std::size_t k) const {
        std::vector<int> idx(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            idx[a] = int(k % std::size_t(axes[a].n));
            k /= std::size_t(axes[a].n);
        }
        return idx;
    }
    std::vector<double> point(std::size_t k) const {
        auto idx = unravel(k);
        std::vector<double> p(axes.size());
        for (std::size_t a = 0; a < axes.size(); ++a) p[a] = axes[a].at(idx[a]);
        return p;
    }
    double weight(std::size_t k) const {
        auto idx = unravel(k);
        double w = 1;
        for (std::size_t a = 0; a < axes.size(); ++a) w *= axes[a].trap(idx[a]);
        return w;
    }
};

/// Trapezoid integral of f(value) over the grid.
template <class F>
double grid_integral(const WignerGrid& g, F&& f) {
    double s = 0;
    for (std::size_t k = 0; k < g.size(); ++k) s += g.weight(k) * f(g.values[k]);
    return s;
}

/// Same integral using only even-indexed points (half resolution); needs
/// odd point counts.
template <class F>
double grid_integral_half(const WignerGrid& g, F&& f) {
    for (auto& a : g.axes)
        if (a.n % 2 == 0) throw DomainError("grid_integral_half: odd resolution required");
    double s = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto idx = g.unravel(k);
        double w = 1;
        bool keep = true;
        for (std::size_t a = 0; a < idx.size() && keep; ++a) {
            if (idx[a] % 2) keep = false;
            const auto& ax = g.axes[a];
            w *= (idx[a] == 0 || idx[a] == ax.n - 1) ? ax.h() : 2.0 * ax.h();
        }
        if (keep) s += w * f(g.values[k]);
    }
    return s;
}

/// Evaluates f(const std::vector<double>& point) at every grid point.
template <class F>
WignerGrid build_grid(F&& f, std::vector<Axis> axes, std::string provenance = "") {
    for (auto& a : axes)
        if (a.n < 8) throw DomainError("build_grid: resolution must be >= 8 per axis");
    WignerGrid g;
    g.axes = std::move(axes);
    g.provenance = std::move(provenance);
    std::size_t total = 1;
    for (auto& a : g.axes) total *= std::size_t(a.n);
    g.values.assign(total, 0.0);
    parallel_for(total, [&](std::size_t k) { g.values[k] = f(g.point(k)); });
    g.normalization = grid_integral(g, [](double v) { return v; });
    return g;
}

/// 2D grid of a complex-argument evaluator mu = x + i y.
template <class F>
WignerGrid build_grid_2d(F&& f, Axis re, Axis im, std::string provenance = "") {
    re.name = re.name == "x" ? "mu_r" : re.name;
    im.name = im.name == "x" ? "mu_i" : im.name;
    return build_grid([&](const std::vector<double>& p) { return f(cplx(p[0], p[1])); }, {re, im},
                      std::move(provenance));
}

struct GridMin {
    double value = 0;
    std::vector<double> location;
};

/// Ties go to the lowest row-major index.
inline GridMin grid_min(const WignerGrid& g) {
    GridMin m;
    m.value = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.values[k] < m.value) {
            m.value = g.values[k];
            best = k;
        }
    m.location = g.point(best);
    return m;
}

/// Axis covering per-mode centres plus 4 sqrt(V/2) on either side.
inline Axis covering_axis(std::vector<double> centres, double V, int n, std::string name, double pad = 0.0) {
    const double L = 4.0 * std::sqrt(V / 2.0) + pad;
    auto [lo, hi] = std::minmax_element(centres.begin(), centres.end());
    return Axis{*lo - L, *hi + L, n, std::move(name)};
}

struct NegativeVolumeResult {
    double value = 0;
    double error = 0;
    std::string method;  // "grid" or "monte-carlo"
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double normalization = 0;
    double total_abs = 0;
};

inline NegativeVolumeResult negative_volume_from_grid(const WignerGrid& g) {
    NegativeVolumeResult r;
    r.method = "grid";
    r.samples = g.size();
    r.normalization = g.normalization;
    if (std::abs(g.normalization - 1.0) > 1e-2)
        throw BoundsError("negative_volume: grid bounds miss support (normalisation " +
                          std::to_string(g.normalization) + ")");
    auto neg = [](double v) { return 0.5 * (std::abs(v) - v); };
    r.value = grid_integral(g, neg);
    r.total_abs = grid_integral(g, [](double v) { return std::abs(v); });
    r.error = std::abs(r.value - grid_integral_half(g, neg));
    return r;
}

template <class F>
NegativeVolumeResult negative_volume_grid(F&& f, std::vector<Axis> axes) {
    return negative_volume_from_grid(build_grid(std::forward<F>(f), std::move(axes), "negative-volume"));
}

namespace detail {
inline double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Stratified Monte Carlo: `strata` cells per axis, two samples per cell.
/// Error is 1.96 standard errors from the within-cell spread.
template <class F>
NegativeVolumeResult negative_volume_mc(F&& f, const std::vector<Axis>& box, int strata, std::uint64_t seed) {
    const std::size_t D = box.size();
    std::size_t cells = 1;
    for (std::size_t a = 0; a < D; ++a) cells *= std::size_t(strata);
    double cellvol = 1;
    for (auto& a : box) cellvol *= (a.hi - a.lo) / strata;
    std::mt19937_64 rng(seed);
    // draw all coordinates up front so the result does not depend on threads
    std::vector<double> u(cells * 2 * D);
    for (auto& x : u) x = detail::uniform01(rng);
    std::vector<double> neg(cells), var(cells), nrm(cells);
    parallel_for(cells, [&](std::size_t c) {
        std::vector<int> idx(D);
        std::size_t k = c;
        for (std::size_t a = D; a-- > 0;) {
            idx[a] = int(k % std::size_t(strata));
            k /= std::size_t(strata);
        }
        double v[2], w[2];
        for (int s = 0; s < 2; ++s) {
            std::vector<double> p(D);
            for (std::size_t a = 0; a < D; ++a) {
                const double h = (box[a].hi - box[a].lo) / strata;
                p[a] = box[a].lo + (idx[a] + u[(c * 2 + s) * D + a]) * h;
            }
            w[s] = f(p);
            v[s] = 0.5 * (std::abs(w[s]) - w[s]);
        }
        neg[c] = 0.5 * (v[0] + v[1]) * cellvol;
        var[c] = 0.25 * (v[0] - v[1]) * (v[0] - v[1]) * cellvol * cellvol;  // var of the 2-sample mean
        nrm[c] = 0.5 * (w[0] + w[1]) * cellvol;
    });
    NegativeVolumeResult r;
    r.method = "monte-carlo";
    r.samples = cells * 2;
    r.seed = seed;
    double vs = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        r.value += neg[c];
        vs += var[c];
        r.normalization += nrm[c];
    }
    r.error = 1.96 * std::sqrt(vs);
    return r;
}

/// Grid sampling of the thermal ECS Wigner function through per-mode
/// factor tables: O(n^2) quadratures per mode, then O(n^4) combinations.
inline WignerGrid build_grid_ecs(const ThermalEcsWigner& w, const std::array<Axis, 4>& ax) {
    std::array<std::vector<std::array<cplx, 4>>, 2> tab;
    for (int m = 0; m < 2; ++m) {
        const Axis &re = ax[2 * m], &im = ax[2 * m + 1];
        tab[m].resize(std::size_t(re.n) * im.n);
        parallel_for(tab[m].size(), [&](std::size_t k) {
            const int i = int(k / im.n), j = int(k % im.n);
            tab[m][k] = w.mode(m).g(cplx(re.at(i), im.at(j)));
        });
    }
    WignerGrid g;
    g.axes.assign(ax.begin(), ax.end());
    g.provenance = "thermal-ecs";
    const std::size_t n1 = tab[0].size(), n2 = tab[1].size();
    g.values.resize(n1 * n2);
    parallel_for(n1, [&](std::size_t a) {
        for (std::size_t b = 0; b < n2; ++b) g.values[a * n2 + b] = w.combine(tab[0][a], tab[1][b]);
    });
    g.normalization = grid_integral(g, [](double v) { return v; });
    return g;
}

/// Odd point count giving at least `per_fringe` samples per interference
/// fringe (period pi / eta t) across `span`, and never fewer than n.
inline int fringe_resolution(double span, double eta_t, int n, int per_fringe = 6) {
    if (eta_t <= 0) return n;
    int m = int(std::ceil(span * eta_t * per_fringe / pi)) + 1;
    if (m % 2 == 0) ++m;
    return std::max(n, m);
}

/// 4D axes for the post-selected thermal ECS: tight per-axis bounds around
/// the two centres of each mode; n points on the imaginary axes, and on the
/// real axes enough to resolve the fringes (at least n).
inline std::array<Axis, 4> ecs_axes(double e1t, double e2t, double V, int n = 41, cplx d1 = 0.0, cplx d2 = 0.0) {
    Axis r1 = covering_axis({d1.real()}, V, n, "mu1_r"), r2 = covering_axis({d2.real()}, V, n, "mu2_r");
    r1.n = fringe_resolution(r1.hi - r1.lo, e1t, n);
    r2.n = fringe_resolution(r2.hi - r2.lo, e2t, n);
    return {r1, covering_axis({d1.imag(), d1.imag() - e1t}, V, n, "mu1_i"), r2,
            covering_axis({d2.imag(), d2.imag() + e2t}, V, n, "mu2_i")};
}

/// Negative volume of the thermal ECS streamed over the per-mode factor
/// tables (the 4D grid is never stored). Error from the half-resolution
/// (even-index) sum; odd point counts required.
inline NegativeVolumeResult negative_volume_ecs(const ThermalEcsWigner& w, const std::array<Axis, 4>& ax) {
    for (auto& a : ax)
        if (a.n % 2 == 0 || a.n < 9) throw DomainError("negative_volume_ecs: odd resolution >= 9 required");
    struct Row {
        std::array<cplx, 4> g;
        double w, wh;  // full and half-resolution weights
    };
    std::array<std::vector<Row>, 2> tab;
    for (int m = 0; m < 2; ++m) {
        const Axis &re = ax[2 * m], &im = ax[2 * m + 1];
        tab[m].resize(std::size_t(re.n) * im.n);
        auto half = [](const Axis& a, int i) {
            if (i % 2) return 0.0;
            return (i == 0 || i == a.n - 1) ? a.h() : 2.0 * a.h();
        };
        parallel_for(tab[m].size(), [&](std::size_t k) {
            const int i = int(k / im.n), j = int(k % im.n);
            tab[m][k] = {w.mode(m).g(cplx(re.at(i), im.at(j))), re.trap(i) * im.trap(j), half(re, i) * half(im, j)};
        });
    }
    const std::size_t n1 = tab[0].size();
    std::vector<std::array<double, 4>> part(n1);  // neg, neg_half, norm, abs
    parallel_for(n1, [&](std::size_t a) {
        std::array<double, 4> acc{};
        const Row& ra = tab[0][a];
        for (const Row& rb : tab[1]) {
            const double v = w.combine(ra.g, rb.g);
            const double neg = 0.5 * (std::abs(v) - v);
            const double wt = ra.w * rb.w;
            acc[0] += wt * neg;
            acc[1] += ra.wh * rb.wh * neg;
            acc[2] += wt * v;
            acc[3] += wt * std::abs(v);
        }
        part[a] = acc;
    });
    std::array<double, 4> tot{};
    for (auto& p : part)
        for (int k = 0; k < 4; ++k) tot[k] += p[k];
    NegativeVolumeResult r;
    r.method = "grid";
    r.samples = n1 * tab[1].size();
    r.normalization = tot[2];
    if (std::abs(tot[2] - 1.0) > 1e-2)
        throw BoundsError("negative_volume: grid bounds miss support (normalisation " + std::to_string(tot[2]) + ")");
    r.value = tot[0];
    r.error = std::abs(tot[0] - tot[1]);
    r.total_abs = tot[3];
    return r;
}

inline NegativeVolumeResult negative_volume_ecs(double e1t, double e2t, double V, int n = 41) {
    ThermalEcsWigner w(e1t, e2t, V);
    return negative_volume_ecs(w, ecs_axes(e1t, e2t, V, n));
}

/// Header row naming the axes (dimensionless, tagged [1]), one row per point.
inline void write_csv(std::ostream& os, const WignerGrid& g) {
    for (auto& a : g.axes) os << a.name << "[1],";
    os << "W[1]\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
        for (double x : g.point(k)) os << format_double(x) << ',';
        os << format_double(g.values[k]) << '\n';
    }
}

}  // namespace mesocat
