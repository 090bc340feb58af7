#pragma once

// Gauss-Hermite rules (weight e^{-x^2}) and the thermal P-function average
// built on them.

#include "mesocat/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>

namespace mesocat {

struct GaussHermite {
    std::vector<double> x, w;
};

namespace detail {
// Golub-Welsch on the Hermite Jacobi matrix, then a Newton polish of each
// node on the orthonormal recurrence (skipped where it underflows).
inline GaussHermite compute_gauher(int n) {
    GaussHermite r;
    r.x.assign(n, 0.0);
    r.w.assign(n, 0.0);
    RVector diag = RVector::Zero(n), sub = RVector::Zero(std::max(0, n - 1));
    for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw NumericalError("gauss_hermite: eigen-decomposition failed");
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    for (int i = 0; i < n; ++i) {
        const int k = n - 1 - i;  // descending order
        double z = es.eigenvalues()(k);
        double w = std::sqrt(pi) * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
        for (int it = 0; it < 3; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(double(j) / (j + 1)) * p3;
            }
            const double pp = std::sqrt(2.0 * n) * p2;
            if (!(std::abs(pp) > 1e-150) || !std::isfinite(p1)) break;
            const double step = p1 / pp;
            if (std::abs(step) > 1e-6) break;  // polishing only
            z -= step;
            w = 2.0 / (pp * pp);
        }
        r.x[i] = z;
        r.w[i] = w;
    }
    // exact symmetry
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.x[i] - r.x[n - 1 - i]), w = 0.5 * (r.w[i] + r.w[n - 1 - i]);
        r.x[i] = x;
        r.x[n - 1 - i] = -x;
        r.w[i] = r.w[n - 1 - i] = w;
    }
    if (n % 2) r.x[n / 2] = 0.0;
    return r;
}
}  // namespace detail

/// Cached n-point rule; nodes in descending order.
inline const GaussHermite& gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: n < 1");
    static std::mutex mx;
    static std::map<int, GaussHermite> cache;
    std::lock_guard lk(mx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauher(n)).first;
    return it->second;
}

/// Node count per real axis for a thermal average whose integrand
/// oscillates at ~eta_t across the P-function width.
inline int thermal_node_rule(double eta_t, double V) {
    const double s = std::sqrt(std::max(0.0, V - 1.0));
    return std::max(20, static_cast<int>(std::ceil(4.0 * std::abs(eta_t) * s)) + 10);
}

/// One point of a 2D thermal P-function rule: alpha = d + s (x + i y).
struct PNode {
    cplx alpha;
    double weight;
};

/// Tensor Gauss-Hermite discretisation of
/// P(alpha,V) = 2 exp(-2|alpha-d|^2/(V-1)) / (pi (V-1)); a single node at V=1.
inline std::vector<PNode> thermal_nodes(double V, cplx d, int n) {
    if (V < 1.0) throw DomainError("thermal_nodes: V < 1");
    if (V == 1.0) return {{d, 1.0}};
    const auto& gh = gauss_hermite(n);
    const double s = std::sqrt((V - 1.0) / 2.0);
    std::vector<PNode> out;
    out.reserve(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.push_back({d + cplx(s * gh.x[i], s * gh.x[j]), gh.w[i] * gh.w[j] / pi});
    return out;
}

/// Thermal average of f(alpha) with node doubling until the change is
/// below tol.
template <class F>
auto thermal_average(F&& f, double V, cplx d, int n0, double tol = 1e-7, int n_max = 640) {
    using R = decltype(f(cplx{}));
    auto run = [&](int n) {
        R acc{};
        for (auto& p : thermal_nodes(V, d, n)) acc += p.weight * f(p.alpha);
        return acc;
    };
    if (V == 1.0) return run(1);
    R prev = run(n0);
    for (int n = 2 * n0; n <= n_max; n *= 2) {
        R cur = run(n);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw IntegrationError("thermal_average: node doubling did not converge");
}

}  // namespace mesocat
