#pragma once

// Damped conditional displacement, two ways:
//  * Gaussian components W_ij of <i|rho|j> evolved by moment ODEs
//    (finite temperature, one or two modes);
//  * split-step evolution of coherent dyadics (zero temperature).
//
// Quadratures x = sqrt2 Re mu, p = sqrt2 Im mu, vacuum covariance I/2.
// A component is
//   W_ij(q) = e^{lambda} ((2 pi)^n det D)^{-1/2} exp(-(q - m)^T D^{-1} (q - m) / 2)
// with complex mean m (its imaginary part encodes the interference fringes
// of the off-diagonal blocks) and complex log-weight lambda (imaginary part
// is the phase Theta_ij). Substituting this into the Fokker-Planck equation
// gives, per mode k with u_k = sqrt2 s_k eta_k (cos phi, -sin phi) and
// J(a, b) = (-b, a):
//   dD/dt      = -gamma D + (gamma V / 2) I
//   dm/dt      = -(gamma/2) m - v + i D kappa
//   dlambda/dt = i kappa . m
// where (kappa, v) = (0, Ju) for 00, (-u, Ju/2) for 01, (+u, Ju/2) for 10,
// (0, 0) for 11.

#include "mesocat/analytic.hpp"
#include "mesocat/bell.hpp"

#include <Eigen/LU>

namespace mesocat {

struct GaussianComponent {
    int i = 0, j = 0;
    int modes = 1;
    CVector mean;     // length 2 * modes
    RMatrix cov;      // 2 * modes square
    cplx log_weight;  // log-amplitude + i Theta

    double phase() const { return log_weight.imag(); }
    double log_amplitude() const { return log_weight.real(); }

    /// Value at quadrature point q (density in x, p variables).
    cplx value_q(const RVector& q) const {
        const int n = 2 * modes;
        Eigen::LLT<RMatrix> llt(cov);
        const CVector r = q.cast<cplx>() - mean;
        const CVector y = llt.solve(r.real()).cast<cplx>() + I * llt.solve(r.imag()).cast<cplx>();
        const cplx quad = (r.transpose() * y)(0);
        double logdet = 0;
        for (int k = 0; k < n; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
        return std::exp(log_weight - 0.5 * quad - 0.5 * logdet - 0.5 * n * std::log(2 * pi));
    }
    /// Integral over phase space.
    cplx total() const { return std::exp(log_weight); }
};

struct ComponentSet {
    int modes = 1;
    std::array<GaussianComponent, 4> comp;  // 00, 01, 10, 11

    GaussianComponent& at(int i, int j) { return comp[2 * i + j]; }
    const GaussianComponent& at(int i, int j) const { return comp[2 * i + j]; }

    /// Normalised Wigner function of the |+>-post-selected mirror state,
    /// in the mu variables: point = (mu_1[, mu_2]).
    double postselected_wigner(const std::vector<cplx>& mu) const {
        RVector q(2 * modes);
        for (int k = 0; k < modes; ++k) {
            q(2 * k) = std::sqrt(2.0) * mu[k].real();
            q(2 * k + 1) = std::sqrt(2.0) * mu[k].imag();
        }
        return postselected_wigner_q(q) * std::pow(2.0, modes);
    }
    double postselected_wigner_q(const RVector& q) const {
        cplx s = 0, tot = 0;
        for (auto& c : comp) {
            s += c.value_q(q);
            tot += c.total();
        }
        return s.real() / tot.real();
    }
    double trace() const {
        cplx t = 0;
        for (auto& c : comp) t += c.total();
        return t.real();
    }
};

/// Atom |+><+| times a thermal mirror; every component starts as the same
/// Gaussian with weight 1/4.
inline ComponentSet initial_components(double V, const std::vector<cplx>& d) {
    if (V < 1.0) throw DomainError("initial_components: V < 1");
    const int modes = int(d.size());
    if (modes != 1 && modes != 2) throw DomainError("initial_components: 1 or 2 modes");
    ComponentSet s;
    s.modes = modes;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto& c = s.at(i, j);
            c.i = i;
            c.j = j;
            c.modes = modes;
            c.cov = RMatrix::Identity(2 * modes, 2 * modes) * (V / 2.0);
            c.mean.resize(2 * modes);
            for (int k = 0; k < modes; ++k) {
                c.mean(2 * k) = std::sqrt(2.0) * d[k].real();
                c.mean(2 * k + 1) = std::sqrt(2.0) * d[k].imag();
            }
            c.log_weight = std::log(0.25);
        }
    return s;
}

struct FpOptions {
    double dt = 0.01;  // in units of 1/max(eta, gamma)
    double tol = 1e-8;
    int max_refinements = 10;
    double phi = 0.0;
};

namespace detail {

struct FpDrive {
    CVector kappa;  // complex for uniformity; real in practice
    CVector v;
};

inline std::array<FpDrive, 4> fp_drives(const std::vector<double>& etas, double phi, double scale) {
    const int modes = int(etas.size());
    std::array<FpDrive, 4> out;
    for (auto& d : out) {
        d.kappa = CVector::Zero(2 * modes);
        d.v = CVector::Zero(2 * modes);
    }
    for (int k = 0; k < modes; ++k) {
        const double s = (k == 0 ? 1.0 : -1.0) * etas[k] * scale * std::sqrt(2.0);
        const double ux = s * std::cos(phi), up = -s * std::sin(phi);
        const double jx = -up, jp = ux;  // J u
        // 00
        out[0].v(2 * k) = jx;
        out[0].v(2 * k + 1) = jp;
        // 01
        out[1].kappa(2 * k) = -ux;
        out[1].kappa(2 * k + 1) = -up;
        out[1].v(2 * k) = 0.5 * jx;
        out[1].v(2 * k + 1) = 0.5 * jp;
        // 10
        out[2].kappa(2 * k) = ux;
        out[2].kappa(2 * k + 1) = up;
        out[2].v(2 * k) = 0.5 * jx;
        out[2].v(2 * k + 1) = 0.5 * jp;
    }
    return out;
}

struct FpState {
    RMatrix D;
    CVector m;
    cplx lam;
};

}  // namespace detail

/// Evolves all four components for a time t. Step-halving check on every
/// parameter; throws IntegrationError if it cannot meet opt.tol.
inline ComponentSet evolve_fp(const ComponentSet& in, const std::vector<double>& etas, double gamma, double V,
                              double t, FpOptions opt = {}, std::function<double(double)> profile = {}) {
    if (int(etas.size()) != in.modes) throw DomainError("evolve_fp: one eta per mode");
    if (gamma < 0 || V < 1) throw DomainError("evolve_fp: gamma >= 0 and V >= 1 required");
    if (t == 0) return in;
    const int n = 2 * in.modes;
    double rate = gamma;
    for (double e : etas) rate = std::max(rate, std::abs(e));
    if (rate == 0) return in;

    auto rhs = [&](const detail::FpState& s, const detail::FpDrive& d, detail::FpState& ds) {
        ds.D = -gamma * s.D + RMatrix::Identity(n, n) * (gamma * V / 2.0);
        ds.m = -(gamma / 2.0) * s.m - d.v + I * (s.D.cast<cplx>() * d.kappa);
        ds.lam = I * (d.kappa.transpose() * s.m)(0);
    };
    auto integrate = [&](double dt_abs) {
        ComponentSet out = in;
        const long steps = std::max(1L, long(std::ceil(t / dt_abs - 1e-9)));
        const double h = t / steps;
        for (int c = 0; c < 4; ++c) {
            detail::FpState s{in.comp[c].cov, in.comp[c].mean, in.comp[c].log_weight};
            for (long k = 0; k < steps; ++k) {
                const double t0 = k * h;
                auto drive_at = [&](double tt) {
                    return detail::fp_drives(etas, opt.phi, profile ? profile(tt) : 1.0)[c];
                };
                const auto d0 = drive_at(t0), d1 = drive_at(t0 + h / 2), d2 = drive_at(t0 + h);
                detail::FpState k1, k2, k3, k4, tmp;
                rhs(s, d0, k1);
                tmp = {s.D + (h / 2) * k1.D, s.m + (h / 2) * k1.m, s.lam + (h / 2) * k1.lam};
                rhs(tmp, d1, k2);
                tmp = {s.D + (h / 2) * k2.D, s.m + (h / 2) * k2.m, s.lam + (h / 2) * k2.lam};
                rhs(tmp, d1, k3);
                tmp = {s.D + h * k3.D, s.m + h * k3.m, s.lam + h * k3.lam};
                rhs(tmp, d2, k4);
                s.D += (h / 6) * (k1.D + 2 * k2.D + 2 * k3.D + k4.D);
                s.D = 0.5 * (s.D + s.D.transpose()).eval();
                s.m += (h / 6) * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
                s.lam += (h / 6) * (k1.lam + 2.0 * k2.lam + 2.0 * k3.lam + k4.lam);
            }
            Eigen::LLT<RMatrix> llt(s.D);
            if (llt.info() != Eigen::Success) throw NumericalError("evolve_fp: covariance lost positivity");
            out.comp[c].cov = s.D;
            out.comp[c].mean = s.m;
            out.comp[c].log_weight = s.lam;
        }
        return out;
    };
    auto diff = [&](const ComponentSet& a, const ComponentSet& b) {
        double m = 0;
        for (int c = 0; c < 4; ++c) {
            m = std::max(m, (a.comp[c].cov - b.comp[c].cov).cwiseAbs().maxCoeff());
            m = std::max(m, (a.comp[c].mean - b.comp[c].mean).cwiseAbs().maxCoeff());
            m = std::max(m, std::abs(a.comp[c].log_weight - b.comp[c].log_weight));
        }
        return m;
    };
    double dt = opt.dt / rate;
    ComponentSet coarse = integrate(dt);
    for (int r = 0; r <= opt.max_refinements; ++r) {
        ComponentSet fine = integrate(dt / 2);
        if (diff(coarse, fine) < opt.tol) {
            // conjugate pairing is exact by construction of the drives; enforce bitwise
            fine.comp[2].cov = fine.comp[1].cov;
            fine.comp[2].mean = fine.comp[1].mean.conjugate();
            fine.comp[2].log_weight = std::conj(fine.comp[1].log_weight);
            return fine;
        }
        coarse = std::move(fine);
        dt /= 2;
    }
    throw IntegrationError("evolve_fp: step halving did not converge");
}

// --------------------------------------------------------- split-step dyadics

enum class TrotterRule {
    literal,  // amplitudes e^{-gamma dt}, coefficient <s|l>^{gamma dt}
    lindblad  // exact zero-temperature channel: e^{-gamma dt/2}, <s|l>^{1 - e^{-gamma dt}}
};

struct HybridDyadic {
    int ai = 0, aj = 0;  // |ai><aj| on the atom
    cplx log_coef;
    std::vector<cplx> ket, bra;
};

struct HybridDyadicState {
    int modes = 2;
    std::vector<HybridDyadic> terms;

    /// |+><+| x |alphas><alphas|
    static HybridDyadicState plus_coherent(const std::vector<cplx>& alphas) {
        HybridDyadicState s;
        s.modes = int(alphas.size());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s.terms.push_back({i, j, std::log(0.5), alphas, alphas});
        return s;
    }
    const HybridDyadic& term(int i, int j) const {
        for (auto& t : terms)
            if (t.ai == i && t.aj == j) return t;
        throw DomainError("HybridDyadicState: missing atomic block");
    }
    cplx trace() const {
        cplx s = 0;
        for (auto& t : terms) {
            if (t.ai != t.aj) continue;
            cplx lg = t.log_coef;
            for (int k = 0; k < modes; ++k) lg += coherent::log_overlap(t.bra[k], t.ket[k]);
            s += std::exp(lg);
        }
        return s;
    }
    /// <+| . |+> on the atom, normalised.
    DyadicMixture postselect_plus() const {
        DyadicMixture m;
        m.modes = modes;
        for (auto& t : terms) m.terms.push_back({0.5 * std::exp(t.log_coef), t.ket, t.bra});
        return m.normalize();
    }
};

/// (D^1 D^2 U)^N with U the conditional displacement over t/N (phi = 0,
/// mode signs +, -) and D the dyadic damping rule.
inline HybridDyadicState trotter_evolve(HybridDyadicState s, const std::vector<double>& etas, double gamma, double t,
                                        int N, TrotterRule rule = TrotterRule::literal) {
    if (N < 1) throw DomainError("trotter_evolve: N >= 1");
    if (gamma < 0) throw DomainError("trotter_evolve: gamma >= 0");
    if (int(etas.size()) != s.modes) throw DomainError("trotter_evolve: one eta per mode");
    const double dt = t / N;
    std::vector<cplx> zeta(s.modes);
    for (int k = 0; k < s.modes; ++k) zeta[k] = (k == 0 ? -I : I) * etas[k] * dt;
    double amp, expo;
    if (rule == TrotterRule::literal) {
        amp = std::exp(-gamma * dt);
        expo = gamma * dt;
    } else {
        amp = std::exp(-gamma * dt / 2);
        expo = -std::expm1(-gamma * dt);
    }
    for (int step = 0; step < N; ++step) {
        for (auto& tm : s.terms) {
            for (int k = 0; k < s.modes; ++k) {
                if (tm.ai == 0) {
                    tm.log_coef += I * coherent::displacement_phase(zeta[k], tm.ket[k]);
                    tm.ket[k] += zeta[k];
                }
                if (tm.aj == 0) {
                    tm.log_coef -= I * coherent::displacement_phase(zeta[k], tm.bra[k]);
                    tm.bra[k] += zeta[k];
                }
            }
            if (gamma > 0)
                for (int k = 0; k < s.modes; ++k) {
                    tm.log_coef += expo * coherent::log_overlap(tm.bra[k], tm.ket[k]);
                    tm.ket[k] *= amp;
                    tm.bra[k] *= amp;
                }
        }
    }
    return s;
}

struct TrotterExponents {
    double Gamma = 0;  // -log |c01 / c11|
    double theta = 0;  // -arg(c01 / c11)
};

/// Decoherence exponent and phase of the |beta><alpha| coherence relative to
/// the undisplaced diagonal block.
inline TrotterExponents trotter_exponents(const HybridDyadicState& s) {
    const cplx r = s.term(0, 1).log_coef - s.term(1, 1).log_coef;
    return {-r.real(), -r.imag()};
}

// ---------------------------------------------------------- CHSH vs time

struct ChshTimePoint {
    double gamma_t = 0;
    double best = 0;
    OptimizationReport report;
};

struct ChshTimeOptions {
    int multistarts = 8;
    std::uint64_t seed = 1;
    PhaseConvention phase = PhaseConvention::trotter_limit;
};

/// CHSH maximised at each time on the grid for the closed-form damped ECS
/// starting from |0,0>; each point is warm-started from the previous optimum.
inline std::vector<ChshTimePoint> chsh_vs_time(const std::vector<double>& etas, double gamma,
                                               const std::vector<double>& times, ChshTimeOptions opt = {}) {
    std::vector<ChshTimePoint> out;
    std::vector<std::vector<double>> warm;
    const std::vector<cplx> alphas(etas.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        ChshTimePoint p;
        p.gamma_t = gamma * t;
        if (t == 0) {
            p.best = 2.0;  // product vacuum: parity settings reach the classical bound exactly
            out.push_back(p);
            continue;
        }
        const DyadicMixture m = dissipative_ecs(t, gamma, alphas, etas, opt.phase);
        auto w = [&](cplx a, cplx b) { return m.wigner({a, b}); };
        double amax = 0;
        for (auto& tm : m.terms)
            for (auto z : tm.ket) amax = std::max(amax, std::abs(z));
        p.report = optimize_chsh_two(w, std::min(amax, 3.0), opt.multistarts, opt.seed + k, warm);
        p.best = p.report.best_value;
        warm = {p.report.best_x};
        out.push_back(std::move(p));
    }
    return out;
}

/// Total gamma t span where the curve exceeds `level` (crossings linearly
/// interpolated between grid points).
inline double violation_width(const std::vector<ChshTimePoint>& c, double level = 2.0) {
    double w = 0;
    for (std::size_t k = 0; k + 1 < c.size(); ++k) {
        const double a = c[k].best - level, b = c[k + 1].best - level;
        const double x0 = c[k].gamma_t, x1 = c[k + 1].gamma_t;
        if (a > 0 && b > 0)
            w += x1 - x0;
        else if (a > 0 || b > 0)
            w += (x1 - x0) * (a > 0 ? a : b) / std::abs(a - b);
    }
    return w;
}

}  // namespace mesocat
