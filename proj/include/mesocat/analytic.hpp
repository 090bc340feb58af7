#pragma once

// Closed forms for the conditional-displacement states: cat states, ECS,
// thermal convolutions of their Wigner functions, the pure-state correlation
// function and the damped two-mode mixture.

#include "mesocat/coherent.hpp"
#include "mesocat/quadrature.hpp"

#include <array>
#include <functional>
#include <optional>

namespace mesocat {

struct CoherentComponent {
    cplx weight;
    std::vector<cplx> amp;  // one amplitude per mode
    int atom = -1;          // atomic label, -1 for mirror-only states
};

struct SuperposedCoherentState {
    int modes = 1;
    std::vector<CoherentComponent> comps;
    bool normalized = false;

    cplx inner(const SuperposedCoherentState& o) const {
        cplx s = 0;
        for (auto& a : comps)
            for (auto& b : o.comps) {
                if (a.atom != b.atom) continue;
                cplx lg = 0;
                for (int k = 0; k < modes; ++k) lg += coherent::log_overlap(a.amp[k], b.amp[k]);
                s += std::conj(a.weight) * b.weight * std::exp(lg);
            }
        return s;
    }
    double norm2() const { return inner(*this).real(); }

    SuperposedCoherentState& normalize() {
        const double n = std::sqrt(norm2());
        if (!(n > 0)) throw DegenerateOutcomeError("SuperposedCoherentState: zero norm");
        for (auto& c : comps) c.weight /= n;
        normalized = true;
        return *this;
    }

    /// Wigner function of the mirror state (mirror-only descriptors).
    double wigner(const std::vector<cplx>& mu) const {
        cplx s = 0;
        for (auto& a : comps)
            for (auto& b : comps) {
                if (a.atom != b.atom) continue;
                cplx w = a.weight * std::conj(b.weight);
                for (int k = 0; k < modes; ++k) w *= coherent::dyadic_wigner(a.amp[k], b.amp[k], mu[k]);
                s += w;
            }
        return s.real() / norm2();
    }
};

/// (|1,alpha> + e^{-i Phi}|0, alpha - i eta_t e^{-i phi}>)/sqrt2, Phi = eta_t Re[alpha e^{i phi}].
inline SuperposedCoherentState cat_state(cplx alpha, double eta_t, double phi) {
    const double Phi = eta_t * std::real(alpha * std::exp(I * phi));
    const cplx zeta = -I * eta_t * std::exp(-I * phi);
    SuperposedCoherentState s;
    s.modes = 1;
    s.comps.push_back({1.0 / std::sqrt(2.0), {alpha}, 1});
    s.comps.push_back({std::exp(-I * Phi) / std::sqrt(2.0), {alpha + zeta}, 0});
    return s.normalize();
}

/// Mirror state after projecting the atom of cat_state onto |+>.
inline SuperposedCoherentState postselected_cat(cplx alpha, double eta_t, double phi) {
    const double Phi = eta_t * std::real(alpha * std::exp(I * phi));
    const cplx zeta = -I * eta_t * std::exp(-I * phi);
    SuperposedCoherentState s;
    s.comps.push_back({1.0, {alpha}});
    s.comps.push_back({std::exp(-I * Phi), {alpha + zeta}});
    return s.normalize();
}

inline double ecs_phase(cplx a1, cplx a2, double e1t, double e2t) {
    return e1t * a1.real() - e2t * a2.real();
}

/// (|a1,a2> + e^{-i Phi}|b1,b2>)/sqrt2 with b_j = a_j + (-1)^j i eta_j t.
inline SuperposedCoherentState ecs_state(cplx a1, cplx a2, double e1t, double e2t) {
    SuperposedCoherentState s;
    s.modes = 2;
    s.comps.push_back({1.0 / std::sqrt(2.0), {a1, a2}});
    s.comps.push_back({std::exp(-I * ecs_phase(a1, a2, e1t, e2t)) / std::sqrt(2.0),
                       {a1 - I * e1t, a2 + I * e2t}});
    return s.normalize();
}

/// Same ECS before the atomic projection (atom labels kept).
inline SuperposedCoherentState ecs_hybrid(cplx a1, cplx a2, double e1t, double e2t) {
    SuperposedCoherentState s;
    s.modes = 2;
    s.comps.push_back({1.0 / std::sqrt(2.0), {a1, a2}, 1});
    s.comps.push_back({std::exp(-I * ecs_phase(a1, a2, e1t, e2t)) / std::sqrt(2.0),
                       {a1 - I * e1t, a2 + I * e2t}, 0});
    return s.normalize();
}

// ---------------------------------------------------------------- entropy

enum class EntropyConvention {
    standard,       // component overlap |<a|a - i eta t>| = e^{-(eta t)^2/2}
    squared_overlap  // overlap e^{-(eta t)^2}; 0.8 bit at eta t = 0.82
};

inline double binary_entropy(double p) {
    auto h = [](double x) { return x > 0 ? -x * std::log2(x) : 0.0; };
    return std::clamp(h(p) + h(1.0 - p), 0.0, 1.0);
}

/// Atomic entropy of cat_state; depends on eta_t only.
inline double cat_entropy(double eta_t, EntropyConvention c = EntropyConvention::standard) {
    const double x = eta_t * eta_t;
    const double s = c == EntropyConvention::standard ? std::exp(-0.5 * x) : std::exp(-x);
    return binary_entropy(0.5 * (1.0 + s));
}

// ------------------------------------------------------ correlation function

/// Closed form for V = 1, phi = pi/2, alpha = d real.
inline double correlation_pure(cplx beta, double theta, double d, double eta_t) {
    const double br = beta.real(), bi = beta.imag(), et = eta_t;
    const double pre = 0.5 * std::exp(-2.0 * (d * d + et * et + std::norm(beta) + br * et - 2.0 * br * d));
    return pre * (std::cos(theta) * (std::exp(4 * d * et - 2 * et * br) - std::exp(2 * et * et + 2 * et * br)) +
                  2.0 * std::exp(et * (2 * d + 1.5 * et)) * std::cos(2 * et * bi) * std::sin(theta));
}

/// (<sz x Pi(beta)>, <sx x Pi(beta)>) for cat_state(alpha, eta_t, phi).
inline std::array<double, 2> cat_parity_components(cplx alpha, double eta_t, double phi, cplx beta) {
    const cplx zeta = -I * eta_t * std::exp(-I * phi);
    const cplx a2 = alpha + zeta;
    const double Z = 0.5 * (coherent::parity_element(a2, a2, beta) - coherent::parity_element(alpha, alpha, beta)).real();
    const cplx c = std::exp(I * coherent::displacement_phase(zeta, alpha));
    const double X = (c * coherent::parity_element(alpha, a2, beta)).real();
    return {Z, X};
}

inline double correlation_coherent(cplx alpha, double eta_t, double phi, cplx beta, double theta) {
    auto zx = cat_parity_components(alpha, eta_t, phi, beta);
    return std::cos(theta) * zx[0] + std::sin(theta) * zx[1];
}

/// Thermal C(beta, theta) with node count fixed once at construction by
/// the doubling test; evaluation is then a plain weighted sum.
class ThermalCorrelation {
public:
    ThermalCorrelation(double d, double eta_t, double V, double phi = pi / 2, double tol = 1e-7)
        : d_(d), eta_t_(eta_t), V_(V), phi_(phi) {
        if (V < 1.0) throw DomainError("ThermalCorrelation: V < 1");
        if (V == 1.0) {
            nodes_ = thermal_nodes(1.0, d, 1);
            return;
        }
        const cplx probes[3] = {0.0, cplx(0.4, 0.3), cplx(d - 0.5 * eta_t, -0.2)};
        int n = thermal_node_rule(eta_t, V);
        auto eval = [&](const std::vector<PNode>& nodes, cplx b) {
            std::array<double, 2> acc{0, 0};
            for (auto& p : nodes) {
                auto zx = cat_parity_components(p.alpha, eta_t_, phi_, b);
                acc[0] += p.weight * zx[0];
                acc[1] += p.weight * zx[1];
            }
            return acc;
        };
        auto prev = thermal_nodes(V, d, n);
        for (;;) {
            auto next = thermal_nodes(V, d, 2 * n);
            double change = 0;
            for (cplx b : probes) {
                auto u = eval(prev, b), w = eval(next, b);
                change = std::max({change, std::abs(u[0] - w[0]), std::abs(u[1] - w[1])});
            }
            if (change <= tol) break;
            n *= 2;
            prev = std::move(next);
            if (n > 640) throw IntegrationError("ThermalCorrelation: node doubling did not converge");
        }
        nodes_ = std::move(prev);
        n_ = n;
    }

    std::array<double, 2> components(cplx beta) const {
        std::array<double, 2> acc{0, 0};
        for (auto& p : nodes_) {
            auto zx = cat_parity_components(p.alpha, eta_t_, phi_, beta);
            acc[0] += p.weight * zx[0];
            acc[1] += p.weight * zx[1];
        }
        return acc;
    }
    double operator()(cplx beta, double theta) const {
        auto zx = components(beta);
        return std::cos(theta) * zx[0] + std::sin(theta) * zx[1];
    }
    int nodes_per_axis() const { return n_; }

private:
    double d_, eta_t_, V_, phi_;
    int n_ = 1;
    std::vector<PNode> nodes_;
};

inline double correlation_thermal(cplx beta, double theta, double d, double eta_t, double V,
                                  double phi = pi / 2) {
    return ThermalCorrelation(d, eta_t, V, phi)(beta, theta);
}

// ------------------------------------------------ conditional Wigner (d = 0)

/// Normalisation of the closed-form conditional Wigner function.
inline double conditional_wigner_norm(double eta_t, double V) {
    return (1.0 + std::exp(-V * eta_t * eta_t / 2.0)) * pi * V / 2.0;
}

/// Post-selected (|+>) thermal mirror state at d = 0, phi = 0.
inline double conditional_wigner_thermal(cplx mu, double eta_t, double V) {
    if (V < 1.0) throw DomainError("conditional_wigner_thermal: V < 1");
    const double mr = mu.real(), mi = mu.imag(), et = eta_t;
    const double g = std::exp(-(2.0 * std::norm(mu) + 2.0 * et * mi + et * et) / V);
    return g * (std::cosh((et * et + 2.0 * et * mi) / V) + std::exp(et * et / (2.0 * V)) * std::cos(2.0 * et * mr)) /
           conditional_wigner_norm(eta_t, V);
}

// ----------------------------------------------- per-mode thermal factors

/// For one mode with P-function (V, d) and conditional displacement zeta:
///   g^{ss'}(mu) = int P  c^s conj(c)^{s'} W[|a + s zeta><a + s' zeta|](mu)
///   t^{ss'}     = int P  c^s conj(c)^{s'} <a + s' zeta|a + s zeta>
/// with c = e^{i Im(zeta a*)}. Products of these over modes give the
/// post-selected thermal Wigner function.
class ModeFactor {
public:
    ModeFactor(cplx zeta, double V, cplx d, double tol = 1e-7) : zeta_(zeta), V_(V), d_(d) {
        if (V < 1.0) throw DomainError("ModeFactor: V < 1");
        if (V == 1.0) {
            nodes_ = thermal_nodes(1.0, d, 1);
            compute_traces();
            return;
        }
        int n = thermal_node_rule(std::abs(zeta), V);
        nodes_ = thermal_nodes(V, d, n);
        const cplx probes[3] = {d, d + 0.5 * zeta, d + zeta + cplx(0.3, -0.2)};
        for (;;) {
            std::vector<PNode> finer = thermal_nodes(V, d, 2 * n);
            ModeFactor a(*this, nodes_), b(*this, finer);
            double change = 0;
            for (int k = 0; k < 4; ++k) change = std::max(change, std::abs(a.t_[k] - b.t_[k]));
            for (cplx p : probes) {
                auto ga = a.g(p), gb = b.g(p);
                for (int k = 0; k < 4; ++k) change = std::max(change, std::abs(ga[k] - gb[k]));
            }
            if (change <= tol) break;
            n *= 2;
            nodes_ = std::move(finer);
            if (n > 640) throw IntegrationError("ModeFactor: node doubling did not converge");
        }
        n_ = n;
        compute_traces();
    }

    /// g^{00}, g^{01}, g^{10}, g^{11} at mu
    std::array<cplx, 4> g(cplx mu) const {
        std::array<cplx, 4> acc{};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const cplx a = nodes_[i].alpha, a1 = a + zeta_;
            const double w = nodes_[i].weight;
            const cplx c = phase_[i];
            acc[0] += w * coherent::dyadic_wigner(a, a, mu);
            acc[1] += w * std::conj(c) * coherent::dyadic_wigner(a, a1, mu);
            acc[2] += w * c * coherent::dyadic_wigner(a1, a, mu);
            acc[3] += w * coherent::dyadic_wigner(a1, a1, mu);
        }
        return acc;
    }
    const std::array<cplx, 4>& t() const { return t_; }
    int nodes_per_axis() const { return n_; }
    cplx zeta() const { return zeta_; }

private:
    ModeFactor(const ModeFactor& proto, std::vector<PNode> nodes)
        : zeta_(proto.zeta_), V_(proto.V_), d_(proto.d_), nodes_(std::move(nodes)) {
        compute_traces();
    }
    void compute_traces() {
        phase_.resize(nodes_.size());
        t_ = {};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const cplx a = nodes_[i].alpha, a1 = a + zeta_;
            const double w = nodes_[i].weight;
            const cplx c = std::exp(I * coherent::displacement_phase(zeta_, a));
            phase_[i] = c;
            t_[0] += w;
            t_[1] += w * std::conj(c) * coherent::overlap(a1, a);
            t_[2] += w * c * coherent::overlap(a, a1);
            t_[3] += w;
        }
    }

    cplx zeta_;
    double V_;
    cplx d_;
    int n_ = 1;
    std::vector<PNode> nodes_;
    std::vector<cplx> phase_;
    std::array<cplx, 4> t_{};
};

/// Single-mode post-selected thermal Wigner for any d and phi (quadrature
/// route; agrees with conditional_wigner_thermal at d = 0, phi = 0).
class ThermalCatWigner {
public:
    ThermalCatWigner(double eta_t, double V, cplx d = 0.0, double phi = 0.0)
        : f_(-I * eta_t * std::exp(-I * phi), V, d) {
        auto& t = f_.t();
        tr_ = (t[0] + t[1] + t[2] + t[3]).real();
    }
    double operator()(cplx mu) const {
        auto g = f_.g(mu);
        return (g[0] + g[1] + g[2] + g[3]).real() / tr_;
    }
    const ModeFactor& factor() const { return f_; }
    double trace() const { return tr_; }

private:
    ModeFactor f_;
    double tr_;
};

/// Two-mode post-selected thermal ECS Wigner function.
class ThermalEcsWigner {
public:
    ThermalEcsWigner(double e1t, double e2t, double V, cplx d1 = 0.0, cplx d2 = 0.0)
        : f1_(-I * e1t, V, d1), f2_(I * e2t, V, d2) {
        cplx tr = 0;
        for (int k = 0; k < 4; ++k) tr += f1_.t()[k] * f2_.t()[k];
        tr_ = tr.real();
    }
    double operator()(cplx mu1, cplx mu2) const { return combine(f1_.g(mu1), f2_.g(mu2)); }
    double combine(const std::array<cplx, 4>& g1, const std::array<cplx, 4>& g2) const {
        cplx s = 0;
        for (int k = 0; k < 4; ++k) s += g1[k] * g2[k];
        return s.real() / tr_;
    }
    const ModeFactor& mode(int j) const { return j == 0 ? f1_ : f2_; }

private:
    ModeFactor f1_, f2_;
    double tr_;
};

inline double two_mode_wigner_thermal(cplx mu1, cplx mu2, double e1t, double e2t, double V, cplx d1 = 0.0,
                                      cplx d2 = 0.0) {
    return ThermalEcsWigner(e1t, e2t, V, d1, d2)(mu1, mu2);
}

// ------------------------------------------------------------- fidelity

struct Bounds2 {
    double x0, x1, y0, y1;
};

/// pi * int W_P W_M over a rectangle, trapezoid rule; both inputs must
/// integrate to 1 within 1e-4 there.
inline double fidelity_overlap(const std::function<double(cplx)>& wp, const std::function<double(cplx)>& wm,
                               Bounds2 b, int resolution) {
    if (resolution < 8) throw DomainError("fidelity_overlap: resolution < 8");
    const double hx = (b.x1 - b.x0) / (resolution - 1), hy = (b.y1 - b.y0) / (resolution - 1);
    double np = 0, nm = 0, ov = 0;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            const double w = ((i == 0 || i == resolution - 1) ? 0.5 : 1.0) *
                             ((j == 0 || j == resolution - 1) ? 0.5 : 1.0) * hx * hy;
            const cplx mu(b.x0 + i * hx, b.y0 + j * hy);
            const double a = wp(mu), c = wm(mu);
            np += w * a;
            nm += w * c;
            ov += w * a * c;
        }
    if (std::abs(np - 1.0) > 1e-4 || std::abs(nm - 1.0) > 1e-4)
        throw BoundsError("fidelity_overlap: normalisation check failed (" + std::to_string(np) + ", " +
                          std::to_string(nm) + ")");
    return pi * ov;
}

// ---------------------------------------------------- damped two-mode ECS

struct Dyadic {
    cplx coef;
    std::vector<cplx> ket, bra;  // |ket><bra|
};

struct DyadicMixture {
    int modes = 2;
    std::vector<Dyadic> terms;

    cplx trace() const {
        cplx s = 0;
        for (auto& t : terms) {
            cplx lg = 0;
            for (int k = 0; k < modes; ++k) lg += coherent::log_overlap(t.bra[k], t.ket[k]);
            s += t.coef * std::exp(lg);
        }
        return s;
    }
    DyadicMixture& normalize() {
        const cplx tr = trace();
        if (!(std::abs(tr) > 0)) throw DegenerateOutcomeError("DyadicMixture: zero trace");
        for (auto& t : terms) t.coef /= tr;
        return *this;
    }
    /// Unnormalised coherent-dyadic Wigner sum divided by the trace.
    double wigner(const std::vector<cplx>& mu) const {
        cplx s = 0;
        for (auto& t : terms) {
            cplx w = t.coef;
            for (int k = 0; k < modes; ++k) w *= coherent::dyadic_wigner(t.ket[k], t.bra[k], mu[k]);
            s += w;
        }
        return s.real() / trace().real();
    }
    bool hermitian(double tol = 1e-12) const {
        for (auto& t : terms) {
            bool found = false;
            for (auto& u : terms)
                if (std::abs(u.coef - std::conj(t.coef)) <= tol && u.ket == t.bra && u.bra == t.ket) found = true;
            if (!found) return false;
        }
        return true;
    }
};

enum class PhaseConvention {
    trotter_limit,  // N -> infinity limit of the split-step scheme (default)
    printed         // sum (eta_j / 2 gamma) Re(alpha_j)(1 - e^{-2 gamma t})
};

/// Gamma(t) = sum_j (eta_j^2 / 2 gamma^2)[gamma t + (1 - e^{-2 gamma t})/2 - 2(1 - e^{-gamma t})]
inline double decoherence_exponent(double t, double gamma, const std::vector<double>& etas) {
    if (!(gamma > 0)) throw DomainError("decoherence_exponent: gamma must be > 0");
    const double x = gamma * t;
    // series below x ~ 1e-3 avoids cancellation: x^3/3 - x^4/4 + 7x^5/60
    const double br = x < 1e-3 ? x * x * x / 3.0 - x * x * x * x / 4.0 + 7.0 * std::pow(x, 5) / 60.0
                               : x + 0.5 * (-std::expm1(-2 * x)) - 2.0 * (-std::expm1(-x));
    double s = 0;
    for (double e : etas) s += e * e / (2.0 * gamma * gamma) * br;
    return s;
}

inline double dissipative_phase(double t, double gamma, const std::vector<double>& etas,
                                const std::vector<cplx>& alphas, PhaseConvention c = PhaseConvention::trotter_limit) {
    if (!(gamma > 0)) throw DomainError("dissipative_phase: gamma must be > 0");
    double s = 0;
    for (std::size_t j = 0; j < etas.size(); ++j) {
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        const double a = alphas[j].real();
        if (c == PhaseConvention::printed)
            s += etas[j] / (2.0 * gamma) * a * (-std::expm1(-2 * gamma * t));
        else
            s += sign * etas[j] * a * (2.0 * (-std::expm1(-gamma * t)) - 0.5 * (-std::expm1(-2 * gamma * t))) / gamma;
    }
    return s;
}

/// alpha_j(t) = alpha_j e^{-gamma t},  beta_j(t) = alpha_j(t) + (-1)^j i eta_j (1 - e^{-gamma t})/gamma.
inline DyadicMixture dissipative_ecs(double t, double gamma, const std::vector<cplx>& alphas,
                                     const std::vector<double>& etas, PhaseConvention c = PhaseConvention::trotter_limit) {
    if (!(gamma > 0)) throw DomainError("dissipative_ecs: gamma must be > 0 (use ecs_state)");
    if (alphas.size() != etas.size()) throw DomainError("dissipative_ecs: size mismatch");
    const int modes = int(etas.size());
    std::vector<cplx> a(modes), b(modes);
    const double decay = std::exp(-gamma * t), grow = -std::expm1(-gamma * t);
    for (int j = 0; j < modes; ++j) {
        const double sign = j % 2 == 0 ? -1.0 : 1.0;  // (-1)^j with j counted from 1
        a[j] = alphas[j] * decay;
        b[j] = a[j] + sign * I * etas[j] * grow / gamma;
    }
    const double G = decoherence_exponent(t, gamma, etas);
    const double th = dissipative_phase(t, gamma, etas, alphas, c);
    DyadicMixture m;
    m.modes = modes;
    m.terms.push_back({0.5, a, a});
    m.terms.push_back({0.5, b, b});
    m.terms.push_back({0.5 * std::exp(-I * th - G), b, a});
    m.terms.push_back({0.5 * std::exp(I * th - G), a, b});
    return m.normalize();
}

/// The unitary ECS as a dyadic mixture (gamma = 0 reference).
inline DyadicMixture as_mixture(const SuperposedCoherentState& s) {
    DyadicMixture m;
    m.modes = s.modes;
    for (auto& a : s.comps)
        for (auto& b : s.comps) m.terms.push_back({a.weight * std::conj(b.weight), a.amp, b.amp});
    return m.normalize();
}

}  // namespace mesocat
