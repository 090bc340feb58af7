#pragma once

// Laboratory inputs -> effective model parameters (eta, chi, V).

#include "mesocat/core.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace mesocat {

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J/K

struct PhysicalParams {
    double omega_m = 2 * pi * 3e5;  // rad/s
    double omega_c = 1e15;          // rad/s
    double L = 0.01;                // m
    double m = 5e-11;               // kg
    double g = 1.0;                 // rad/s
    double Omega = 1.0;
    double delta = 1.0;
    double Delta = 1.0;
    double gamma = 0.0;
    double T = 0.0;  // K
};

struct EffectiveParams {
    double eta = 0.0;
    double chi = 0.0;
    double V = 1.0;
    double phi = 0.0;
    double d = 0.0;
};

inline double radiation_pressure_coupling(double omega_c, double L, double m, double omega_m) {
    if (!(omega_c > 0 && L > 0 && m > 0 && omega_m > 0))
        throw DomainError("radiation_pressure_coupling: inputs must be positive");
    return (omega_c / L) * std::sqrt(hbar / (2.0 * m * omega_m));
}

inline double effective_coupling(double chi, double g, double Omega, double delta, double Delta) {
    if (delta == 0.0 || Delta == 0.0) throw DomainError("effective_coupling: zero detuning");
    return chi * g * g * Omega * Omega / (delta * delta * Delta * Delta);
}

inline double thermal_variance(double omega_m, double T) {
    if (!(omega_m > 0)) throw DomainError("thermal_variance: omega_m must be positive");
    if (T < 0) throw DomainError("thermal_variance: negative temperature");
    if (T == 0) return 1.0;
    const double x = hbar * omega_m / (2.0 * k_B * T);
    // coth x = 1 + 2/(e^{2x}-1), accurate for both tiny and large x
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

inline double temperature_from_variance(double omega_m, double V) {
    if (!(omega_m > 0)) throw DomainError("temperature_from_variance: omega_m must be positive");
    if (!(V >= 1.0)) throw DomainError("temperature_from_variance: V < 1");
    if (V == 1.0) return 0.0;
    // coth x = V  <=>  2x = log1p(2/(V-1))
    const double x = 0.5 * std::log1p(2.0 / (V - 1.0));
    return hbar * omega_m / (2.0 * k_B * x);
}

struct RegimeCheck {
    std::string name;
    double ratio = 0;
    bool pass = false;
};

struct RegimeReport {
    double factor = 10;
    std::vector<RegimeCheck> checks;

    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string str() const {
        std::ostringstream os;
        for (auto& c : checks)
            os << (c.pass ? "pass " : "WARN ") << c.name << " ratio=" << c.ratio << '\n';
        return os.str();
    }
};

/// Checks the adiabatic-elimination hierarchy: delta >> Omega, g and
/// Delta >> g, chi, each against `factor`.
inline RegimeReport validate_regime(const PhysicalParams& p, double factor = 10.0) {
    RegimeReport r;
    r.factor = factor;
    double chi = 0;
    try {
        chi = radiation_pressure_coupling(p.omega_c, p.L, p.m, p.omega_m);
    } catch (const DomainError&) {
        chi = 0;
    }
    auto add = [&](std::string name, double num, double den) {
        const double ratio = den == 0 ? INFINITY : std::abs(num) / std::abs(den);
        r.checks.push_back({std::move(name), ratio, ratio >= factor});
    };
    add("raman: delta/Omega", p.delta, p.Omega);
    add("raman: delta/g", p.delta, p.g);
    add("cavity: Delta/g", p.Delta, p.g);
    add("cavity: Delta/chi", p.Delta, chi);
    return r;
}

/// Full pipeline; phi and d are not lab-derived and left at zero.
inline EffectiveParams derive_effective(const PhysicalParams& p) {
    if (p.T < 0 || p.gamma < 0) throw DomainError("derive_effective: T and gamma must be >= 0");
    EffectiveParams e;
    e.chi = radiation_pressure_coupling(p.omega_c, p.L, p.m, p.omega_m);
    e.eta = effective_coupling(e.chi, p.g, p.Omega, p.delta, p.Delta);
    e.V = thermal_variance(p.omega_m, p.T);
    return e;
}

}  // namespace mesocat
