#pragma once

// Closed-form coherent-state algebra. Everything here is exact; the Fock
// oracle exists to check it.

#include "mesocat/core.hpp"

#include <cmath>

namespace mesocat::coherent {

/// log <a|b>
inline cplx log_overlap(cplx a, cplx b) {
    return -0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b;
}

inline cplx overlap(cplx a, cplx b) { return std::exp(log_overlap(a, b)); }

/// Phase picked up by D(z)|a> = e^{i Im(z a*)} |a+z>.
inline double displacement_phase(cplx z, cplx a) { return std::imag(z * std::conj(a)); }

/// log <a| Pi(beta) |b>, Pi(beta) = D(beta) (-1)^n D(beta)^dagger.
inline cplx log_parity_element(cplx a, cplx b, cplx beta) {
    const double ph = -std::imag(beta * std::conj(b)) + std::imag(beta * std::conj(a));
    return I * ph + log_overlap(a - beta, beta - b);
}

inline cplx parity_element(cplx a, cplx b, cplx beta) {
    return std::exp(log_parity_element(a, b, beta));
}

/// Wigner function of the dyadic |a><b| at mu: (2/pi) <b|Pi(mu)|a>.
inline cplx dyadic_wigner(cplx ket, cplx bra, cplx mu) {
    return (2.0 / pi) * parity_element(bra, ket, mu);
}

/// Coherent-state Wigner function, (2/pi) exp(-2|mu-a|^2).
inline double wigner(cplx a, cplx mu) { return (2.0 / pi) * std::exp(-2.0 * std::norm(mu - a)); }

}  // namespace mesocat::coherent
