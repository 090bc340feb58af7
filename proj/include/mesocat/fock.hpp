#pragma once

// Brute-force number-basis engine. Independent of the coherent-state
// algebra in analytic.hpp: operators come from matrix elements, observables
// from traces.

#include "mesocat/core.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <utility>

namespace mesocat::fock {

struct TruncationPolicy {
    int base = 20;

    int required(double amax) const {
        const double a = std::abs(amax);
        return std::max(base, static_cast<int>(std::ceil(a * a + 8.0 * a + 20.0)));
    }
    void check(int dim, double amax, const char* where) const {
        if (dim < required(amax))
            throw TruncationError(std::string(where) + ": dim " + std::to_string(dim) +
                                  " below policy " + std::to_string(required(amax)));
    }
};

inline const TruncationPolicy& policy() {
    static const TruncationPolicy p{};
    return p;
}

struct FockDensityMatrix {
    int dim = 0;    // per mode
    int modes = 1;  // 1 or 2; two-mode index n1*dim + n2
    CMatrix data;
    double weight = 1.0;  // trace of the unnormalised object it came from

    double trace() const { return data.trace().real(); }
};

/// Atom (basis |0>,|1>) times mirror(s); atom index slowest.
struct HybridState {
    int dim = 0;
    int modes = 1;
    bool pure = true;
    CVector psi;  // when pure
    CMatrix rho;  // when mixed

    Eigen::Index mirror_size() const { return modes == 1 ? dim : Eigen::Index(dim) * dim; }
    CMatrix density() const { return pure ? CMatrix(psi * psi.adjoint()) : rho; }
};

inline CVector coherent_state(cplx alpha, int dim) {
    policy().check(dim, std::abs(alpha), "coherent_state");
    CVector v(dim);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(double(n));
    return v;
}

namespace detail {
// <m|D(z)|k> for m < rows, k < cols from the associated-Laguerre closed
// form, walking each diagonal with the normalised three-term recurrence.
// Elements are exact (not affected by truncation).
inline CMatrix displacement_elements(cplx z, int rows, int cols) {
    CMatrix D = CMatrix::Zero(rows, cols);
    const double r = std::abs(z);
    const double x = r * r;
    if (r == 0.0) {
        for (int i = 0; i < std::min(rows, cols); ++i) D(i, i) = 1.0;
        return D;
    }
    const cplx up = z / r;               // m >= k
    const cplx down = -std::conj(z) / r;  // m < k
    const int qmax = std::max(rows, cols);
    for (int q = 0; q < qmax; ++q) {
        for (int side = 0; side < 2; ++side) {
            if (side == 1 && q == 0) continue;
            // side 0: m = j+q, k = j ; side 1: m = j, k = j+q
            const int jmax = side == 0 ? std::min(rows - q, cols) : std::min(rows, cols - q);
            if (jmax <= 0) continue;
            double logpref = q * std::log(r) - 0.5 * std::lgamma(q + 1.0) - 0.5 * x;
            const cplx ph = std::pow(side == 0 ? up : down, q);
            double lm1 = 0.0, l0 = 1.0;
            for (int j = 0; j < jmax; ++j) {
                if (j > 0) {
                    const double jj = j - 1;
                    const double l1 = ((2 * jj + 1 + q - x) * l0 - std::sqrt(jj * (jj + q)) * lm1) /
                                      std::sqrt((jj + 1) * (jj + 1 + q));
                    lm1 = l0;
                    l0 = l1;
                    if (std::abs(l0) > 1e100) {
                        l0 *= 1e-100;
                        lm1 *= 1e-100;
                        logpref += 100.0 * std::log(10.0);
                    }
                }
                const double mag = logpref < -745.0 ? 0.0 : l0 * std::exp(logpref);
                const cplx val = mag * ph;
                if (side == 0)
                    D(j + q, j) = val;
                else
                    D(j, j + q) = val;
            }
        }
    }
    return D;
}
}  // namespace detail

inline CMatrix displacement_matrix(cplx zeta, int dim) {
    policy().check(dim, std::abs(zeta), "displacement_matrix");
    return detail::displacement_elements(zeta, dim, dim);
}

/// Reference implementation by matrix exponential, for small dim only.
inline CMatrix displacement_expm(cplx zeta, int dim) {
    CMatrix a = CMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    // Taylor series with scaling and squaring
    const CMatrix G = zeta * a.adjoint() - std::conj(zeta) * a;
    const double nrm = G.cwiseAbs().rowwise().sum().maxCoeff();
    int s = nrm > 0.5 ? static_cast<int>(std::ceil(std::log2(nrm / 0.5))) : 0;
    const CMatrix Gs = G / std::pow(2.0, s);
    CMatrix E = CMatrix::Identity(dim, dim), term = CMatrix::Identity(dim, dim);
    for (int k = 1; k < 30; ++k) {
        term = term * Gs / double(k);
        E += term;
    }
    for (int i = 0; i < s; ++i) E = E * E;
    return E;
}

inline CMatrix parity_matrix(int dim) {
    CMatrix P = CMatrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) P(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return P;
}

/// Pi(beta) = D(beta) (-1)^n D(beta)^dagger = D(2 beta) (-1)^n.
inline CMatrix displaced_parity(cplx beta, int dim) {
    policy().check(dim, std::abs(beta), "displaced_parity");
    CMatrix M = detail::displacement_elements(2.0 * beta, dim, dim);
    for (int k = 1; k < dim; k += 2) M.col(k) *= -1.0;
    return M;
}

inline FockDensityMatrix thermal_density(double V, cplx d, int dim) {
    if (!(V >= 1.0)) throw DomainError("thermal_density: V < 1");
    policy().check(dim, std::abs(d), "thermal_density");
    FockDensityMatrix out;
    out.dim = dim;
    out.modes = 1;
    const double nb = (V - 1.0) / 2.0;
    if (nb == 0.0) {
        const CVector c = coherent_state(d, dim);
        out.data = c * c.adjoint();
    } else {
        // number states carrying all but 1e-16 of the thermal weight
        const double q = nb / (nb + 1.0);
        int nmax = static_cast<int>(std::ceil(std::log(1e-16) / std::log(q))) + 1;
        nmax = std::max(nmax, 1);
        if (d == cplx(0.0) && nmax > dim) nmax = dim;
        const CMatrix Dd = detail::displacement_elements(d, dim, nmax);
        RVector p(nmax);
        double pn = 1.0 / (nb + 1.0);
        for (int n = 0; n < nmax; ++n, pn *= q) p(n) = pn;
        out.data = Dd * p.asDiagonal() * Dd.adjoint();
    }
    const double tr = out.trace();
    if (1.0 - tr > 1e-10)
        throw TruncationError("thermal_density: trace deficit " + std::to_string(1.0 - tr) +
                              " at dim " + std::to_string(dim));
    out.data /= tr;
    return out;
}

inline FockDensityMatrix pure_density(const CVector& v, int modes = 1) {
    FockDensityMatrix r;
    r.modes = modes;
    r.dim = modes == 1 ? int(v.size()) : int(std::lround(std::sqrt(double(v.size()))));
    r.data = v * v.adjoint();
    return r;
}

inline FockDensityMatrix tensor(const FockDensityMatrix& a, const FockDensityMatrix& b) {
    if (a.modes != 1 || b.modes != 1 || a.dim != b.dim)
        throw DomainError("tensor: expects two single-mode states of equal dim");
    FockDensityMatrix r;
    r.dim = a.dim;
    r.modes = 2;
    r.data = Eigen::kroneckerProduct(a.data, b.data);
    return r;
}

/// |1><1| x 1 + |0><0| x D(-i eta_t e^{-i phi}); atom index slowest.
inline CMatrix conditional_unitary_single(double eta_t, double phi, int dim) {
    const cplx zeta = -I * eta_t * std::exp(-I * phi);
    CMatrix U = CMatrix::Zero(2 * dim, 2 * dim);
    U.topLeftCorner(dim, dim) = displacement_matrix(zeta, dim);
    U.bottomRightCorner(dim, dim).setIdentity();
    return U;
}

/// |1><1| + |0><0| x D1(-i eta1_t) x D2(+i eta2_t).
inline CMatrix conditional_unitary_two(double eta1_t, double eta2_t, int dim) {
    const Eigen::Index n = Eigen::Index(dim) * dim;
    CMatrix U = CMatrix::Zero(2 * n, 2 * n);
    U.topLeftCorner(n, n) = Eigen::kroneckerProduct(displacement_matrix(-I * eta1_t, dim),
                                                   displacement_matrix(I * eta2_t, dim));
    U.bottomRightCorner(n, n).setIdentity();
    return U;
}

inline HybridState product_pure(cplx c0, cplx c1, const CVector& mirror, int dim, int modes = 1) {
    HybridState h;
    h.dim = dim;
    h.modes = modes;
    h.pure = true;
    const Eigen::Index n = mirror.size();
    h.psi.resize(2 * n);
    h.psi.head(n) = c0 * mirror;
    h.psi.tail(n) = c1 * mirror;
    return h;
}

inline HybridState product_mixed(cplx c0, cplx c1, const FockDensityMatrix& m) {
    HybridState h;
    h.dim = m.dim;
    h.modes = m.modes;
    h.pure = false;
    Eigen::Matrix2cd a;
    a << c0 * std::conj(c0), c0 * std::conj(c1), c1 * std::conj(c0), c1 * std::conj(c1);
    h.rho = Eigen::kroneckerProduct(a, m.data);
    return h;
}

inline HybridState apply(const CMatrix& U, HybridState s) {
    if (s.pure)
        s.psi = U * s.psi;
    else
        s.rho = U * s.rho * U.adjoint();
    return s;
}

/// Projects the atom onto |phi> = c0|0> + c1|1>.
inline std::pair<FockDensityMatrix, double> postselect_atom(const HybridState& s, cplx c0,
                                                            cplx c1) {
    const double nrm = std::norm(c0) + std::norm(c1);
    if (std::abs(nrm - 1.0) > 1e-10) throw DomainError("postselect_atom: atom ket not normalised");
    const Eigen::Index n = s.mirror_size();
    FockDensityMatrix out;
    out.dim = s.dim;
    out.modes = s.modes;
    if (s.pure) {
        const CVector v = std::conj(c0) * s.psi.head(n) + std::conj(c1) * s.psi.tail(n);
        out.data = v * v.adjoint();
    } else {
        const cplx c[2] = {c0, c1};
        out.data = CMatrix::Zero(n, n);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                out.data += std::conj(c[a]) * c[b] * s.rho.block(a * n, b * n, n, n);
    }
    const double p = out.trace();
    if (!(p > 1e-14)) throw DegenerateOutcomeError("postselect_atom: zero-probability outcome");
    out.data /= p;
    out.weight = p;
    return {out, p};
}

inline double wigner_point(const FockDensityMatrix& rho, cplx mu) {
    if (rho.modes != 1) throw DomainError("wigner_point: single-mode state expected");
    const CMatrix Pi = displaced_parity(mu, rho.dim);
    return (2.0 / pi) * (rho.data.cwiseProduct(Pi.transpose())).sum().real();
}

/// Expectation of Pi1(mu1) x Pi2(mu2) without forming the dim^2 x dim^2
/// operator.
inline double parity_two(const FockDensityMatrix& rho, cplx mu1, cplx mu2) {
    if (rho.modes != 2) throw DomainError("parity_two: two-mode state expected");
    const int d = rho.dim;
    const CMatrix P1 = displaced_parity(mu1, d), P2 = displaced_parity(mu2, d);
    // Tr[rho (P1 x P2)] = sum rho_{(a,b),(c,e)} P1_{c,a} P2_{e,b}
    cplx acc = 0;
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) {
            const cplx p1 = P1(c, a);
            if (p1 == cplx(0)) continue;
            acc += p1 * (rho.data.block(Eigen::Index(a) * d, Eigen::Index(c) * d, d, d)
                             .cwiseProduct(P2.transpose()))
                            .sum();
        }
    return acc.real();
}

inline double wigner_point_two(const FockDensityMatrix& rho, cplx mu1, cplx mu2) {
    return (4.0 / (pi * pi)) * parity_two(rho, mu1, mu2);
}

namespace detail {
inline double entropy2(const Eigen::Matrix2cd& r) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(r);
    double S = 0;
    for (int i = 0; i < 2; ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 1e-300) S -= l * std::log2(l);
    }
    return std::clamp(S, 0.0, 1.0);
}
}  // namespace detail

/// Base-2 entropy of the atom's reduced state (global state must be pure).
inline double reduced_entropy(const HybridState& s) {
    const Eigen::Index n = s.mirror_size();
    if (!s.pure) {
        const double purity = (s.rho * s.rho).trace().real();
        if (std::abs(purity - 1.0) > 1e-10) throw DomainError("reduced_entropy: mixed global state");
        Eigen::Matrix2cd r;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r(a, b) = s.rho.block(a * n, b * n, n, n).trace();
        return detail::entropy2(r);
    }
    Eigen::Matrix2cd r;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r(a, b) = s.psi.segment(b * n, n).dot(s.psi.segment(a * n, n));
    return detail::entropy2(r / r.trace());
}

enum class NegativityMethod { trace_norm, negative_eigenvalues };

/// Projects the atom-mirror state onto span{|0>,|1>} x span{|p>,|p+1>},
/// renormalises, partially transposes the mirror and returns log2 of the
/// trace norm.
inline double log_negativity_2x2(const HybridState& s, int p,
                                 NegativityMethod method = NegativityMethod::trace_norm) {
    if (s.modes != 1) throw DomainError("log_negativity_2x2: single mirror only");
    if (p < 0 || p + 1 >= s.dim) throw DomainError("log_negativity_2x2: p out of range");
    const CMatrix R = s.density();
    const Eigen::Index n = s.dim;
    const Eigen::Index idx[4] = {p, p + 1, n + p, n + p + 1};  // (atom, phonon)
    Eigen::Matrix4cd r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = R(idx[i], idx[j]);
    const double tr = r.trace().real();
    if (!(tr > 1e-14)) throw DegenerateOutcomeError("log_negativity_2x2: zero-weight projection");
    r /= tr;
    Eigen::Matrix4cd pt;
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m < 2; ++m)
            for (int b = 0; b < 2; ++b)
                for (int k = 0; k < 2; ++k) pt(2 * a + m, 2 * b + k) = r(2 * a + k, 2 * b + m);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
    const auto& ev = es.eigenvalues();
    if (method == NegativityMethod::trace_norm) return std::max(0.0, std::log2(ev.cwiseAbs().sum()));
    double neg = 0;
    for (int i = 0; i < 4; ++i)
        if (ev(i) < 0) neg -= ev(i);
    return std::max(0.0, std::log2(1.0 + 2.0 * neg));
}

/// <(sin(theta) sx + cos(theta) sz) x Pi(beta)>, sz = |0><0| - |1><1|.
inline double joint_correlation(const HybridState& s, double theta, cplx beta) {
    if (s.modes != 1) throw DomainError("joint_correlation: single mirror only");
    const Eigen::Index n = s.dim;
    const CMatrix Pi = displaced_parity(beta, s.dim);
    const double c = std::cos(theta), sn = std::sin(theta);
    const double A[2][2] = {{c, sn}, {sn, -c}};
    cplx acc = 0;
    if (s.pure) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (A[a][b] != 0.0)
                    acc += A[a][b] * s.psi.segment(a * n, n).dot(Pi * s.psi.segment(b * n, n));
    } else {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (A[a][b] != 0.0)
                    acc += A[a][b] *
                           (s.rho.block(b * n, a * n, n, n).cwiseProduct(Pi.transpose())).sum();
    }
    return acc.real();
}

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double fidelity_pure(const CVector& a, const CVector& b) {
    return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

// Binary snapshot: 16-byte header (magic "MCFD", u32 dim, u32 modes,
// u32 reserved), then row-major (re, im) float64 pairs, little-endian.
inline constexpr char dump_magic[4] = {'M', 'C', 'F', 'D'};

namespace detail {
inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}
inline void put_f64(std::ostream& os, double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, 8);
    for (int i = 0; i < 8; ++i) os.put(static_cast<char>((u >> (8 * i)) & 0xff));
}
inline double get_f64(std::istream& is) {
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(static_cast<unsigned char>(is.get())) << (8 * i);
    double x;
    std::memcpy(&x, &u, 8);
    return x;
}
}  // namespace detail

inline void write_dump(std::ostream& os, const FockDensityMatrix& r) {
    os.write(dump_magic, 4);
    detail::put_u32(os, std::uint32_t(r.dim));
    detail::put_u32(os, std::uint32_t(r.modes));
    detail::put_u32(os, 0);
    for (Eigen::Index i = 0; i < r.data.rows(); ++i)
        for (Eigen::Index j = 0; j < r.data.cols(); ++j) {
            detail::put_f64(os, r.data(i, j).real());
            detail::put_f64(os, r.data(i, j).imag());
        }
}

inline FockDensityMatrix read_dump(std::istream& is) {
    char m[4];
    is.read(m, 4);
    if (!is || std::memcmp(m, dump_magic, 4) != 0) throw Error("read_dump: bad magic");
    FockDensityMatrix r;
    r.dim = int(detail::get_u32(is));
    r.modes = int(detail::get_u32(is));
    detail::get_u32(is);
    if (r.modes != 1 && r.modes != 2) throw Error("read_dump: bad mode count");
    const Eigen::Index n = r.modes == 1 ? r.dim : Eigen::Index(r.dim) * r.dim;
    r.data.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double re = detail::get_f64(is);
            const double im = detail::get_f64(is);
            r.data(i, j) = cplx(re, im);
        }
    if (!is) throw Error("read_dump: truncated stream");
    return r;
}

}  // namespace mesocat::fock
