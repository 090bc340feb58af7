#pragma once

// Fixed-step RK4 integration of
//   d rho/dt = -i[H, rho] + sum_j (gamma/2)(2 b rho b^+ - {b^+ b, rho} + (V-1)[b rho - rho b, b^+])
// with H = |0><0| x sum_j s_j eta_j (b_j e^{i phi} + b_j^+ e^{-i phi}), s = (+1, -1).
// The atom blocks rho_ij = <i|rho|j> are evolved separately; all ladder
// operators are applied as index shifts, so a step is O(dim^2) per block.

#include "mesocat/fock.hpp"

#include <array>
#include <functional>

namespace mesocat::fock {

struct MasterOptions {
    double dt = 0.01;
    bool check = true;   // step-halving comparison at the final time
    bool refine = true;  // on failure keep halving dt instead of throwing
    double tol = 1e-8;   // trace distance
    int max_refinements = 8;
    int samples = 1;  // trajectory points returned (end point always included)
};

struct MasterResult {
    std::vector<double> times;
    std::vector<HybridState> states;
    double dt_used = 0;
    double halving_change = 0;
};

namespace detail {

struct LadderOps {
    int dim, modes;

    Eigen::Index n() const { return modes == 1 ? dim : Eigen::Index(dim) * dim; }
    int occ(Eigen::Index i, int j) const {
        if (modes == 1) return int(i);
        return j == 0 ? int(i / dim) : int(i % dim);
    }
    Eigen::Index stride(int j) const { return modes == 1 ? 1 : (j == 0 ? dim : 1); }

    // (b_j X) rows: row i takes sqrt(n_i+1) X[i + stride]
    void b_left(const CMatrix& X, CMatrix& out, int j, cplx c) const {
        const Eigen::Index s = stride(j);
        for (Eigen::Index i = 0; i < n(); ++i) {
            const int k = occ(i, j);
            if (k + 1 < dim) out.row(i) += (c * std::sqrt(k + 1.0)) * X.row(i + s);
        }
    }
    void bd_left(const CMatrix& X, CMatrix& out, int j, cplx c) const {
        const Eigen::Index s = stride(j);
        for (Eigen::Index i = 0; i < n(); ++i) {
            const int k = occ(i, j);
            if (k > 0) out.row(i) += (c * std::sqrt(double(k))) * X.row(i - s);
        }
    }
    // X b_j: column i takes sqrt(n_i) X[:, i - stride]
    void b_right(const CMatrix& X, CMatrix& out, int j, cplx c) const {
        const Eigen::Index s = stride(j);
        for (Eigen::Index i = 0; i < n(); ++i) {
            const int k = occ(i, j);
            if (k > 0) out.col(i) += (c * std::sqrt(double(k))) * X.col(i - s);
        }
    }
    void bd_right(const CMatrix& X, CMatrix& out, int j, cplx c) const {
        const Eigen::Index s = stride(j);
        for (Eigen::Index i = 0; i < n(); ++i) {
            const int k = occ(i, j);
            if (k + 1 < dim) out.col(i) += (c * std::sqrt(k + 1.0)) * X.col(i + s);
        }
    }
    CMatrix b_left(const CMatrix& X, int j) const {
        CMatrix o = CMatrix::Zero(X.rows(), X.cols());
        b_left(X, o, j, 1.0);
        return o;
    }
    CMatrix bd_left(const CMatrix& X, int j) const {
        CMatrix o = CMatrix::Zero(X.rows(), X.cols());
        bd_left(X, o, j, 1.0);
        return o;
    }
};

struct Blocks {
    // index 2*i + j holds <i|rho|j>; mirror-only states use a single block
    std::vector<CMatrix> X;
    std::vector<std::array<int, 2>> label;  // atom labels; -1 means no Hamiltonian
};

}  // namespace detail

class MasterEquation {
public:
    MasterEquation(int dim, int modes, std::vector<double> eta, double gamma, double V, double phi = 0)
        : ops_{dim, modes}, eta_(std::move(eta)), gamma_(gamma), V_(V), phi_(phi) {
        if (modes != 1 && modes != 2) throw DomainError("MasterEquation: modes must be 1 or 2");
        if (int(eta_.size()) != modes) throw DomainError("MasterEquation: one eta per mode");
        if (V < 1.0) throw DomainError("MasterEquation: V < 1");
        if (gamma < 0.0) throw DomainError("MasterEquation: gamma < 0");
        eta_fn_ = [](double) { return 1.0; };
    }

    /// Multiplies every eta_j by f(t).
    void set_time_profile(std::function<double(double)> f) { eta_fn_ = std::move(f); }

    MasterResult integrate(const HybridState& s0, double t, MasterOptions opt = {}) const {
        auto b0 = to_blocks(s0);
        double dt = opt.dt;
        for (int attempt = 0;; ++attempt) {
            auto coarse = run(b0, t, dt);
            if (!opt.check) return pack(s0, run_traj(b0, t, dt, opt.samples), dt, 0.0);
            auto fine = run(b0, t, dt / 2);
            const double change = trace_distance(from_blocks(s0, coarse).density(),
                                                 from_blocks(s0, fine).density());
            if (change < opt.tol) {
                auto r = pack(s0, run_traj(b0, t, dt / 2, opt.samples), dt / 2, change);
                return r;
            }
            if (!opt.refine || attempt >= opt.max_refinements)
                throw IntegrationError("integrate_master_equation: step halving changed the state by " +
                                       std::to_string(change));
            dt /= 2;
        }
    }

private:
    detail::LadderOps ops_;
    std::vector<double> eta_;
    double gamma_, V_, phi_;
    std::function<double(double)> eta_fn_;

    detail::Blocks to_blocks(const HybridState& s) const {
        detail::Blocks b;
        const Eigen::Index n = ops_.n();
        if (s.mirror_size() != n) throw DomainError("MasterEquation: state size mismatch");
        const CMatrix R = s.density();
        if (R.rows() == n) {
            b.X.push_back(R);
            b.label.push_back({-1, -1});
            return b;
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                b.X.push_back(R.block(i * n, j * n, n, n));
                b.label.push_back({i, j});
            }
        return b;
    }

    HybridState from_blocks(const HybridState& proto, const detail::Blocks& b) const {
        HybridState s = proto;
        s.pure = false;
        const Eigen::Index n = ops_.n();
        if (b.X.size() == 1) {
            s.rho = b.X[0];
            return s;
        }
        s.rho.resize(2 * n, 2 * n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s.rho.block(i * n, j * n, n, n) = b.X[2 * i + j];
        return s;
    }

    CMatrix rhs(const CMatrix& X, std::array<int, 2> lab, double t) const {
        CMatrix out = CMatrix::Zero(X.rows(), X.cols());
        const double f = eta_fn_(t);
        const cplx e = std::exp(I * phi_);
        for (int j = 0; j < ops_.modes; ++j) {
            const double h = (j == 0 ? 1.0 : -1.0) * eta_[j] * f;
            if (h == 0.0) continue;
            // -i H0 X on the left when the left atom label is 0
            if (lab[0] == 0) {
                ops_.b_left(X, out, j, -I * h * e);
                ops_.bd_left(X, out, j, -I * h * std::conj(e));
            }
            // +i X H0 on the right when the right atom label is 0
            if (lab[1] == 0) {
                ops_.b_right(X, out, j, I * h * e);
                ops_.bd_right(X, out, j, I * h * std::conj(e));
            }
        }
        if (gamma_ > 0.0) {
            const double g2 = gamma_ / 2.0;
            const double th = V_ - 1.0;
            for (int j = 0; j < ops_.modes; ++j) {
                const CMatrix bX = ops_.b_left(X, j);    // b X
                const CMatrix bdX = ops_.bd_left(X, j);  // b^+ X
                // 2 b X b^+ + (V-1)(b X b^+ + b^+ X b)
                ops_.bd_right(bX, out, j, g2 * (2.0 + th));
                ops_.b_right(bdX, out, j, g2 * th);
                // -(b^+ b X + X b^+ b) - (V-1)(b^+ b X + X b b^+)
                // number-operator terms are diagonal in the index, use them directly
                for (Eigen::Index r = 0; r < X.rows(); ++r) {
                    const double nr = ops_.occ(r, j);
                    for (Eigen::Index c = 0; c < X.cols(); ++c) {
                        const double nc = ops_.occ(c, j);
                        out(r, c) -= g2 * (nr + nc + th * (nr + nc + 1.0)) * X(r, c);
                    }
                }
            }
        }
        return out;
    }

    void step(detail::Blocks& b, double t, double dt) const {
        for (std::size_t k = 0; k < b.X.size(); ++k) {
            const auto& X = b.X[k];
            const auto lab = b.label[k];
            const CMatrix k1 = rhs(X, lab, t);
            const CMatrix k2 = rhs(X + (dt / 2) * k1, lab, t + dt / 2);
            const CMatrix k3 = rhs(X + (dt / 2) * k2, lab, t + dt / 2);
            const CMatrix k4 = rhs(X + dt * k3, lab, t + dt);
            b.X[k] = X + (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        // hermiticity: block (i,j) and (j,i) must stay adjoint
        if (b.X.size() == 1) {
            b.X[0] = 0.5 * (b.X[0] + b.X[0].adjoint()).eval();
        } else {
            b.X[0] = 0.5 * (b.X[0] + b.X[0].adjoint()).eval();
            b.X[3] = 0.5 * (b.X[3] + b.X[3].adjoint()).eval();
            b.X[2] = b.X[1].adjoint();
        }
    }

    static long step_count(double t, double dt) { return std::max(1L, std::lround(std::ceil(t / dt - 1e-9))); }

    // records the state after the steps listed in `at` (ascending)
    detail::Blocks run(detail::Blocks b, double t, double dt, const std::vector<long>& at = {},
                       std::vector<std::pair<double, detail::Blocks>>* traj = nullptr) const {
        const long nsteps = step_count(t, dt);
        const double h = t / nsteps;
        std::size_t next = 0;
        for (long s = 0; s < nsteps; ++s) {
            step(b, s * h, h);
            if (traj && next < at.size() && at[next] == s + 1) {
                traj->emplace_back((s + 1) * h, b);
                ++next;
            }
        }
        return b;
    }

    std::vector<std::pair<double, detail::Blocks>> run_traj(const detail::Blocks& b0, double t, double dt,
                                                            int samples) const {
        const long n = step_count(t, dt);
        samples = std::max(1, samples);
        std::vector<long> at;
        for (int k = 1; k <= samples; ++k) {
            const long idx = std::max(1L, std::lround(double(k) * n / samples));
            if (at.empty() || idx > at.back()) at.push_back(idx);
        }
        std::vector<std::pair<double, detail::Blocks>> out;
        run(b0, t, dt, at, &out);
        return out;
    }

    MasterResult pack(const HybridState& proto, const std::vector<std::pair<double, detail::Blocks>>& tr,
                      double dt, double change) const {
        MasterResult r;
        r.dt_used = dt;
        r.halving_change = change;
        for (auto& [t, b] : tr) {
            r.times.push_back(t);
            r.states.push_back(from_blocks(proto, b));
        }
        return r;
    }
};

/// Convenience wrapper: single mirror, constant eta.
inline MasterResult integrate_master_equation(const HybridState& rho0, double eta, double gamma, double V,
                                              double t, MasterOptions opt = {}, double phi = 0.0) {
    std::vector<double> etas(std::size_t(rho0.modes), eta);
    return MasterEquation(rho0.dim, rho0.modes, etas, gamma, V, phi).integrate(rho0, t, opt);
}

inline HybridState mirror_only(const FockDensityMatrix& m) {
    HybridState h;
    h.dim = m.dim;
    h.modes = m.modes;
    h.pure = false;
    h.rho = m.data;
    return h;
}

}  // namespace mesocat::fock
