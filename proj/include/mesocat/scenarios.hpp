#pragma once

// Scenario registry behind `mesocat run`. Each scenario reads its keys from
// the Config (defaults reproduce the published figure configurations) and
// returns named CSV tables; every key it read is echoed into the metadata.

#include "mesocat/config.hpp"
#include "mesocat/csv.hpp"
#include "mesocat/dissipative.hpp"
#include "mesocat/lindblad.hpp"
#include "mesocat/phasespace.hpp"

#include <filesystem>
#include <fstream>
#include <functional>

namespace mesocat::scenarios {

struct Output {
    std::string name;  // file name
    CsvTable table;
};

struct Context {
    const Config& cfg;
    std::uint64_t seed;
};

struct Scenario {
    std::string name;
    std::string description;
    std::function<std::vector<Output>(const Context&)> run;
};

namespace detail {

inline std::vector<double> range_list(double lo, double hi, double step) {
    std::vector<double> v;
    const long n = std::lround((hi - lo) / step);
    for (long k = 0; k <= n; ++k) v.push_back(lo + k * step);
    return v;
}

inline int grid_n(const Config& c, long def) {
    const long n = c.get_int("grid.n", def);
    if (n < 8) throw ConfigError("config key 'grid.n': must be >= 8");
    return int(n);
}

inline int multistarts(const Config& c) {
    const long n = c.get_int("optimizer.multistarts", 16);
    if (n < 1) throw ConfigError("config key 'optimizer.multistarts': must be >= 1");
    return int(n);
}

inline double gamma_eff(const Config& c) {
    if (c.has_section("physical")) return c.physical().gamma;
    return c.get_double("effective.gamma", 0.1);
}

}  // namespace detail

inline std::vector<Output> run_params(const Context& x) {
    const auto p = x.cfg.physical();
    const double factor = x.cfg.get_double("verify.regime_factor", 10.0);
    const auto e = derive_effective(p);
    const auto rep = validate_regime(p, factor);
    Output o{"params.csv", {}};
    o.table.columns = {"chi[rad/s]", "eta[rad/s]", "V[1]", "T[K]", "T_from_V[K]", "regime_pass[1]"};
    o.table.add({e.chi, e.eta, e.V, p.T, temperature_from_variance(p.omega_m, e.V), rep.all_pass() ? 1.0 : 0.0});
    Output r{"params_regime.csv", {}};
    r.table.columns = {"check[1]", "ratio[1]", "pass[1]"};
    for (std::size_t k = 0; k < rep.checks.size(); ++k) {
        r.table.set("check" + std::to_string(k), rep.checks[k].name);
        r.table.add({double(k), rep.checks[k].ratio, rep.checks[k].pass ? 1.0 : 0.0});
    }
    return {o, r};
}

inline std::vector<Output> run_entropy(const Context& x) {
    const auto ets = x.cfg.get_list("scan.eta_t", detail::range_list(0.0, 3.0, 0.1));
    const bool oracle = x.cfg.get_int("scan.oracle", 1) != 0;
    Output o{"entropy.csv", {}};
    o.table.set("convention_note", "squared_overlap uses component overlap exp(-(eta t)^2)");
    o.table.columns = {"eta_t[1]", "S_standard[bit]", "S_squared_overlap[bit]", "S_oracle[bit]"};
    for (double et : ets) {
        double so = std::nan("");
        if (oracle) {
            const int dim = fock::policy().required(et);
            const auto s = fock::apply(fock::conditional_unitary_single(et, 0.0, dim),
                                       fock::product_pure(1 / std::sqrt(2.0), 1 / std::sqrt(2.0),
                                                          fock::coherent_state(0.0, dim), dim));
            so = fock::reduced_entropy(s);
        }
        o.table.add({et, cat_entropy(et, EntropyConvention::standard), cat_entropy(et, EntropyConvention::squared_overlap),
                     so});
    }
    return {o};
}

inline std::vector<Output> run_chsh_single(const Context& x) {
    const auto Vs = x.cfg.get_list("scan.V", {1.0, 3.0, 5.0});
    const auto ds = x.cfg.get_list("scan.d", detail::range_list(0.25, 3.0, 0.25));
    const double ratio = x.cfg.get_double("scan.eta_t_over_d", 2.0);
    const double theta1 = x.cfg.get_double("optimizer.theta1", 3 * pi / 2);
    const int ms = detail::multistarts(x.cfg);
    Output o{"chsh_single.csv", {}};
    o.table.columns = {"V[1]", "d[1]", "eta_t[1]", "best_abs_chsh[1]", "theta1[rad]", "theta[rad]", "beta_r[1]",
                       "beta_i[1]", "converged[1]"};
    std::uint64_t seed = x.seed;
    for (double V : Vs) {
        std::optional<ChshSingleSettings> prev;
        double d_prev = 0;
        for (double d : ds) {
            const double et = ratio * d;
            ThermalCorrelation tc(d, et, V);
            // warm start: previous optimum with beta rescaled to the new d
            std::vector<std::vector<double>> warm;
            if (prev && d_prev > 0) {
                const double br = prev->beta.real() * d / d_prev, bi = prev->beta.imag();
                warm = {{prev->theta, br, bi}, {prev->theta, -br, bi}};
            }
            auto rep = optimize_chsh_single_zx([&](cplx b) { return tc.components(b); }, d + et, ms, seed++, theta1, warm);
            auto s = rep.single();
            prev = s;
            d_prev = d;
            o.table.add({V, d, et, rep.best_value, s.theta1, s.theta, s.beta.real(), s.beta.imag(),
                         rep.converged ? 1.0 : 0.0});
        }
    }
    return {o};
}

inline std::vector<Output> run_log_negativity(const Context& x) {
    const auto e = x.cfg.effective();
    const double d = x.cfg.has_section("effective") ? e.d : x.cfg.get_double("scan.d", 2.0);
    const double ratio = x.cfg.get_double("scan.eta_t_over_d", 2.0);
    const auto Vs = x.cfg.get_list("scan.V", detail::range_list(1.0, 6.0, 0.25));
    const int dim = int(x.cfg.get_int("grid.dim", 140));
    const double et = ratio * d;
    const auto U = fock::conditional_unitary_single(et, pi / 2, dim);
    Output o{"log_negativity.csv", {}};
    o.table.columns = {"V[1]", "E_p0[1]", "E_p1[1]", "E_p2[1]"};
    for (double V : Vs) {
        const auto s = fock::apply(U, fock::product_mixed(1 / std::sqrt(2.0), 1 / std::sqrt(2.0),
                                                          fock::thermal_density(V, d, dim)));
        o.table.add({V, fock::log_negativity_2x2(s, 0), fock::log_negativity_2x2(s, 1), fock::log_negativity_2x2(s, 2)});
    }
    return {o};
}

inline std::vector<Output> run_wigner_single(const Context& x) {
    const auto ets = x.cfg.get_list("scan.eta_t", {2.0, 3.0, 4.0});
    const auto Vs = x.cfg.get_list("scan.V", {3.0});
    const int n = detail::grid_n(x.cfg, 101);
    Output o{"wigner_single.csv", {}};
    o.table.columns = {"V[1]", "eta_t[1]", "mu_r[1]", "mu_i[1]", "W[1]"};
    Output m{"wigner_single_summary.csv", {}};
    m.table.columns = {"V[1]", "eta_t[1]", "normalization[1]", "min_W[1]", "min_mu_r[1]", "min_mu_i[1]"};
    for (double V : Vs)
        for (double et : ets) {
            const double L = 4.0 * std::sqrt(V / 2.0);
            Axis xa{-L, L, n, "mu_r"}, ya{-et - L, L, n, "mu_i"};
            auto g = build_grid_2d([&](cplx mu) { return conditional_wigner_thermal(mu, et, V); }, xa, ya);
            for (std::size_t k = 0; k < g.size(); ++k) {
                auto p = g.point(k);
                o.table.add({V, et, p[0], p[1], g.values[k]});
            }
            auto mn = grid_min(g);
            m.table.add({V, et, g.normalization, mn.value, mn.location[0], mn.location[1]});
        }
    return {o, m};
}

inline std::vector<Output> run_fidelity_map(const Context& x) {
    const auto Vs = x.cfg.get_list("scan.V", detail::range_list(1.0, 10.0, 0.5));
    const auto ets = x.cfg.get_list("scan.eta_t", detail::range_list(0.1, 4.0, 0.1));
    const int n = detail::grid_n(x.cfg, 201);
    Output o{"fidelity_map.csv", {}};
    o.table.columns = {"V[1]", "eta_t[1]", "F_W[1]"};
    for (double V : Vs)
        for (double et : ets) {
            const double L = 4.0 * std::sqrt(V / 2.0) + 1.0;
            const double f = fidelity_overlap([&](cplx mu) { return conditional_wigner_thermal(mu, et, 1.0); },
                                              [&](cplx mu) { return conditional_wigner_thermal(mu, et, V); },
                                              Bounds2{-L, L, -et - L, L}, n);
            o.table.add({V, et, f});
        }
    return {o};
}

inline std::vector<Output> run_wigner_dissipative(const Context& x) {
    const auto e = x.cfg.effective();
    const bool eff = x.cfg.has_section("effective");
    const double eta = eff ? e.eta : x.cfg.get_double("scan.eta", 1.0);
    const double V = eff ? e.V : x.cfg.get_double("scan.V", 5.0);
    const double gamma = detail::gamma_eff(x.cfg);
    const auto ts = x.cfg.get_list("scan.t", {1.0});
    const int n = detail::grid_n(x.cfg, 101);
    const bool oracle = x.cfg.get_int("scan.oracle", 0) != 0;
    Output o{"wigner_dissipative.csv", {}};
    o.table.columns = {"t[1/eta]", "gamma_t[1]", "mu_r[1]", "mu_i[1]", "W[1]", "W_master[1]"};
    for (double t : ts) {
        const auto fp = evolve_fp(initial_components(V, {e.d}), {eta}, gamma, V, t, {.phi = e.phi});
        std::optional<fock::FockDensityMatrix> m;
        if (oracle) {
            const int dim = int(x.cfg.get_int("grid.dim", 80));
            const auto h = fock::product_mixed(1 / std::sqrt(2.0), 1 / std::sqrt(2.0), fock::thermal_density(V, e.d, dim));
            const auto r = fock::integrate_master_equation(h, eta, gamma, V, t, {}, e.phi);
            m = fock::postselect_atom(r.states.back(), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0)).first;
        }
        const double L = 4.0 * std::sqrt(V / 2.0);
        const double shift = eta * t;
        Axis xa{e.d - L, e.d + L, n, "mu_r"}, ya{-shift - L, L, n, "mu_i"};
        auto g = build_grid_2d([&](cplx mu) { return fp.postselected_wigner({mu}); }, xa, ya);
        for (std::size_t k = 0; k < g.size(); ++k) {
            auto p = g.point(k);
            const double wm = m ? fock::wigner_point(*m, cplx(p[0], p[1])) : std::nan("");
            o.table.add({t, gamma * t, p[0], p[1], g.values[k], wm});
        }
    }
    return {o};
}

inline std::vector<Output> run_negative_volume_two(const Context& x) {
    const auto ets = x.cfg.get_list("scan.eta_t", {5.0});
    const auto Vs = x.cfg.get_list("scan.V", {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0});
    const int n = detail::grid_n(x.cfg, 41);
    const std::string method = x.cfg.get_string("grid.method", "grid");
    Output o{"negative_volume_two.csv", {}};
    o.table.set("method", method);
    o.table.columns = {"eta_t[1]", "V[1]", "negative_volume[1]", "error[1]", "normalization[1]"};
    for (double et : ets)
        for (double V : Vs) {
            NegativeVolumeResult r;
            if (method == "grid") {
                r = negative_volume_ecs(et, et, V, n);
            } else if (method == "monte-carlo") {
                ThermalEcsWigner w(et, et, V);
                auto ax = ecs_axes(et, et, V, n);
                r = negative_volume_mc([&](const std::vector<double>& p) { return w(cplx(p[0], p[1]), cplx(p[2], p[3])); },
                                       std::vector<Axis>(ax.begin(), ax.end()), n, x.seed);
            } else {
                throw ConfigError("config key 'grid.method': expected 'grid' or 'monte-carlo', got '" + method + "'");
            }
            o.table.add({et, V, r.value, r.error, r.normalization});
        }
    return {o};
}

inline std::vector<Output> run_wigner_two_slice(const Context& x) {
    const double et = x.cfg.get_double("scan.eta_t", 2.0);
    const double V = x.cfg.get_double("scan.V", 1.0);
    const cplx mu2(x.cfg.get_double("scan.mu2_r", -1.0), x.cfg.get_double("scan.mu2_i", -1.0));
    const int n = detail::grid_n(x.cfg, 101);
    ThermalEcsWigner w(et, et, V);
    const double L = 4.0 * std::sqrt(V / 2.0);
    Axis xa{-L, L, n, "mu1_r"}, ya{-et - L, L, n, "mu1_i"};
    auto g = build_grid_2d([&](cplx mu) { return w(mu, mu2); }, xa, ya);
    Output o{"wigner_two_slice.csv", {}};
    auto mn = grid_min(g);
    o.table.set("min_W", mn.value);
    o.table.columns = {"mu1_r[1]", "mu1_i[1]", "W[1]"};
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto p = g.point(k);
        o.table.add({p[0], p[1], g.values[k]});
    }
    return {o};
}

inline std::vector<Output> run_chsh_two(const Context& x) {
    const auto ets = x.cfg.get_list("scan.eta_t", detail::range_list(0.25, 3.0, 0.25));
    const auto Vs = x.cfg.get_list("scan.V", {1.0, 1.05, 1.1, 1.2});
    const int ms = detail::multistarts(x.cfg);
    Output o{"chsh_two.csv", {}};
    o.table.columns = {"V[1]", "eta_t[1]", "best_abs_chsh[1]", "converged[1]"};
    std::uint64_t seed = x.seed;
    std::vector<std::vector<double>> warm(ets.size());
    for (double V : Vs)
        for (std::size_t k = 0; k < ets.size(); ++k) {
            ThermalEcsWigner w(ets[k], ets[k], V);
            std::vector<std::vector<double>> extra;
            if (!warm[k].empty()) extra.push_back(warm[k]);
            auto rep = optimize_chsh_two(w, ets[k], ms, seed++, extra);
            warm[k] = rep.best_x;
            o.table.add({V, ets[k], rep.best_value, rep.converged ? 1.0 : 0.0});
        }
    return {o};
}

inline std::vector<Output> run_wigner_two_dissipative(const Context& x) {
    const double ratio = x.cfg.get_double("scan.eta_over_gamma", 2.0);
    const double gamma_t = x.cfg.get_double("scan.gamma_t", 1.0);
    const double V = x.cfg.get_double("scan.V", 1.0);
    const cplx mu2(x.cfg.get_double("scan.mu2_r", 1.0), x.cfg.get_double("scan.mu2_i", 1.0));
    const int n = detail::grid_n(x.cfg, 101);
    const double gamma = 1.0, t = gamma_t / gamma;
    const auto fp = evolve_fp(initial_components(V, {0.0, 0.0}), {ratio * gamma, ratio * gamma}, gamma, V, t);
    const double L = 4.0 * std::sqrt(V / 2.0), shift = ratio * (-std::expm1(-gamma_t));
    Axis xa{-L, L, n, "mu1_r"}, ya{-shift - L, L, n, "mu1_i"};
    auto g = build_grid_2d([&](cplx mu) { return fp.postselected_wigner({mu, mu2}); }, xa, ya);
    Output o{"wigner_two_dissipative.csv", {}};
    auto mn = grid_min(g);
    o.table.set("min_W", mn.value);
    o.table.columns = {"mu1_r[1]", "mu1_i[1]", "W[1]"};
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto p = g.point(k);
        o.table.add({p[0], p[1], g.values[k]});
    }
    return {o};
}

inline std::vector<Output> run_chsh_dissipative(const Context& x) {
    const auto ratios = x.cfg.get_list("scan.eta_over_gamma", {1.0, 2.0, 4.0, 8.0});
    const auto gts = x.cfg.get_list("scan.gamma_t", detail::range_list(0.0, 1.0, 0.01));
    const std::string conv = x.cfg.get_string("scan.phase_convention", "trotter_limit");
    ChshTimeOptions co;
    co.multistarts = std::max(1, detail::multistarts(x.cfg) / 4);
    co.seed = x.seed;
    if (conv == "printed")
        co.phase = PhaseConvention::printed;
    else if (conv != "trotter_limit")
        throw ConfigError("config key 'scan.phase_convention': expected 'trotter_limit' or 'printed'");
    Output o{"chsh_dissipative.csv", {}};
    o.table.columns = {"eta_over_gamma[1]", "gamma_t[1]", "best_abs_chsh[1]"};
    Output w{"chsh_dissipative_windows.csv", {}};
    w.table.columns = {"eta_over_gamma[1]", "window_width[1]"};
    for (double r : ratios) {
        const auto c = chsh_vs_time({r, r}, 1.0, gts, co);
        for (auto& p : c) o.table.add({r, p.gamma_t, p.best});
        w.table.add({r, violation_width(c, 2.0 + 1e-7)});
    }
    return {o, w};
}

inline std::vector<Output> run_trotter_convergence(const Context& x) {
    const double ratio = x.cfg.get_double("scan.eta_over_gamma", 2.0);
    const double gamma_t = x.cfg.get_double("scan.gamma_t", 1.0);
    const auto Ns = x.cfg.get_list("scan.N", {8, 16, 32, 64, 128, 256, 512, 1024});
    const std::string rule = x.cfg.get_string("scan.rule", "literal");
    if (rule != "literal" && rule != "lindblad")
        throw ConfigError("config key 'scan.rule': expected 'literal' or 'lindblad', got '" + rule + "'");
    const std::vector<double> etas = {ratio, ratio};
    const double G = decoherence_exponent(gamma_t, 1.0, etas);
    const double th = dissipative_phase(gamma_t, 1.0, etas, {0.0, 0.0});
    Output o{"trotter_convergence.csv", {}};
    o.table.set("Gamma_closed", G).set("theta_closed", th);
    o.table.columns = {"N[1]", "Gamma_N[1]", "theta_N[rad]", "rel_error[1]", "trace[1]"};
    for (double Nd : Ns) {
        const int N = int(std::lround(Nd));
        if (N < 1) throw ConfigError("config key 'scan.N': entries must be >= 1");
        const auto s = trotter_evolve(HybridDyadicState::plus_coherent({0.0, 0.0}), etas, 1.0, gamma_t, N,
                                      rule == "literal" ? TrotterRule::literal : TrotterRule::lindblad);
        const auto e = trotter_exponents(s);
        o.table.add({double(N), e.Gamma, e.theta, std::abs(e.Gamma - G) / G, s.postselect_plus().trace().real()});
    }
    return {o};
}

inline const std::vector<Scenario>& registry() {
    static const std::vector<Scenario> r = {
        {"params", "effective coupling, thermal variance and regime checks from laboratory inputs", run_params},
        {"entropy", "atomic entropy against eta t in both overlap conventions", run_entropy},
        {"chsh-single", "optimised single-mirror CHSH against d for several V (eta t = 2d)", run_chsh_single},
        {"log-negativity", "projected logarithmic negativity against V for p = 0, 1, 2", run_log_negativity},
        {"wigner-single", "conditional thermal Wigner function grids for several eta t", run_wigner_single},
        {"fidelity-map", "Wigner overlap fidelity against V and eta t", run_fidelity_map},
        {"wigner-dissipative", "damped single-mirror Wigner function from Gaussian components", run_wigner_dissipative},
        {"negative-volume-two", "two-mode negative volume against V", run_negative_volume_two},
        {"wigner-two-slice", "two-mode Wigner slice at fixed mu2", run_wigner_two_slice},
        {"chsh-two", "optimised two-mode CHSH against eta t and V", run_chsh_two},
        {"wigner-two-dissipative", "damped two-mode Wigner slice at fixed mu2", run_wigner_two_dissipative},
        {"chsh-dissipative", "optimised two-mode CHSH against gamma t for several eta/gamma", run_chsh_dissipative},
        {"trotter-convergence", "split-step decoherence exponent against step count", run_trotter_convergence},
    };
    return r;
}

inline const Scenario& find(const std::string& name) {
    for (auto& s : registry())
        if (s.name == name) return s;
    throw ConfigError("config key 'scenario.name': unknown scenario '" + name + "'");
}

/// Keys accepted in config files.
inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> k = {
        "scenario.name", "scenario.seed", "scenario.out", "scenario.threads",
        "physical.omega_m", "physical.omega_c", "physical.L", "physical.m", "physical.g", "physical.Omega",
        "physical.delta", "physical.Delta", "physical.gamma", "physical.T", "physical.frequency_unit",
        "effective.eta", "effective.V", "effective.d", "effective.phi", "effective.gamma",
        "scan.eta_t", "scan.V", "scan.d", "scan.t", "scan.eta", "scan.eta_t_over_d", "scan.oracle", "scan.mu2_r",
        "scan.mu2_i", "scan.eta_over_gamma", "scan.gamma_t", "scan.N", "scan.rule", "scan.phase_convention",
        "grid.n", "grid.dim", "grid.method",
        "optimizer.multistarts", "optimizer.theta1",
        "verify.regime_factor", "verify.tolerance_scale", "verify.multistarts", "verify.criteria",
    };
    return k;
}

/// Runs one scenario and writes its tables into `out_dir`. Returns the
/// written paths.
inline std::vector<std::string> run_scenario(const Config& cfg, const std::string& name, const std::string& out_dir,
                                             std::uint64_t seed) {
    cfg.check_known(known_keys());
    const auto& sc = find(name);
    std::vector<Output> outs;
    try {
        outs = sc.run(Context{cfg, seed});
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw Error("scenario '" + name + "': " + e.what());
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    for (auto& o : outs) {
        o.table.set("scenario", name).set("seed", std::to_string(seed));
        for (auto& [k, v] : cfg.echo()) o.table.set(k, v);
        const auto path = (std::filesystem::path(out_dir) / o.name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path);
        o.table.write(f);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace mesocat::scenarios
