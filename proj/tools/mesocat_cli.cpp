// mesocat: scenario runner and acceptance gate.

#include "mesocat/acceptance.hpp"
#include "mesocat/scenarios.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

mesocat::Config load(const Common& c) {
    return c.config.empty() ? mesocat::Config{} : mesocat::Config::from_file(c.config);
}

std::uint64_t resolve_seed(const Common& c, const mesocat::Config& cfg) {
    if (c.seed) return *c.seed;
    const long s = cfg.get_int("scenario.seed", 1);
    if (s < 0) throw mesocat::ConfigError("config key 'scenario.seed': must be >= 0");
    return std::uint64_t(s);
}

void resolve_threads(const Common& c, const mesocat::Config& cfg) {
    long t = c.threads ? long(*c.threads) : cfg.get_int("scenario.threads", 1);
    if (t < 1) throw mesocat::ConfigError("config key 'scenario.threads': must be >= 1");
    mesocat::set_thread_count(unsigned(t));
}

std::string resolve_out(const Common& c, const mesocat::Config& cfg, const std::string& def) {
    return c.out.empty() ? cfg.get_string("scenario.out", def) : c.out;
}

int cmd_list() {
    for (auto& s : mesocat::scenarios::registry()) std::cout << s.name << "  " << s.description << '\n';
    return 0;
}

int cmd_run(const Common& c, std::string scenario) {
    const auto cfg = load(c);
    if (scenario.empty()) scenario = cfg.get_string("scenario.name", "");
    if (scenario.empty()) throw mesocat::ConfigError("config key 'scenario.name': no scenario given");
    const auto seed = resolve_seed(c, cfg);
    resolve_threads(c, cfg);
    const auto out = resolve_out(c, cfg, "out");
    for (auto& p : mesocat::scenarios::run_scenario(cfg, scenario, out, seed)) std::cout << "wrote " << p << '\n';
    return 0;
}

int cmd_verify(const Common& c, std::vector<int> criteria, std::optional<double> tol_scale) {
    const auto cfg = load(c);
    cfg.check_known(mesocat::scenarios::known_keys());
    mesocat::acceptance::Options o;
    o.seed = resolve_seed(c, cfg);
    resolve_threads(c, cfg);
    o.tolerance_scale = tol_scale ? *tol_scale : cfg.get_double("verify.tolerance_scale", 1.0);
    if (!(o.tolerance_scale > 0)) throw mesocat::ConfigError("config key 'verify.tolerance_scale': must be > 0");
    o.multistarts = int(cfg.get_int("verify.multistarts", o.multistarts));
    if (o.multistarts < 1) throw mesocat::ConfigError("config key 'verify.multistarts': must be >= 1");
    if (criteria.empty())
        for (double d : cfg.get_list("verify.criteria", {})) criteria.push_back(int(std::lround(d)));
    const auto out = resolve_out(c, cfg, "verify-out");
    std::filesystem::create_directories(out);
    bool ok = true;
    std::vector<mesocat::acceptance::Result> all;
    for (int id = 1; id <= 13; ++id) {
        if (!criteria.empty() && std::find(criteria.begin(), criteria.end(), id) == criteria.end()) continue;
        for (auto& r : mesocat::acceptance::run(o, {id})) {
            std::cout << mesocat::acceptance::report_line(r) << std::endl;
            ok = ok && r.pass;
            for (auto& a : r.artifacts) {
                std::ofstream f(std::filesystem::path(out) / a.name, std::ios::binary);
                f << a.content;
            }
            all.push_back(std::move(r));
        }
    }
    std::ofstream(std::filesystem::path(out) / "acceptance.csv", std::ios::binary)
        << mesocat::acceptance::summary_csv(all, o);
    std::size_t passed = 0;
    for (auto& r : all) passed += r.pass;
    std::cout << passed << '/' << all.size() << " checks passed\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mesocat: conditional displacement of mirrors by a post-selected atom"};
    app.set_version_flag("--version", std::string(mesocat::version));
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
        s->add_option("--out", c.out, "output directory");
        s->add_option("--seed", c.seed, "random seed");
        s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* list = app.add_subcommand("list", "list scenarios");
    auto* run = app.add_subcommand("run", "run one scenario and write CSV files");
    std::string scenario;
    run->add_option("--scenario", scenario, "scenario name (see list)");
    add_common(run);
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    std::vector<int> criteria;
    std::optional<double> tol_scale;
    verify->add_option("--criteria", criteria, "subset of check ids")->delimiter(',');
    verify->add_option("--tolerance-scale", tol_scale, "multiply absolute tolerances (testing)");
    add_common(verify);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*list) return cmd_list();
        if (*run) return cmd_run(c, scenario);
        if (*verify) return cmd_verify(c, criteria, tol_scale);
    } catch (const mesocat::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
