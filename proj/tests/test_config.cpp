#include "mesocat/config.hpp"
#include "mesocat/csv.hpp"
#include "mesocat/scenarios.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace mesocat;

namespace {

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, TypedLookupsAndEcho) {
    const auto c = Config::from_string("[scan]\neta_t = 1, 2.5 ,3\n[grid]\nn = 51\n[scenario]\nname = entropy\n");
    EXPECT_EQ(c.get_list("scan.eta_t", {}), (std::vector<double>{1, 2.5, 3}));
    EXPECT_EQ(c.get_int("grid.n", 0), 51);
    EXPECT_EQ(c.get_string("scenario.name", ""), "entropy");
    EXPECT_EQ(c.get_double("effective.V", 4.0), 4.0);
    EXPECT_EQ(c.echo().at("scan.eta_t"), "1,2.5,3");
    EXPECT_EQ(c.echo().at("effective.V"), "4");
}

TEST(Config, EnvironmentOverride) {
    const auto c = Config::from_string("[effective]\nV = 2\n");
    setenv("MESOCAT_EFFECTIVE_V", "7.5", 1);
    EXPECT_EQ(c.get_double("effective.V", 1.0), 7.5);
    unsetenv("MESOCAT_EFFECTIVE_V");
    EXPECT_EQ(c.get_double("effective.V", 1.0), 2.0);
}

TEST(Config, BadValuesNameTheKey) {
    const auto c = Config::from_string("[grid]\nn = 4x\n[effective]\nV = abc\n");
    EXPECT_NE(error_of([&] { c.get_int("grid.n", 1); }).find("grid.n"), std::string::npos);
    EXPECT_NE(error_of([&] { c.get_double("effective.V", 1); }).find("effective.V"), std::string::npos);
}

TEST(Config, UnknownKeyRejected) {
    const auto c = Config::from_string("[effective]\neta = 1\nbogus = 3\n");
    const auto msg = error_of([&] { c.check_known(scenarios::known_keys()); });
    EXPECT_NE(msg.find("effective.bogus"), std::string::npos);
}

TEST(Config, PhysicalAndEffectiveExclusive) {
    const auto c = Config::from_string("[physical]\nT = 0.001\n[effective]\neta = 1\n");
    EXPECT_THROW(c.effective(), ConfigError);
}

TEST(Config, PhysicalPipelineEchoesDerived) {
    const auto c = Config::from_string("[physical]\nOmega = 0.31622776601683794\n");
    const auto e = c.effective();
    EXPECT_NEAR(e.eta, 7.48, 0.01);
    EXPECT_EQ(e.V, 1.0);
    EXPECT_TRUE(c.echo().count("derived.eta"));
    EXPECT_TRUE(c.echo().count("physical.omega_m"));
}

TEST(Config, HertzUnitConverts) {
    const auto a = Config::from_string("[physical]\nomega_m = 300000\nfrequency_unit = Hz\n").physical();
    EXPECT_NEAR(a.omega_m, 2 * pi * 3e5, 1e-6);
    const auto bad = Config::from_string("[physical]\nfrequency_unit = GHz\n");
    EXPECT_NE(error_of([&] { bad.physical(); }).find("physical.frequency_unit"), std::string::npos);
}

TEST(Config, EffectiveValidation) {
    EXPECT_THROW(Config::from_string("[effective]\nV = 0.5\n").effective(), ConfigError);
    EXPECT_THROW(Config::from_string("[effective]\neta = -1\n").effective(), ConfigError);
    EXPECT_THROW(Config::from_string("[broken\n"), ConfigError);
}

TEST(Csv, Layout) {
    CsvTable t;
    t.set("b", 2.5).set("a", "x");
    t.columns = {"x[1]", "y[rad]"};
    t.add({1.0, 0.25});
    EXPECT_EQ(t.str(), std::string("#version=") + version + "\n#a=x\n#b=2.5\nx[1],y[rad]\n1,0.25\n");
    EXPECT_THROW(t.add({1.0}), DomainError);
}

TEST(Csv, SeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2.0), "2");
}

TEST(Csv, RoundTripPrecision) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Scenarios, RegistryContents) {
    std::vector<std::string> names;
    for (auto& s : scenarios::registry()) names.push_back(s.name);
    for (const char* n : {"chsh-single", "wigner-single", "negative-volume-two", "entropy", "trotter-convergence"})
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
    EXPECT_THROW(scenarios::find("nope"), ConfigError);
}

TEST(Scenarios, EntropyStartsAtZero) {
    const auto dir = (std::filesystem::temp_directory_path() / "mesocat_entropy_test").string();
    const auto c = Config::from_string("[scan]\neta_t = 0, 0.5, 6\n");
    const auto paths = scenarios::run_scenario(c, "entropy", dir, 1);
    ASSERT_EQ(paths.size(), 1u);
    const auto text = slurp(paths[0]);
    EXPECT_NE(text.find("\n0,0,0,"), std::string::npos) << text;
    EXPECT_NE(text.find("#scan.eta_t=0,0.5,6"), std::string::npos);
    EXPECT_NE(text.find("#scenario=entropy"), std::string::npos);
}

TEST(Scenarios, ByteIdenticalReruns) {
    const auto base = std::filesystem::temp_directory_path();
    const auto c1 = Config::from_string("[scan]\nN = 16, 32\n"), c2 = Config::from_string("[scan]\nN = 16, 32\n");
    const auto a = scenarios::run_scenario(c1, "trotter-convergence", (base / "mesocat_rerun_a").string(), 5);
    const auto b = scenarios::run_scenario(c2, "trotter-convergence", (base / "mesocat_rerun_b").string(), 5);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(slurp(a[k]), slurp(b[k]));
}

TEST(Scenarios, UnknownKeyBlocksRun) {
    const auto c = Config::from_string("[scan]\nfoo = 1\n");
    EXPECT_THROW(scenarios::run_scenario(c, "entropy", "unused", 1), ConfigError);
}

TEST(Scenarios, EveryColumnHasUnitTag) {
    const auto dir = (std::filesystem::temp_directory_path() / "mesocat_units_test").string();
    const auto c = Config::from_string("[scan]\nN = 8\neta_t = 1\n");
    for (const char* s : {"entropy", "trotter-convergence", "params"})
        for (auto& p : scenarios::run_scenario(c, s, dir, 1)) {
            std::ifstream f(p);
            std::string line;
            while (std::getline(f, line) && line.rfind('#', 0) == 0) {
            }
            std::stringstream ss(line);
            std::string col;
            while (std::getline(ss, col, ',')) {
                EXPECT_NE(col.find('['), std::string::npos) << p << ": " << col;
                EXPECT_EQ(col.back(), ']') << p << ": " << col;
            }
        }
}
