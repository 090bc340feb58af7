#pragma once

// INI-style scenario configuration. Sections used:
//   [scenario]  name, seed, out
//   [physical]  omega_m, omega_c, L, m, g, Omega, delta, Delta, gamma, T   (rad/s, m, kg, K)
//   [effective] eta, V, d, phi, gamma
//   [scan], [grid], [optimizer], [verify]  scenario-specific keys
// Every key can be overridden by MESOCAT_<SECTION>_<KEY> in the environment
// (upper case, e.g. MESOCAT_SCAN_ETA_T=2,3). Lists are comma-separated.

#include "mesocat/params.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

namespace mesocat {

class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path) {
        Config c;
        try {
            boost::property_tree::ini_parser::read_ini(path, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return c;
    }
    static Config from_string(const std::string& text) {
        Config c;
        std::istringstream is(text);
        try {
            boost::property_tree::ini_parser::read_ini(is, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return c;
    }

    void set(const std::string& key, const std::string& value) { tree_.put(key, value); }
    bool has_section(const std::string& s) const { return tree_.get_child_optional(s).has_value(); }

    /// Raw string with environment override, or nullopt.
    std::optional<std::string> raw(const std::string& key) const {
        if (const char* e = std::getenv(env_name(key).c_str())) return std::string(e);
        if (auto v = tree_.get_optional<std::string>(key)) return *v;
        return std::nullopt;
    }

    double get_double(const std::string& key, double def) const {
        auto r = raw(key);
        const double v = r ? parse_double(key, *r) : def;
        echo_[key] = format_double(v);
        return v;
    }
    long get_int(const std::string& key, long def) const {
        auto r = raw(key);
        long v = def;
        if (r) {
            try {
                std::size_t pos = 0;
                v = std::stol(trim(*r), &pos);
                if (pos != trim(*r).size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': expected an integer, got '" + *r + "'");
            }
        }
        echo_[key] = std::to_string(v);
        return v;
    }
    std::string get_string(const std::string& key, const std::string& def) const {
        auto r = raw(key);
        std::string v = r ? trim(*r) : def;
        echo_[key] = v;
        return v;
    }
    std::vector<double> get_list(const std::string& key, std::vector<double> def) const {
        auto r = raw(key);
        std::vector<double> v = std::move(def);
        if (r) {
            v.clear();
            std::stringstream ss(*r);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!trim(item).empty()) v.push_back(parse_double(key, item));
            if (v.empty()) throw ConfigError("config key '" + key + "': empty list");
        }
        std::string e;
        for (std::size_t i = 0; i < v.size(); ++i) e += (i ? "," : "") + format_double(v[i]);
        echo_[key] = e;
        return v;
    }

    /// Keys read so far with their resolved values, sorted.
    const std::map<std::string, std::string>& echo() const { return echo_; }

    /// [physical] values over the built-in laboratory defaults.
    PhysicalParams physical() const {
        PhysicalParams p;
        p.omega_m = get_double("physical.omega_m", p.omega_m);
        p.omega_c = get_double("physical.omega_c", p.omega_c);
        p.L = get_double("physical.L", p.L);
        p.m = get_double("physical.m", p.m);
        p.g = get_double("physical.g", p.g);
        p.Omega = get_double("physical.Omega", p.Omega);
        p.delta = get_double("physical.delta", p.delta);
        p.Delta = get_double("physical.Delta", p.Delta);
        p.gamma = get_double("physical.gamma", p.gamma);
        p.T = get_double("physical.T", p.T);
        const std::string unit = get_string("physical.frequency_unit", "rad/s");
        if (unit == "Hz") {
            for (double* f : {&p.omega_m, &p.omega_c, &p.g, &p.Omega, &p.delta, &p.Delta, &p.gamma}) *f *= 2 * pi;
        } else if (unit != "rad/s") {
            throw ConfigError("config key 'physical.frequency_unit': expected 'rad/s' or 'Hz', got '" + unit + "'");
        }
        return p;
    }

    /// Every key present in the file must be in `known` ("section.key").
    void check_known(const std::vector<std::string>& known) const {
        for (auto& [sec, sub] : tree_) {
            if (sub.empty() && !sub.data().empty())
                throw ConfigError("config key '" + sec + "': keys must live in a section");
            for (auto& [k, v] : sub) {
                const std::string key = sec + "." + k;
                if (std::find(known.begin(), known.end(), key) == known.end())
                    throw ConfigError("config key '" + key + "': unknown key");
            }
        }
    }

    /// Either [physical] or [effective], never both. Physical inputs are
    /// converted; the derived values are echoed.
    EffectiveParams effective() const {
        const bool ph = has_section("physical"), ef = has_section("effective");
        if (ph && ef) throw ConfigError("config: supply exactly one of [physical] and [effective]");
        if (ph) {
            const PhysicalParams p = physical();
            EffectiveParams e;
            try {
                e = derive_effective(p);
            } catch (const DomainError& err) {
                throw ConfigError(std::string("config [physical]: ") + err.what());
            }
            echo_["derived.eta"] = format_double(e.eta);
            echo_["derived.chi"] = format_double(e.chi);
            echo_["derived.V"] = format_double(e.V);
            return e;
        }
        EffectiveParams e;
        e.eta = get_double("effective.eta", 1.0);
        e.V = get_double("effective.V", 1.0);
        e.d = get_double("effective.d", 0.0);
        e.phi = get_double("effective.phi", 0.0);
        if (e.V < 1.0) throw ConfigError("config key 'effective.V': must be >= 1");
        if (e.eta < 0.0) throw ConfigError("config key 'effective.eta': must be >= 0");
        return e;
    }

private:
    boost::property_tree::ptree tree_;
    mutable std::map<std::string, std::string> echo_;

    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static std::string env_name(const std::string& key) {
        std::string n = "MESOCAT_";
        for (char c : key) n += c == '.' ? '_' : char(std::toupper(static_cast<unsigned char>(c)));
        return n;
    }
    static double parse_double(const std::string& key, const std::string& s) {
        const std::string t = trim(s);
        try {
            std::size_t pos = 0;
            const double v = std::stod(t, &pos);
            if (pos != t.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': expected a number, got '" + t + "'");
        }
    }
};

}  // namespace mesocat
