#include "autoint/config.hpp"
#include "autoint/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace autoint {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

RunConfig from_tree(const pt::ptree& tree) {
    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError("config: key '" + section + "' outside any section");
        }
        for (const auto& [key, value] : body) {
            cfg.set(section, key, trim(value.get_value<std::string>()));
        }
    }
    return cfg;
}

double to_double(const std::string& s, const std::string& where) {
    const char* b = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(b, &end);
    if (end == b || *end != '\0' || errno == ERANGE) {
        throw ConfigError("config: " + where + " = '" + s + "' is not a number");
    }
    return v;
}

} // namespace

RunConfig RunConfig::from_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + path + ": " + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }
    return from_tree(tree);
}

RunConfig RunConfig::from_ini_string(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    return from_tree(tree);
}

void RunConfig::set(const std::string& dotted, const std::string& value) {
    auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size()) {
        throw ConfigError("config: override '" + dotted + "' must look like section.key");
    }
    set(dotted.substr(0, dot), dotted.substr(dot + 1), value);
}

void RunConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    values_[section][key] = value;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
}

const std::string& RunConfig::get(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    if (s != values_.end()) {
        auto k = s->second.find(key);
        if (k != s->second.end()) return k->second;
    }
    throw ConfigError("config: missing " + section + "." + key);
}

double RunConfig::get_double(const std::string& section, const std::string& key) const {
    return to_double(get(section, key), section + "." + key);
}

long RunConfig::get_int(const std::string& section, const std::string& key) const {
    const std::string& s = get(section, key);
    const char* b = s.c_str();
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(b, &end, 10);
    if (end == b || *end != '\0' || errno == ERANGE) {
        throw ConfigError("config: " + section + "." + key + " = '" + s + "' is not an integer");
    }
    return v;
}

bool RunConfig::get_bool(const std::string& section, const std::string& key) const {
    std::string s = get(section, key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config: " + section + "." + key + " = '" + s + "' is not a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key) const {
    try {
        return parse_list(get(section, key));
    } catch (const ConfigError& e) {
        throw ConfigError("config: " + section + "." + key + ": " + e.what());
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::string s = trim(text);
    std::vector<double> out;
    if (s.empty()) return out;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(trim(p));
        if (parts.size() != 3) throw ConfigError("range must be lo:hi:n, got '" + s + "'");
        double lo = to_double(parts[0], "range start");
        double hi = to_double(parts[1], "range end");
        double n = to_double(parts[2], "range count");
        if (n < 1 || n != static_cast<long>(n)) throw ConfigError("range count must be >= 1");
        long count = static_cast<long>(n);
        if (count == 1) return {lo};
        for (long i = 0; i < count; ++i) {
            out.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) /
                                                       static_cast<double>(count - 1));
        }
        return out;
    }
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(to_double(trim(p), "list entry"));
    return out;
}

void RunConfig::resolve(const std::vector<KeySpec>& schema, std::ostream* notices) {
    std::set<std::pair<std::string, std::string>> known;
    for (const auto& k : schema) known.emplace(k.section, k.key);
    for (const auto& [section, body] : values_) {
        for (const auto& [key, value] : body) {
            if (!known.count({section, key})) {
                throw ConfigError("config: unknown key " + section + "." + key);
            }
        }
    }
    for (const auto& k : schema) {
        if (!has(k.section, k.key)) {
            set(k.section, k.key, k.default_value);
            if (notices) {
                *notices << "notice: " << k.section << "." << k.key << " not set, using default '"
                         << k.default_value << "'\n";
            }
        }
    }
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    for (const auto& [section, body] : values_) {
        os << "[" << section << "]\n";
        for (const auto& [key, value] : body) os << key << " = " << value << "\n";
    }
    return os.str();
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::vector<std::string>& case_ids() {
    static const std::vector<std::string> ids{"european", "asian",     "basket",    "moi",
                                              "potential", "population", "custom"};
    return ids;
}

std::vector<KeySpec> case_schema(const std::string& id) {
    if (std::find(case_ids().begin(), case_ids().end(), id) == case_ids().end()) {
        throw ConfigError("config: unknown case '" + id + "'");
    }

    std::vector<KeySpec> s{
        {"run", "case", id},
        {"run", "seed", "7"},
        {"run", "model", id == "population" ? "dqc" : "mlp"},
        {"optimizer", "algorithm", id == "population" ? "adabelief" : "adam"},
        {"optimizer", "learning_rate", "0.005"},
        {"optimizer", "final_learning_rate", ""},
        {"optimizer", "beta1", "0.9"},
        {"optimizer", "beta2", "0.999"},
        {"optimizer", "epsilon", "1e-8"},
        {"optimizer", "epochs", "20000"},
        {"optimizer", "target_loss", ""},
        {"optimizer", "threads", "0"},
        {"optimizer", "chunk_size", "16"},
        {"optimizer", "log_every", "0"},
        {"model", "hidden", id == "basket" ? "10,10,10" : "10,10"},
        {"model", "input_scaling", "false"},
        {"model", "n_qubits", "4"},
        {"model", "depth", "4"},
        {"model", "rescale_bound", "0.95"},
    };
    auto add = [&](std::initializer_list<KeySpec> more) { s.insert(s.end(), more); };

    if (id == "european" || id == "asian") {
        add({{"constants", "sigma", "1"},
             {"constants", "nu", "5"},
             {"constants", "x0", "2"},
             {"constants", "t0", "0"},
             {"constants", "strike", "0.06"},
             {"constants", "terminal", "0.5"},
             {"grid", "x_min", "-5"},
             {"grid", "x_max", "5"},
             {"grid", "t_min", "0.1"},
             {"grid", "t_max", "0.5"},
             {"grid", "nx", "50"},
             {"grid", "nt", "20"},
             {"data", "samples", "50"},
             {"data", "density", "kde"},
             {"data", "bins", "20"},
             {"data", "form", "product"},
             {"loss", "data_weight", "1"},
             {"loss", "residual_weight", "1"}});
        if (id == "asian") add({{"grid", "asian_times", "0.1:0.5:5"}});
    } else if (id == "basket") {
        add({{"constants", "sigma1", "1"},
             {"constants", "nu1", "5"},
             {"constants", "x01", "2"},
             {"constants", "sigma2", "2"},
             {"constants", "nu2", "3"},
             {"constants", "x02", "1"},
             {"grid", "x1_min", "-1.5"},
             {"grid", "x1_max", "2.5"},
             {"grid", "x2_min", "-3"},
             {"grid", "x2_max", "3.5"},
             {"grid", "t_min", "0.3"},
             {"grid", "t_max", "1"},
             {"grid", "nx1", "20"},
             {"grid", "nx2", "20"},
             {"grid", "nt", "15"},
             {"grid", "n_readout", "15"},
             {"data", "samples", "50"},
             {"data", "density", "kde"},
             {"data", "bins", "10"},
             {"data", "form", "product"},
             {"loss", "data_weight", "1"}});
    } else if (id == "moi") {
        add({{"constants", "rho", "1"},
             {"constants", "width", "0.1"},
             {"constants", "radius", "1"},
             {"constants", "h0", "1"},
             {"constants", "g", "9.81"},
             {"constants", "p_air", "0"},
             {"constants", "omega_sweep", "0:8:9"},
             {"grid", "nr", "40"},
             {"grid", "r_min_fraction", "0.02"},
             {"loss", "volume", "surrogate"},
             {"loss", "residual_weight", "1"},
             {"loss", "volume_weight", "1"},
             {"loss", "coupling_weight", "1"}});
    } else if (id == "potential") {
        add({{"constants", "v", "1"},
             {"constants", "D", "0.1"},
             {"constants", "lambda", "1"},
             {"constants", "obs_x", "0"},
             {"constants", "obs_y", "1"},
             {"constants", "obs_z", "0"},
             {"constants", "mass", "1"},
             {"constants", "center", "-2"},
             {"constants", "width", "0.2"},
             {"constants", "t_init", "0.1"},
             {"grid", "x_min", "-6"},
             {"grid", "x_max", "6"},
             {"grid", "t_max", "1"},
             {"grid", "nx", "61"},
             {"grid", "nt", "10"},
             {"grid", "n_initial", "121"},
             {"grid", "n_readout", "10"},
             {"loss", "residual_weight", "1"},
             {"loss", "initial_weight", "1"},
             {"loss", "boundary_weight", "1"}});
    } else if (id == "population") {
        add({{"constants", "t_max", "1"},
             {"grid", "points", "25"},
             {"grid", "n_readout", "101"}});
    }
    return s;
}

} // namespace autoint
