#include "orbitport/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "orbitport/errors.hpp"

namespace orbitport {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string Config::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "arc_tol=" << arc_tol << ";cluster_eps=" << cluster_eps
       << ";h_big=" << h_big << ";h_floor=" << h_floor
       << ";iter_cap=" << iter_cap << ";land_tol=" << land_tol
       << ";newton_tol=" << newton_tol << ";ratio=" << ratio
       << ";seed=" << seed << ";threads=" << threads << ";";
    return os.str();
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 14695981039346656037ull; // FNV-1a
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void Config::set(const std::string& key, const std::string& value) {
    try {
        if (key == "newton_tol") newton_tol = std::stod(value);
        else if (key == "land_tol") land_tol = std::stod(value);
        else if (key == "cluster_eps") cluster_eps = std::stod(value);
        else if (key == "arc_tol") arc_tol = std::stod(value);
        else if (key == "h_big") h_big = std::stod(value);
        else if (key == "ratio") ratio = std::stod(value);
        else if (key == "h_floor") h_floor = std::stod(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "threads") threads = std::stoi(value);
        else if (key == "iter_cap") iter_cap = std::stoi(value);
        else throw ParseError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument&) {
        throw ParseError("bad value '" + value + "' for config key '" + key + "'");
    } catch (const std::out_of_range&) {
        throw ParseError("value '" + value + "' out of range for key '" + key + "'");
    }
    if (ratio <= 0 || ratio >= 1) throw ParseError("ratio must lie in (0,1)");
    if (threads < 1) throw ParseError("threads must be >= 1");
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) +
                             " is not 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

} // namespace orbitport
