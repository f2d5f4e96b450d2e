#include "fvlab/config_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fvlab/errors.hpp"

namespace fvlab {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}
}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get_str(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

std::string ConfigFile::require_str(const std::string& section,
                                    const std::string& key) const {
    if (!has(section, key))
        throw ConfigError("config: missing required key \"" + key +
                          "\" in section [" + section + "]");
    return get_str(section, key, "");
}

double ConfigFile::get_num(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key \"" + key + "\" in [" + section +
                          "] is not a number: \"" + v + "\"");
    }
}

double ConfigFile::require_num(const std::string& section,
                               const std::string& key) const {
    if (!has(section, key))
        throw ConfigError("config: missing required key \"" + key +
                          "\" in section [" + section + "]");
    return get_num(section, key, 0.0);
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
    const double x = get_num(section, key, fallback);
    const int i = static_cast<int>(x);
    if (x != i)
        throw ConfigError("config: key \"" + key + "\" in [" + section +
                          "] must be an integer");
    return i;
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key,
                                         const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("config: key \"" + key + "\" in [" + section +
                              "] has a non-numeric entry \"" + item + "\"");
        }
    }
    if (out.empty())
        throw ConfigError("config: key \"" + key + "\" in [" + section +
                          "] is an empty list");
    return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    sections_[section][key] = value;
}

void ConfigFile::allow_only(const std::string& section,
                            const std::vector<std::string>& keys) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return;
    for (const auto& [k, v] : s->second) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ConfigError("config: unknown key \"" + k + "\" in section [" +
                              section + "]");
    }
}

}  // namespace fvlab
