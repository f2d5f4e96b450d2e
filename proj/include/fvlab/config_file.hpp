#pragma once

#include <map>
#include <string>
#include <vector>

namespace fvlab {

// Plain-text experiment configuration: [section] headers over key = value
// lines, '#' comments, no nesting. Unknown keys are rejected by the driver
// schemas (allow_only) so typos fail loudly.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    std::string require_str(const std::string& section,
                            const std::string& key) const;
    double get_num(const std::string& section, const std::string& key,
                   double fallback) const;
    double require_num(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key,
                int fallback) const;
    std::vector<double> get_list(const std::string& section,
                                 const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);

    // Rejects any key of `section` outside `keys` (ConfigError names it).
    void allow_only(const std::string& section,
                    const std::vector<std::string>& keys) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections()
        const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace fvlab
