#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "romfac/gridworld.hpp"
#include "romfac/trainer.hpp"

namespace romfac::harness {

// Key=value configuration with "[section]" headers flattened to
// "section.key". '#' and ';' start comments, later assignments win.
class Config {
public:
    static Config parse(std::istream& in);              // throws std::invalid_argument
    static Config parse_file(const std::string& path);  // adds std::runtime_error for IO

    // Apply a "section.key=value" override (the CLI's --set).
    void set_entry(const std::string& entry);
    void set(const std::string& key, std::string value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                            std::vector<std::uint64_t> fallback) const;

    // Keys in the given sections that no getter ever looked at — typos.
    // Throws std::invalid_argument naming the first offender.
    void reject_unknown(const std::vector<std::string>& sections) const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> touched_;
};

// Section readers. Each consumes its keys from the config; unknown keys in
// the consumed sections are caught later by reject_unknown.
gridworld::EnvConfig env_config_from(const Config& cfg);      // [env]
trainer::TrainerConfig trainer_config_from(const Config& cfg);  // [train] + [attack]

}  // namespace romfac::harness
