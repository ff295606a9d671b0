#include "romfac/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace romfac::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i)
        if (line[i] == '#' || line[i] == ';') return line.substr(0, i);
    return line;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
    throw std::invalid_argument("config: key '" + key + "': expected " + expected + ", got '" +
                                value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        bad_value(key, value, "a number");
    }
    if (used != value.size()) bad_value(key, value, "a number");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        bad_value(key, value, "an integer");
    }
    if (used != value.size()) bad_value(key, value, "an integer");
    return v;
}

std::vector<std::string> split_words(const std::string& value) {
    std::istringstream in(value);
    std::vector<std::string> out;
    std::string word;
    while (in >> word) out.push_back(word);
    return out;
}

}  // namespace

Config Config::parse(std::istream& in) {
    Config cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3)
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(line_no));
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty())
                throw std::invalid_argument("config: empty section name at line " +
                                            std::to_string(line_no));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(line_no));
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(line_no));
        if (section.empty())
            throw std::invalid_argument("config: key '" + key + "' outside any section at line " +
                                        std::to_string(line_no));
        cfg.values_[section + "." + key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    return parse(in);
}

void Config::set_entry(const std::string& entry) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("config: override must look like section.key=value, got '" +
                                    entry + "'");
    const std::string key = trim(entry.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw std::invalid_argument("config: override key '" + key +
                                    "' must be section-qualified");
    set(key, trim(entry.substr(eq + 1)));
}

void Config::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

bool Config::has(const std::string& key) const {
    touched_.insert(key);
    return values_.count(key) > 0;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

int Config::get_int(const std::string& key, int fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const long long v = parse_int(key, it->second);
    if (v < INT32_MIN || v > INT32_MAX) bad_value(key, it->second, "a 32-bit integer");
    return static_cast<int>(v);
}

double Config::get_double(const std::string& key, double fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    bad_value(key, it->second, "a boolean");
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(it->second, &used);
    } catch (const std::exception&) {
        bad_value(key, it->second, "an unsigned integer");
    }
    if (used != it->second.size()) bad_value(key, it->second, "an unsigned integer");
    return v;
}

std::vector<int> Config::get_int_list(const std::string& key, std::vector<int> fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const std::string& word : split_words(it->second))
        out.push_back(static_cast<int>(parse_int(key, word)));
    return out;
}

std::vector<std::uint64_t> Config::get_u64_list(const std::string& key,
                                                std::vector<std::uint64_t> fallback) const {
    touched_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> out;
    for (const std::string& word : split_words(it->second)) {
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(word, &used);
        } catch (const std::exception&) {
            bad_value(key, word, "an unsigned integer");
        }
        if (used != word.size()) bad_value(key, word, "an unsigned integer");
        out.push_back(v);
    }
    return out;
}

void Config::reject_unknown(const std::vector<std::string>& sections) const {
    for (const auto& [key, value] : values_) {
        (void)value;
        const std::string section = key.substr(0, key.find('.'));
        bool relevant = false;
        for (const std::string& s : sections) relevant = relevant || s == section;
        if (relevant && touched_.count(key) == 0)
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

gridworld::EnvConfig env_config_from(const Config& cfg) {
    gridworld::EnvConfig env;
    const std::string scenario = cfg.get_string("env.scenario", "battle");
    env.scenario = gridworld::scenario_from_name(scenario);
    env.width = cfg.get_int("env.width", env.width);
    env.height = cfg.get_int("env.height", env.height);
    env.team_a_size = cfg.get_int("env.team_a", env.team_a_size);
    env.team_b_size = cfg.get_int("env.team_b", env.team_b_size);
    env.view_radius = cfg.get_int("env.view_radius", env.view_radius);
    env.max_steps = cfg.get_int("env.max_steps", env.max_steps);
    env.max_hp = cfg.get_int("env.max_hp", env.max_hp);
    env.hit_damage = cfg.get_int("env.hit_damage", env.hit_damage);
    env.rewards.step = cfg.get_double("env.reward_step", env.rewards.step);
    env.rewards.attack_hit = cfg.get_double("env.reward_attack_hit", env.rewards.attack_hit);
    env.rewards.kill = cfg.get_double("env.reward_kill", env.rewards.kill);
    env.rewards.attack_empty = cfg.get_double("env.reward_attack_empty", env.rewards.attack_empty);
    env.rewards.be_attacked = cfg.get_double("env.reward_be_attacked", env.rewards.be_attacked);
    env.rewards.predator_attack =
        cfg.get_double("env.reward_predator_attack", env.rewards.predator_attack);
    env.rewards.prey_attacked =
        cfg.get_double("env.reward_prey_attacked", env.rewards.prey_attacked);
    env.validate();
    return env;
}

trainer::TrainerConfig trainer_config_from(const Config& cfg) {
    trainer::TrainerConfig t;
    t.variant = trainer::variant_from_name(cfg.get_string("train.variant", "mfac"));
    t.mu_target = cfg.get_double("train.mu", t.mu_target);
    t.epsilon_target = cfg.get_double("train.epsilon", t.epsilon_target);
    t.warmup_rounds = cfg.get_int("train.warmup_rounds", t.warmup_rounds);
    t.loop_rounds = cfg.get_int("train.loop_rounds", t.loop_rounds);
    t.loop_count = cfg.get_int("train.loop_count", t.loop_count);
    t.ramp_fraction = cfg.get_double("train.ramp_fraction", t.ramp_fraction);
    t.hidden = cfg.get_int_list("train.hidden", t.hidden);
    t.activation =
        diffcore::activation_from_name(cfg.get_string("train.activation", "relu"));
    t.actor_lr = cfg.get_double("train.actor_lr", t.actor_lr);
    t.critic_lr = cfg.get_double("train.critic_lr", t.critic_lr);
    t.tau_actor = cfg.get_double("train.tau_actor", t.tau_actor);
    t.tau_critic = cfg.get_double("train.tau_critic", t.tau_critic);
    t.gamma = cfg.get_double("train.gamma", t.gamma);
    t.minibatch = cfg.get_int("train.minibatch", t.minibatch);
    t.buffer_capacity = cfg.get_int("train.buffer", t.buffer_capacity);
    t.attack.steps = cfg.get_int("attack.steps", t.attack.steps);
    t.attack.step_size = cfg.get_double("attack.step_size", t.attack.step_size);
    t.attack.clip_low = cfg.get_double("attack.clip_low", t.attack.clip_low);
    t.attack.clip_high = cfg.get_double("attack.clip_high", t.attack.clip_high);
    t.validate();
    return t;
}

}  // namespace romfac::harness
