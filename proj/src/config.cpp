#include "nessim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nessim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
}

ConfigMap ConfigMap::parse_string(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(line_no));
        if (cfg.values_.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

std::string ConfigMap::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing key '" + key + "'");
    return it->second;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key) const {
    const std::string raw = get_string(key);
    std::size_t used = 0;
    const double value = std::stod(raw, &used);
    if (used != raw.size()) throw std::runtime_error("config: bad number for '" + key + "'");
    return value;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long ConfigMap::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = get_string(key);
    std::size_t used = 0;
    const long value = std::stol(raw, &used);
    if (used != raw.size()) throw std::runtime_error("config: bad integer for '" + key + "'");
    return value;
}

std::uint64_t ConfigMap::get_seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = get_string(key);
    std::size_t used = 0;
    const std::uint64_t value = std::stoull(raw, &used);
    if (used != raw.size()) throw std::runtime_error("config: bad seed for '" + key + "'");
    return value;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::runtime_error("config: empty element in list '" + key + "'");
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::runtime_error("config: empty list for '" + key + "'");
    return out;
}

void ConfigMap::require_known_keys(std::span<const std::string> allowed) const {
    for (const auto& [key, value] : values_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

const std::vector<std::string> kConfigSchema = {
    "kind",           "alpha",   "reservoir_rates", "reservoir_temps", "T0",
    "L",              "d",       "n_particles",     "t_end",           "checkpoints",
    "seed",           "mode",    "v_max",           "n_v",             "n_x",
    "dt",             "perturbation",
};

ModelConfig model_from_config(const ConfigMap& config) {
    config.require_known_keys(kConfigSchema);
    const auto rates = config.get_double_list("reservoir_rates");
    const auto temps = config.get_double_list("reservoir_temps");
    if (rates.size() != temps.size())
        throw std::runtime_error("config: reservoir_rates/reservoir_temps length mismatch");
    std::vector<Reservoir> reservoirs;
    for (std::size_t j = 0; j < rates.size(); ++j)
        reservoirs.push_back({rates[j], temps[j]});
    const std::string kind = config.get_string("kind", "kfp");
    if (kind != "kfp" && kind != "bgk") throw std::runtime_error("config: kind must be kfp|bgk");
    ModelConfig model{
        .domain = {static_cast<int>(config.get_int("d", 1)), config.get_double("L", 1.0)},
        .reservoirs = ReservoirSet(std::move(reservoirs)),
        .kind = kind == "bgk" ? CollisionKind::bgk : CollisionKind::kfp,
        .alpha = config.get_double("alpha", 1.0),
        .initial_temperature = config.get_double("T0"),
    };
    model.validate();
    return model;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << header[i] << (i + 1 == header.size() ? "\n" : ",");
}

void CsvWriter::write_row(std::span<const double> values) {
    if (values.size() != columns_) throw std::runtime_error("csv: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << format_full(values[i]) << (i + 1 == values.size() ? "\n" : ",");
}

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace nessim
