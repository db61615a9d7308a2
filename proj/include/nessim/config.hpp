// key = value run configuration with strict unknown-key rejection, and CSV
// emission with 17 significant digits.
#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nessim/model.hpp"

namespace nessim {

class ConfigMap {
public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;

    // throws on any key outside the allowed set
    void require_known_keys(std::span<const std::string> allowed) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// documented configuration schema (see README)
extern const std::vector<std::string> kConfigSchema;

// ModelConfig from the keys kind/alpha/reservoir_rates/reservoir_temps/T0/L/d.
ModelConfig model_from_config(const ConfigMap& config);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);
    void write_row(std::span<const double> values);

private:
    std::ostream& out_;
    std::size_t columns_;
};

std::string format_full(double value);  // 17 significant digits

}  // namespace nessim
