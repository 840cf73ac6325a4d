#pragma once

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fden::cli {

/// Bad configuration; reported with exit status 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(field)
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A numerical invariant did not hold; exit status 1.
class AssertionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    std::optional<std::string> kind;
    std::optional<double> r_min, r_max, b;
    std::optional<std::size_t> n;
};

struct PotentialSpec {
    std::string name;  ///< empty: the command's default
    std::map<std::string, double> params;
};

struct RunConfig {
    std::string command;
    std::optional<double> gamma, z, c;
    GridSpec grid;
    std::string kappa;  ///< range "a..b", list "a,b,c" or single value
    std::string n;
    int n_max = 25;
    int kappa_max = 12;
    int L = 2;
    PotentialSpec potential;
    double lambda = 1e-3;
    double lambda_step = 1e-3;
    double s = 0.75;
    std::optional<double> s_prime;
    double delta = 0.0;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 42;
    std::size_t draws = 10000;
    int electrons = 1;
    bool fit_tail = false;
    std::string out_dir = ".";
    std::string against;

    double tolerance(const std::string& key, double fallback) const;
};

/// "a..b" (inclusive), "a,b,c" or "a"; zero is kept, callers filter.
std::vector<int> parse_int_range(const std::string& text, const std::string& field);

/// Reads the declarative file; unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Canonical tree of the effective configuration (output locations excluded).
nlohmann::json config_to_json(const RunConfig& cfg);

/// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);
std::uint64_t fnv1a(const std::string& bytes);

void validate(const RunConfig& cfg);

/// Long-format CSV with the digest in a leading comment line; 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& digest, const std::vector<std::string>& columns);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    void sep();

    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

std::string format_double(double v);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace fden::cli
