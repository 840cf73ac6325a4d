#include "config.hpp"

#include <fmt/format.h>

#include <cmath>
#include <set>

namespace fden::cli {

using nlohmann::json;

double RunConfig::tolerance(const std::string& key, double fallback) const
{
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

std::vector<int> parse_int_range(const std::string& text, const std::string& field)
{
    std::vector<int> out;
    if (text.empty()) return out;
    auto to_int = [&](const std::string& t) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(t, &pos);
            if (pos != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(field, fmt::format("'{}' is not an integer", t));
        }
    };
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(text.substr(0, dots));
        const int b = to_int(text.substr(dots + 2));
        if (b < a) throw ConfigError(field, fmt::format("empty range '{}'", text));
        for (int v = a; v <= b; ++v) out.push_back(v);
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(to_int(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

namespace {

template <class T>
T get(const json& j, const std::string& key)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

}  // namespace

RunConfig config_from_json(const json& j)
{
    static const std::set<std::string> keys{"command", "gamma", "z", "c", "grid", "kappa", "n", "n_max",
                                            "kappa_max", "L", "potential", "lambda", "lambda_step", "s",
                                            "s_prime", "delta", "tolerances", "seed", "draws", "electrons",
                                            "fit_tail", "out_dir"};
    reject_unknown(j, keys, "");
    RunConfig c;
    if (j.contains("command")) c.command = get<std::string>(j, "command");
    if (j.contains("gamma")) c.gamma = get<double>(j, "gamma");
    if (j.contains("z")) c.z = get<double>(j, "z");
    if (j.contains("c")) c.c = get<double>(j, "c");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"kind", "r_min", "r_max", "b", "n"}, "grid");
        if (g.contains("kind")) c.grid.kind = get<std::string>(g, "kind");
        if (g.contains("r_min")) c.grid.r_min = get<double>(g, "r_min");
        if (g.contains("r_max")) c.grid.r_max = get<double>(g, "r_max");
        if (g.contains("b")) c.grid.b = get<double>(g, "b");
        if (g.contains("n")) c.grid.n = get<std::size_t>(g, "n");
    }
    auto range_text = [&](const std::string& key) -> std::string {
        const json& v = j.at(key);
        if (v.is_number_integer()) return std::to_string(v.get<int>());
        return get<std::string>(j, key);
    };
    if (j.contains("kappa")) c.kappa = range_text("kappa");
    if (j.contains("n")) c.n = range_text("n");
    if (j.contains("n_max")) c.n_max = get<int>(j, "n_max");
    if (j.contains("kappa_max")) c.kappa_max = get<int>(j, "kappa_max");
    if (j.contains("L")) c.L = get<int>(j, "L");
    if (j.contains("potential")) {
        const json& p = j.at("potential");
        reject_unknown(p, {"name", "params"}, "potential");
        if (p.contains("name")) c.potential.name = get<std::string>(p, "name");
        if (p.contains("params")) {
            try {
                c.potential.params = p.at("params").get<std::map<std::string, double>>();
            } catch (const json::exception& e) {
                throw ConfigError("potential.params", e.what());
            }
        }
    }
    if (j.contains("lambda")) c.lambda = get<double>(j, "lambda");
    if (j.contains("lambda_step")) c.lambda_step = get<double>(j, "lambda_step");
    if (j.contains("s")) c.s = get<double>(j, "s");
    if (j.contains("s_prime")) c.s_prime = get<double>(j, "s_prime");
    if (j.contains("delta")) c.delta = get<double>(j, "delta");
    if (j.contains("tolerances")) {
        try {
            c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
        } catch (const json::exception& e) {
            throw ConfigError("tolerances", e.what());
        }
    }
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
    if (j.contains("draws")) c.draws = get<std::size_t>(j, "draws");
    if (j.contains("electrons")) c.electrons = get<int>(j, "electrons");
    if (j.contains("fit_tail")) c.fit_tail = get<bool>(j, "fit_tail");
    if (j.contains("out_dir")) c.out_dir = get<std::string>(j, "out_dir");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path));
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config", fmt::format("'{}' is not valid JSON: {}", path, e.what()));
    }
    return config_from_json(j);
}

json config_to_json(const RunConfig& c)
{
    json j;
    j["command"] = c.command;
    if (c.gamma) j["gamma"] = *c.gamma;
    if (c.z) j["z"] = *c.z;
    if (c.c) j["c"] = *c.c;
    json g = json::object();
    if (c.grid.kind) g["kind"] = *c.grid.kind;
    if (c.grid.r_min) g["r_min"] = *c.grid.r_min;
    if (c.grid.r_max) g["r_max"] = *c.grid.r_max;
    if (c.grid.b) g["b"] = *c.grid.b;
    if (c.grid.n) g["n"] = *c.grid.n;
    j["grid"] = g;
    j["kappa"] = c.kappa;
    j["n"] = c.n;
    j["n_max"] = c.n_max;
    j["kappa_max"] = c.kappa_max;
    j["L"] = c.L;
    j["potential"] = {{"name", c.potential.name}, {"params", c.potential.params}};
    j["lambda"] = c.lambda;
    j["lambda_step"] = c.lambda_step;
    j["s"] = c.s;
    if (c.s_prime) j["s_prime"] = *c.s_prime;
    j["delta"] = c.delta;
    j["tolerances"] = c.tolerances;
    j["seed"] = c.seed;
    j["draws"] = c.draws;
    j["electrons"] = c.electrons;
    j["fit_tail"] = c.fit_tail;
    return j;
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_digest(const RunConfig& cfg) { return fmt::format("{:016x}", fnv1a(config_to_json(cfg).dump())); }

void validate(const RunConfig& c)
{
    for (const auto& [k, v] : c.tolerances)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("tolerances." + k, "must be positive");
    if (c.gamma && !(*c.gamma > 0.0 && *c.gamma < 1.0)) throw ConfigError("gamma", "must lie in (0, 1)");
    if (c.z && !(*c.z > 0.0)) throw ConfigError("z", "must be positive");
    if (c.c && !(*c.c > 0.0)) throw ConfigError("c", "must be positive");
    const int given = (c.gamma ? 1 : 0) + (c.z ? 1 : 0) + (c.c ? 1 : 0);
    if (given == 1 && !c.gamma) throw ConfigError("gamma", "give gamma alone or two of gamma, z, c");
    if (given == 3 && std::abs(*c.gamma - *c.z / *c.c) > 1e-12 * std::max(1.0, *c.gamma))
        throw ConfigError("gamma", "gamma, z and c are inconsistent (gamma = z/c)");
    if (c.n_max < 0) throw ConfigError("n_max", "must be nonnegative");
    if (c.kappa_max < 1) throw ConfigError("kappa_max", "must be at least 1");
    if (c.L < 1) throw ConfigError("L", "must be at least 1");
    if (!(c.lambda_step > 0.0)) throw ConfigError("lambda_step", "must be positive");
    if (c.draws == 0) throw ConfigError("draws", "must be positive");
    if (c.electrons < 1) throw ConfigError("electrons", "must be at least 1");
    if (c.grid.n && *c.grid.n < 8) throw ConfigError("grid.n", "needs at least 8 points");
    if (c.grid.r_min && !(*c.grid.r_min >= 0.0)) throw ConfigError("grid.r_min", "must be nonnegative");
    if (c.grid.r_max && c.grid.r_min && !(*c.grid.r_max > *c.grid.r_min))
        throw ConfigError("grid.r_max", "must exceed r_min");
    parse_int_range(c.kappa, "kappa");
    parse_int_range(c.n, "n");
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& digest, const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size())
{
    if (!out_) throw ConfigError("out_dir", fmt::format("cannot write '{}'", path));
    out_ << "# config_digest=" << digest << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::sep()
{
    if (in_row_++) out_ << ',';
}

CsvWriter& CsvWriter::cell(double v)
{
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v)
{
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v)
{
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row()
{
    if (in_row_ != columns_) throw std::logic_error(fmt::format("csv row has {} cells, expected {}", in_row_, columns_));
    out_ << '\n';
    in_row_ = 0;
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("out_dir", fmt::format("cannot write '{}'", path));
    out << j.dump(2) << '\n';
}

}  // namespace fden::cli
