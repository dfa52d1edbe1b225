#pragma once

// Run configuration: a JSON document whose keys are the snake_case field
// names below. Unknown keys are rejected.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dioph/enumeration.hpp"
#include "dioph/metric.hpp"
#include "dioph/primes.hpp"

namespace dioph {

struct CenterSpec {
    std::string name;
    std::optional<std::vector<std::vector<double>>> matrix;  // required unless name is built in

    friend bool operator==(const CenterSpec&, const CenterSpec&) = default;
};

struct RunConfig {
    int n = 2;
    std::vector<std::uint64_t> primes{2};
    bool all_primes = false;
    std::string metric_mode = "log";  // log | refined
    int metric_segments = 1;
    double r_max = kDefaultRMax;
    std::vector<double> delta_grid{0.2, 0.4};
    std::vector<std::uint64_t> h_grid{16, 32, 64, 128, 256, 512};
    std::vector<CenterSpec> centers{{"identity", std::nullopt}, {"generic", std::nullopt}};
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t seed = 1;
    int k_max = 12;
    double entry_bound_cap = 5e9;
    double time_budget_s = 0;  // 0: unlimited
    std::optional<double> q_s;
    double spectral_e = 1;
    std::optional<double> covolume;
    // omega runs
    std::uint64_t omega_centers = 20;
    std::uint64_t h_cap = 4096;
    double omega_radius = 0.8;  // centers exp(X) with ||X||_F <= omega_radius
    unsigned workers = 1;       // never affects results

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    PrimeSet prime_set() const { return all_primes ? PrimeSet::all() : PrimeSet::of(primes); }

    MetricSpec metric() const {
        if (metric_mode == "log") return MetricSpec::log_mode();
        require(metric_mode == "refined", "metric_mode must be 'log' or 'refined'");
        return MetricSpec::refined(metric_segments);
    }

    void validate() const {
        require(n >= 2, "n must be at least 2");
        (void)prime_set();
        (void)metric();
        require(r_max > 0, "r_max must be positive");
        for (double d : delta_grid) {
            require(d > 0, "delta_grid values must be positive");
            if (d > r_max) throw OutOfDomain("delta_grid value exceeds r_max");
        }
        for (auto h : h_grid) require(h >= 1, "h_grid values must be at least 1");
        require(mc_samples >= 2, "mc_samples must be at least 2");
        require(k_max >= 0, "k_max must be non-negative");
        require(entry_bound_cap > 0, "entry_bound_cap must be positive");
        require(time_budget_s >= 0, "time_budget_s must be non-negative");
        if (q_s) require(*q_s >= 2, "q_s must be at least 2");
        require(spectral_e > 0 && spectral_e <= 1, "spectral_e must lie in (0, 1]");
        if (covolume) require(*covolume > 0, "covolume must be positive");
        require(h_cap >= 1, "h_cap must be at least 1");
        require(omega_radius >= 0, "omega_radius must be non-negative");
        for (const auto& c : centers) require(!c.name.empty(), "center names must be non-empty");
    }
};

inline void to_json(nlohmann::json& j, const CenterSpec& c) {
    j = {{"name", c.name}};
    if (c.matrix) j["matrix"] = *c.matrix;
}

inline void from_json(const nlohmann::json& j, CenterSpec& c) {
    if (j.is_string()) {
        c = {j.get<std::string>(), std::nullopt};
        return;
    }
    require(j.is_object(), "center must be a name or an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        require(it.key() == "name" || it.key() == "matrix", "unknown center key '" + it.key() + "'");
    c.name = j.at("name").get<std::string>();
    c.matrix.reset();
    if (j.contains("matrix")) c.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
}

namespace detail {

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null())
        v.reset();
    else
        v = j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json::object();
    j["n"] = c.n;
    j["primes"] = c.primes;
    j["all_primes"] = c.all_primes;
    j["metric_mode"] = c.metric_mode;
    j["metric_segments"] = c.metric_segments;
    j["r_max"] = c.r_max;
    j["delta_grid"] = c.delta_grid;
    j["h_grid"] = c.h_grid;
    j["centers"] = c.centers;
    j["mc_samples"] = c.mc_samples;
    j["seed"] = c.seed;
    j["k_max"] = c.k_max;
    j["entry_bound_cap"] = c.entry_bound_cap;
    j["time_budget_s"] = c.time_budget_s;
    detail::put_optional(j, "q_s", c.q_s);
    j["spectral_e"] = c.spectral_e;
    detail::put_optional(j, "covolume", c.covolume);
    j["omega_centers"] = c.omega_centers;
    j["h_cap"] = c.h_cap;
    j["omega_radius"] = c.omega_radius;
    j["workers"] = c.workers;
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, RunConfig& c) {
    require(j.is_object(), "config must be a JSON object");
    static const std::vector<std::string> keys{
        "n",        "primes", "all_primes",    "metric_mode", "metric_segments", "r_max", "delta_grid",
        "h_grid",   "centers", "mc_samples",   "seed",        "k_max",           "entry_bound_cap",
        "time_budget_s", "q_s", "spectral_e", "covolume",    "omega_centers",   "h_cap", "omega_radius",
        "workers"};
    for (auto it = j.begin(); it != j.end(); ++it)
        require(std::find(keys.begin(), keys.end(), it.key()) != keys.end(), "unknown config key '" + it.key() + "'");
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n", c.n);
    get("primes", c.primes);
    get("all_primes", c.all_primes);
    get("metric_mode", c.metric_mode);
    get("metric_segments", c.metric_segments);
    get("r_max", c.r_max);
    get("delta_grid", c.delta_grid);
    get("h_grid", c.h_grid);
    get("centers", c.centers);
    get("mc_samples", c.mc_samples);
    get("seed", c.seed);
    get("k_max", c.k_max);
    get("entry_bound_cap", c.entry_bound_cap);
    get("time_budget_s", c.time_budget_s);
    detail::get_optional(j, "q_s", c.q_s);
    get("spectral_e", c.spectral_e);
    detail::get_optional(j, "covolume", c.covolume);
    get("omega_centers", c.omega_centers);
    get("h_cap", c.h_cap);
    get("omega_radius", c.omega_radius);
    get("workers", c.workers);
}

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    try {
        from_json(j, c);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(bool(in), "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string dump_config(const RunConfig& c) { return nlohmann::json(c).dump(2); }

// FNV-1a over the canonical JSON of every field except `workers`, so the
// hash names the results rather than how they were computed.
inline std::string config_hash(const RunConfig& c) {
    nlohmann::json j = c;
    j.erase("workers");
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Built-in centers: "identity" and "generic" = exp(X0) for a fixed X0.
inline RealMatrix generic_center(int n) {
    RealMatrix x(n, n);
    if (n == 2) {
        // elliptic: det X0 > 0, a rotation-like element
        x << 0.3, 0.7, -0.5, -0.3;
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) x(i, j) = 0.4 * std::sin(1.0 + i * n + j);
        x -= (x.trace() / n) * RealMatrix::Identity(n, n);
    }
    return matrix_exp(x);
}

inline RealMatrix resolve_center(const CenterSpec& c, int n) {
    if (c.matrix) {
        const auto& rows = *c.matrix;
        require(int(rows.size()) == n, "center '" + c.name + "' has the wrong dimension");
        RealMatrix m(n, n);
        for (int i = 0; i < n; ++i) {
            require(int(rows[std::size_t(i)].size()) == n, "center '" + c.name + "' has the wrong dimension");
            for (int j = 0; j < n; ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
        }
        require_group_element(m);
        return m;
    }
    if (c.name == "identity") return RealMatrix::Identity(n, n);
    if (c.name == "generic") return generic_center(n);
    throw std::invalid_argument("unknown center '" + c.name + "'; give a matrix");
}

// "identity", "generic", or a JSON array of rows.
inline CenterSpec parse_center_arg(const std::string& text) {
    if (!text.empty() && text.front() == '[') {
        try {
            return {"inline", nlohmann::json::parse(text).get<std::vector<std::vector<double>>>()};
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("bad center matrix: ") + e.what());
        }
    }
    return {text, std::nullopt};
}

}  // namespace dioph
