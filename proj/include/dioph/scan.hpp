#pragma once

// Grid runs over (center, delta, h): counts, volumes and predictions, and
// minimal heights over sampled centers.

#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dioph/arch_volume.hpp"
#include "dioph/config.hpp"
#include "dioph/enumeration.hpp"
#include "dioph/padic_volume.hpp"
#include "dioph/statistics.hpp"

namespace dioph {

struct ScanOptions {
    std::string checkpoint_path;       // empty: no checkpointing
    std::ostream* progress = nullptr;  // e.g. &std::cerr
};

struct ScanResult {
    std::vector<ScanRow> rows;  // ordered by (center, delta, h) grid index
    double covolume = 0;
    bool covolume_fitted = false;
    std::optional<CovolumeFit> fit;
};

namespace detail {

using CellCounts = std::vector<std::uint64_t>;  // one per h_grid entry

inline std::string cell_key(const std::string& x_id, double delta) {
    return x_id + "|" + nlohmann::json(delta).dump();
}

inline std::map<std::string, CellCounts> read_checkpoint(const std::string& path, const std::string& hash,
                                                         std::size_t grid) {
    std::map<std::string, CellCounts> done;
    std::ifstream in(path);
    std::string line;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            continue;  // a torn final line from an interrupted run
        }
        if (j.value("config_hash", "") != hash) continue;
        auto counts = j.at("counts").get<CellCounts>();
        if (counts.size() != grid) continue;
        done[cell_key(j.at("x_id").get<std::string>(), j.at("delta").get<double>())] = std::move(counts);
    }
    return done;
}

}  // namespace detail

inline ScanResult run_scan(const RunConfig& cfg, const ScanOptions& opt = {}) {
    cfg.validate();
    require(!cfg.delta_grid.empty() && !cfg.h_grid.empty() && !cfg.centers.empty(), "scan grids must be non-empty");
    const auto start = std::chrono::steady_clock::now();
    const PrimeSet s = cfg.prime_set();
    const MetricSpec metric = cfg.metric();
    const std::string hash = config_hash(cfg);
    const std::uint64_t h_max = *std::max_element(cfg.h_grid.begin(), cfg.h_grid.end());

    LocalVolumeOptions lopt;
    lopt.k_max = cfg.k_max;
    const auto table = VolumeTable::build(s.resolve(h_max), h_max, lopt);
    std::vector<Rational> v_s;
    for (auto h : cfg.h_grid) v_s.push_back(global_height_ball_volume(HeightBallSpec(s, h), table));

    std::vector<VolumeEstimate> v_arch;
    for (double delta : cfg.delta_grid) {
        ArchVolumeOptions aopt;
        aopt.n = cfg.n;
        aopt.metric = metric;
        aopt.samples = cfg.mc_samples;
        aopt.seed = cfg.seed;
        aopt.workers = cfg.workers;
        aopt.r_max = cfg.r_max;
        v_arch.push_back(ball_volume_arch(delta, aopt));
    }

    std::map<std::string, detail::CellCounts> done;
    std::ofstream checkpoint;
    if (!opt.checkpoint_path.empty()) {
        done = detail::read_checkpoint(opt.checkpoint_path, hash, cfg.h_grid.size());
        checkpoint.open(opt.checkpoint_path, std::ios::app);
        require(bool(checkpoint), "cannot open checkpoint file " + opt.checkpoint_path);
    }

    EnumerationOptions eopt;
    eopt.n = cfg.n;
    eopt.workers = cfg.workers;
    eopt.collect_points = false;
    eopt.candidate_cap = cfg.entry_bound_cap;

    ScanResult out;
    const std::size_t cells = cfg.centers.size() * cfg.delta_grid.size();
    std::size_t cell = 0;
    for (const auto& c : cfg.centers) {
        const RealMatrix x = resolve_center(c, cfg.n);
        for (std::size_t di = 0; di < cfg.delta_grid.size(); ++di) {
            const double delta = cfg.delta_grid[di];
            ++cell;
            const auto key = detail::cell_key(c.name, delta);
            detail::CellCounts counts;
            bool resumed = false;
            if (auto it = done.find(key); it != done.end()) {
                counts = it->second;
                resumed = true;
            } else {
                const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (cfg.time_budget_s > 0 && elapsed > cfg.time_budget_s)
                    throw ResourceLimit("time budget exhausted after " + std::to_string(cell - 1) + " of " +
                                        std::to_string(cells) + " cells");
                const auto rep = enumerate_up_to_height(s, h_max, Region::ball(x, delta, metric, cfg.r_max), eopt);
                for (auto h : cfg.h_grid) counts.push_back(rep.count_up_to(h));
                if (checkpoint.is_open()) {
                    nlohmann::json j{{"config_hash", hash}, {"x_id", c.name}, {"delta", delta}, {"counts", counts}};
                    checkpoint << j.dump() << '\n';
                    checkpoint.flush();
                }
            }
            if (opt.progress) {
                const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                *opt.progress << "scan: cell " << cell << "/" << cells << " x=" << c.name << " delta=" << delta
                              << " N(h_max)=" << counts.back() << (resumed ? " (checkpoint)" : "") << " t=" << elapsed
                              << "s\n";
            }
            for (std::size_t hi = 0; hi < cfg.h_grid.size(); ++hi) {
                ScanRow r;
                r.x_id = c.name;
                r.delta = delta;
                r.h = cfg.h_grid[hi];
                r.n_count = counts[hi];
                r.v_arch = v_arch[di].estimate;
                r.v_arch_stderr = v_arch[di].std_error;
                r.v_s = v_s[hi];
                out.rows.push_back(std::move(r));
            }
        }
    }

    if (cfg.covolume) {
        out.covolume = *cfg.covolume;
    } else {
        out.fit = covolume_fit(out.rows);
        out.covolume = out.fit->v_hat;
        out.covolume_fitted = true;
    }
    for (auto& r : out.rows) attach_prediction(r, out.covolume);
    return out;
}

struct OmegaRow {
    std::string center_id;
    RealMatrix center;
    double delta = 0;
    MinHeightResult result;
    bool certified = false;  // no point of smaller height re-found below the minimum
};

// Centers exp(X), X uniform in the Frobenius ball of radius omega_radius,
// drawn from cfg.seed; one row per (center, delta).
inline std::vector<RealMatrix> sample_centers(const RunConfig& cfg) {
    const int d = lie_dimension(cfg.n);
    const auto basis = sl_basis(cfg.n);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<RealMatrix> out;
    for (std::uint64_t i = 0; i < cfg.omega_centers; ++i) {
        std::vector<double> c(static_cast<std::size_t>(d));
        double norm2 = 0;
        for (auto& v : c) {
            v = gauss(rng);
            norm2 += v * v;
        }
        const double r = cfg.omega_radius * std::pow(unif(rng), 1.0 / d);
        RealMatrix x = RealMatrix::Zero(cfg.n, cfg.n);
        for (int k = 0; k < d; ++k) x += (c[std::size_t(k)] * r / std::sqrt(norm2)) * basis[std::size_t(k)];
        out.push_back(matrix_exp(x));
    }
    return out;
}

inline std::vector<OmegaRow> run_omega(const RunConfig& cfg, std::ostream* progress = nullptr) {
    cfg.validate();
    const PrimeSet s = cfg.prime_set();
    const MetricSpec metric = cfg.metric();
    EnumerationOptions eopt;
    eopt.n = cfg.n;
    eopt.workers = cfg.workers;
    eopt.candidate_cap = cfg.entry_bound_cap;
    const auto centers = sample_centers(cfg);
    std::vector<OmegaRow> rows;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (double delta : cfg.delta_grid) {
            OmegaRow row;
            row.center_id = "c" + std::to_string(i);
            row.center = centers[i];
            row.delta = delta;
            row.result = min_height(centers[i], delta, s, cfg.h_cap, metric, eopt, cfg.r_max);
            if (row.result.height) {
                const auto h = *row.result.height;
                row.certified = h == 1 || count_ball(centers[i], delta, h - 1, s, metric, eopt, cfg.r_max) == 0;
            }
            if (progress)
                *progress << "omega: " << row.center_id << " delta=" << delta << " omega="
                          << (row.result.height ? std::to_string(*row.result.height) : std::string("not found")) << '\n';
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace dioph
