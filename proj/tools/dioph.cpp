// Command-line front end.
//
//   dioph volume arch|padic|global ...
//   dioph count --x identity --delta 0.1 --h 1 --S 2
//   dioph scan --config run.json [--workers N] [--out scan.csv] [--checkpoint ckpt.jsonl]
//   dioph fit --scan scan.csv
//   dioph constants --M 1 --D 4 --mfW 1 --V 1 --eps0 0.1 --r0 0.9 --d 3 --E 1
//   dioph omega [--config run.json] ...
//
// Exit codes: 0 success, 2 usage or domain error, 3 resource guard,
// 4 internal invariant violation.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "dioph/config.hpp"
#include "dioph/io.hpp"
#include "dioph/scan.hpp"

using namespace dioph;

namespace {

struct Output {
    std::string path;
    std::ofstream file;
    std::ostream& stream() {
        if (path.empty()) return std::cout;
        if (!file.is_open()) {
            file.open(path);
            require(bool(file), "cannot open output file " + path);
        }
        return file;
    }
};

std::vector<std::uint64_t> parse_primes(const std::vector<std::string>& items, bool& all) {
    all = false;
    std::vector<std::uint64_t> out;
    for (const auto& item : items) {
        for (const auto& tok : split_csv_line(item)) {
            if (tok.empty()) continue;
            if (tok == "all") {
                all = true;
                continue;
            }
            out.push_back(parse_uint(tok));
        }
    }
    if (all) require(out.empty(), "--S all cannot be combined with explicit primes");
    return out;
}

void apply_primes(RunConfig& cfg, const std::vector<std::string>& s_arg) {
    if (s_arg.empty()) return;
    bool all = false;
    auto primes = parse_primes(s_arg, all);
    cfg.all_primes = all;
    if (!all) cfg.primes = primes;
}

struct MetricArgs {
    std::string mode = "log";
    int segments = 1;
    void add(CLI::App* app) {
        app->add_option("--metric", mode, "log or refined")->check(CLI::IsMember({"log", "refined"}));
        app->add_option("--segments", segments, "segments of the refined metric")->check(CLI::PositiveNumber);
    }
    void apply(RunConfig& cfg) const {
        cfg.metric_mode = mode;
        cfg.metric_segments = segments;
    }
};

void print_json(std::ostream& os, const nlohmann::json& j) { os << j.dump(2) << '\n'; }

// ---- volume

int cmd_volume_arch(double r_max, const std::vector<double>& deltas, std::uint64_t samples, std::uint64_t seed, int n,
                    const MetricArgs& m, unsigned workers, Output& out) {
    RunConfig cfg;
    cfg.n = n;
    cfg.r_max = r_max;
    cfg.delta_grid = deltas;
    cfg.mc_samples = samples;
    cfg.seed = seed;
    cfg.workers = workers;
    m.apply(cfg);
    cfg.validate();
    std::vector<VolumeEstimate> rows;
    for (double delta : deltas) {
        ArchVolumeOptions opt;
        opt.n = n;
        opt.metric = cfg.metric();
        opt.samples = samples;
        opt.seed = seed;
        opt.workers = workers;
        opt.r_max = r_max;
        rows.push_back(ball_volume_arch(delta, opt));
    }
    auto& os = out.stream();
    write_provenance(os, config_hash(cfg), seed);
    write_volume_csv(os, rows);
    return 0;
}

int cmd_volume_padic(std::uint64_t p, int k, int n, int k_max, Output& out) {
    if (n != 2) throw Unimplemented("p-adic ball volumes are implemented for n = 2 only");
    LocalVolumeOptions opt;
    opt.k_max = k_max;
    const auto table = VolumeTable::for_prime(p, k, opt);
    RunConfig cfg;
    cfg.primes = {p};
    cfg.k_max = k_max;
    auto& os = out.stream();
    write_provenance(os, config_hash(cfg), cfg.seed);
    write_volume_table_csv(os, table);
    return 0;
}

int cmd_volume_global(const std::vector<std::string>& s_arg, std::uint64_t h, int k_max, Output& out) {
    RunConfig cfg;
    apply_primes(cfg, s_arg);
    cfg.k_max = k_max;
    cfg.validate();
    require(h >= 1, "height bound must be at least 1");
    LocalVolumeOptions opt;
    opt.k_max = k_max;
    const auto s = cfg.prime_set();
    auto j = global_volume_json(s, h, global_height_ball_volume(HeightBallSpec(s, h), opt));
    j["config_hash"] = config_hash(cfg);
    print_json(out.stream(), j);
    return 0;
}

// ---- count

struct CountArgs {
    std::string x = "identity";
    double delta = 0.1;
    std::uint64_t h = 1;
    std::vector<std::string> s;
    double r_max = kDefaultRMax;
    std::optional<double> covolume;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int n = 2;
    unsigned workers = 1;
    std::string points_path;
    MetricArgs metric;
};

int cmd_count(const CountArgs& a, Output& out) {
    RunConfig cfg;
    cfg.n = a.n;
    apply_primes(cfg, a.s);
    a.metric.apply(cfg);
    cfg.r_max = a.r_max;
    cfg.delta_grid = {a.delta};
    cfg.h_grid = {a.h};
    cfg.centers = {parse_center_arg(a.x)};
    cfg.mc_samples = a.samples;
    cfg.seed = a.seed;
    cfg.covolume = a.covolume;
    cfg.workers = a.workers;
    cfg.validate();
    const RealMatrix x = resolve_center(cfg.centers.front(), cfg.n);
    const auto s = cfg.prime_set();

    EnumerationOptions eopt;
    eopt.n = cfg.n;
    eopt.workers = cfg.workers;
    eopt.collect_points = !a.points_path.empty();
    eopt.candidate_cap = cfg.entry_bound_cap;
    const auto rep = enumerate_up_to_height(s, a.h, Region::ball(x, a.delta, cfg.metric(), cfg.r_max), eopt);

    ScanRow row;
    row.x_id = cfg.centers.front().name;
    row.delta = a.delta;
    row.h = a.h;
    row.n_count = rep.total();
    bool with_prediction = false;
    if (cfg.n == 2) {
        ArchVolumeOptions aopt;
        aopt.n = cfg.n;
        aopt.metric = cfg.metric();
        aopt.samples = cfg.mc_samples;
        aopt.seed = cfg.seed;
        aopt.workers = cfg.workers;
        aopt.r_max = cfg.r_max;
        const auto v = ball_volume_arch(a.delta, aopt);
        row.v_arch = v.estimate;
        row.v_arch_stderr = v.std_error;
        row.v_s = global_height_ball_volume(HeightBallSpec(s, a.h));
        if (cfg.covolume) {
            attach_prediction(row, *cfg.covolume);
            with_prediction = true;
        }
    }
    auto& os = out.stream();
    write_provenance(os, config_hash(cfg), cfg.seed);
    os << kScanHeader << '\n';
    write_scan_row(os, row, with_prediction);

    if (!a.points_path.empty()) {
        std::ofstream pts(a.points_path);
        require(bool(pts), "cannot open points file " + a.points_path);
        write_provenance(pts, config_hash(cfg), cfg.seed);
        write_points_csv(pts, rep.points, s.resolve(a.h), cfg.n);
    }
    return 0;
}

// ---- scan

struct ScanArgs {
    std::string config;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<double> covolume;
    std::string checkpoint;
    bool quiet = false;
};

int cmd_scan(const ScanArgs& a, Output& out) {
    RunConfig cfg = load_config(a.config);
    if (a.workers) cfg.workers = *a.workers;
    if (a.seed) cfg.seed = *a.seed;
    if (a.samples) cfg.mc_samples = *a.samples;
    if (a.covolume) cfg.covolume = *a.covolume;
    cfg.validate();
    ScanOptions opt;
    opt.checkpoint_path = a.checkpoint;
    opt.progress = a.quiet ? nullptr : &std::cerr;
    const auto res = run_scan(cfg, opt);
    if (!a.quiet)
        std::cerr << "scan: covolume " << format_real(res.covolume) << (res.covolume_fitted ? " (fitted)" : " (given)")
                  << '\n';
    auto& os = out.stream();
    write_provenance(os, config_hash(cfg), cfg.seed);
    write_scan_csv(os, res.rows);
    return 0;
}

// ---- fit

int cmd_fit(const std::string& path, const std::vector<std::string>& s_arg, int d, std::optional<double> q,
            Output& out) {
    std::ifstream in(path);
    require(bool(in), "cannot open scan file " + path);
    auto rows = read_scan_csv(in);
    RunConfig cfg;
    apply_primes(cfg, s_arg);
    cfg.q_s = q;
    cfg.validate();

    nlohmann::json j;
    const auto fit = covolume_fit(rows);
    j["V_hat"] = fit.v_hat;
    j["residuals"] = fit.residuals;
    for (auto& r : rows) attach_prediction(r, fit.v_hat);
    try {
        const auto e = error_shape_fit(rows, d);
        auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        j["error_shape"] = {{"slope_delta", num(e.slope_delta)},
                            {"slope_delta_ci", num(e.slope_delta_ci)},
                            {"slope_E", num(e.slope_e)},
                            {"slope_E_ci", num(e.slope_e_ci)},
                            {"expected_delta_slope", e.expected_delta_slope},
                            {"rows_used", e.rows_used}};
    } catch (const std::invalid_argument& e) {
        j["error_shape"] = {{"skipped", e.what()}};
    }
    std::set<std::uint64_t> hs;
    for (const auto& r : rows) hs.insert(r.h);
    std::vector<std::uint64_t> grid(hs.begin(), hs.end());
    std::optional<GrowthFit> growth;
    try {
        growth = growth_fit(cfg.prime_set(), grid);
        j["growth"] = {{"S", cfg.prime_set().to_string()}, {"a_hat", growth->a_hat}, {"r_squared", growth->r_squared}};
    } catch (const std::invalid_argument& e) {
        // short grids: the two-point secant slope is still reported
        const auto lo = grid.front(), hi = grid.back();
        if (grid.size() >= 2 && lo < hi) {
            const auto s = cfg.prime_set();
            const auto f = log_log_fit({double(lo), double(hi)},
                                       {global_height_ball_volume(HeightBallSpec(s, lo)).get_d(),
                                        global_height_ball_volume(HeightBallSpec(s, hi)).get_d()});
            j["growth"] = {{"S", s.to_string()}, {"secant_slope", f.slope}, {"note", e.what()}};
        } else {
            j["growth"] = {{"skipped", e.what()}};
        }
    }
    if (q) {
        const double a_hat = growth ? growth->a_hat : j["growth"].value("secant_slope", 0.0);
        if (a_hat > 0) j["kappa_S"] = {{"q_S", *q}, {"d", d}, {"a", a_hat}, {"kappa", kappa_s(*q, d, a_hat)}};
    }
    j["config_hash"] = config_hash(cfg);
    print_json(out.stream(), j);
    return 0;
}

// ---- constants

int cmd_constants(const ConstantsInput& in, double e, Output& out) {
    print_json(out.stream(), constants_json(in, theorem_constants(in, e)));
    return 0;
}

// ---- omega

struct OmegaArgs {
    std::string config;
    std::vector<std::string> s;
    std::vector<double> deltas;
    std::optional<std::uint64_t> centers, h_cap, seed;
    std::optional<double> radius;
    std::optional<unsigned> workers;
};

int cmd_omega(const OmegaArgs& a, Output& out) {
    RunConfig cfg;
    if (!a.config.empty()) {
        cfg = load_config(a.config);
    } else {
        cfg.delta_grid = {0.3, 0.2};
    }
    apply_primes(cfg, a.s);
    if (!a.deltas.empty()) cfg.delta_grid = a.deltas;
    if (a.centers) cfg.omega_centers = *a.centers;
    if (a.h_cap) cfg.h_cap = *a.h_cap;
    if (a.seed) cfg.seed = *a.seed;
    if (a.radius) cfg.omega_radius = *a.radius;
    if (a.workers) cfg.workers = *a.workers;
    cfg.validate();
    const auto rows = run_omega(cfg, &std::cerr);
    auto& os = out.stream();
    write_provenance(os, config_hash(cfg), cfg.seed);
    os << "center_id,delta,omega,h_cap,argmin_count,certified,log_omega_over_log_inv_delta\n";
    for (const auto& r : rows) {
        os << r.center_id << ',' << format_real(r.delta) << ',';
        if (r.result.height)
            os << *r.result.height;
        else
            os << "not_found";
        const double ratio = r.result.height ? std::log(double(*r.result.height)) / std::log(1 / r.delta)
                                             : std::numeric_limits<double>::quiet_NaN();
        os << ',' << r.result.h_cap << ',' << r.result.argmin.size() << ',' << (r.certified ? 1 : 0) << ','
           << format_real(ratio) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting and approximation by S-arithmetic points of SL_n"};
    // --h is the height bound, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    Output out;

    auto* volume = app.add_subcommand("volume", "ball volumes");
    volume->require_subcommand(1);

    auto* arch = volume->add_subcommand("arch", "Haar volume of a metric ball in SL_n(R) by Monte Carlo");
    std::vector<double> arch_delta;
    std::uint64_t arch_samples = 1'000'000, arch_seed = 1;
    int arch_n = 2;
    unsigned arch_workers = 1;
    double arch_rmax = kDefaultRMax;
    MetricArgs arch_metric;
    arch->add_option("--delta", arch_delta, "ball radii")->required();
    arch->add_option("--samples", arch_samples);
    arch->add_option("--seed", arch_seed);
    arch->add_option("--n", arch_n);
    arch->add_option("--workers", arch_workers);
    arch->add_option("--r-max", arch_rmax);
    arch->add_option("--out", out.path);
    arch_metric.add(arch);

    auto* padic = volume->add_subcommand("padic", "local height-ball volumes v_p(0..k)");
    std::uint64_t padic_p = 2;
    int padic_k = 0, padic_n = 2, padic_kmax = 12;
    padic->add_option("--p", padic_p)->required();
    padic->add_option("--k", padic_k)->required();
    padic->add_option("--n", padic_n);
    padic->add_option("--k-max", padic_kmax);
    padic->add_option("--out", out.path);

    auto* global = volume->add_subcommand("global", "S-adic height-ball volume m_S(B_S(h))");
    std::vector<std::string> global_s;
    std::uint64_t global_h = 1;
    int global_kmax = 12;
    global->add_option("--S", global_s, "primes, comma separated, or 'all'")->required();
    global->add_option("--h", global_h)->required();
    global->add_option("--k-max", global_kmax);
    global->add_option("--out", out.path);

    auto* count = app.add_subcommand("count", "count points of bounded height in a metric ball");
    CountArgs ca;
    count->add_option("--x", ca.x, "identity, generic, or a JSON matrix");
    count->add_option("--delta", ca.delta)->required();
    count->add_option("--h", ca.h)->required();
    count->add_option("--S", ca.s);
    count->add_option("--r-max", ca.r_max);
    count->add_option("--V", ca.covolume, "covolume for the prediction columns");
    count->add_option("--samples", ca.samples);
    count->add_option("--seed", ca.seed);
    count->add_option("--n", ca.n);
    count->add_option("--workers", ca.workers);
    count->add_option("--points", ca.points_path, "write the points to this CSV file");
    count->add_option("--out", out.path);
    ca.metric.add(count);

    auto* scan = app.add_subcommand("scan", "count grid over centers, radii and heights");
    ScanArgs sa;
    scan->add_option("--config", sa.config)->required();
    scan->add_option("--workers", sa.workers);
    scan->add_option("--seed", sa.seed);
    scan->add_option("--samples", sa.samples);
    scan->add_option("--V", sa.covolume);
    scan->add_option("--checkpoint", sa.checkpoint);
    scan->add_flag("--quiet", sa.quiet);
    scan->add_option("--out", out.path);

    auto* fit = app.add_subcommand("fit", "covolume, growth and error-shape fits over a scan");
    std::string fit_path;
    std::vector<std::string> fit_s;
    int fit_d = 3;
    std::optional<double> fit_q;
    fit->add_option("--scan", fit_path)->required();
    fit->add_option("--S", fit_s);
    fit->add_option("--d", fit_d);
    fit->add_option("--q", fit_q, "integrability exponent, echoed into kappa_S");
    fit->add_option("--out", out.path);

    auto* constants = app.add_subcommand("constants", "explicit constants of the variable-domain counting bound");
    ConstantsInput ci;
    ci.m_prime = 1;
    double ce = 1;
    constants->add_option("--M", ci.m)->required();
    constants->add_option("--Mprime", ci.m_prime);
    constants->add_option("--D", ci.d_reg)->required();
    constants->add_option("--mfW", ci.mf_w);
    constants->add_option("--V", ci.covolume);
    constants->add_option("--eps0", ci.eps0)->required();
    constants->add_option("--r0", ci.r0)->required();
    constants->add_option("--d", ci.d)->required();
    constants->add_option("--E", ce);
    constants->add_option("--out", out.path);

    auto* omega = app.add_subcommand("omega", "minimal heights near sampled centers");
    OmegaArgs oa;
    omega->add_option("--config", oa.config);
    omega->add_option("--S", oa.s);
    omega->add_option("--delta", oa.deltas);
    omega->add_option("--centers", oa.centers);
    omega->add_option("--h-cap", oa.h_cap);
    omega->add_option("--seed", oa.seed);
    omega->add_option("--radius", oa.radius);
    omega->add_option("--workers", oa.workers);
    omega->add_option("--out", out.path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*arch) return cmd_volume_arch(arch_rmax, arch_delta, arch_samples, arch_seed, arch_n, arch_metric, arch_workers, out);
        if (*padic) return cmd_volume_padic(padic_p, padic_k, padic_n, padic_kmax, out);
        if (*global) return cmd_volume_global(global_s, global_h, global_kmax, out);
        if (*count) return cmd_count(ca, out);
        if (*scan) return cmd_scan(sa, out);
        if (*fit) return cmd_fit(fit_path, fit_s, fit_d, fit_q, out);
        if (*constants) return cmd_constants(ci, ce, out);
        if (*omega) return cmd_omega(oa, out);
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    } catch (const InvariantViolation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    } catch (const Unimplemented& e) {
        std::cerr << "unimplemented: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "out of domain: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
