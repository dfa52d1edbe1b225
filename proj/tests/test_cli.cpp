#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dioph/io.hpp"
#include "dioph/scan.hpp"
#include "support.hpp"

using namespace dioph;
using namespace dioph::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dioph_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out, err;
};

Run cli(const std::string& args, const std::string& tag) {
    const auto out = scratch(tag + ".out"), err = scratch(tag + ".err");
    const std::string cmd = std::string(DIOPH_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

RunConfig random_config(Rng& rng) {
    RunConfig c;
    c.n = int(uniform_int(rng, 2, 3));
    static const std::uint64_t pool[] = {2, 3, 5, 7, 11};
    c.primes.clear();
    for (auto p : pool)
        if (uniform_int(rng, 0, 1)) c.primes.push_back(p);
    if (c.primes.empty()) c.primes.push_back(3);
    c.all_primes = uniform_int(rng, 0, 4) == 0;
    c.metric_mode = uniform_int(rng, 0, 1) ? "log" : "refined";
    c.metric_segments = int(uniform_int(rng, 1, 4));
    c.r_max = uniform_real(rng, 0.5, 0.9);
    c.delta_grid.clear();
    for (int i = 0, k = int(uniform_int(rng, 1, 4)); i < k; ++i) c.delta_grid.push_back(uniform_real(rng, 0.01, 0.5));
    c.h_grid.clear();
    for (int i = 0, k = int(uniform_int(rng, 1, 6)); i < k; ++i) c.h_grid.push_back(std::uint64_t(uniform_int(rng, 1, 1 << 20)));
    c.centers = {{"identity", std::nullopt}};
    if (uniform_int(rng, 0, 1)) c.centers.push_back({"m", std::vector<std::vector<double>>{{uniform_real(rng), 0.5}, {0.25, 1.0}}});
    c.mc_samples = std::uint64_t(uniform_int(rng, 2, 1 << 24));
    c.seed = std::uint64_t(uniform_int(rng, 0, std::numeric_limits<std::int64_t>::max()));
    c.k_max = int(uniform_int(rng, 0, 20));
    c.entry_bound_cap = uniform_real(rng, 1, 1e10);
    c.time_budget_s = uniform_real(rng, 0, 100);
    if (uniform_int(rng, 0, 1)) c.q_s = uniform_real(rng, 2, 6);
    c.spectral_e = uniform_real(rng, 0.01, 1);
    if (uniform_int(rng, 0, 1)) c.covolume = uniform_real(rng, 0.1, 10);
    c.omega_centers = std::uint64_t(uniform_int(rng, 1, 50));
    c.h_cap = std::uint64_t(uniform_int(rng, 1, 1 << 14));
    c.omega_radius = uniform_real(rng, 0, 1);
    c.workers = unsigned(uniform_int(rng, 1, 8));
    return c;
}

RunConfig small_scan_config() {
    RunConfig c;
    c.delta_grid = {0.2, 0.3};
    c.h_grid = {4, 8, 16, 32};
    c.mc_samples = 20000;
    c.seed = 5;
    return c;
}

std::string scan_text(const ScanResult& r) {
    std::ostringstream os;
    write_scan_csv(os, r.rows);
    return os.str();
}

}  // namespace

TEST(Config, RoundTripProperty) {
    Rng rng(51);
    for (int t = 0; t < 300; ++t) {
        const auto c = random_config(rng);
        const auto back = parse_config(dump_config(c));
        EXPECT_TRUE(back == c) << dump_config(c);
        EXPECT_EQ(config_hash(back), config_hash(c));
        EXPECT_EQ(dump_config(back), dump_config(c));
    }
}

TEST(Config, DefaultsAndRejections) {
    EXPECT_TRUE(parse_config("{}") == RunConfig{});
    EXPECT_THROW(parse_config(R"({"n": 2, "bogus": 1})"), std::invalid_argument);
    EXPECT_THROW(parse_config("{"), std::invalid_argument);
    EXPECT_THROW(parse_config(R"({"delta_grid": [1.5]})"), OutOfDomain);
    EXPECT_THROW(parse_config(R"({"primes": [4]})"), std::invalid_argument);
    EXPECT_THROW(parse_config(R"({"metric_mode": "taxicab"})"), std::invalid_argument);
    EXPECT_THROW(parse_config(R"({"centers": [{"name": "x", "colour": 1}]})"), std::invalid_argument);
    const auto c = parse_config(R"({"centers": ["identity", {"name": "m", "matrix": [[1, 1], [0, 1]]}]})");
    ASSERT_EQ(c.centers.size(), 2u);
    EXPECT_EQ(resolve_center(c.centers[1], 2)(0, 1), 1.0);
    EXPECT_THROW(resolve_center({"nope", std::nullopt}, 2), std::invalid_argument);
}

TEST(Config, HashIgnoresWorkersOnly) {
    RunConfig a, b;
    b.workers = 7;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Io, RealsRoundTrip) {
    Rng rng(52);
    for (int t = 0; t < 10000; ++t) {
        const double v = std::ldexp(uniform_real(rng, -1, 1), int(uniform_int(rng, -60, 60)));
        EXPECT_EQ(parse_real(format_real(v)), v);
    }
    EXPECT_TRUE(std::isnan(parse_real(format_real(std::nan("")))));
    EXPECT_THROW(parse_real("1.5x"), std::invalid_argument);
    EXPECT_THROW(parse_uint("-1"), std::invalid_argument);
}

TEST(Io, ScanCsvRoundTrip) {
    Rng rng(53);
    std::vector<ScanRow> rows;
    for (int t = 0; t < 40; ++t) {
        ScanRow r;
        r.x_id = t % 2 ? "identity" : "generic";
        r.delta = uniform_real(rng, 0.01, 0.9);
        r.h = std::uint64_t(uniform_int(rng, 1, 1 << 20));
        r.n_count = std::uint64_t(uniform_int(rng, 0, 1 << 30));
        r.v_arch = uniform_real(rng);
        r.v_arch_stderr = uniform_real(rng) * 1e-4;
        r.v_s = make_rational(uniform_int(rng, 1, 1 << 30), uniform_int(rng, 1, 7));
        attach_prediction(r, uniform_real(rng, 0.5, 3));
        rows.push_back(r);
    }
    std::ostringstream os;
    write_provenance(os, "0123456789abcdef", 3);
    write_scan_csv(os, rows);
    std::istringstream is(os.str());
    const auto back = read_scan_csv(is);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].x_id, rows[i].x_id);
        EXPECT_EQ(back[i].delta, rows[i].delta);
        EXPECT_EQ(back[i].h, rows[i].h);
        EXPECT_EQ(back[i].n_count, rows[i].n_count);
        EXPECT_EQ(back[i].v_arch, rows[i].v_arch);
        EXPECT_EQ(back[i].v_arch_stderr, rows[i].v_arch_stderr);
        EXPECT_EQ(back[i].v_s, rows[i].v_s);
        EXPECT_EQ(back[i].prediction, rows[i].prediction);
        EXPECT_EQ(back[i].discrepancy, rows[i].discrepancy);
    }
    std::istringstream bad("x,y\n");
    EXPECT_THROW(read_scan_csv(bad), std::invalid_argument);
}

TEST(Scan, DeterministicAcrossWorkers) {
    auto cfg = small_scan_config();
    const auto a = run_scan(cfg);
    cfg.workers = 3;
    const auto b = run_scan(cfg);
    EXPECT_EQ(scan_text(a), scan_text(b));
    ASSERT_EQ(a.rows.size(), 2u * 2u * 4u);
    EXPECT_TRUE(a.covolume_fitted);
    // counts agree with direct enumeration and are monotone in h
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& r = a.rows[i];
        const RealMatrix x = r.x_id == "identity" ? RealMatrix::Identity(2, 2) : generic_center(2);
        EXPECT_EQ(r.n_count, count_ball(x, r.delta, r.h, PrimeSet::of({2})));
        if (i % 4) {
            EXPECT_GE(r.n_count, a.rows[i - 1].n_count);
        }
        EXPECT_EQ(r.v_s, global_height_ball_volume(HeightBallSpec(PrimeSet::of({2}), r.h)));
    }
}

TEST(Scan, CheckpointResume) {
    const auto path = scratch("scan.ckpt");
    fs::remove(path);
    auto cfg = small_scan_config();
    ScanOptions opt;
    opt.checkpoint_path = path.string();
    const auto first = run_scan(cfg, opt);
    EXPECT_FALSE(slurp(path).empty());
    std::ostringstream progress;
    opt.progress = &progress;
    const auto second = run_scan(cfg, opt);
    EXPECT_EQ(scan_text(first), scan_text(second));
    EXPECT_NE(progress.str().find("(checkpoint)"), std::string::npos);
    // a different configuration ignores foreign checkpoint lines
    cfg.seed = 6;
    std::ostringstream p2;
    opt.progress = &p2;
    (void)run_scan(cfg, opt);
    EXPECT_EQ(p2.str().find("(checkpoint)"), std::string::npos);
}

TEST(Scan, GivenCovolumeAndTimeBudget) {
    auto cfg = small_scan_config();
    cfg.covolume = 2.5;
    const auto r = run_scan(cfg);
    EXPECT_FALSE(r.covolume_fitted);
    for (const auto& row : r.rows) EXPECT_EQ(row.v_used, 2.5);
    cfg.time_budget_s = 1e-9;
    EXPECT_THROW(run_scan(cfg), ResourceLimit);
}

TEST(Omega, CentersDeterministicAndCertified) {
    RunConfig cfg;
    cfg.omega_centers = 4;
    cfg.delta_grid = {0.3};
    cfg.h_cap = 1024;
    const auto a = run_omega(cfg);
    const auto b = run_omega(cfg);
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].center, b[i].center);
        EXPECT_EQ(a[i].result.height, b[i].result.height);
        EXPECT_TRUE(a[i].certified);
        EXPECT_LE(principal_log(a[i].center).matrix().norm(), cfg.omega_radius + 1e-9);
    }
}

TEST(Cli, VolumeCommands) {
    auto r = cli("volume padic --p 2 --k 0", "padic0");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n2,0,1,1,"), std::string::npos) << r.out;
    r = cli("volume global --S 2 --h 1", "global1");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out).at("volume_num"), "1");
    const auto a = cli("volume arch --delta 0.2 --samples 100000 --seed 7", "arch_a");
    const auto b = cli("volume arch --delta 0.2 --samples 100000 --seed 7 --workers 2", "arch_b");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CountExamples) {
    const auto r = cli("count --x identity --delta 0.1 --h 1 --S 2", "count1");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    const auto rows = read_scan_csv(is);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].n_count, 1u);
    EXPECT_EQ(r.out, cli("count --x identity --delta 0.1 --h 1 --S 2", "count2").out);
    EXPECT_EQ(r.out.rfind("# config_hash=", 0), 0u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("count --x identity --delta 2.0 --h 4 --S 2", "bad_delta").code, 2);
    EXPECT_EQ(cli("count --x identity --delta 0.2 --h 4 --S 4", "bad_prime").code, 2);
    EXPECT_EQ(cli("volume padic --p 2 --k 1 --n 3", "unimpl").code, 2);
    EXPECT_EQ(cli("frobnicate", "bad_cmd").code, 2);
    EXPECT_EQ(cli("count --x identity --delta 0.4 --h 1000000000000 --S 2", "too_big").code, 3);
    // past k_max the table falls back to the closed form rather than failing
    const auto capped = cli("volume padic --p 2 --k 5 --k-max 3", "kmax");
    EXPECT_EQ(capped.code, 0);
    EXPECT_NE(capped.out.find("closed_form"), std::string::npos) << capped.out;
    EXPECT_EQ(cli("--help", "help").code, 0);
}

TEST(Cli, ConstantsExample) {
    const auto r = cli("constants --M 1 --D 4 --mfW 1 --V 1 --eps0 0.1 --r0 0.9 --d 3 --E 1", "constants");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("A").get<double>(), 16.97, 0.005);
    EXPECT_NEAR(j.at("c1").get<double>(), 10.08, 0.005);
}

TEST(Cli, FitRecoversInjectedCovolume) {
    const double v0 = 1.75;
    std::vector<ScanRow> rows;
    for (std::uint64_t h : {16, 32, 64, 128}) {
        ScanRow r;
        r.x_id = "identity";
        r.delta = 0.4;
        r.h = h;
        r.v_s = global_height_ball_volume(HeightBallSpec(PrimeSet::of({2}), h));
        r.n_count = 100 * h;
        r.v_arch = double(r.n_count) * v0 / r.v_s.get_d();
        rows.push_back(r);
    }
    const auto path = scratch("synthetic_scan.csv");
    {
        std::ofstream os(path);
        os << kScanHeader << '\n';
        for (const auto& r : rows) write_scan_row(os, r, false);
    }
    const auto r = cli("fit --scan " + path.string() + " --S 2", "fit");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("V_hat").get<double>(), v0, 1e-12);
}

TEST(Cli, ScanByteIdentical) {
    const auto cfg_path = scratch("scan_config.json");
    {
        std::ofstream os(cfg_path);
        os << dump_config(small_scan_config());
    }
    const auto a = cli("scan --config " + cfg_path.string() + " --quiet", "scan_a");
    const auto b = cli("scan --config " + cfg_path.string() + " --quiet --workers 3", "scan_b");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find(kScanHeader), std::string::npos);
}
