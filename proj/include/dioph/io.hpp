#pragma once

// Text formats: CSV tables and JSON documents. Reals are written in the
// shortest form that reads back to the same double, so outputs are
// byte-stable and lossless.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dioph/arch_volume.hpp"
#include "dioph/enumeration.hpp"
#include "dioph/padic_volume.hpp"
#include "dioph/statistics.hpp"

namespace dioph {

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    ensure(ec == std::errc{}, "real formatting failed");
    return std::string(buf, end);
}

inline double parse_real(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc{} && end == s.data() + s.size(), "not a real number: '" + s + "'");
    return v;
}

inline std::uint64_t parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc{} && end == s.data() + s.size(), "not a non-negative integer: '" + s + "'");
    return v;
}

// Leading "# key=value ..." line tying an output to its configuration.
inline void write_provenance(std::ostream& os, const std::string& config_hash, std::uint64_t seed) {
    os << "# config_hash=" << config_hash << " seed=" << seed << '\n';
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// ---- volumes

inline void write_volume_csv(std::ostream& os, const std::vector<VolumeEstimate>& rows) {
    os << "delta,estimate,std_error,samples,seed\n";
    for (const auto& r : rows)
        os << format_real(r.delta) << ',' << format_real(r.estimate) << ',' << format_real(r.std_error) << ','
           << r.samples << ',' << r.seed << '\n';
}

inline void write_volume_table_csv(std::ostream& os, const VolumeTable& table) {
    os << "p,k,v,s,provenance\n";
    for (const auto& [p, rows] : table.rows())
        for (std::size_t k = 0; k < rows.size(); ++k)
            os << p << ',' << k << ',' << rows[k].ball.get_str() << ',' << rows[k].sphere.get_str() << ','
               << to_string(rows[k].provenance) << '\n';
}

inline nlohmann::json global_volume_json(const PrimeSet& s, std::uint64_t h, const Rational& v) {
    nlohmann::json j;
    if (s.all_primes())
        j["S"] = "all";
    else
        j["S"] = s.primes();
    j["h"] = h;
    j["volume_num"] = v.get_num().get_str();
    j["volume_den"] = v.get_den().get_str();
    return j;
}

// ---- enumeration

// One row per point: k_p for each p in `primes`, the entries of D*gamma,
// D, height, distance to the center.
inline void write_points_csv(std::ostream& os, const std::vector<EnumeratedPoint>& points,
                             const std::vector<std::uint64_t>& primes, int n) {
    for (auto p : primes) os << "k_" << p << ',';
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) os << 'm' << i << j << ',';
    os << "D,height,distance\n";
    for (const auto& pt : points) {
        for (auto p : primes) {
            int k = 0;
            for (auto d = std::uint64_t(pt.denominator); d % p == 0; d /= p) ++k;
            os << k << ',';
        }
        for (auto v : pt.scaled) os << v << ',';
        // the exact denominator is the height
        os << pt.denominator << ',' << pt.denominator << ',' << format_real(pt.distance) << '\n';
    }
}

inline nlohmann::json enumeration_report_json(const EnumerationReport& rep) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : rep.per_level) {
        nlohmann::json e;
        nlohmann::json k = nlohmann::json::object();
        for (auto [p, kp] : l.level) k[std::to_string(p)] = kp;
        e["D"] = l.denominator;
        e["exponents"] = k;
        e["count"] = l.count;
        levels.push_back(e);
    }
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : rep.points) pts.push_back({{"D", p.denominator}, {"scaled", p.scaled}, {"distance", p.distance}});
    return {{"total", rep.total()},
            {"levels", levels},
            {"points", pts},
            {"stats",
             {{"top_rows", rep.stats.top_rows},
              {"solutions", rep.stats.solutions},
              {"primitive", rep.stats.primitive},
              {"prefiltered", rep.stats.prefiltered},
              {"accepted", rep.stats.accepted}}}};
}

// ---- scans

inline constexpr const char* kScanHeader =
    "x_id,delta,h,N,v_arch,v_arch_stderr,v_S_num,v_S_den,V_used,prediction,ratio,discrepancy";

// Rows without a covolume leave the last four columns empty.
inline void write_scan_row(std::ostream& os, const ScanRow& r, bool with_prediction = true) {
    os << r.x_id << ',' << format_real(r.delta) << ',' << r.h << ',' << r.n_count << ',' << format_real(r.v_arch) << ','
       << format_real(r.v_arch_stderr) << ',' << r.v_s.get_num().get_str() << ',' << r.v_s.get_den().get_str() << ',';
    if (with_prediction)
        os << format_real(r.v_used) << ',' << format_real(r.prediction) << ',' << format_real(r.ratio) << ','
           << format_real(r.discrepancy);
    else
        os << ",,,";
    os << '\n';
}

inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << kScanHeader << '\n';
    for (const auto& r : rows) write_scan_row(os, r);
}

// Reads a scan CSV, skipping '#' comment lines. Rows with empty prediction
// columns are read with v_used = 0.
inline std::vector<ScanRow> read_scan_csv(std::istream& is) {
    std::vector<ScanRow> rows;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            require(line == kScanHeader || line + '\r' == std::string(kScanHeader) + '\r', "unexpected scan header");
            header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        require(f.size() == 12, "scan row must have 12 columns");
        ScanRow r;
        r.x_id = f[0];
        r.delta = parse_real(f[1]);
        r.h = parse_uint(f[2]);
        r.n_count = parse_uint(f[3]);
        r.v_arch = parse_real(f[4]);
        r.v_arch_stderr = parse_real(f[5]);
        r.v_s = make_rational(BigInt(f[6]), BigInt(f[7]));
        if (!f[8].empty()) {
            r.v_used = parse_real(f[8]);
            r.prediction = parse_real(f[9]);
            r.ratio = parse_real(f[10]);
            r.discrepancy = parse_real(f[11]);
        }
        rows.push_back(std::move(r));
    }
    require(header, "scan file has no header");
    return rows;
}

// ---- constants

inline nlohmann::json constants_json(const ConstantsInput& in, const ConstantsReport& r) {
    return {{"input",
             {{"M", in.m},
              {"M_prime", in.m_prime},
              {"D", in.d_reg},
              {"mfW", in.mf_w},
              {"V", in.covolume},
              {"eps0", in.eps0},
              {"r0", in.r0},
              {"d", in.d}}},
            {"E", r.e},
            {"A", r.a},
            {"c1", r.c1},
            {"c2_prime", r.c2_prime},
            {"c2", r.c2},
            {"interval", {{"lo", r.interval_lo}, {"hi", r.interval_hi}, {"empty", r.interval_empty}}}};
}

}  // namespace dioph
