// Points of SL_2(Z[1/2]) near the identity against the main term.
//
//   count_near_identity [delta] [h_max]

#include <cstdlib>
#include <iostream>
#include <numbers>

#include "dioph/arch_volume.hpp"
#include "dioph/enumeration.hpp"
#include "dioph/io.hpp"
#include "dioph/padic_volume.hpp"
#include "dioph/statistics.hpp"

int main(int argc, char** argv) {
    using namespace dioph;
    const double delta = argc > 1 ? std::atof(argv[1]) : 0.3;
    const std::uint64_t h_max = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 256;
    const auto s = PrimeSet::of({2});

    ArchVolumeOptions opt;
    opt.samples = 1 << 20;
    const auto v = ball_volume_arch(delta, opt);
    // covolume of SL_2(Z[1/2]) for the Frobenius metric; a cross-check, fitted in real scans
    const double covolume = std::numbers::pi * std::numbers::pi / (3 * std::sqrt(2.0));

    EnumerationOptions eopt;
    eopt.collect_points = false;
    const auto rep = enumerate_up_to_height(s, h_max, Region::ball(RealMatrix::Identity(2, 2), delta), eopt);

    std::cout << "h,N,prediction,ratio\n";
    for (std::uint64_t h = 1; h <= h_max; h *= 2) {
        const auto n = rep.count_up_to(h);
        const double pred = predicted_count(v.estimate, global_height_ball_volume(HeightBallSpec(s, h)), covolume);
        std::cout << h << ',' << n << ',' << format_real(pred) << ',' << format_real(double(n) / pred) << '\n';
    }
    std::cerr << "enumeration " << rep.wall_time_s << "s, " << rep.stats.top_rows << " top rows\n";
}
