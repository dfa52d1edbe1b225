// Least height of a rational point within delta of a few fixed centers,
// for shrinking delta.

#include <iostream>

#include "dioph/config.hpp"
#include "dioph/enumeration.hpp"

int main() {
    using namespace dioph;
    const auto s = PrimeSet::of({2, 3});
    const RealMatrix centers[] = {RealMatrix::Identity(2, 2), generic_center(2)};
    const char* names[] = {"identity", "generic"};

    std::cout << "center,delta,omega,argmin\n";
    for (int c = 0; c < 2; ++c)
        for (double delta : {0.4, 0.2, 0.1, 0.05}) {
            const auto r = min_height(centers[c], delta, s, 1 << 14);
            std::cout << names[c] << ',' << delta << ',';
            if (!r.height) {
                std::cout << "none<=" << r.h_cap << ",\n";
                continue;
            }
            const auto m = r.argmin.front().matrix();
            std::cout << *r.height << ',';
            for (std::size_t i = 0; i < 2; ++i)
                std::cout << (i ? ";" : "") << to_string(m(i, 0)) << ' ' << to_string(m(i, 1));
            std::cout << '\n';
        }
}
