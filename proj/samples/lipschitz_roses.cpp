// Asymmetry of the Lipschitz metric on two rank-2 roses.
#include <cmath>
#include <iostream>

#include "iwip/iwip.hpp"

int main() {
    using namespace iwip;
    auto a = MarkedGraph::rose(2);
    auto b = MarkedGraph::rose(2);
    b.graph.length = {1.0 / 3, 2.0 / 3};
    auto x = normalize_volume(a), y = normalize_volume(b);
    auto f = lipschitz_distance(x, y), r = lipschitz_distance(y, x);
    std::cout << "d(x, y) = " << f.d_cv << " (log 4/3 = " << std::log(4.0 / 3) << "), witness "
              << to_string(f.witness_word) << "\n";
    std::cout << "d(y, x) = " << r.d_cv << " (log 3/2 = " << std::log(1.5) << "), witness "
              << to_string(r.witness_word) << "\n";
    std::cout << "d_sym   = " << sym_distance(x, y) << "\n";
}
