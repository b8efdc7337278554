// Fold line of a -> ab, b -> a: increments add up to log lambda.
#include <cmath>
#include <iostream>

#include "iwip/iwip.hpp"

int main() {
    using namespace iwip;
    auto g = rose_map(FreeAutomorphism::from_strings({"ab", "a"}));
    auto pts = fold_path_points(g, 4);
    double total = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = lipschitz_distance(pts[i], pts[i + 1]).d_cv;
        total += d;
        std::cout << "step " << i << ": " << pts[i + 1].graph.graph.edge_count() << " edges, d = " << d << "\n";
    }
    std::cout << "total " << total << ", log lambda " << std::log((1 + std::sqrt(5.0)) / 2) << "\n";
}
