// Classify a = b, b = c, c = ab and print what the pipeline found.
#include <iostream>

#include "iwip/iwip.hpp"

int main() {
    using namespace iwip;
    auto phi = FreeAutomorphism::from_strings({"b", "c", "ab"});
    auto a = analyze(phi);
    std::cout << to_string(phi) << "\n";
    std::cout << "  train track: " << to_string(a.train_track.outcome) << ", lambda " << a.train_track.lambda << "\n";
    std::cout << "  rotationless power " << a.whitehead->power << "\n";
    std::cout << "  k =";
    for (int k : a.ideal->k_list()) std::cout << " " << k;
    std::cout << ", index " << to_string(*a.index) << "\n";
    const auto& c = a.classification;
    std::cout << "  fully irreducible " << to_string(c.fully_irreducible) << ", ageometric "
              << to_string(c.ageometric) << ", triangular " << std::boolalpha << c.triangular << "\n";
}
