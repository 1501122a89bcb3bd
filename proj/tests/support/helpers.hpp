#ifndef HCLAB_TESTS_HELPERS_HPP
#define HCLAB_TESTS_HELPERS_HPP

#include <vector>

#include "hclab/hypercube.hpp"
#include "hclab/instance.hpp"
#include "hclab/rng.hpp"

namespace hclab::testing {

inline HypercubeDist random_rational_dist(int d, Rng& rng) {
    std::size_t n = std::size_t{1} << d;
    std::vector<std::int64_t> w(n);
    std::int64_t total = 0;
    for (auto& wi : w) {
        wi = rng.uniform_int(0, 8);
        total += wi;
    }
    if (total == 0) { w[0] = 1; total = 1; }
    std::vector<Rational> mass;
    mass.reserve(n);
    for (std::int64_t wi : w) mass.emplace_back(wi, total);
    return HypercubeDist(d, std::move(mass));
}

// Small random-but-valid instance: clusters of naturals with equal-size
// augmentation sets and a family of random labelings.
inline Instance random_small_instance(int d, int n_naturals, int aug_size, int family_size,
                                      Rng& rng) {
    std::vector<ImageRecord> images;
    int n_clusters = 1 + static_cast<int>(rng.uniform_int(0, 1));
    int next = 0;
    for (int i = 0; i < n_naturals; ++i) {
        int c = i < n_clusters ? i : static_cast<int>(rng.uniform_int(0, n_clusters - 1));
        int nat = next++;
        images.push_back({nat, c, true, -1});
        for (int a = 0; a < aug_size; ++a) images.push_back({next++, c, false, nat});
    }
    // renumber so ids stay dense and sorted by cluster-agnostic order (already dense)
    std::vector<Classifier> family;
    for (int f = 0; f < family_size; ++f) {
        Classifier cf;
        cf.name = "r" + std::to_string(f);
        for (std::size_t i = 0; i < images.size(); ++i)
            cf.labels.push_back(static_cast<std::int8_t>(rng.uniform_int(0, 1) ? +1 : -1));
        family.push_back(std::move(cf));
    }
    return Instance(d, std::move(images), std::move(family));
}

inline Representation random_rep(const Instance& inst, Rng& rng) {
    Representation g;
    for (int j = 0; j < inst.dim(); ++j)
        g.coords.push_back(static_cast<int>(
            rng.uniform_int(0, static_cast<std::int64_t>(inst.family().size()) - 1)));
    return g;
}

}  // namespace hclab::testing

#endif
