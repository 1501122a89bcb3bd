#ifndef HCLAB_GENERATORS_HPP
#define HCLAB_GENERATORS_HPP

#include <cstdint>

#include "hclab/instance.hpp"

namespace hclab {

// Balanced clusters with a full cluster-constant classifier family (plus an
// optional sprinkle of non-clean one-flip variants). A uniform
// cluster-preserving reference representation always exists; fetch it with
// reference_uniform_rep. Requires n_clusters to be a multiple of 2^d.
Instance make_realizable_balanced(int d, int n_clusters, int naturals_per_cluster,
                                  int augs_per_natural, int n_nonclean, std::uint64_t seed);

// The canonical cluster -> vertex (c mod 2^d) representation, assembled from
// family members; throws if a needed table is missing.
Representation reference_uniform_rep(const Instance& inst);

// Small instance with a size-capped mixed family: distinct cluster-constant
// tables plus genuinely non-clean ones, for exhaustive F^d sweeps.
Instance make_mixed_family(int d, int family_size, int n_nonclean, std::uint64_t seed);

// Agnostic toy: one cluster straddles two adjacent vertices and its stray
// side's augmentations are split by the first classifier, giving
// delta-regularity exactly 1. The family is closed under completions.
struct AgnosticToy {
    Instance inst;
    Representation g;  // near-uniform, not cluster-preserving
};
AgnosticToy make_agnostic_toy(int d, std::uint64_t seed);

// Random valid instance passing the intertwined and closure assumptions, with
// a non-cluster-preserving representation whose first coordinate is the
// splitting classifier.
AgnosticToy make_random_agnostic(int d, std::uint64_t seed);

}  // namespace hclab

#endif
