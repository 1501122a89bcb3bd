#ifndef HCLAB_AGNOSTIC_HPP
#define HCLAB_AGNOSTIC_HPP

#include <cstdint>
#include <vector>

#include "hclab/instance.hpp"
#include "hclab/loss.hpp"
#include "hclab/rational.hpp"

namespace hclab {

// f made constant sigma on cluster c, leaving other clusters untouched; sigma
// is the sign changing the least natural mass (ties resolved to +1).
struct ClusterPreservingPerturbation {
    Classifier classifier;
    int sigma = +1;
    std::int64_t changed_naturals = 0;
};
ClusterPreservingPerturbation make_cluster_preserving(const Classifier& f, int cluster,
                                                      const Instance& inst);

// The agreement/disagreement partition for a pair (g, g') differing in one
// coordinate on one cluster.
struct Partition {
    int coord = -1;    // perturbed coordinate index
    int cluster = -1;  // perturbed cluster
    std::vector<std::vector<int>> Q_v;  // per-vertex agreement sets (index = vertex bits)
    std::vector<std::vector<int>> E_v;  // per-vertex disagreement sets, keyed by g(x)
    std::vector<int> Q, E;              // aggregates
    std::vector<int> Z;                 // x in Q separated by the new coordinate from all of E
    std::vector<int> R;                 // split augmentations of the perturbed cluster
    Rational E_norm_natural;            // |E ∩ D°| / |D°|
    Rational E_norm_augmented;          // |E \ D°| / |D \ D°|
    Rational R_norm;                    // |R| / |D \ D°|
    std::vector<Rational> Q_v_norm_natural;
};
Partition build_partition(const Representation& g, const Representation& gp, const Instance& inst);

// L+(g) - L+(gp) by direct pair enumeration; verifies the closed form
// 2*beta*||R|| to 1e-12 relative and throws std::logic_error on mismatch.
double positive_gap(const Representation& g, const Representation& gp, const Instance& inst,
                    const LossParams& p);

struct NegativeGap {
    double total = 0.0;  // uniformity(gp) - uniformity(g)
    struct VertexContribution {
        std::uint16_t vertex;
        double q_diff = 0.0;  // conditional contribution of Q_v anchors
        double e_diff = 0.0;  // conditional contribution of E_v anchors
        bool q_in_Z = false;  // Q_v nonempty and entirely inside Z
    };
    std::vector<VertexContribution> per_vertex;
};
NegativeGap negative_gap(const Representation& g, const Representation& gp, const Instance& inst,
                         const LossParams& p, std::uint64_t term_cap = kDefaultTermCap);

struct ClaimsReport {
    bool constant_on_E_v = false;       // g' collapses each E_v to one vertex
    bool preserved_within_E = false;    // inner products unchanged on E x E
    bool shifted_E_Q = false;           // inner products move by exactly +/-2 on E x Q
    bool Z_dichotomy = false;           // Q_v ∩ Z is empty or all of Q_v
    bool drop_two_on_Z_E = false;       // inner products drop by exactly 2 on Z x E
    bool empty_E_v_off_Z = false;       // Q_v nonempty and disjoint from Z => E_v empty
    bool all() const {
        return constant_on_E_v && preserved_within_E && shifted_E_Q && Z_dichotomy &&
               drop_two_on_Z_E && empty_E_v_off_Z;
    }
};
ClaimsReport claims_check(const Partition& part, const Representation& g,
                          const Representation& gp, const Instance& inst);

struct Claim7Report {
    Rational epsilon;   // min split probability over the coordinates' split clusters
    Rational delta;     // instance delta-regularity
    Rational R_norm, E_norm_natural, E_norm_augmented;
    bool bound_E_natural = false;  // ||E||° <= (1/delta) ||R||
    bool bound_E_augmented = false;  // ||E|| <= ||E||° + ||R||
    bool bound_epsilon = false;      // epsilon <= (6/delta) ||R||
    bool all() const { return bound_E_natural && bound_E_augmented && bound_epsilon; }
};
Claim7Report claim7_check(const Instance& inst, const Representation& g, const Representation& gp);

// Smallest over the representation's coordinates f and clusters c split by f
// of Pr_{x,x' ~ D}[x, x' in Gamma_c and f(x) != f(x')].
Rational epsilon_min(const Representation& g, const Instance& inst);

struct NearUniformRow {
    double c = 0.0;  // the threshold constant
    int active = 0;       // mass >= 10 / (c d 2^d)
    int negligible = 0;   // mass <= epsilon / (100 c d 2^{2d})
    int intermediate = 0; // between the thresholds
};

struct GapCertificate {
    int coord = -1, cluster = -1, sigma = 0;
    Rational epsilon, delta, R_norm;
    double positive_gap = 0.0, negative_gap = 0.0;
    bool improved = false;  // negative_gap < positive_gap
    double beta = 0.0, rho = 1.0;
    int ell = 0;
    std::vector<NearUniformRow> near_uniform;  // classification across the c grid
};

struct CertifyConfig {
    double c_const = 4.0;  // extra row added to the near-uniformity grid
    std::uint64_t term_cap = kDefaultTermCap;
};

// Builds g' at the lowest splitting coordinate/cluster, evaluates both gaps
// with the (optionally rho-weighted) loss, and reports the verdict computed
// from the actual losses. Requires: g not cluster-preserving, family closed
// under completions, delta-regularity >= 2/5.
GapCertificate certify_not_minimizer(const Representation& g, const Instance& inst,
                                     const LossParams& p, const CertifyConfig& cfg = {});
GapCertificate certify_weighted(const Representation& g, const Instance& inst,
                                const LossParams& p, const CertifyConfig& cfg = {});

}  // namespace hclab

#endif
