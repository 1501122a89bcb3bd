#ifndef HCLAB_DOWNSTREAM_HPP
#define HCLAB_DOWNSTREAM_HPP

#include <cstdint>
#include <vector>

#include "hclab/instance.hpp"
#include "hclab/loss.hpp"
#include "hclab/markov.hpp"
#include "hclab/rational.hpp"

namespace hclab {

// Cluster-faithful downstream task: one +/-1 label per cluster.
struct Task {
    std::vector<std::int8_t> labels;  // indexed by cluster id
};

// Two-layer ReLU head: rows of W are vertices, b is the constant d-2, a gives
// each row's output sign. Classification is sign(a . ReLU(W v - b)).
struct ReluHead {
    std::vector<Vertex> W;
    std::vector<std::int8_t> a;
    int bias() const { return W.empty() ? 0 : W.front().dim - 2; }
};

int head_classify(const ReluHead& head, Vertex v);  // returns +1 or -1
int head_raw_value(const ReluHead& head, Vertex v); // a . ReLU(W v - b), pre-sign

// Constructive head: +1-cluster vertices first, then -1-cluster vertices.
// Requires g cluster-preserving and injective on clusters.
ReluHead synth_head(const Representation& g, const Task& task, const Instance& inst);

// Misclassification mass over all of D under a fixed head.
Rational downstream_error(const Representation& g, const ReluHead& head, const Task& task,
                          const Instance& inst);
// Same, for an arbitrary vertex labeling omega (indexed by vertex bits).
Rational downstream_error_map(const Representation& g, const std::vector<std::int8_t>& omega,
                              const Task& task, const Instance& inst);
// Exact infimum over all 2^(2^d) vertex labelings; d <= 3 only.
Rational downstream_error_best(const Representation& g, const Task& task, const Instance& inst);

// Balanced negative construction: every vertex hosts k naturals from each of
// the 2^d clusters, so no head can tell clusters apart.
struct AdversarialOutput {
    Instance inst;
    Representation g;  // clean but maximally cluster-splitting
    Task task;         // balanced cluster-faithful labels
};
AdversarialOutput adversarial_instance(int d, int k);

struct MinimizerReport {
    std::string mode;             // "exhaustive" | "sampled"
    std::uint64_t evaluated = 0;
    std::uint64_t skipped = 0;    // sampled candidates not expressible in F
    std::uint64_t ties = 0;       // uniform cluster-preserving candidates matching L(g*)
    std::uint64_t counterexamples = 0;
    bool pass = false;            // no competitor beats g*; ties are exactly the expected ones
    bool argmin_matches = false;  // exhaustive mode: argmin set == uniform ∧ cluster-preserving
    double loss_star = 0.0;
    std::uint64_t seed = 0;
    bool blur_checked = false;    // part (iii), d > 3 only
    BlurTrace blur;
};

// Three-part minimality evidence for a uniform cluster-preserving g*:
// exhaustive search over F^d when it fits the budget, seeded sampling
// otherwise, plus the blur-monotonicity certificate at d > 3.
MinimizerReport verify_minimizer(const Representation& g_star, const Instance& inst,
                                 const LossParams& p, std::uint64_t budget, std::uint64_t seed,
                                 std::uint64_t term_cap = kDefaultTermCap);

}  // namespace hclab

#endif
