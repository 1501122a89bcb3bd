#ifndef HCLAB_MARKOV_HPP
#define HCLAB_MARKOV_HPP

#include <map>
#include <vector>

#include "hclab/hypercube.hpp"
#include "hclab/loss.hpp"
#include "hclab/rational.hpp"

namespace hclab {

// Row-stochastic (d+1)x(d+1) transition matrix of the Hamming-distance chain
// induced by blurring both endpoints independently for one step.
class HammingKernel {
public:
    HammingKernel(int dim, std::vector<std::vector<Rational>> rows);  // validates
    int dim() const { return dim_; }
    const std::vector<Rational>& row(int h) const { return rows_[static_cast<std::size_t>(h)]; }
    const Rational& entry(int h, int k) const {
        return rows_[static_cast<std::size_t>(h)][static_cast<std::size_t>(k)];
    }
    friend bool operator==(const HammingKernel& a, const HammingKernel& b) {
        return a.dim_ == b.dim_ && a.rows_ == b.rows_;
    }

private:
    int dim_;
    std::vector<std::vector<Rational>> rows_;
};

// One step of the vertex blur: with probability 1/2 flip one uniformly random
// bit. Exact rational form plus a float form for long traces whose exact
// denominators would overflow 64 bits.
HypercubeDist blur_step(const HypercubeDist& D);
std::vector<double> blur_step_real(int dim, const std::vector<double>& mass);

// Closed-form distance kernel (two-sided blur).
HammingKernel hamming_kernel(int d);
// Independent construction: exhaustive push-forward over all vertex pairs and
// all (stay/flip)^2 move combinations. Oracle for the closed forms.
HammingKernel hamming_kernel_bruteforce(int d);

// Expected one-step change of log(C + e^{-2 beta h}) starting from distance h.
double delta_C(int h, double C, const LossParams& p, int d);

// sum_k binom(d,k) * delta_C(k). The binomial profile is stationary for the
// kernel, so this telescopes to exactly zero for every beta and C; the value
// is exposed so callers can observe the residual directly.
double lemma17_sum(double C, const LossParams& p, int d);

struct Lemma16Report {
    bool uniform = false;
    bool item1_pass = false;        // induced_hamming(uniform)(k) = binom(d,k)/2^d, exact
    Rational item2_difference;      // Pr_D[h=0] - 2^{-d}
    Rational item2_sum_squares;     // sum_v (p_v - 2^{-d})^2
    bool item2_identity = false;    // the two rationals agree exactly
    bool item2_strict = false;      // difference > 0 (expected iff non-uniform)
    bool item3_pass = false;        // exact dominance decomposition for all k >= 1; strict
                                    // exactly when distance-k pairs carry unequal mass
};
Lemma16Report lemma16_report(const HypercubeDist& D);

struct BlurTrace {
    std::vector<double> values;       // tilde loss at t = 0..steps
    int first_non_decrease = -1;      // step with an increase beyond tolerance
    int indeterminate_steps = 0;      // |delta| below float-noise tolerance
    bool strictly_decreasing = false; // every step a tolerated strict decrease
};
// Tolerance: a decrease must exceed 1e-12 * max(1, |value|) to count as strict.
BlurTrace blur_monotonicity_check(const HypercubeDist& D, const LossParams& p, int steps,
                                  std::uint64_t term_cap = kDefaultTermCap);

// Total-variation distance from uniform after `steps` one-sided blur steps.
double mixing_distance(const HypercubeDist& D, int steps);

// Least beta on a 0.25-grid such that lemma17_sum < 0 across the whole C grid.
extern const std::vector<double>& lemma17_C_grid();
std::map<int, double> calibrate_beta0(const std::vector<int>& dims, double beta_max = 32.0);

}  // namespace hclab

#endif
