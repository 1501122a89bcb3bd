#ifndef HCLAB_LOSS_HPP
#define HCLAB_LOSS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hclab/hypercube.hpp"
#include "hclab/instance.hpp"

namespace hclab {

struct LossParams {
    double beta = 1.0;  // inverse temperature
    int ell = 1;        // number of negative samples
    double rho = 1.0;   // alignment weight (1 = plain InfoNCE)
    void check() const;
};

inline constexpr std::uint64_t kDefaultTermCap = 100'000'000;

struct LossBreakdown {
    double alignment = 0.0;    // beta * E[g(x) . g(x+)]
    double uniformity = 0.0;   // E[log(e^{beta g(x).g(x+)} + sum_i e^{beta g(x).g(x_i^-)})]
    double total = 0.0;        // -rho * alignment + uniformity
    double std_error = 0.0;    // standard error of total (mc mode only)
    std::string mode;          // "exact" | "mc"
    std::uint64_t seed = 0;    // mc mode only
    std::uint64_t n_samples = 0;
};

// Exact finite-negative-sample InfoNCE: alignment by direct (x, x+) pair
// enumeration, uniformity by multinomial enumeration over Hamming-distance
// count vectors of the ell negatives. Throws CapExceeded when
// (#anchor vertices with mass) * C(ell+d, d) > term_cap.
LossBreakdown infonce_exact(const Representation& g, const Instance& inst, const LossParams& p,
                            std::uint64_t term_cap = kDefaultTermCap);

// Same computation with the rho alignment weight applied; rho=1 is the same
// code path as infonce_exact.
LossBreakdown weighted_infonce(const Representation& g, const Instance& inst, const LossParams& p,
                               std::uint64_t term_cap = kDefaultTermCap);

// Unbiased Monte-Carlo estimate of the same integrand. Deterministic in seed;
// block-seeded so the worker count never changes the result.
LossBreakdown infonce_mc(const Representation& g, const Instance& inst, const LossParams& p,
                         std::uint64_t seed, std::uint64_t n_samples, int threads = 1);

// Regrouped loss E_x[log(1 + sum_i e^{beta(g(x).g(x_i^-) - d)})]; lower-bounds
// the InfoNCE total, with equality exactly for clean representations.
double hat_loss(const Representation& g, const Instance& inst, const LossParams& p,
                std::uint64_t term_cap = kDefaultTermCap);

// Distribution-level form: anchor and negatives i.i.d. from D.
double tilde_loss(const HypercubeDist& D, const LossParams& p,
                  std::uint64_t term_cap = kDefaultTermCap);
// Float-mass variant for long blur traces where exact denominators overflow.
double tilde_loss_real(int dim, const std::vector<double>& mass, const LossParams& p,
                       std::uint64_t term_cap = kDefaultTermCap);

// Numerics shared with other modules.
double log_sum_exp(const std::vector<double>& log_terms);
double log_factorial(int n);

// E over ell i.i.d. negatives with distance profile q (q[h] = probability of
// distance h) of log(e^{base_logit} + sum_i e^{beta*(d-2h_i)}).
double expected_log_denominator(const std::vector<double>& q, int ell, double base_logit,
                                double beta, int d);

}  // namespace hclab

#endif
