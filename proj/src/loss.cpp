#include "hclab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

namespace hclab {

void LossParams::check() const {
    if (!(beta > 0)) throw ConfigError("beta must be positive");
    if (ell < 1) throw ConfigError("ell must be >= 1");
    if (!(rho > 0) && rho != 0.0) throw ConfigError("rho must be nonnegative");
}

double log_sum_exp(const std::vector<double>& log_terms) {
    double m = -HUGE_VAL;
    for (double t : log_terms) m = std::max(m, t);
    if (m == -HUGE_VAL) return -HUGE_VAL;
    double s = 0.0;
    for (double t : log_terms) s += std::exp(t - m);
    return m + std::log(s);
}

double log_factorial(int n) {
    static std::vector<double> cache{0.0, 0.0};  // lf(0), lf(1)
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(cache.size()) <= n)
        cache.push_back(cache.back() + std::log(static_cast<double>(cache.size())));
    return cache[static_cast<std::size_t>(n)];
}

double expected_log_denominator(const std::vector<double>& q, int ell, double base_logit,
                                double beta, int d) {
    std::vector<int> support;
    for (int h = 0; h <= d; ++h)
        if (q[static_cast<std::size_t>(h)] > 0.0) support.push_back(h);
    std::vector<double> logq(support.size());
    std::vector<double> coef(support.size());  // log-weight of one negative at this distance
    for (std::size_t i = 0; i < support.size(); ++i) {
        logq[i] = std::log(q[static_cast<std::size_t>(support[i])]);
        coef[i] = beta * static_cast<double>(d - 2 * support[i]);
    }

    double acc = 0.0;
    std::vector<int> counts(support.size(), 0);
    std::vector<double> terms;
    // Depth-first over compositions (n_h) of ell across the support, weight
    // tracked incrementally in log space.
    auto rec = [&](auto&& self, std::size_t idx, int remaining, double logw) -> void {
        if (idx + 1 == support.size()) {
            counts[idx] = remaining;
            double lw = logw + remaining * logq[idx] - log_factorial(remaining);
            terms.clear();
            terms.push_back(base_logit);
            for (std::size_t i = 0; i < support.size(); ++i)
                if (counts[i] > 0)
                    terms.push_back(std::log(static_cast<double>(counts[i])) + coef[i]);
            acc += std::exp(lw) * log_sum_exp(terms);
            return;
        }
        for (int n = 0; n <= remaining; ++n) {
            counts[idx] = n;
            self(self, idx + 1, remaining - n, logw + n * logq[idx] - log_factorial(n));
        }
    };
    if (support.empty()) throw ConfigError("empty negative-sample distribution");
    rec(rec, 0, ell, log_factorial(ell));
    return acc;
}

namespace {

double binom_double(int n, int k) {
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

void check_term_cap(std::size_t anchors, int ell, int d, std::uint64_t cap) {
    double terms = static_cast<double>(anchors) * binom_double(ell + d, d);
    if (terms > static_cast<double>(cap))
        throw CapExceeded("exact engine: " + std::to_string(static_cast<std::uint64_t>(terms)) +
                          " terms exceed cap " + std::to_string(cap) +
                          "; use the Monte-Carlo mode");
}

// Distance profile of the natural-image mass seen from vertex u.
std::vector<double> natural_profile(const std::vector<double>& vertex_mass, std::uint16_t u, int d) {
    std::vector<double> q(static_cast<std::size_t>(d) + 1, 0.0);
    for (std::size_t v = 0; v < vertex_mass.size(); ++v) {
        if (vertex_mass[v] == 0.0) continue;
        int h = __builtin_popcount(static_cast<unsigned>(u ^ static_cast<unsigned>(v)));
        q[static_cast<std::size_t>(h)] += vertex_mass[v];
    }
    return q;
}

LossBreakdown exact_core(const Representation& g, const Instance& inst, const LossParams& p,
                         std::uint64_t term_cap) {
    p.check();
    if (inst.aug_set_size() < 1)
        throw InstanceError("loss evaluation requires at least one augmentation per natural image");
    int d = inst.dim();

    auto n_nat = static_cast<double>(inst.naturals().size());
    std::vector<double> vmass(std::size_t{1} << d, 0.0);
    std::vector<std::uint16_t> anchor_vertices;
    for (int x : inst.naturals()) {
        std::uint16_t u = rep_vertex(g, inst, x).bits;
        if (vmass[u] == 0.0) anchor_vertices.push_back(u);
        vmass[u] += 1.0 / n_nat;
    }
    check_term_cap(anchor_vertices.size(), p.ell, d, term_cap);

    // Group (x, x+) pairs by (anchor vertex, positive inner product).
    std::map<std::pair<std::uint16_t, int>, std::int64_t> groups;
    for (int x : inst.naturals()) {
        Vertex u = rep_vertex(g, inst, x);
        for (int a : inst.augs_of(x))
            ++groups[{u.bits, inner_product(u, rep_vertex(g, inst, a))}];
    }
    double pair_count = n_nat * static_cast<double>(inst.aug_set_size());

    std::map<std::uint16_t, std::vector<double>> profiles;
    for (std::uint16_t u : anchor_vertices) profiles[u] = natural_profile(vmass, u, d);

    double align_mean = 0.0, uniformity = 0.0;
    for (const auto& [key, count] : groups) {
        auto [u, a] = key;
        double w = static_cast<double>(count) / pair_count;
        align_mean += w * static_cast<double>(a);
        uniformity += w * expected_log_denominator(profiles[u], p.ell, p.beta * a, p.beta, d);
    }

    LossBreakdown out;
    out.alignment = p.beta * align_mean;
    out.uniformity = uniformity;
    out.total = -p.rho * out.alignment + out.uniformity;
    out.mode = "exact";
    return out;
}

}  // namespace

LossBreakdown infonce_exact(const Representation& g, const Instance& inst, const LossParams& p,
                            std::uint64_t term_cap) {
    LossParams p1 = p;
    p1.rho = 1.0;
    return exact_core(g, inst, p1, term_cap);
}

LossBreakdown weighted_infonce(const Representation& g, const Instance& inst, const LossParams& p,
                               std::uint64_t term_cap) {
    return exact_core(g, inst, p, term_cap);
}

LossBreakdown infonce_mc(const Representation& g, const Instance& inst, const LossParams& p,
                         std::uint64_t seed, std::uint64_t n_samples, int threads) {
    p.check();
    if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    if (inst.aug_set_size() < 1)
        throw InstanceError("loss evaluation requires at least one augmentation per natural image");
    int d = inst.dim();
    auto n_nat = static_cast<std::int64_t>(inst.naturals().size());
    int aug_size = inst.aug_set_size();

    // Precompute every image's vertex once.
    std::vector<std::uint16_t> vtx(static_cast<std::size_t>(inst.num_images()));
    for (int x = 0; x < inst.num_images(); ++x) vtx[static_cast<std::size_t>(x)] = rep_vertex(g, inst, x).bits;

    constexpr std::uint64_t kBlock = 4096;
    std::uint64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
    struct BlockSum { double a = 0, u = 0, t = 0, t2 = 0; };
    std::vector<BlockSum> sums(n_blocks);
    Rng root(seed);

    auto run_block = [&](std::uint64_t b) {
        Rng rng = root.derive(b);
        std::uint64_t lo = b * kBlock;
        std::uint64_t hi = std::min(n_samples, lo + kBlock);
        BlockSum s;
        std::vector<double> terms;
        for (std::uint64_t i = lo; i < hi; ++i) {
            int x = inst.naturals()[static_cast<std::size_t>(rng.uniform_int(0, n_nat - 1))];
            int xp = inst.augs_of(x)[static_cast<std::size_t>(rng.uniform_int(0, aug_size - 1))];
            std::uint16_t u = vtx[static_cast<std::size_t>(x)];
            int a = d - 2 * __builtin_popcount(static_cast<unsigned>(u ^ vtx[static_cast<std::size_t>(xp)]));
            terms.clear();
            terms.push_back(p.beta * a);
            for (int k = 0; k < p.ell; ++k) {
                int neg = inst.naturals()[static_cast<std::size_t>(rng.uniform_int(0, n_nat - 1))];
                int ip = d - 2 * __builtin_popcount(static_cast<unsigned>(u ^ vtx[static_cast<std::size_t>(neg)]));
                terms.push_back(p.beta * ip);
            }
            double unif = log_sum_exp(terms);
            double total = -p.rho * p.beta * a + unif;
            s.a += a;
            s.u += unif;
            s.t += total;
            s.t2 += total * total;
        }
        sums[b] = s;
    };

    int workers = std::max(1, threads);
    if (workers == 1 || n_blocks == 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n_blocks);
        for (std::size_t t = 0; t < w; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t b = t; b < n_blocks; b += w) run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction: independent of worker count.
    double sa = 0, su = 0, st = 0, st2 = 0;
    for (const BlockSum& s : sums) { sa += s.a; su += s.u; st += s.t; st2 += s.t2; }
    double n = static_cast<double>(n_samples);

    LossBreakdown out;
    out.alignment = p.beta * sa / n;
    out.uniformity = su / n;
    out.total = st / n;
    if (n_samples > 1) {
        double var = std::max(0.0, (st2 - st * st / n) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    out.mode = "mc";
    out.seed = seed;
    out.n_samples = n_samples;
    return out;
}

double hat_loss(const Representation& g, const Instance& inst, const LossParams& p,
                std::uint64_t term_cap) {
    p.check();
    int d = inst.dim();
    auto n_nat = static_cast<double>(inst.naturals().size());
    std::vector<double> vmass(std::size_t{1} << d, 0.0);
    std::vector<std::uint16_t> anchors;
    for (int x : inst.naturals()) {
        std::uint16_t u = rep_vertex(g, inst, x).bits;
        if (vmass[u] == 0.0) anchors.push_back(u);
        vmass[u] += 1.0 / n_nat;
    }
    check_term_cap(anchors.size(), p.ell, d, term_cap);
    double acc = 0.0;
    for (std::uint16_t u : anchors) {
        std::vector<double> q = natural_profile(vmass, u, d);
        acc += vmass[u] * (expected_log_denominator(q, p.ell, p.beta * d, p.beta, d) - p.beta * d);
    }
    return acc;
}

double tilde_loss_real(int dim, const std::vector<double>& mass, const LossParams& p,
                       std::uint64_t term_cap) {
    p.check();
    if (mass.size() != (std::size_t{1} << dim))
        throw DimensionMismatch("tilde_loss: mass vector has wrong length");
    std::vector<std::uint16_t> anchors;
    for (std::size_t v = 0; v < mass.size(); ++v)
        if (mass[v] > 0.0) anchors.push_back(static_cast<std::uint16_t>(v));
    check_term_cap(anchors.size(), p.ell, dim, term_cap);
    double acc = 0.0;
    for (std::uint16_t u : anchors) {
        std::vector<double> q = natural_profile(mass, u, dim);
        acc += mass[u] * (expected_log_denominator(q, p.ell, p.beta * dim, p.beta, dim) - p.beta * dim);
    }
    return acc;
}

double tilde_loss(const HypercubeDist& D, const LossParams& p, std::uint64_t term_cap) {
    return tilde_loss_real(D.dim(), D.real(), p, term_cap);
}

}  // namespace hclab
