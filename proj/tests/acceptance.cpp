// Acceptance gate: ten independently checkable properties of the library,
// each printed as a single PASS/FAIL line. Exit status is the failure count.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hclab/agnostic.hpp"
#include "hclab/downstream.hpp"
#include "hclab/errors.hpp"
#include "hclab/generators.hpp"
#include "hclab/hypercube.hpp"
#include "hclab/instance.hpp"
#include "hclab/loss.hpp"
#include "hclab/markov.hpp"
#include "hclab/rng.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace hclab;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kRelOracle = 1e-10;      // exact engine vs naive enumeration
constexpr double kTie = 1e-12;            // equalities between float losses
constexpr double kStationarity = 1e-12;   // uniform-profile drift bound
constexpr double kMargin = 1e-12;         // strict-decrease margin

struct Check {
    std::string text;   // appended diagnostics
    bool ok = true;
    void require(bool cond, const std::string& why) {
        if (!cond && ok) { ok = false; text = why; }
    }
    void note(const std::string& extra) {
        if (!text.empty()) text += "; ";
        text += extra;
    }
};

double rel_diff(double a, double b) {
    return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

Representation lowest_perturbed(const Representation& g, const Instance& inst, bool* found) {
    *found = false;
    for (std::size_t j = 0; j < g.coords.size(); ++j) {
        const Classifier& f = inst.classifier(g.coords[j]);
        for (int c = 0; c < inst.num_clusters(); ++c) {
            if (!splits_cluster(f, inst, c)) continue;
            auto pert = make_cluster_preserving(f, c, inst);
            auto idx = inst.find_classifier(pert.classifier.labels);
            if (!idx) continue;
            Representation gp = g;
            gp.coords[j] = static_cast<int>(*idx);
            *found = true;
            return gp;
        }
    }
    return g;
}

void criterion1(Check& c) {
    for (int d = 2; d <= 8; ++d)
        c.require(hamming_kernel(d) == hamming_kernel_bruteforce(d),
                  "closed form != brute force at d=" + std::to_string(d));
    std::vector<Rational> row0 = {Rational(5, 16), Rational(1, 2), Rational(3, 16),
                                  Rational(0), Rational(0)};
    c.require(hamming_kernel(4).row(0) == row0, "d=4 row h=0 mismatch");
}

void criterion2(Check& c) {
    for (int d = 2; d <= 6; ++d) {
        Lemma16Report u = lemma16_report(HypercubeDist::uniform(d));
        c.require(u.item1_pass && u.item2_identity && u.item2_difference == Rational(0),
                  "uniform case failed at d=" + std::to_string(d));
    }
    Rng rng(2024);
    int nonuniform = 0;
    for (int s = 0; s < 500; ++s) {
        int d = 2 + s % 5;
        HypercubeDist D = testing::random_rational_dist(d, rng);
        Lemma16Report rep = lemma16_report(D);
        c.require(rep.item1_pass, "item 1 failed on a sample");
        c.require(rep.item2_identity, "item 2 identity failed on a sample");
        if (!rep.uniform) {
            ++nonuniform;
            c.require(rep.item2_strict, "item 2 not strictly positive on a non-uniform sample");
            c.require(rep.item3_pass, "item 3 failed on a non-uniform sample");
        }
    }
    c.require(nonuniform >= 400, "sampler produced too few non-uniform distributions");
}

void criterion3(Check& c) {
    LossParams p;
    for (int d = 2; d <= 8; ++d) {
        HammingDist U = induced_hamming(HypercubeDist::uniform(d));
        for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            p.beta = beta;
            for (double C : lemma17_C_grid()) {
                double acc = 0.0;
                for (int k = 0; k <= d; ++k)
                    acc += U.mass(static_cast<std::size_t>(k)).to_double() * delta_C(k, C, p, d);
                c.require(std::fabs(acc) <= kStationarity, "stationarity residual too large");
            }
        }
    }
    // strict negativity of the binomial-weighted sum above a calibrated beta
    bool calibrated = false;
    try {
        auto table = calibrate_beta0({4, 5, 6, 7, 8});
        calibrated = true;
        for (const auto& [d, b0] : table) {
            for (double beta = b0; beta <= b0 + 4.0; beta += 0.25) {
                p.beta = beta;
                for (double C : lemma17_C_grid())
                    c.require(lemma17_sum(C, p, d) < 0.0, "sum not negative above threshold");
            }
        }
    } catch (const ConfigError&) {
        c.require(false,
                  "no calibrated threshold exists: sum_k binom(d,k)*delta_C(k) is identically "
                  "zero because the binomial profile is stationary for the kernel");
    }
    (void)calibrated;
}

void criterion4(Check& c) {
    Rng rng(77);
    const int ells[3] = {1, 2, 4};
    const double betas[3] = {4.0, 6.0, 10.0};
    for (int s = 0; s < 1000; ++s) {
        HypercubeDist D = testing::random_rational_dist(4, rng);
        bool uniform = true;
        for (std::size_t v = 0; v < D.size(); ++v)
            if (D.mass(v) != Rational(1, 16)) { uniform = false; break; }
        if (uniform) continue;
        LossParams p;
        p.ell = ells[s % 3];
        p.beta = betas[(s / 3) % 3];
        BlurTrace tr = blur_monotonicity_check(D, p, 1);
        c.require(tr.values[0] - tr.values[1] > kMargin, "one blur step failed to decrease");
    }
    for (int ell : ells)
        for (double beta : betas) {
            LossParams p;
            p.ell = ell;
            p.beta = beta;
            BlurTrace tr = blur_monotonicity_check(HypercubeDist::uniform(4), p, 64);
            for (double v : tr.values)
                c.require(std::fabs(v - tr.values[0]) <= kTie, "uniform trace drifted");
        }
}

void criterion5(Check& c) {
    Rng rng(555);
    for (int s = 0; s < 50; ++s) {
        int d = 1 + static_cast<int>(rng.uniform_int(0, 2));
        int naturals = 2 + static_cast<int>(rng.uniform_int(0, 2));  // |D°| <= 4 per cluster pick
        Instance inst = testing::random_small_instance(d, naturals, 1, 3, rng);
        if (static_cast<int>(inst.naturals().size()) > 6) { --s; continue; }
        Representation g = testing::random_rep(inst, rng);
        LossParams p;
        p.beta = 0.5 + 0.5 * static_cast<double>(rng.uniform_int(0, 6));
        p.ell = 1 + static_cast<int>(rng.uniform_int(0, 2));
        LossBreakdown ex = infonce_exact(g, inst, p);
        LossBreakdown nv = oracle::naive_infonce(g, inst, p);
        c.require(rel_diff(ex.total, nv.total) < kRelOracle, "exact != naive (total)");
        c.require(rel_diff(ex.alignment, nv.alignment) < kRelOracle, "exact != naive (alignment)");
        c.require(rel_diff(ex.uniformity, nv.uniformity) < kRelOracle,
                  "exact != naive (uniformity)");
    }
    // lower bound with equality exactly on clean representations, |F|=8, d=2
    Instance inst = make_mixed_family(2, 8, 3, 99);
    LossParams p;
    p.beta = 2.0;
    p.ell = 2;
    int clean_seen = 0, dirty_seen = 0;
    for (int f0 = 0; f0 < 8; ++f0)
        for (int f1 = 0; f1 < 8; ++f1) {
            Representation g{{f0, f1}};
            double L = infonce_exact(g, inst, p).total;
            double Lhat = hat_loss(g, inst, p);
            c.require(L >= Lhat - kTie, "lower bound violated");
            if (is_clean(g, inst)) {
                ++clean_seen;
                c.require(std::fabs(L - Lhat) <= kTie, "clean representation missed equality");
            } else {
                ++dirty_seen;
                c.require(L - Lhat > kTie, "non-clean representation achieved equality");
            }
        }
    c.require(clean_seen > 0 && dirty_seen > 0, "family sweep lacked both kinds");
}

void criterion6(Check& c) {
    Instance inst = make_mixed_family(2, 16, 6, 17);
    Representation g = reference_uniform_rep(inst);
    LossParams p;
    p.beta = 6.0;
    p.ell = 2;
    MinimizerReport ex = verify_minimizer(g, inst, p, 1 << 20, 1);
    c.require(ex.mode == "exhaustive", "expected an exhaustive sweep");
    c.require(ex.evaluated == 256, "expected 256 representations");
    c.require(ex.pass && ex.argmin_matches,
              "argmin set != uniform and cluster-preserving set at d=2");

    for (std::uint64_t seed : {21ull, 22ull}) {
        Instance big = make_realizable_balanced(4, 16, 1, 1, 6, seed);
        Representation gs = reference_uniform_rep(big);
        MinimizerReport sp = verify_minimizer(gs, big, p, 10000, seed);
        c.require(sp.mode == "sampled", "expected a sampled sweep at d=4");
        c.require(sp.counterexamples == 0, "a sampled competitor beat g*");
        c.require(sp.pass, "sampled audit failed (ties outside tolerance)");
    }
}

void criterion7(Check& c) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = make_realizable_balanced(2, 4, 1 + static_cast<int>(seed % 2),
                                                 1 + static_cast<int>(seed % 2),
                                                 static_cast<int>(seed % 4), seed);
        Representation g = reference_uniform_rep(inst);
        for (unsigned mask = 0; mask < 16; ++mask) {
            Task task;
            for (int cl = 0; cl < 4; ++cl)
                task.labels.push_back(static_cast<std::int8_t>((mask >> cl) & 1 ? +1 : -1));
            ReluHead head = synth_head(g, task, inst);
            c.require(downstream_error(g, head, task, inst) == Rational(0),
                      "synthesized head misclassified on seed " + std::to_string(seed));
        }
    }
    AdversarialOutput adv = adversarial_instance(2, 1);
    c.require(downstream_error_best(adv.g, adv.task, adv.inst) >= Rational(1, 2),
              "adversarial best error below one half");
}

void criterion8(Check& c) {
    LossParams p;
    p.beta = 2.0;
    p.ell = 2;
    int with_delta = 0;
    for (int s = 0; s < 200; ++s) {
        AgnosticToy toy = (s % 2) ? make_agnostic_toy(1 + s % 3, static_cast<std::uint64_t>(s))
                                  : make_random_agnostic(1 + s % 4, static_cast<std::uint64_t>(s));
        bool found = false;
        Representation gp = lowest_perturbed(toy.g, toy.inst, &found);
        if (!found) { c.require(false, "generated pair has no split cluster"); continue; }
        Partition part = build_partition(toy.g, gp, toy.inst);
        double gap = positive_gap(toy.g, gp, toy.inst, p);  // throws on identity mismatch
        c.require(rel_diff(gap, 2.0 * p.beta * part.R_norm.to_double()) < kTie * 1e0 + 1e-12,
                  "positive gap off the closed form");
        ClaimsReport claims = claims_check(part, toy.g, gp, toy.inst);
        c.require(claims.all(), "a structural claim failed on pair " + std::to_string(s));
        DeltaRegularity dr = delta_regularity(toy.inst);
        if (dr.finite && dr.value > Rational(0)) {
            ++with_delta;
            Claim7Report c7 = claim7_check(toy.inst, toy.g, gp);
            c.require(c7.all(), "claim 7 chain failed on pair " + std::to_string(s));
        }
        NegativeGap neg = negative_gap(toy.g, gp, toy.inst, p);
        for (const auto& vc : neg.per_vertex)
            if (vc.q_in_Z)
                c.require(vc.q_diff <= kMargin, "a separated anchor vertex paid extra");
    }
    c.require(with_delta >= 100, "too few pairs with finite delta-regularity");
}

void criterion9(Check& c) {
    const double betas[5] = {0.5, 1.0, 2.0, 4.0, 8.0};
    const int ells[5] = {1, 2, 4, 8, 16};
    std::string smallest;
    for (int d = 1; d <= 3; ++d)
        for (std::uint64_t seed : {1ull, 2ull}) {
            AgnosticToy toy = make_agnostic_toy(d, seed);
            bool improved_somewhere = false;
            for (int bi = 0; bi < 5 && !improved_somewhere; ++bi)
                for (int li = 0; li < 5 && !improved_somewhere; ++li) {
                    LossParams p;
                    p.beta = betas[bi];
                    p.ell = ells[li];
                    GapCertificate cert = certify_not_minimizer(toy.g, toy.inst, p);
                    if (cert.improved) {
                        improved_somewhere = true;
                        if (!smallest.empty()) smallest += " ";
                        smallest += "d" + std::to_string(d) + "s" + std::to_string(seed) +
                                    ":(beta=" + std::to_string(p.beta).substr(0, 3) +
                                    ",ell=" + std::to_string(p.ell) + ")";
                    }
                }
            c.require(improved_somewhere,
                      "sweep never improved at d=" + std::to_string(d));
            LossParams top;
            top.beta = 8.0;
            top.ell = 16;
            c.require(certify_not_minimizer(toy.g, toy.inst, top).improved,
                      "top of sweep not improved at d=" + std::to_string(d));
            // weighted loss at the coverage threshold rho = 2^{d+1} + 1/delta
            DeltaRegularity dr = delta_regularity(toy.inst);
            LossParams pw;
            pw.beta = 2.0;
            pw.ell = 4;
            pw.rho = std::ldexp(1.0, d + 1) + 1.0 / dr.value.to_double();
            c.require(certify_weighted(toy.g, toy.inst, pw).improved,
                      "weighted certificate not improved at d=" + std::to_string(d));
        }
    c.note("first improvements: " + smallest);
}

void criterion10(Check& c) {
#ifndef HCLAB_BIN
    c.require(false, "CLI binary path not configured");
#else
    fs::path dir = fs::temp_directory_path() / "hclab_acceptance";
    fs::create_directories(dir);
    auto run = [&](const std::string& args) {
        std::string cmd = std::string(HCLAB_BIN) + " " + args + " >/dev/null 2>/dev/null";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    fs::path inst = dir / "toy.json";
    c.require(run("gen-instance --kind agnostic-toy --d 2 --seed 9 --out " + inst.string()) == 0,
              "generation failed");
    std::string base =
        "eval --beta 4 --ell 2 --mode mc --samples 40000 --seed 5 --instance " + inst.string();
    c.require(run(base + " --threads 1 --out " + (dir / "r1.json").string()) == 0, "eval failed");
    c.require(run(base + " --threads 1 --out " + (dir / "r2.json").string()) == 0, "eval failed");
    c.require(run(base + " --threads 8 --out " + (dir / "r8.json").string()) == 0, "eval failed");
    c.require(slurp(dir / "r1.json") == slurp(dir / "r2.json"), "rerun not byte-identical");
    c.require(slurp(dir / "r1.json") == slurp(dir / "r8.json"), "thread count changed the report");
    c.require(run("gen-instance --kind agnostic-toy --d 2 --seed 9 --out " +
                  (dir / "toy2.json").string()) == 0,
              "generation failed");
    c.require(slurp(inst) == slurp(dir / "toy2.json"), "generation not byte-identical");
#endif
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* what;
        std::function<void(Check&)> fn;
    };
    std::vector<Entry> entries = {
        {1, "distance kernel matches brute-force push-forward (exact, d=2..8)", criterion1},
        {2, "collision-mass identities exact on uniform and 500 random distributions", criterion2},
        {3, "uniform profile stationary; binomial-weighted sum negative above threshold",
         criterion3},
        {4, "blur strictly decreases the distribution loss off uniform (1000 samples)",
         criterion4},
        {5, "exact engine matches naive enumeration; lower bound tight exactly on clean",
         criterion5},
        {6, "argmin set is uniform+cluster-preserving (exhaustive d=2, sampled d=4)", criterion6},
        {7, "constructive head solves every task; balanced construction forces error 1/2",
         criterion7},
        {8, "perturbation gap identities and structural claims on 200 pairs", criterion8},
        {9, "perturbation certified as improvement at the top of the sweep", criterion9},
        {10, "reports byte-identical across reruns and thread counts", criterion10},
    };
    int failures = 0;
    for (auto& e : entries) {
        Check c;
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.require(false, std::string("exception: ") + ex.what());
        }
        if (!c.ok) ++failures;
        std::printf("criterion %d: %s — %s%s%s\n", e.id, c.ok ? "PASS" : "FAIL", e.what,
                    c.text.empty() ? "" : " — ", c.text.c_str());
        std::fflush(stdout);
    }
    return failures;
}
