#include "hclab/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

namespace hclab {

int head_raw_value(const ReluHead& head, Vertex v) {
    int b = head.bias();
    int acc = 0;
    for (std::size_t j = 0; j < head.W.size(); ++j) {
        int pre = inner_product(head.W[j], v) - b;
        if (pre > 0) acc += head.a[j] * pre;
    }
    return acc;
}

int head_classify(const ReluHead& head, Vertex v) {
    return head_raw_value(head, v) > 0 ? +1 : -1;
}

ReluHead synth_head(const Representation& g, const Task& task, const Instance& inst) {
    if (!is_cluster_preserving(g, inst))
        throw ConfigError("head synthesis requires a cluster-preserving representation");
    if (task.labels.size() != static_cast<std::size_t>(inst.num_clusters()))
        throw ConfigError("task must label every cluster");
    std::vector<Vertex> cluster_vertex(static_cast<std::size_t>(inst.num_clusters()));
    std::map<std::uint16_t, int> seen;
    for (int c = 0; c < inst.num_clusters(); ++c) {
        Vertex v = rep_vertex(g, inst, inst.cluster_members(c).front());
        if (!seen.emplace(v.bits, c).second)
            throw ConfigError("two clusters share a vertex: head synthesis needs injectivity");
        cluster_vertex[static_cast<std::size_t>(c)] = v;
    }
    ReluHead head;
    for (int sign : {+1, -1})
        for (int c = 0; c < inst.num_clusters(); ++c)
            if (task.labels[static_cast<std::size_t>(c)] == sign) {
                head.W.push_back(cluster_vertex[static_cast<std::size_t>(c)]);
                head.a.push_back(static_cast<std::int8_t>(sign));
            }
    return head;
}

Rational downstream_error(const Representation& g, const ReluHead& head, const Task& task,
                          const Instance& inst) {
    std::int64_t wrong = 0;
    for (int x = 0; x < inst.num_images(); ++x)
        if (head_classify(head, rep_vertex(g, inst, x)) !=
            task.labels[static_cast<std::size_t>(inst.image(x).cluster)])
            ++wrong;
    return Rational(wrong, inst.num_images());
}

Rational downstream_error_map(const Representation& g, const std::vector<std::int8_t>& omega,
                              const Task& task, const Instance& inst) {
    if (omega.size() != (std::size_t{1} << inst.dim()))
        throw ConfigError("vertex labeling has wrong length");
    std::int64_t wrong = 0;
    for (int x = 0; x < inst.num_images(); ++x)
        if (omega[rep_vertex(g, inst, x).bits] !=
            task.labels[static_cast<std::size_t>(inst.image(x).cluster)])
            ++wrong;
    return Rational(wrong, inst.num_images());
}

Rational downstream_error_best(const Representation& g, const Task& task, const Instance& inst) {
    int d = inst.dim();
    if (d > 3) throw ConfigError("exhaustive head search limited to d <= 3");
    std::size_t n_vertices = std::size_t{1} << d;

    // Count images per (vertex, task label); error of a labeling follows from
    // the counts, no per-image rescan needed.
    std::vector<std::int64_t> plus(n_vertices, 0), minus(n_vertices, 0);
    for (int x = 0; x < inst.num_images(); ++x) {
        std::uint16_t v = rep_vertex(g, inst, x).bits;
        if (task.labels[static_cast<std::size_t>(inst.image(x).cluster)] > 0) ++plus[v];
        else ++minus[v];
    }
    std::int64_t best = INT64_MAX;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_vertices); ++mask) {
        std::int64_t wrong = 0;
        for (std::size_t v = 0; v < n_vertices; ++v)
            wrong += (mask >> v) & 1 ? minus[v] : plus[v];
        best = std::min(best, wrong);
    }
    return Rational(best, inst.num_images());
}

AdversarialOutput adversarial_instance(int d, int k) {
    if (d < 1 || d > 4) throw ConfigError("adversarial construction limited to d in [1,4]");
    if (k < 1 || k > 8) throw ConfigError("adversarial construction limited to k in [1,8]");
    int n_vertices = 1 << d;
    int n_clusters = n_vertices;

    std::vector<ImageRecord> images;
    std::vector<std::uint16_t> cell;  // designated vertex per image
    int next = 0;
    for (int c = 0; c < n_clusters; ++c)
        for (int v = 0; v < n_vertices; ++v)
            for (int i = 0; i < k; ++i) {
                ImageRecord nat{next, c, true, -1};
                images.push_back(nat);
                cell.push_back(static_cast<std::uint16_t>(v));
                ImageRecord aug{next + 1, c, false, next};
                images.push_back(aug);
                cell.push_back(static_cast<std::uint16_t>(v));
                next += 2;
            }

    std::vector<Classifier> family;
    for (int j = 0; j < d; ++j) {
        Classifier f;
        f.name = "cell-bit-" + std::to_string(j);
        for (std::uint16_t v : cell)
            f.labels.push_back(static_cast<std::int8_t>((v >> j) & 1 ? +1 : -1));
        family.push_back(std::move(f));
    }

    AdversarialOutput out{Instance(d, std::move(images), std::move(family)),
                          Representation{}, Task{}};
    for (int j = 0; j < d; ++j) out.g.coords.push_back(j);
    for (int c = 0; c < n_clusters; ++c)
        out.task.labels.push_back(static_cast<std::int8_t>(c < n_clusters / 2 ? +1 : -1));
    return out;
}

namespace {

bool candidate_uniform_cp(const Representation& g, const Instance& inst) {
    return is_cluster_preserving(g, inst) && is_uniform(g, inst);
}

}  // namespace

MinimizerReport verify_minimizer(const Representation& g_star, const Instance& inst,
                                 const LossParams& p, std::uint64_t budget, std::uint64_t seed,
                                 std::uint64_t term_cap) {
    p.check();
    if (!check_assumption_intertwined(inst).pass())
        throw ConfigError("instance violates the intertwined-augmentations assumption");
    if (!is_cluster_preserving(g_star, inst) || !is_uniform(g_star, inst))
        throw ConfigError("reference representation must be uniform and cluster-preserving");

    MinimizerReport rep;
    rep.seed = seed;
    rep.loss_star = infonce_exact(g_star, inst, p, term_cap).total;
    double tol = 1e-12 * std::max(1.0, std::abs(rep.loss_star));

    std::size_t n_f = inst.family().size();
    int d = inst.dim();
    double space = std::pow(static_cast<double>(n_f), d);
    rep.pass = true;

    if (space <= static_cast<double>(budget)) {
        rep.mode = "exhaustive";
        rep.argmin_matches = true;
        Representation g;
        g.coords.assign(static_cast<std::size_t>(d), 0);
        bool done = false;
        while (!done) {
            double L = infonce_exact(g, inst, p, term_cap).total;
            ++rep.evaluated;
            bool ucp = candidate_uniform_cp(g, inst);
            bool is_min = L <= rep.loss_star + tol;
            if (ucp) {
                if (std::abs(L - rep.loss_star) <= tol) ++rep.ties;
                else { rep.pass = false; rep.argmin_matches = false; }
            } else if (is_min) {
                ++rep.counterexamples;
                rep.pass = false;
                rep.argmin_matches = false;
            }
            // odometer over F^d
            done = true;
            for (int j = 0; j < d; ++j) {
                auto& c = g.coords[static_cast<std::size_t>(j)];
                if (static_cast<std::size_t>(++c) < n_f) { done = false; break; }
                c = 0;
            }
        }
    } else {
        rep.mode = "sampled";
        Rng rng(seed);
        std::vector<int> nonclean;
        for (std::size_t f = 0; f < n_f; ++f)
            if (!is_clean(inst.classifier(static_cast<int>(f)), inst))
                nonclean.push_back(static_cast<int>(f));

        // Classifier index for each cluster-constant truth table requested.
        auto map_to_rep = [&](const std::vector<std::uint16_t>& map) -> std::optional<Representation> {
            Representation g;
            for (int j = 0; j < d; ++j) {
                std::vector<std::int8_t> table(static_cast<std::size_t>(inst.num_images()));
                for (int x = 0; x < inst.num_images(); ++x)
                    table[static_cast<std::size_t>(x)] = static_cast<std::int8_t>(
                        (map[static_cast<std::size_t>(inst.image(x).cluster)] >> j) & 1 ? +1 : -1);
                auto idx = inst.find_classifier(table);
                if (!idx) return std::nullopt;
                g.coords.push_back(*idx);
            }
            return g;
        };

        for (std::uint64_t s = 0; s < budget; ++s) {
            std::vector<std::uint16_t> map(static_cast<std::size_t>(inst.num_clusters()));
            for (auto& v : map)
                v = static_cast<std::uint16_t>(rng.uniform_int(0, (1 << d) - 1));
            auto cand = map_to_rep(map);
            if (!cand) { ++rep.skipped; continue; }
            bool perturbed = false;
            if (s % 2 == 1 && !nonclean.empty()) {
                // one-flip style competitor: swap in a non-clean family member
                int j = static_cast<int>(rng.uniform_int(0, d - 1));
                cand->coords[static_cast<std::size_t>(j)] =
                    nonclean[static_cast<std::size_t>(rng.uniform_int(
                        0, static_cast<std::int64_t>(nonclean.size()) - 1))];
                perturbed = true;
            }
            double L = infonce_exact(*cand, inst, p, term_cap).total;
            ++rep.evaluated;
            bool ucp = !perturbed && candidate_uniform_cp(*cand, inst);
            if (perturbed) ucp = candidate_uniform_cp(*cand, inst);
            if (ucp) {
                if (std::abs(L - rep.loss_star) <= tol) ++rep.ties;
                else { rep.pass = false; ++rep.counterexamples; }
            } else if (L <= rep.loss_star + tol) {
                ++rep.counterexamples;
                rep.pass = false;
            }
        }
    }

    if (d > 3) {
        // Part (iii): nudge D_{g*} off uniform and certify the blur descent.
        std::vector<Rational> mass(std::size_t{1} << d);
        Rational u(1, static_cast<std::int64_t>(mass.size()));
        for (auto& m : mass) m = u * Rational(4, 5);
        mass[0] += Rational(1, 5);
        rep.blur = blur_monotonicity_check(HypercubeDist(d, std::move(mass)), p, 8, term_cap);
        rep.blur_checked = true;
        if (!rep.blur.strictly_decreasing) rep.pass = false;
    }
    return rep;
}

}  // namespace hclab
