#include "hclab/agnostic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hclab/errors.hpp"

namespace hclab {

ClusterPreservingPerturbation make_cluster_preserving(const Classifier& f, int cluster,
                                                      const Instance& inst) {
    if (!splits_cluster(f, inst, cluster))
        throw ConfigError("classifier does not split cluster " + std::to_string(cluster));
    std::int64_t nat_plus = 0, nat_minus = 0;
    for (int x : inst.cluster_naturals(cluster)) {
        if (f.labels[static_cast<std::size_t>(x)] > 0) ++nat_plus;
        else ++nat_minus;
    }
    ClusterPreservingPerturbation out;
    out.sigma = nat_minus <= nat_plus ? +1 : -1;  // ties go to +1
    out.changed_naturals = std::min(nat_plus, nat_minus);
    out.classifier.name = f.name + "^(" + std::to_string(cluster) + "," +
                          (out.sigma > 0 ? "+" : "-") + ")";
    out.classifier.labels = f.labels;
    for (int x : inst.cluster_members(cluster))
        out.classifier.labels[static_cast<std::size_t>(x)] = static_cast<std::int8_t>(out.sigma);
    return out;
}

namespace {

struct PairContext {
    int coord;            // the differing coordinate
    int cluster;          // the perturbed cluster
    const Classifier* f;  // original coordinate classifier
    const Classifier* fp; // perturbed coordinate classifier
};

PairContext validate_pair(const Representation& g, const Representation& gp, const Instance& inst) {
    if (g.coords.size() != gp.coords.size() ||
        g.coords.size() != static_cast<std::size_t>(inst.dim()))
        throw ConfigError("representations must have d coordinates");
    int coord = -1;
    for (std::size_t j = 0; j < g.coords.size(); ++j) {
        if (g.coords[j] == gp.coords[j]) continue;
        if (coord >= 0) throw ConfigError("representations differ in more than one coordinate");
        coord = static_cast<int>(j);
    }
    if (coord < 0) throw ConfigError("representations are identical: no perturbation to analyze");
    const Classifier& f = inst.classifier(g.coords[static_cast<std::size_t>(coord)]);
    const Classifier& fp = inst.classifier(gp.coords[static_cast<std::size_t>(coord)]);
    int cluster = -1;
    for (int x = 0; x < inst.num_images(); ++x) {
        if (f.labels[static_cast<std::size_t>(x)] == fp.labels[static_cast<std::size_t>(x)]) continue;
        int c = inst.image(x).cluster;
        if (cluster < 0) cluster = c;
        else if (cluster != c)
            throw ConfigError("perturbation touches more than one cluster");
    }
    if (cluster < 0) throw ConfigError("coordinate classifiers have identical labels");
    std::int8_t sigma = fp.labels[static_cast<std::size_t>(inst.cluster_members(cluster).front())];
    for (int x : inst.cluster_members(cluster))
        if (fp.labels[static_cast<std::size_t>(x)] != sigma)
            throw ConfigError("perturbed classifier is not constant on the cluster");
    return {coord, cluster, &f, &fp};
}

}  // namespace

Partition build_partition(const Representation& g, const Representation& gp, const Instance& inst) {
    PairContext ctx = validate_pair(g, gp, inst);
    Partition part;
    part.coord = ctx.coord;
    part.cluster = ctx.cluster;
    std::size_t n_vertices = std::size_t{1} << inst.dim();
    part.Q_v.assign(n_vertices, {});
    part.E_v.assign(n_vertices, {});
    part.Q_v_norm_natural.assign(n_vertices, Rational(0));

    auto n_nat = static_cast<std::int64_t>(inst.naturals().size());
    auto n_aug = static_cast<std::int64_t>(inst.augmentations().size());

    std::int64_t e_nat = 0, e_aug = 0;
    for (int x = 0; x < inst.num_images(); ++x) {
        std::uint16_t u = rep_vertex(g, inst, x).bits;
        std::uint16_t up = rep_vertex(gp, inst, x).bits;
        if (u == up) {
            part.Q_v[u].push_back(x);
            part.Q.push_back(x);
            if (inst.image(x).natural) part.Q_v_norm_natural[u] += Rational(1, n_nat);
        } else {
            part.E_v[u].push_back(x);
            part.E.push_back(x);
            if (inst.image(x).natural) ++e_nat;
            else ++e_aug;
        }
    }
    part.E_norm_natural = Rational(e_nat, n_nat);
    part.E_norm_augmented = n_aug > 0 ? Rational(e_aug, n_aug) : Rational(0);

    for (int x : part.Q) {
        std::int8_t mine = ctx.fp->labels[static_cast<std::size_t>(x)];
        bool separated_from_all = true;
        for (int e : part.E)
            if (ctx.fp->labels[static_cast<std::size_t>(e)] == mine) {
                separated_from_all = false;
                break;
            }
        if (separated_from_all && !part.E.empty()) part.Z.push_back(x);
    }

    std::int64_t r = 0;
    for (int x : inst.cluster_naturals(ctx.cluster))
        for (int a : inst.augs_of(x))
            if (ctx.f->labels[static_cast<std::size_t>(a)] != ctx.f->labels[static_cast<std::size_t>(x)]) {
                part.R.push_back(a);
                ++r;
            }
    part.R_norm = n_aug > 0 ? Rational(r, n_aug) : Rational(0);
    return part;
}

double positive_gap(const Representation& g, const Representation& gp, const Instance& inst,
                    const LossParams& p) {
    p.check();
    Partition part = build_partition(g, gp, inst);
    double w = 1.0 / (static_cast<double>(inst.naturals().size()) *
                      static_cast<double>(inst.aug_set_size()));
    double diff = 0.0;  // E[g'(x).g'(x+)] - E[g(x).g(x+)]
    for (int x : inst.naturals()) {
        Vertex u = rep_vertex(g, inst, x);
        Vertex up = rep_vertex(gp, inst, x);
        for (int a : inst.augs_of(x))
            diff += w * (inner_product(up, rep_vertex(gp, inst, a)) -
                         inner_product(u, rep_vertex(g, inst, a)));
    }
    double gap = p.beta * diff;  // L+(g) - L+(g') with L+ = -beta E[...]
    double closed_form = 2.0 * p.beta * part.R_norm.to_double();
    if (std::abs(gap - closed_form) > 1e-12 * std::max(1.0, std::abs(closed_form)))
        throw std::logic_error("positive gap disagrees with 2*beta*||R||");
    return gap;
}

namespace {

// Uniformity contribution of anchors restricted to a set of natural images,
// under the full negative distribution of g.
double uniformity_over(const Representation& g, const Instance& inst, const LossParams& p,
                       const std::vector<int>& anchor_naturals, std::uint64_t term_cap) {
    int d = inst.dim();
    auto n_nat = static_cast<double>(inst.naturals().size());
    std::vector<double> vmass(std::size_t{1} << d, 0.0);
    for (int x : inst.naturals()) vmass[rep_vertex(g, inst, x).bits] += 1.0 / n_nat;

    std::size_t anchors_with_mass = 0;
    for (double m : vmass)
        if (m > 0.0) ++anchors_with_mass;
    double terms = static_cast<double>(anchors_with_mass) *
                   std::exp(log_factorial(p.ell + d) - log_factorial(p.ell) - log_factorial(d));
    if (terms > static_cast<double>(term_cap))
        throw CapExceeded("negative gap: term count exceeds cap");

    std::vector<std::vector<double>> profiles(std::size_t{1} << d);
    double w = 1.0 / (n_nat * static_cast<double>(inst.aug_set_size()));
    double acc = 0.0;
    for (int x : anchor_naturals) {
        Vertex u = rep_vertex(g, inst, x);
        auto& q = profiles[u.bits];
        if (q.empty()) {
            q.assign(static_cast<std::size_t>(d) + 1, 0.0);
            for (std::size_t v = 0; v < vmass.size(); ++v) {
                if (vmass[v] == 0.0) continue;
                int h = __builtin_popcount(static_cast<unsigned>(u.bits ^ static_cast<unsigned>(v)));
                q[static_cast<std::size_t>(h)] += vmass[v];
            }
        }
        for (int a : inst.augs_of(x)) {
            int ip = inner_product(u, rep_vertex(g, inst, a));
            acc += w * expected_log_denominator(q, p.ell, p.beta * ip, p.beta, d);
        }
    }
    return acc;
}

}  // namespace

NegativeGap negative_gap(const Representation& g, const Representation& gp, const Instance& inst,
                         const LossParams& p, std::uint64_t term_cap) {
    p.check();
    Partition part = build_partition(g, gp, inst);
    std::set<int> z_set(part.Z.begin(), part.Z.end());
    NegativeGap out;
    for (std::size_t v = 0; v < part.Q_v.size(); ++v) {
        std::vector<int> q_nat, e_nat;
        for (int x : part.Q_v[v])
            if (inst.image(x).natural) q_nat.push_back(x);
        for (int x : part.E_v[v])
            if (inst.image(x).natural) e_nat.push_back(x);
        if (q_nat.empty() && e_nat.empty()) continue;
        NegativeGap::VertexContribution c;
        c.vertex = static_cast<std::uint16_t>(v);
        if (!q_nat.empty())
            c.q_diff = uniformity_over(gp, inst, p, q_nat, term_cap) -
                       uniformity_over(g, inst, p, q_nat, term_cap);
        if (!e_nat.empty())
            c.e_diff = uniformity_over(gp, inst, p, e_nat, term_cap) -
                       uniformity_over(g, inst, p, e_nat, term_cap);
        c.q_in_Z = !part.Q_v[v].empty() &&
                   std::all_of(part.Q_v[v].begin(), part.Q_v[v].end(),
                               [&](int x) { return z_set.count(x) > 0; });
        out.total += c.q_diff + c.e_diff;
        out.per_vertex.push_back(c);
    }
    return out;
}

ClaimsReport claims_check(const Partition& part, const Representation& g,
                          const Representation& gp, const Instance& inst) {
    PairContext ctx = validate_pair(g, gp, inst);
    ClaimsReport rep;
    int n = inst.num_images();
    std::vector<Vertex> vg(static_cast<std::size_t>(n)), vgp(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        vg[static_cast<std::size_t>(x)] = rep_vertex(g, inst, x);
        vgp[static_cast<std::size_t>(x)] = rep_vertex(gp, inst, x);
    }

    rep.constant_on_E_v = true;
    for (const auto& ev : part.E_v) {
        for (std::size_t i = 1; i < ev.size(); ++i)
            if (vgp[static_cast<std::size_t>(ev[i])].bits != vgp[static_cast<std::size_t>(ev[0])].bits)
                rep.constant_on_E_v = false;
    }

    rep.preserved_within_E = true;
    for (int x : part.E)
        for (int y : part.E)
            if (inner_product(vgp[static_cast<std::size_t>(x)], vgp[static_cast<std::size_t>(y)]) !=
                inner_product(vg[static_cast<std::size_t>(x)], vg[static_cast<std::size_t>(y)]))
                rep.preserved_within_E = false;

    rep.shifted_E_Q = true;
    for (int x : part.E)
        for (int y : part.Q) {
            int before = inner_product(vg[static_cast<std::size_t>(x)], vg[static_cast<std::size_t>(y)]);
            int after = inner_product(vgp[static_cast<std::size_t>(x)], vgp[static_cast<std::size_t>(y)]);
            int coord_product = ctx.f->labels[static_cast<std::size_t>(x)] *
                                ctx.f->labels[static_cast<std::size_t>(y)];
            if (after - before != -2 * coord_product) rep.shifted_E_Q = false;
        }

    std::set<int> z_set(part.Z.begin(), part.Z.end());
    rep.Z_dichotomy = true;
    rep.empty_E_v_off_Z = true;
    for (std::size_t v = 0; v < part.Q_v.size(); ++v) {
        const auto& qv = part.Q_v[v];
        if (qv.empty()) continue;
        std::size_t in_z = 0;
        for (int x : qv) in_z += z_set.count(x);
        if (in_z != 0 && in_z != qv.size()) rep.Z_dichotomy = false;
        if (in_z == 0 && !part.E_v[v].empty()) rep.empty_E_v_off_Z = false;
    }

    rep.drop_two_on_Z_E = true;
    for (int x : part.Z)
        for (int y : part.E)
            if (inner_product(vgp[static_cast<std::size_t>(x)], vgp[static_cast<std::size_t>(y)]) !=
                inner_product(vg[static_cast<std::size_t>(x)], vg[static_cast<std::size_t>(y)]) - 2)
                rep.drop_two_on_Z_E = false;

    return rep;
}

Rational epsilon_min(const Representation& g, const Instance& inst) {
    auto n = static_cast<std::int64_t>(inst.num_images());
    bool found = false;
    Rational best;
    for (int j : g.coords) {
        const Classifier& f = inst.classifier(j);
        for (int c = 0; c < inst.num_clusters(); ++c) {
            if (!splits_cluster(f, inst, c)) continue;
            std::int64_t plus = 0, minus = 0;
            for (int x : inst.cluster_members(c)) {
                if (f.labels[static_cast<std::size_t>(x)] > 0) ++plus;
                else ++minus;
            }
            Rational p = Rational(2 * plus * minus) / Rational(n * n);
            if (!found || p < best) { found = true; best = p; }
        }
    }
    if (!found) throw ConfigError("epsilon undefined: no coordinate splits a cluster");
    return best;
}

Claim7Report claim7_check(const Instance& inst, const Representation& g, const Representation& gp) {
    DeltaRegularity dr = delta_regularity(inst);
    if (!dr.finite) throw ConfigError("claim 7 requires finite delta-regularity");
    Partition part = build_partition(g, gp, inst);
    Claim7Report rep;
    rep.delta = dr.value;
    rep.epsilon = epsilon_min(g, inst);
    rep.R_norm = part.R_norm;
    rep.E_norm_natural = part.E_norm_natural;
    rep.E_norm_augmented = part.E_norm_augmented;
    if (dr.value == Rational(0)) {
        rep.bound_E_natural = rep.bound_epsilon = true;  // vacuous at 1/delta = infinity
    } else {
        rep.bound_E_natural = rep.E_norm_natural * dr.value <= rep.R_norm;
        rep.bound_epsilon = rep.epsilon * dr.value <= Rational(6) * rep.R_norm;
    }
    rep.bound_E_augmented = rep.E_norm_augmented <= rep.E_norm_natural + rep.R_norm;
    return rep;
}

namespace {

GapCertificate certify_core(const Representation& g, const Instance& inst, const LossParams& p,
                            const CertifyConfig& cfg, bool weighted) {
    p.check();
    if (is_cluster_preserving(g, inst))
        throw ConfigError("representation is already cluster-preserving");
    if (!check_assumption_expressivity(inst).pass())
        throw ConfigError("classifier family is not closed under constant-on-cluster completions");
    DeltaRegularity dr = delta_regularity(inst);
    if (!dr.finite || dr.value < Rational(2, 5))
        throw ConfigError("instance is not 0.4-regular");

    int coord = -1, cluster = -1;
    for (int j = 0; j < inst.dim() && coord < 0; ++j) {
        const Classifier& f = inst.classifier(g.coords[static_cast<std::size_t>(j)]);
        for (int c = 0; c < inst.num_clusters(); ++c)
            if (splits_cluster(f, inst, c)) { coord = j; cluster = c; break; }
    }

    const Classifier& f = inst.classifier(g.coords[static_cast<std::size_t>(coord)]);
    ClusterPreservingPerturbation pert = make_cluster_preserving(f, cluster, inst);
    auto idx = inst.find_classifier(pert.classifier.labels);
    if (!idx) throw ConfigError("completion classifier missing from the closed family");
    Representation gp = g;
    gp.coords[static_cast<std::size_t>(coord)] = *idx;

    Partition part = build_partition(g, gp, inst);
    LossParams plain = p;
    plain.rho = 1.0;
    double pos = positive_gap(g, gp, inst, plain);
    if (weighted) pos *= p.rho;
    NegativeGap ng = negative_gap(g, gp, inst, plain, cfg.term_cap);

    GapCertificate cert;
    cert.coord = coord;
    cert.cluster = cluster;
    cert.sigma = pert.sigma;
    cert.delta = dr.value;
    cert.epsilon = epsilon_min(g, inst);
    cert.R_norm = part.R_norm;
    cert.positive_gap = pos;
    cert.negative_gap = ng.total;
    cert.improved = ng.total < pos;
    cert.beta = p.beta;
    cert.rho = weighted ? p.rho : 1.0;
    cert.ell = p.ell;

    // Near-uniformity classification of D_g across the constant grid; the
    // verdict above never depends on it.
    HypercubeDist D = induced_distribution(g, inst);
    int d = inst.dim();
    std::vector<double> grid = {1.0, 2.0, 4.0, 8.0, 16.0};
    if (std::find(grid.begin(), grid.end(), cfg.c_const) == grid.end())
        grid.push_back(cfg.c_const);
    std::sort(grid.begin(), grid.end());
    double eps = cert.epsilon.to_double();
    double two_d = std::ldexp(1.0, d);
    for (double c : grid) {
        NearUniformRow row;
        row.c = c;
        double hi = 10.0 / (c * d * two_d);
        double lo = eps / (100.0 * c * d * two_d * two_d);
        for (std::size_t v = 0; v < D.size(); ++v) {
            double m = D.mass(v).to_double();
            if (m >= hi) ++row.active;
            else if (m <= lo) ++row.negligible;
            else ++row.intermediate;
        }
        cert.near_uniform.push_back(row);
    }
    return cert;
}

}  // namespace

GapCertificate certify_not_minimizer(const Representation& g, const Instance& inst,
                                     const LossParams& p, const CertifyConfig& cfg) {
    return certify_core(g, inst, p, cfg, /*weighted=*/false);
}

GapCertificate certify_weighted(const Representation& g, const Instance& inst,
                                const LossParams& p, const CertifyConfig& cfg) {
    return certify_core(g, inst, p, cfg, /*weighted=*/true);
}

}  // namespace hclab
