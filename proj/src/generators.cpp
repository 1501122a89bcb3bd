#include "hclab/generators.hpp"

#include <set>
#include <string>

#include "hclab/errors.hpp"
#include "hclab/rng.hpp"

namespace hclab {

namespace {

std::string key_of(const std::vector<std::int8_t>& labels) {
    std::string k(labels.size(), '-');
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] > 0) k[i] = '+';
    return k;
}

std::vector<ImageRecord> balanced_images(int n_clusters, int naturals_per_cluster,
                                         int augs_per_natural) {
    std::vector<ImageRecord> images;
    int next = 0;
    for (int c = 0; c < n_clusters; ++c)
        for (int i = 0; i < naturals_per_cluster; ++i) {
            int nat = next++;
            images.push_back({nat, c, true, -1});
            for (int a = 0; a < augs_per_natural; ++a)
                images.push_back({next++, c, false, nat});
        }
    return images;
}

std::vector<std::int8_t> cluster_constant_table(const std::vector<ImageRecord>& images,
                                                std::uint32_t mask) {
    std::vector<std::int8_t> t;
    t.reserve(images.size());
    for (const ImageRecord& r : images)
        t.push_back(static_cast<std::int8_t>((mask >> r.cluster) & 1 ? +1 : -1));
    return t;
}

}  // namespace

Instance make_realizable_balanced(int d, int n_clusters, int naturals_per_cluster,
                                  int augs_per_natural, int n_nonclean, std::uint64_t seed) {
    if (d < 1 || d > 8) throw ConfigError("generator: d out of range [1,8]");
    if (n_clusters < 1 || n_clusters > 20) throw ConfigError("generator: cluster count out of range");
    if (n_clusters % (1 << d) != 0)
        throw ConfigError("generator: cluster count must be a multiple of 2^d for uniformity");
    if (naturals_per_cluster < 1 || augs_per_natural < 1)
        throw ConfigError("generator: need at least one natural and one augmentation");

    std::vector<ImageRecord> images = balanced_images(n_clusters, naturals_per_cluster,
                                                      augs_per_natural);
    std::vector<Classifier> family;
    std::set<std::string> seen;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n_clusters); ++mask) {
        Classifier f;
        f.name = "cc-" + std::to_string(mask);
        f.labels = cluster_constant_table(images, mask);
        seen.insert(key_of(f.labels));
        family.push_back(std::move(f));
    }

    Rng rng(seed);
    int added = 0, attempts = 0;
    std::vector<int> aug_ids;
    for (const ImageRecord& r : images)
        if (!r.natural) aug_ids.push_back(r.id);
    while (added < n_nonclean && attempts < 1000 * (n_nonclean + 1)) {
        ++attempts;
        auto mask = static_cast<std::uint32_t>(
            rng.uniform_int(0, (std::int64_t{1} << n_clusters) - 1));
        std::vector<std::int8_t> t = cluster_constant_table(images, mask);
        int a = aug_ids[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(aug_ids.size()) - 1))];
        t[static_cast<std::size_t>(a)] = static_cast<std::int8_t>(-t[static_cast<std::size_t>(a)]);
        if (!seen.insert(key_of(t)).second) continue;
        family.push_back({"nc-" + std::to_string(added), std::move(t)});
        ++added;
    }
    if (added < n_nonclean) throw ConfigError("generator: could not build enough distinct variants");
    return Instance(d, std::move(images), std::move(family));
}

Representation reference_uniform_rep(const Instance& inst) {
    Representation g;
    for (int j = 0; j < inst.dim(); ++j) {
        std::vector<std::int8_t> table;
        table.reserve(static_cast<std::size_t>(inst.num_images()));
        for (const ImageRecord& r : inst.images()) {
            int v = r.cluster % (1 << inst.dim());
            table.push_back(static_cast<std::int8_t>((v >> j) & 1 ? +1 : -1));
        }
        auto idx = inst.find_classifier(table);
        if (!idx) throw ConfigError("reference representation: coordinate table missing from family");
        g.coords.push_back(*idx);
    }
    return g;
}

Instance make_mixed_family(int d, int family_size, int n_nonclean, std::uint64_t seed) {
    if (d < 1 || d > 4) throw ConfigError("generator: d out of range [1,4]");
    int n_clusters = 1 << d;
    if (family_size < d + n_nonclean)
        throw ConfigError("generator: family size too small");
    std::vector<ImageRecord> images = balanced_images(n_clusters, 1, 1);

    std::vector<Classifier> family;
    std::set<std::string> seen;
    auto push = [&](std::string name, std::vector<std::int8_t> t) {
        if (!seen.insert(key_of(t)).second) return false;
        family.push_back({std::move(name), std::move(t)});
        return true;
    };
    // The identity map's bit tables first, so a uniform cluster-preserving
    // representation exists.
    for (int j = 0; j < d; ++j) {
        std::uint32_t mask = 0;
        for (int c = 0; c < n_clusters; ++c)
            if ((c >> j) & 1) mask |= 1u << c;
        push("bit-" + std::to_string(j), cluster_constant_table(images, mask));
    }
    Rng rng(seed);
    int guard = 0;
    while (static_cast<int>(family.size()) < family_size - n_nonclean && ++guard < 10000) {
        auto mask = static_cast<std::uint32_t>(rng.uniform_int(0, (1 << n_clusters) - 1));
        push("cc-" + std::to_string(mask), cluster_constant_table(images, mask));
    }
    while (static_cast<int>(family.size()) < family_size && ++guard < 10000) {
        std::vector<std::int8_t> t;
        for (std::size_t i = 0; i < images.size(); ++i)
            t.push_back(static_cast<std::int8_t>(rng.uniform_int(0, 1) ? +1 : -1));
        bool nonclean = false;
        for (const ImageRecord& r : images)
            if (!r.natural &&
                t[static_cast<std::size_t>(r.id)] != t[static_cast<std::size_t>(r.parent)])
                nonclean = true;
        if (!nonclean) continue;
        push("nc-" + std::to_string(guard), std::move(t));
    }
    if (static_cast<int>(family.size()) != family_size)
        throw ConfigError("generator: could not reach requested family size");
    return Instance(d, std::move(images), std::move(family));
}

AgnosticToy make_agnostic_toy(int d, std::uint64_t seed) {
    if (d < 1 || d > 3) throw ConfigError("agnostic toy: d out of range [1,3]");
    int n_vertices = 1 << d;
    int s = 2 + static_cast<int>(seed % 2);  // naturals per cluster side
    int m = 2;                               // augmentations per natural

    // Cluster 0 straddles vertices 0 and 1; clusters c >= 1 sit at vertex c.
    std::vector<ImageRecord> images;
    std::vector<std::uint16_t> home;  // vertex giving coordinates j >= 1 (and j=0 for naturals)
    std::vector<bool> stray;          // B-side membership: f_0 splits these augs
    int next = 0;
    auto add_natural = [&](int c, std::uint16_t v, bool b_side) {
        int nat = next++;
        images.push_back({nat, c, true, -1});
        home.push_back(v);
        stray.push_back(false);
        for (int a = 0; a < m; ++a) {
            images.push_back({next++, c, false, nat});
            home.push_back(v);
            stray.push_back(b_side);
        }
    };
    for (int i = 0; i < s; ++i) add_natural(0, 0, false);
    for (int i = 0; i < s; ++i) add_natural(0, 1, true);
    for (int c = 1; c < n_vertices; ++c)
        for (int i = 0; i < s; ++i) add_natural(c, static_cast<std::uint16_t>(c), false);

    std::vector<Classifier> family;
    for (int j = 0; j < d; ++j) {
        Classifier f;
        f.name = "coord-" + std::to_string(j);
        for (std::size_t i = 0; i < images.size(); ++i) {
            bool bit = (home[i] >> j) & 1;
            if (j == 0 && stray[i]) bit = !bit;  // split augmentations of the B side
            f.labels.push_back(static_cast<std::int8_t>(bit ? +1 : -1));
        }
        family.push_back(std::move(f));
    }

    Instance base(d, std::move(images), std::move(family));
    AgnosticToy out{close_family(base), Representation{}};
    for (int j = 0; j < d; ++j) out.g.coords.push_back(j);
    return out;
}

AgnosticToy make_random_agnostic(int d, std::uint64_t seed) {
    if (d < 1 || d > 4) throw ConfigError("random agnostic: d out of range [1,4]");
    Rng rng(seed);
    int n_clusters = static_cast<int>(rng.uniform_int(2, 4));
    int npc = static_cast<int>(rng.uniform_int(1, 3));
    int m = static_cast<int>(rng.uniform_int(1, 2));
    std::vector<ImageRecord> images = balanced_images(n_clusters, npc, m);

    std::vector<Classifier> family;
    for (int j = 0; j < d; ++j) {
        auto mask = static_cast<std::uint32_t>(rng.uniform_int(0, (1 << n_clusters) - 1));
        family.push_back({"base-" + std::to_string(j), cluster_constant_table(images, mask)});
    }

    // Make coordinate 0 split one cluster: flip one augmentation (keeping the
    // intertwined assumption intact), sometimes also a non-parent natural.
    int c0 = static_cast<int>(rng.uniform_int(0, n_clusters - 1));
    std::vector<int> c0_augs, c0_nats;
    for (const ImageRecord& r : images)
        if (r.cluster == c0) (r.natural ? c0_nats : c0_augs).push_back(r.id);
    int a = c0_augs[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(c0_augs.size()) - 1))];
    auto& f0 = family[0].labels;
    f0[static_cast<std::size_t>(a)] = static_cast<std::int8_t>(-f0[static_cast<std::size_t>(a)]);
    if (c0_nats.size() >= 2 && rng.uniform_int(0, 1) == 1) {
        int parent = images[static_cast<std::size_t>(a)].parent;
        int x2;
        do {
            x2 = c0_nats[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(c0_nats.size()) - 1))];
        } while (x2 == parent);
        f0[static_cast<std::size_t>(x2)] = static_cast<std::int8_t>(-f0[static_cast<std::size_t>(x2)]);
    }

    Instance base(d, std::move(images), std::move(family));
    AgnosticToy out{close_family(base), Representation{}};
    for (int j = 0; j < d; ++j) out.g.coords.push_back(j);
    return out;
}

}  // namespace hclab
