#include "hclab/instance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hclab/errors.hpp"
#include "json.hpp"

namespace hclab {

namespace {

std::string table_key(const std::vector<std::int8_t>& labels) {
    std::string k(labels.size(), '\0');
    for (std::size_t i = 0; i < labels.size(); ++i) k[i] = labels[i] > 0 ? '+' : '-';
    return k;
}

}  // namespace

Instance::Instance(int dim, std::vector<ImageRecord> images, std::vector<Classifier> classifiers)
    : dim_(dim), images_(std::move(images)), classifiers_(std::move(classifiers)) {
    if (dim_ < 1 || dim_ > kMaxDim)
        throw InstanceError("dimension out of range [1,16]: " + std::to_string(dim_));
    if (images_.empty()) throw InstanceError("instance has no images");

    int n = static_cast<int>(images_.size());
    int max_cluster = -1;
    for (int i = 0; i < n; ++i) {
        const ImageRecord& r = images_[static_cast<std::size_t>(i)];
        if (r.id != i) throw InstanceError("image ids must be dense 0-based, got " + std::to_string(r.id));
        if (r.cluster < 0) throw InstanceError("negative cluster id at image " + std::to_string(i));
        max_cluster = std::max(max_cluster, r.cluster);
        if (r.natural != (r.parent < 0))
            throw InstanceError("parent present iff image is an augmentation: image " + std::to_string(i));
        if (!r.natural) {
            if (r.parent >= n) throw InstanceError("unknown parent at image " + std::to_string(i));
            const ImageRecord& p = images_[static_cast<std::size_t>(r.parent)];
            if (!p.natural) throw InstanceError("parent is not a natural image: image " + std::to_string(i));
            if (p.cluster != r.cluster)
                throw InstanceError("cross-cluster augmentation: image " + std::to_string(i));
        }
    }

    clusters_.assign(static_cast<std::size_t>(max_cluster) + 1, {});
    cluster_naturals_.assign(static_cast<std::size_t>(max_cluster) + 1, {});
    augs_of_.assign(static_cast<std::size_t>(n), {});
    for (const ImageRecord& r : images_) {
        clusters_[static_cast<std::size_t>(r.cluster)].push_back(r.id);
        if (r.natural) {
            naturals_.push_back(r.id);
            cluster_naturals_[static_cast<std::size_t>(r.cluster)].push_back(r.id);
        } else {
            augmentations_.push_back(r.id);
            augs_of_[static_cast<std::size_t>(r.parent)].push_back(r.id);
        }
    }
    for (std::size_t c = 0; c < clusters_.size(); ++c) {
        if (clusters_[c].empty())
            throw InstanceError("cluster ids must be dense 0-based: cluster " + std::to_string(c) + " empty");
        if (cluster_naturals_[c].empty())
            throw InstanceError("cluster without a natural image: cluster " + std::to_string(c));
    }

    aug_set_size_ = -1;
    for (int x : naturals_) {
        int sz = static_cast<int>(augs_of_[static_cast<std::size_t>(x)].size());
        if (aug_set_size_ < 0) aug_set_size_ = sz;
        else if (aug_set_size_ != sz)
            throw InstanceError("unequal augmentation sets: natural image " + std::to_string(x));
    }
    if (aug_set_size_ < 0) aug_set_size_ = 0;

    if (classifiers_.empty()) throw InstanceError("instance has no classifiers");
    for (std::size_t f = 0; f < classifiers_.size(); ++f) {
        const Classifier& cf = classifiers_[f];
        if (cf.labels.size() != images_.size())
            throw InstanceError("classifier not defined on every image: " + cf.name);
        for (std::int8_t v : cf.labels)
            if (v != 1 && v != -1)
                throw InstanceError("classifier label must be +1 or -1: " + cf.name);
        table_index_.emplace(table_key(cf.labels), static_cast<int>(f));
    }
}

std::optional<int> Instance::find_classifier(const std::vector<std::int8_t>& labels) const {
    auto it = table_index_.find(table_key(labels));
    if (it == table_index_.end()) return std::nullopt;
    return it->second;
}

Vertex rep_vertex(const Representation& g, const Instance& inst, int image) {
    Vertex v;
    v.dim = inst.dim();
    for (int j = 0; j < inst.dim(); ++j) {
        const Classifier& f = inst.classifier(g.coords[static_cast<std::size_t>(j)]);
        if (f.labels[static_cast<std::size_t>(image)] > 0) v.bits |= static_cast<std::uint16_t>(1u << j);
    }
    return v;
}

bool is_clean(const Classifier& f, const Instance& inst) {
    for (int x : inst.naturals())
        for (int a : inst.augs_of(x))
            if (f.labels[static_cast<std::size_t>(a)] != f.labels[static_cast<std::size_t>(x)]) return false;
    return true;
}

bool is_clean(const Representation& g, const Instance& inst) {
    for (int j : g.coords)
        if (!is_clean(inst.classifier(j), inst)) return false;
    return true;
}

bool splits_cluster(const Classifier& f, const Instance& inst, int cluster) {
    const auto& members = inst.cluster_members(cluster);
    std::int8_t first = f.labels[static_cast<std::size_t>(members.front())];
    for (int x : members)
        if (f.labels[static_cast<std::size_t>(x)] != first) return true;
    return false;
}

bool is_cluster_preserving(const Representation& g, const Instance& inst) {
    for (int c = 0; c < inst.num_clusters(); ++c) {
        const auto& members = inst.cluster_members(c);
        Vertex v0 = rep_vertex(g, inst, members.front());
        for (int x : members)
            if (rep_vertex(g, inst, x).bits != v0.bits) return false;
    }
    return true;
}

HypercubeDist induced_distribution(const Representation& g, const Instance& inst) {
    std::vector<Rational> mass(std::size_t{1} << inst.dim(), Rational(0));
    auto n = static_cast<std::int64_t>(inst.naturals().size());
    for (int x : inst.naturals())
        mass[rep_vertex(g, inst, x).bits] += Rational(1, n);
    return HypercubeDist(inst.dim(), std::move(mass));
}

bool is_uniform(const Representation& g, const Instance& inst) {
    HypercubeDist D = induced_distribution(g, inst);
    Rational u(1, static_cast<std::int64_t>(D.size()));
    for (std::size_t v = 0; v < D.size(); ++v)
        if (D.mass(v) != u) return false;
    return true;
}

IntertwinedReport check_assumption_intertwined(const Instance& inst) {
    IntertwinedReport rep;
    for (std::size_t f = 0; f < inst.family().size(); ++f) {
        const Classifier& cf = inst.classifier(static_cast<int>(f));
        for (int c = 0; c < inst.num_clusters(); ++c) {
            if (!splits_cluster(cf, inst, c)) continue;
            bool separates_pair = false;
            for (int x : inst.cluster_naturals(c)) {
                for (int a : inst.augs_of(x)) {
                    if (cf.labels[static_cast<std::size_t>(a)] != cf.labels[static_cast<std::size_t>(x)]) {
                        separates_pair = true;
                        break;
                    }
                }
                if (separates_pair) break;
            }
            if (!separates_pair) rep.violations.emplace_back(static_cast<int>(f), c);
        }
    }
    return rep;
}

namespace {

std::vector<std::int8_t> completion(const Classifier& f, const Instance& inst, int cluster, int sigma) {
    std::vector<std::int8_t> out = f.labels;
    for (int x : inst.cluster_members(cluster))
        out[static_cast<std::size_t>(x)] = static_cast<std::int8_t>(sigma);
    return out;
}

}  // namespace

ExpressivityReport check_assumption_expressivity(const Instance& inst) {
    ExpressivityReport rep;
    for (std::size_t f = 0; f < inst.family().size(); ++f) {
        const Classifier& cf = inst.classifier(static_cast<int>(f));
        for (int c = 0; c < inst.num_clusters(); ++c) {
            if (!splits_cluster(cf, inst, c)) continue;
            for (int sigma : {+1, -1}) {
                if (!inst.find_classifier(completion(cf, inst, c, sigma)))
                    rep.missing.push_back({static_cast<int>(f), c, sigma});
            }
        }
    }
    return rep;
}

Instance close_family(const Instance& inst, std::size_t cap) {
    std::vector<Classifier> family = inst.family();
    std::set<std::string> seen;
    for (const Classifier& f : family) seen.insert(table_key(f.labels));

    // Work on a scratch copy so splits_cluster can be queried against the
    // growing family via a rebuilt Instance only at the end.
    std::size_t head = 0;
    while (head < family.size()) {
        const Classifier f = family[head];  // copy: vector may reallocate
        ++head;
        for (int c = 0; c < inst.num_clusters(); ++c) {
            bool split = false;
            std::int8_t first = f.labels[static_cast<std::size_t>(inst.cluster_members(c).front())];
            for (int x : inst.cluster_members(c))
                if (f.labels[static_cast<std::size_t>(x)] != first) { split = true; break; }
            if (!split) continue;
            for (int sigma : {+1, -1}) {
                std::vector<std::int8_t> comp = completion(f, inst, c, sigma);
                std::string key = table_key(comp);
                if (seen.insert(key).second) {
                    if (family.size() >= cap)
                        throw CapExceeded("family closure exceeds cap " + std::to_string(cap));
                    family.push_back({f.name + "^(" + std::to_string(c) + "," +
                                          (sigma > 0 ? "+" : "-") + ")",
                                      std::move(comp)});
                }
            }
        }
    }
    return Instance(inst.dim(), inst.images(), std::move(family));
}

DeltaRegularity delta_regularity(const Instance& inst) {
    DeltaRegularity out;
    auto n_nat = static_cast<std::int64_t>(inst.naturals().size());
    auto n_aug = static_cast<std::int64_t>(inst.augmentations().size());
    for (std::size_t f = 0; f < inst.family().size(); ++f) {
        const Classifier& cf = inst.classifier(static_cast<int>(f));
        for (int c = 0; c < inst.num_clusters(); ++c) {
            if (!splits_cluster(cf, inst, c)) continue;
            std::int64_t nat_minus = 0, nat_plus = 0;
            for (int x : inst.cluster_naturals(c)) {
                if (cf.labels[static_cast<std::size_t>(x)] > 0) ++nat_plus;
                else ++nat_minus;
            }
            // Mass of naturals changed by the measure-minimizing completion
            // (ties resolved to sigma = +1).
            std::int64_t changed = nat_minus <= nat_plus ? nat_minus : nat_plus;
            int sigma = nat_minus <= nat_plus ? +1 : -1;
            if (changed == 0) continue;  // completion touches no natural mass: no constraint
            Rational delta_fc(changed, n_nat);

            std::int64_t split_augs = 0;
            for (int x : inst.cluster_naturals(c))
                for (int a : inst.augs_of(x))
                    if (cf.labels[static_cast<std::size_t>(a)] != cf.labels[static_cast<std::size_t>(x)])
                        ++split_augs;
            Rational num = n_aug > 0 ? Rational(split_augs, n_aug) : Rational(0);
            Rational ratio = num / delta_fc;
            if (!out.finite || ratio < out.value) {
                out.finite = true;
                out.value = ratio;
                out.argmin_f = static_cast<int>(f);
                out.argmin_cluster = c;
                out.argmin_sigma = sigma;
            }
        }
    }
    return out;
}

// ---- serialization ----

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw InstanceError("unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

Instance load_instance_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InstanceError(std::string("instance parse error: ") + e.what());
    }
    if (!doc.is_object()) throw InstanceError("instance document must be an object");
    reject_unknown_keys(doc, {"dim", "images", "classifiers"}, "document root");
    if (!doc.contains("dim") || !doc.contains("images") || !doc.contains("classifiers"))
        throw InstanceError("instance document needs keys dim, images, classifiers");

    int dim = doc.at("dim").get<int>();

    struct RawImage { std::int64_t id, cluster, parent; bool natural, has_parent; };
    std::vector<RawImage> raw;
    for (const json& im : doc.at("images")) {
        reject_unknown_keys(im, {"id", "cluster", "natural", "parent"}, "image record");
        RawImage r{};
        r.id = im.at("id").get<std::int64_t>();
        r.cluster = im.at("cluster").get<std::int64_t>();
        r.natural = im.at("natural").get<bool>();
        r.has_parent = im.contains("parent");
        r.parent = r.has_parent ? im.at("parent").get<std::int64_t>() : -1;
        raw.push_back(r);
    }

    // Normalize to dense 0-based ids, ordered by original id.
    std::sort(raw.begin(), raw.end(), [](const RawImage& a, const RawImage& b) { return a.id < b.id; });
    std::map<std::int64_t, int> id_map;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!id_map.emplace(raw[i].id, static_cast<int>(i)).second)
            throw InstanceError("duplicate image id " + std::to_string(raw[i].id));
    }
    std::map<std::int64_t, int> cluster_map;
    for (const RawImage& r : raw) cluster_map.emplace(r.cluster, 0);
    int next_c = 0;
    for (auto& [orig, dense] : cluster_map) dense = next_c++;

    std::vector<ImageRecord> images;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const RawImage& r = raw[i];
        ImageRecord rec;
        rec.id = static_cast<int>(i);
        rec.cluster = cluster_map.at(r.cluster);
        rec.natural = r.natural;
        if (r.natural != !r.has_parent)
            throw InstanceError("parent present iff image is an augmentation: image " + std::to_string(r.id));
        if (r.has_parent) {
            auto it = id_map.find(r.parent);
            if (it == id_map.end())
                throw InstanceError("unknown parent " + std::to_string(r.parent) + " at image " +
                                    std::to_string(r.id));
            rec.parent = it->second;
        }
        images.push_back(rec);
    }

    std::vector<Classifier> classifiers;
    for (const json& cl : doc.at("classifiers")) {
        reject_unknown_keys(cl, {"name", "labels"}, "classifier record");
        Classifier cf;
        cf.name = cl.at("name").get<std::string>();
        cf.labels.assign(images.size(), 0);
        const json& labels = cl.at("labels");
        for (auto it = labels.begin(); it != labels.end(); ++it) {
            std::int64_t orig = std::stoll(it.key());
            auto idx = id_map.find(orig);
            if (idx == id_map.end())
                throw InstanceError("classifier '" + cf.name + "' labels unknown image " + it.key());
            int v = it.value().get<int>();
            if (v != 1 && v != -1)
                throw InstanceError("classifier label must be +1 or -1: " + cf.name);
            cf.labels[static_cast<std::size_t>(idx->second)] = static_cast<std::int8_t>(v);
        }
        for (std::size_t i = 0; i < cf.labels.size(); ++i)
            if (cf.labels[i] == 0)
                throw InstanceError("classifier '" + cf.name + "' missing label for image " +
                                    std::to_string(raw[i].id));
        classifiers.push_back(std::move(cf));
    }

    return Instance(dim, std::move(images), std::move(classifiers));
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_instance_text(buf.str());
}

std::string instance_to_text(const Instance& inst) {
    json doc;
    doc["dim"] = inst.dim();
    json images = json::array();
    for (const ImageRecord& r : inst.images()) {
        json im;
        im["id"] = r.id;
        im["cluster"] = r.cluster;
        im["natural"] = r.natural;
        if (!r.natural) im["parent"] = r.parent;
        images.push_back(im);
    }
    doc["images"] = images;
    json classifiers = json::array();
    for (const Classifier& cf : inst.family()) {
        json cl;
        cl["name"] = cf.name;
        json labels = json::object();
        for (std::size_t i = 0; i < cf.labels.size(); ++i)
            labels[std::to_string(i)] = static_cast<int>(cf.labels[i]);
        cl["labels"] = labels;
        classifiers.push_back(cl);
    }
    doc["classifiers"] = classifiers;
    return doc.dump(2) + "\n";
}

void save_instance_file(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InstanceError("cannot write instance file: " + path);
    out << instance_to_text(inst);
}

std::string instance_digest(const Instance& inst) {
    std::string text = instance_to_text(inst);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace hclab
