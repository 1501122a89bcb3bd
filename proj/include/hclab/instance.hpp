#ifndef HCLAB_INSTANCE_HPP
#define HCLAB_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hclab/hypercube.hpp"
#include "hclab/rational.hpp"

namespace hclab {

struct ImageRecord {
    int id = 0;        // dense 0-based id after normalization
    int cluster = 0;   // dense 0-based cluster id
    bool natural = true;
    int parent = -1;   // dense id of the natural parent; -1 for naturals
};

// A binary classifier given extensionally: one +/-1 label per image.
struct Classifier {
    std::string name;
    std::vector<std::int8_t> labels;  // indexed by dense image id
};

// Finite image universe: clusters, disjoint equal-size augmentation sets, and
// an explicit classifier family. Immutable after construction; the constructor
// validates every structural invariant.
class Instance {
public:
    Instance(int dim, std::vector<ImageRecord> images, std::vector<Classifier> classifiers);

    int dim() const { return dim_; }
    int num_images() const { return static_cast<int>(images_.size()); }
    int num_clusters() const { return static_cast<int>(clusters_.size()); }
    int aug_set_size() const { return aug_set_size_; }
    const std::vector<ImageRecord>& images() const { return images_; }
    const ImageRecord& image(int id) const { return images_[static_cast<std::size_t>(id)]; }
    const std::vector<Classifier>& family() const { return classifiers_; }
    const Classifier& classifier(int f) const { return classifiers_[static_cast<std::size_t>(f)]; }

    const std::vector<int>& naturals() const { return naturals_; }
    const std::vector<int>& augmentations() const { return augmentations_; }
    const std::vector<int>& augs_of(int image) const { return augs_of_[static_cast<std::size_t>(image)]; }
    const std::vector<int>& cluster_members(int c) const { return clusters_[static_cast<std::size_t>(c)]; }
    const std::vector<int>& cluster_naturals(int c) const { return cluster_naturals_[static_cast<std::size_t>(c)]; }

    // Index of a classifier with these exact labels, if present.
    std::optional<int> find_classifier(const std::vector<std::int8_t>& labels) const;

private:
    int dim_;
    std::vector<ImageRecord> images_;
    std::vector<Classifier> classifiers_;
    std::vector<int> naturals_;
    std::vector<int> augmentations_;
    std::vector<std::vector<int>> augs_of_;
    std::vector<std::vector<int>> clusters_;
    std::vector<std::vector<int>> cluster_naturals_;
    std::unordered_map<std::string, int> table_index_;
    int aug_set_size_ = 0;
};

// Ordered list of d classifier indices; maps each image to a vertex.
struct Representation {
    std::vector<int> coords;
};

Vertex rep_vertex(const Representation& g, const Instance& inst, int image);

bool is_clean(const Classifier& f, const Instance& inst);
bool is_clean(const Representation& g, const Instance& inst);
bool is_cluster_preserving(const Representation& g, const Instance& inst);
bool splits_cluster(const Classifier& f, const Instance& inst, int cluster);

HypercubeDist induced_distribution(const Representation& g, const Instance& inst);
bool is_uniform(const Representation& g, const Instance& inst);

struct IntertwinedReport {
    // (classifier index, cluster id) pairs where the classifier splits the
    // cluster but separates no natural image from its own augmentations there.
    std::vector<std::pair<int, int>> violations;
    bool pass() const { return violations.empty(); }
};
IntertwinedReport check_assumption_intertwined(const Instance& inst);

struct ExpressivityReport {
    struct Missing { int f; int cluster; int sigma; };
    std::vector<Missing> missing;  // absent constant-on-cluster completions
    bool pass() const { return missing.empty(); }
};
ExpressivityReport check_assumption_expressivity(const Instance& inst);

// Least superset of the family closed under constant-on-cluster completions.
Instance close_family(const Instance& inst, std::size_t cap = 4096);

struct DeltaRegularity {
    bool finite = false;   // false <=> no classifier splits any cluster
    Rational value;        // the min ratio, when finite
    int argmin_f = -1;
    int argmin_cluster = -1;
    int argmin_sigma = 0;  // sign chosen by the measure-minimizing completion
};
DeltaRegularity delta_regularity(const Instance& inst);

// Serialization (schema documented in README): top-level keys dim / images /
// classifiers; unknown keys rejected.
Instance load_instance_file(const std::string& path);
Instance load_instance_text(const std::string& text);
std::string instance_to_text(const Instance& inst);
void save_instance_file(const Instance& inst, const std::string& path);

// FNV-1a hash of the canonical serialized form; embedded in run reports.
std::string instance_digest(const Instance& inst);

}  // namespace hclab

#endif
