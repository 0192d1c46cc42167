#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "detssl/gaussmix.hpp"
#include "detssl/logic.hpp"

namespace detssl::data {

enum class LabelKind { ClassIndex, AttributeVector };

/// A labelled/unlabelled/test split. Labels are encoded as a class index or,
/// for attribute tasks, a bitmask with bit k = attribute k. The true labels
/// of the unlabelled split are retained for evaluation only.
struct Dataset {
    LabelKind label_kind = LabelKind::ClassIndex;
    int num_outputs = 0;   // K: classes or attributes
    int num_features = 0;

    std::vector<std::vector<double>> labelled_x;
    std::vector<std::uint32_t> labelled_y;
    std::vector<std::vector<double>> unlabelled_x;
    std::vector<std::uint32_t> unlabelled_hidden_y;
    std::vector<std::vector<double>> test_x;
    std::vector<std::uint32_t> test_y;

    void validate() const;
};

/// K isotropic unit-variance Gaussian blobs. For dims == 2 the means sit on a
/// regular polygon with adjacent-mean distance `separation`; otherwise on
/// scaled coordinate axes / seeded random directions with the same minimum
/// pairwise distance. Labels are deterministic by construction.
Dataset gen_blobs(int num_classes, int dims, double separation, int n_labelled_per_class,
                  int n_unlabelled, int n_test, std::uint64_t seed);

/// Interleaved half-circles with Gaussian noise; K = 2.
Dataset gen_two_moons(double noise, int n_labelled_per_class, int n_unlabelled,
                      int n_test, std::uint64_t seed);

/// Multi-attribute clusters: every valid label under `rules` receives
/// `clusters_per_valid_label` cluster centers; all emitted labels satisfy the
/// rules. Throws UnsatisfiableRulesError when the valid set is empty.
Dataset gen_attribute_task(const logic::Formula& rules, int num_attributes,
                           int clusters_per_valid_label, int dims,
                           int n_labelled_per_valid, int n_unlabelled, int n_test,
                           std::uint64_t seed);

/// 1-D two-Gaussian task; wraps gaussmix::sample with stratified labelled
/// and unstratified unlabelled/test splits.
Dataset gen_gauss1d(const gaussmix::GaussianMixture1D& mix, int n_labelled_per_class,
                    int n_unlabelled, int n_test, std::uint64_t seed);

/// One row per point: features..., label or '?', split tag.
void write_csv(const Dataset& ds, std::ostream& os);

std::string format_label(std::uint32_t label, LabelKind kind, int num_outputs);

}  // namespace detssl::data
