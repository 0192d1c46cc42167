#include "detssl/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/rng.hpp"

namespace detssl::data {

namespace {

constexpr double kPi = std::numbers::pi;

void check_counts(int n_labelled, int n_unlabelled, int n_test) {
    if (n_labelled < 1) throw ConfigError("labelled count must be >= 1");
    if (n_unlabelled < 0 || n_test < 0) throw ConfigError("split sizes must be >= 0");
}

std::vector<double> gaussian_point(const std::vector<double>& center, double sigma,
                                   CounterRng& rng) {
    std::vector<double> x(center.size());
    for (std::size_t d = 0; d < center.size(); ++d) x[d] = center[d] + sigma * rng.normal();
    return x;
}

double min_pairwise_distance(const std::vector<std::vector<double>>& centers) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < centers[i].size(); ++d) {
                double diff = centers[i][d] - centers[j][d];
                d2 += diff * diff;
            }
            best = std::min(best, std::sqrt(d2));
        }
    }
    return best;
}

// Deterministic center layout: regular polygon in 2-D, coordinate axes when
// they fit, otherwise seeded random directions rescaled to the requested
// minimum separation.
std::vector<std::vector<double>> blob_centers(int k, int dims, double separation,
                                              CounterRng& rng) {
    std::vector<std::vector<double>> centers(k, std::vector<double>(dims, 0.0));
    if (dims == 2) {
        double radius = k == 2 ? separation / 2.0
                               : separation / (2.0 * std::sin(kPi / static_cast<double>(k)));
        for (int c = 0; c < k; ++c) {
            double angle = 2.0 * kPi * c / static_cast<double>(k);
            centers[c][0] = radius * std::cos(angle);
            centers[c][1] = radius * std::sin(angle);
        }
        return centers;
    }
    if (dims >= k) {
        // Pairwise distance of scaled axes is s*sqrt(2); rescale to match.
        double scale = separation / std::sqrt(2.0);
        for (int c = 0; c < k; ++c) centers[c][c] = scale;
        return centers;
    }
    for (auto& c : centers)
        for (double& v : c) v = rng.normal();
    double d = min_pairwise_distance(centers);
    if (d <= 0.0) throw std::runtime_error("degenerate random center layout");
    for (auto& c : centers)
        for (double& v : c) v *= separation / d;
    return centers;
}

}  // namespace

void Dataset::validate() const {
    if (num_outputs < 1 || num_features < 1)
        throw ConfigError("dataset must declare output and feature widths");
    if (labelled_x.size() != labelled_y.size() || test_x.size() != test_y.size() ||
        unlabelled_x.size() != unlabelled_hidden_y.size())
        throw ConfigError("dataset split size mismatch");
}

Dataset gen_blobs(int num_classes, int dims, double separation, int n_labelled_per_class,
                  int n_unlabelled, int n_test, std::uint64_t seed) {
    if (num_classes < 2) throw ConfigError("blobs need K >= 2 classes");
    if (dims < 1) throw ConfigError("blobs need dims >= 1");
    if (!(separation > 0.0)) throw ConfigError("blob separation must be > 0");
    check_counts(n_labelled_per_class, n_unlabelled, n_test);

    CounterRng rng(derive_seed(seed, 0x21));
    auto centers = blob_centers(num_classes, dims, separation, rng);

    Dataset ds;
    ds.label_kind = LabelKind::ClassIndex;
    ds.num_outputs = num_classes;
    ds.num_features = dims;
    for (int c = 0; c < num_classes; ++c) {
        for (int i = 0; i < n_labelled_per_class; ++i) {
            ds.labelled_x.push_back(gaussian_point(centers[c], 1.0, rng));
            ds.labelled_y.push_back(static_cast<std::uint32_t>(c));
        }
    }
    for (int i = 0; i < n_unlabelled; ++i) {
        int c = static_cast<int>(rng.below(num_classes));
        ds.unlabelled_x.push_back(gaussian_point(centers[c], 1.0, rng));
        ds.unlabelled_hidden_y.push_back(static_cast<std::uint32_t>(c));
    }
    for (int i = 0; i < n_test; ++i) {
        int c = i % num_classes;  // balanced test split
        ds.test_x.push_back(gaussian_point(centers[c], 1.0, rng));
        ds.test_y.push_back(static_cast<std::uint32_t>(c));
    }
    return ds;
}

Dataset gen_two_moons(double noise, int n_labelled_per_class, int n_unlabelled,
                      int n_test, std::uint64_t seed) {
    if (noise < 0.0) throw ConfigError("moons noise must be >= 0");
    check_counts(n_labelled_per_class, n_unlabelled, n_test);

    CounterRng rng(derive_seed(seed, 0x22));
    // Class 0: upper half circle at the origin; class 1: lower half circle
    // offset by (1, 0.5).
    auto moon_point = [&](int c) {
        double t = kPi * rng.uniform01();
        std::vector<double> x(2);
        if (c == 0) {
            x[0] = std::cos(t);
            x[1] = std::sin(t);
        } else {
            x[0] = 1.0 - std::cos(t);
            x[1] = 0.5 - std::sin(t);
        }
        x[0] += noise * rng.normal();
        x[1] += noise * rng.normal();
        return x;
    };

    Dataset ds;
    ds.label_kind = LabelKind::ClassIndex;
    ds.num_outputs = 2;
    ds.num_features = 2;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < n_labelled_per_class; ++i) {
            ds.labelled_x.push_back(moon_point(c));
            ds.labelled_y.push_back(static_cast<std::uint32_t>(c));
        }
    }
    for (int i = 0; i < n_unlabelled; ++i) {
        int c = static_cast<int>(rng.below(2));
        ds.unlabelled_x.push_back(moon_point(c));
        ds.unlabelled_hidden_y.push_back(static_cast<std::uint32_t>(c));
    }
    for (int i = 0; i < n_test; ++i) {
        int c = i % 2;
        ds.test_x.push_back(moon_point(c));
        ds.test_y.push_back(static_cast<std::uint32_t>(c));
    }
    return ds;
}

Dataset gen_attribute_task(const logic::Formula& rules, int num_attributes,
                           int clusters_per_valid_label, int dims,
                           int n_labelled_per_valid, int n_unlabelled, int n_test,
                           std::uint64_t seed) {
    if (clusters_per_valid_label < 1)
        throw ConfigError("clusters_per_valid_label must be >= 1");
    if (dims < 1) throw ConfigError("attribute task needs dims >= 1");
    check_counts(n_labelled_per_valid, n_unlabelled, n_test);

    logic::ValidSet valid = logic::enumerate_valid(rules, num_attributes);
    if (valid.vectors.empty())
        throw UnsatisfiableRulesError("attribute task rules admit no valid label");

    CounterRng rng(derive_seed(seed, 0x23));
    int n_centers = static_cast<int>(valid.vectors.size()) * clusters_per_valid_label;

    // Rejection-sampled centers with a minimum mutual distance of 4 noise
    // units, so clusters are identifiable but the task stays nontrivial.
    const double min_dist = 4.0;
    const double box = 2.5 * min_dist * std::pow(static_cast<double>(n_centers), 1.0 / dims);
    std::vector<std::vector<double>> centers;
    std::vector<std::uint32_t> center_label;
    int attempts = 0;
    while (static_cast<int>(centers.size()) < n_centers) {
        if (++attempts > 100000)
            throw std::runtime_error("could not place attribute-task cluster centers");
        std::vector<double> cand(dims);
        for (double& v : cand) v = rng.uniform(-box, box);
        bool ok = true;
        for (const auto& c : centers) {
            double d2 = 0.0;
            for (int d = 0; d < dims; ++d) d2 += (cand[d] - c[d]) * (cand[d] - c[d]);
            if (d2 < min_dist * min_dist) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        std::size_t idx = centers.size();
        centers.push_back(std::move(cand));
        center_label.push_back(valid.vectors[idx % valid.vectors.size()]);
    }

    Dataset ds;
    ds.label_kind = LabelKind::AttributeVector;
    ds.num_outputs = num_attributes;
    ds.num_features = dims;

    auto centers_of_label = [&](std::uint32_t label) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < centers.size(); ++i)
            if (center_label[i] == label) idx.push_back(i);
        return idx;
    };

    for (std::uint32_t label : valid.vectors) {
        auto idx = centers_of_label(label);
        for (int i = 0; i < n_labelled_per_valid; ++i) {
            std::size_t c = idx[rng.below(idx.size())];
            ds.labelled_x.push_back(gaussian_point(centers[c], 1.0, rng));
            ds.labelled_y.push_back(label);
        }
    }
    for (int i = 0; i < n_unlabelled; ++i) {
        std::size_t c = rng.below(centers.size());
        ds.unlabelled_x.push_back(gaussian_point(centers[c], 1.0, rng));
        ds.unlabelled_hidden_y.push_back(center_label[c]);
    }
    for (int i = 0; i < n_test; ++i) {
        std::size_t c = static_cast<std::size_t>(i) % centers.size();
        ds.test_x.push_back(gaussian_point(centers[c], 1.0, rng));
        ds.test_y.push_back(center_label[c]);
    }
    return ds;
}

Dataset gen_gauss1d(const gaussmix::GaussianMixture1D& mix, int n_labelled_per_class,
                    int n_unlabelled, int n_test, std::uint64_t seed) {
    mix.validate();
    check_counts(n_labelled_per_class, n_unlabelled, n_test);

    CounterRng rng(derive_seed(seed, 0x24));
    Dataset ds;
    ds.label_kind = LabelKind::ClassIndex;
    ds.num_outputs = 2;
    ds.num_features = 1;
    for (int c = 0; c < 2; ++c) {
        double mu = c == 0 ? mix.mu0 : mix.mu1;
        for (int i = 0; i < n_labelled_per_class; ++i) {
            ds.labelled_x.push_back({mu + mix.sigma * rng.normal()});
            ds.labelled_y.push_back(static_cast<std::uint32_t>(c));
        }
    }
    auto rest = gaussmix::sample(mix, static_cast<std::size_t>(n_unlabelled) + n_test,
                                 derive_seed(seed, 0x25));
    for (int i = 0; i < n_unlabelled; ++i) {
        ds.unlabelled_x.push_back({rest[i].x});
        ds.unlabelled_hidden_y.push_back(static_cast<std::uint32_t>(rest[i].y));
    }
    for (int i = 0; i < n_test; ++i) {
        ds.test_x.push_back({rest[n_unlabelled + i].x});
        ds.test_y.push_back(static_cast<std::uint32_t>(rest[n_unlabelled + i].y));
    }
    return ds;
}

std::string format_label(std::uint32_t label, LabelKind kind, int num_outputs) {
    if (kind == LabelKind::ClassIndex) return std::to_string(label);
    return logic::format_vector(label, num_outputs);
}

namespace {

void write_rows(std::ostream& os, const std::vector<std::vector<double>>& xs,
                const std::vector<std::uint32_t>* ys, const Dataset& ds,
                const char* split) {
    char buf[64];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (double v : xs[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << buf << ',';
        }
        if (ys)
            os << format_label((*ys)[i], ds.label_kind, ds.num_outputs);
        else
            os << '?';
        os << ',' << split << '\n';
    }
}

}  // namespace

void write_csv(const Dataset& ds, std::ostream& os) {
    ds.validate();
    for (int d = 0; d < ds.num_features; ++d) os << 'f' << d << ',';
    os << "label,split\n";
    write_rows(os, ds.labelled_x, &ds.labelled_y, ds, "labelled");
    write_rows(os, ds.unlabelled_x, nullptr, ds, "unlabelled");
    write_rows(os, ds.test_x, &ds.test_y, ds, "test");
}

}  // namespace detssl::data
