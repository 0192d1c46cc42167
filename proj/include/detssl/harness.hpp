#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "detssl/gaussmix.hpp"
#include "detssl/synthdata.hpp"
#include "detssl/train.hpp"

namespace detssl::harness {

using Json = nlohmann::ordered_json;

/// Which synthetic task to generate, with its parameters.
struct DatasetSpec {
    std::string type;  // blobs | moons | attributes | gauss1d
    // blobs
    int num_classes = 4;
    int dims = 2;
    double separation = 3.0;
    // moons
    double noise = 0.1;
    // attributes
    std::string rules_file;           // path, or
    std::string rules_text;           // inline rule file content
    int clusters_per_valid_label = 1;
    // gauss1d
    gaussmix::GaussianMixture1D mix;
    // shared counts
    int n_labelled_per_class = 4;
    int n_unlabelled = 1000;
    int n_test = 1000;
};

struct ModelSpec {
    std::vector<int> hidden = {64, 64};
    net::Activation activation = net::Activation::ReLU;
    net::Head head = net::Head::Softmax;
};

/// One experiment: dataset x model x training protocol x seed list.
struct ExperimentConfig {
    std::string name = "run";
    DatasetSpec dataset;
    ModelSpec model;
    net::TrainConfig train;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string out_dir = "runs/out";

    /// Parsed rule set for attribute datasets / compiled-rule relaxations.
    std::shared_ptr<const logic::RuleSet> rules;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& cfg);

data::Dataset make_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

struct SeedResult {
    std::uint64_t seed = 0;
    double test_accuracy = 0.0;
    double train_accuracy = 0.0;
    double rule_violation_rate = 0.0;  // attribute tasks, test split
    double intermediate_fraction_unlabelled = 0.0;
    double final_mean_log_q = 0.0;
    std::vector<net::EpochMetrics> metrics;
    net::EvalResult eval_labelled, eval_unlabelled, eval_test;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<SeedResult> per_seed;
    double mean_test_accuracy = 0.0;
    double stderr_test_accuracy = 0.0;  // sample std dev / sqrt(num seeds)
    double mean_intermediate_fraction = 0.0;
    double mean_rule_violation_rate = 0.0;
    double wall_clock_seconds = 0.0;
};

/// Runs every seed (in `jobs` parallel workers) and aggregates.
RunReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// report.json with stable key order; wall clock is a separate field so
/// reports from identical configs differ in nothing else.
Json report_to_json(const RunReport& report);

/// Writes report.json plus per-seed metrics.csv and hist_<split>.csv under
/// config.out_dir. All writes are atomic (temp file + rename).
void write_report_files(const RunReport& report);

struct MethodRow {
    std::string name;
    double mean_accuracy = 0.0;
    double stderr_accuracy = 0.0;
    double mean_intermediate_fraction = 0.0;
    std::vector<double> per_seed_accuracy;
};

/// Runs each config on its own settings and aligns rows for comparison.
/// Throws ConfigError when datasets or seed lists differ.
std::vector<MethodRow> run_comparison(const std::vector<ExperimentConfig>& cfgs, int jobs,
                                      std::vector<RunReport>* reports = nullptr);
void write_comparison_csv(const std::vector<MethodRow>& rows, std::ostream& os);
void write_comparison_table(const std::vector<MethodRow>& rows, std::ostream& os);

/// Finite-difference verification of every loss gradient and the full
/// network loss for each (relaxation, head) pairing. Prints one line per
/// check with its max relative error; returns 0 iff all pass.
/// `inject_gradient_error` perturbs one analytic gradient so tests can
/// confirm failures are caught and named.
int run_gradcheck(std::ostream& os, double inject_gradient_error = 0.0);

/// CSV of theta, p(theta), p(theta,y=0), p(theta,y=1) on a uniform interior
/// grid, with the quadrature normalization in a header comment.
void write_density_csv(const gaussmix::GaussianMixture1D& mix, int grid_size,
                       std::ostream& os);

/// Prints the DNF, |V| and the valid vectors of a rule file.
/// Returns nonzero for an unsatisfiable rule set.
int compile_rules_report(const std::string& rule_file_text, std::ostream& os);

/// Mean and standard error (sample std dev / sqrt(n)).
std::pair<double, double> mean_stderr(const std::vector<double>& xs);

void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace detssl::harness
