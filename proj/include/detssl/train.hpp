#pragma once

#include <cstdint>
#include <vector>

#include "detssl/net.hpp"
#include "detssl/relaxations.hpp"
#include "detssl/synthdata.hpp"

namespace detssl::net {

/// All optimization hyperparameters for one run of the semi-supervised
/// objective: minimize
///   -(mean supervised log-likelihood) - lambda_eff * (mean log q(theta_u)),
/// lambda_eff = lambda_u * min(1, epoch / rampup_epochs).
struct TrainConfig {
    double lambda_u = 1.0;
    int rampup_epochs = 0;  // 0 = no ramp
    double learning_rate = 0.1;
    double momentum = 0.9;
    int epochs = 100;
    int batch_labelled = 32;
    int batch_unlabelled = 32;
    std::uint64_t seed = 1;
    bool apply_prior_to_labelled = false;
    relax::RelaxationSpec relaxation;

    double lambda_at(int epoch) const;
    void validate(Head head) const;  // head/relaxation compatibility included
};

struct Batch {
    Eigen::MatrixXd x;        // features x batch
    Eigen::MatrixXd targets;  // K x batch; empty for unlabelled batches
};

/// The minimized batch objective at a given epoch (for the ramp). The
/// unlabelled batch may be empty iff lambda_u == 0 or the ramp is still at
/// zero. Pass `grads` to accumulate dLoss/dweights.
double batch_loss(const Network& net, const Batch& labelled, const Eigen::MatrixXd& unlabelled_x,
                  const TrainConfig& cfg, int epoch, Gradients* grads = nullptr);

struct EpochMetrics {
    int epoch = 0;
    double train_accuracy = 0.0;  // labelled split
    double test_accuracy = 0.0;
    double supervised_loss = 0.0;   // mean NLL over the labelled split
    double unsupervised_loss = 0.0; // -mean log q over the unlabelled split
    double mean_log_q = 0.0;        // over unlabelled predictions
};

struct TrainResult {
    Network network;
    std::vector<EpochMetrics> metrics;
};

/// SGD with momentum over shuffled mini-batches; one labelled and one
/// unlabelled batch per step, cycling the smaller loader. Deterministic for
/// a fixed seed. Throws on a non-finite loss.
TrainResult train(Network net, const data::Dataset& ds, const TrainConfig& cfg);

inline constexpr int kHistogramBins = 50;

struct EvalResult {
    double accuracy = 0.0;
    std::size_t count = 0;
    /// Binned confidence assigned to the truth: theta at the true class
    /// (softmax) or per-attribute truth probability (sigmoid), 50 bins
    /// on [0,1].
    std::vector<std::int64_t> histogram = std::vector<std::int64_t>(kHistogramBins, 0);
    /// Fraction of confidence values strictly inside bins covering [0.1,0.9).
    double intermediate_fraction() const;
    /// Attribute tasks only: fraction of rounded predictions outside V.
    double rule_violation_rate = 0.0;
};

EvalResult evaluate(const Network& net, const std::vector<std::vector<double>>& xs,
                    const std::vector<std::uint32_t>& labels, data::LabelKind kind,
                    const logic::ValidSet* valid = nullptr);

Eigen::MatrixXd features_to_matrix(const std::vector<std::vector<double>>& xs);
Eigen::MatrixXd labels_to_targets(const std::vector<std::uint32_t>& ys, data::LabelKind kind,
                                  int num_outputs);

}  // namespace detssl::net
