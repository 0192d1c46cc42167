#include "detssl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/rng.hpp"
#include "detssl/rule_relaxation.hpp"

namespace detssl::net {

double TrainConfig::lambda_at(int epoch) const {
    if (rampup_epochs <= 0) return lambda_u;
    double ramp = static_cast<double>(epoch) / static_cast<double>(rampup_epochs);
    return lambda_u * std::min(1.0, ramp);
}

void TrainConfig::validate(Head head) const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must lie in [0,1)");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_labelled < 1 || batch_unlabelled < 1)
        throw ConfigError("batch sizes must be >= 1");
    if (lambda_u < 0.0) throw ConfigError("lambda_u must be >= 0");
    if (rampup_epochs < 0) throw ConfigError("rampup_epochs must be >= 0");
    relaxation.validate();
    // Table 1 rows assume a simplex; only compiled rules make sense per
    // attribute.
    if (head == Head::SigmoidPerAttribute && relaxation.kind != relax::Kind::CompiledRules)
        throw ConfigError(std::string("relaxation '") + relax::kind_name(relaxation.kind) +
                          "' requires a softmax head; the sigmoid head pairs only "
                          "with compiled rules");
}

namespace {

// Accumulates -scale * sum_j d log q(theta_j)/dtheta into dtheta and returns
// sum_j log q(theta_j).
double unsup_term(const relax::RelaxationSpec& spec, const Eigen::MatrixXd& theta,
                  double scale, Eigen::MatrixXd* dtheta) {
    double total = 0.0;
    std::vector<double> col(theta.rows());
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        for (Eigen::Index k = 0; k < theta.rows(); ++k) col[k] = theta(k, j);
        LossGrad lg = relax::unsup_loss_grad_unchecked(spec, col);
        total += lg.value;
        if (dtheta)
            for (Eigen::Index k = 0; k < theta.rows(); ++k)
                (*dtheta)(k, j) -= scale * lg.grad[k];
    }
    return total;
}

}  // namespace

double batch_loss(const Network& net, const Batch& labelled, const Eigen::MatrixXd& unlabelled_x,
                  const TrainConfig& cfg, int epoch, Gradients* grads) {
    cfg.validate(net.head);
    double lambda = cfg.lambda_at(epoch);
    if (labelled.x.cols() == 0) throw std::invalid_argument("labelled batch is empty");
    if (unlabelled_x.cols() == 0 && lambda != 0.0)
        throw std::invalid_argument("unlabelled batch is empty but lambda_eff > 0");

    double loss = 0.0;

    ForwardPass fp = forward(net, labelled.x);
    Eigen::MatrixXd dlogits;
    loss += supervised_nll(net, fp, labelled.targets, grads ? &dlogits : nullptr);

    if (cfg.apply_prior_to_labelled && lambda != 0.0) {
        const Eigen::MatrixXd& theta = fp.output();
        double scale = lambda / static_cast<double>(theta.cols());
        Eigen::MatrixXd dtheta = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
        double sum_log_q = unsup_term(cfg.relaxation, theta, scale, grads ? &dtheta : nullptr);
        loss -= lambda * sum_log_q / static_cast<double>(theta.cols());
        if (grads) dlogits += head_jacobian_vjp(net.head, theta, dtheta);
    }
    if (grads) backprop_from_logits(net, fp, dlogits, grads);

    if (lambda != 0.0 && unlabelled_x.cols() > 0) {
        ForwardPass ufp = forward(net, unlabelled_x);
        const Eigen::MatrixXd& theta = ufp.output();
        double scale = lambda / static_cast<double>(theta.cols());
        Eigen::MatrixXd dtheta = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
        double sum_log_q = unsup_term(cfg.relaxation, theta, scale, grads ? &dtheta : nullptr);
        loss -= lambda * sum_log_q / static_cast<double>(theta.cols());
        if (grads) {
            Eigen::MatrixXd udlogits = head_jacobian_vjp(net.head, theta, dtheta);
            backprop_from_logits(net, ufp, udlogits, grads);
        }
    }
    return loss;
}

Eigen::MatrixXd features_to_matrix(const std::vector<std::vector<double>>& xs) {
    if (xs.empty()) return {};
    Eigen::MatrixXd m(xs[0].size(), xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j)
        for (std::size_t i = 0; i < xs[j].size(); ++i) m(i, j) = xs[j][i];
    return m;
}

Eigen::MatrixXd labels_to_targets(const std::vector<std::uint32_t>& ys, data::LabelKind kind,
                                  int num_outputs) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(num_outputs, ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        if (kind == data::LabelKind::ClassIndex) {
            t(static_cast<Eigen::Index>(ys[j]), j) = 1.0;
        } else {
            for (int k = 0; k < num_outputs; ++k)
                if ((ys[j] >> k) & 1u) t(k, j) = 1.0;
        }
    }
    return t;
}

namespace {

// Endless shuffled index stream; reshuffles on wrap.
class Loader {
public:
    Loader(std::size_t n, CounterRng* rng) : rng_(rng), idx_(n) {
        std::iota(idx_.begin(), idx_.end(), std::size_t{0});
        if (rng_) rng_->shuffle(idx_);
    }

    std::vector<std::size_t> take(std::size_t count) {
        std::vector<std::size_t> out;
        out.reserve(count);
        while (out.size() < count) {
            if (pos_ == idx_.size()) {
                pos_ = 0;
                if (rng_) rng_->shuffle(idx_);
            }
            out.push_back(idx_[pos_++]);
        }
        return out;
    }

    std::size_t size() const { return idx_.size(); }

private:
    CounterRng* rng_;
    std::vector<std::size_t> idx_;
    std::size_t pos_ = 0;
};

Eigen::MatrixXd gather(const std::vector<std::vector<double>>& xs,
                       const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd m(xs.empty() ? 0 : xs[0].size(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        for (std::size_t i = 0; i < xs[idx[j]].size(); ++i) m(i, j) = xs[idx[j]][i];
    return m;
}

double accuracy_of(const Network& net, const std::vector<std::vector<double>>& xs,
                   const std::vector<std::uint32_t>& ys, data::LabelKind kind) {
    if (xs.empty()) return 0.0;
    Eigen::MatrixXd theta = predict(net, features_to_matrix(xs));
    std::size_t correct = 0;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        if (kind == data::LabelKind::ClassIndex) {
            Eigen::Index best;
            theta.col(j).maxCoeff(&best);
            correct += static_cast<std::uint32_t>(best) == ys[j];
        } else {
            std::uint32_t rounded = 0;
            for (Eigen::Index k = 0; k < theta.rows(); ++k)
                if (theta(k, j) >= 0.5) rounded |= 1u << k;
            correct += rounded == ys[j];
        }
    }
    return static_cast<double>(correct) / static_cast<double>(xs.size());
}

}  // namespace

TrainResult train(Network net, const data::Dataset& ds, const TrainConfig& cfg) {
    ds.validate();
    cfg.validate(net.head);
    net.validate();
    if (net.input_dim() != ds.num_features || net.output_dim() != ds.num_outputs)
        throw ConfigError("network shape does not match the dataset");
    bool use_unlabelled = cfg.lambda_u > 0.0 && !ds.unlabelled_x.empty();
    if (cfg.lambda_u > 0.0 && ds.unlabelled_x.empty())
        throw ConfigError("lambda_u > 0 but the dataset has no unlabelled split");

    CounterRng rng(derive_seed(cfg.seed, 0x31));
    Loader labelled_loader(ds.labelled_x.size(), &rng);
    Loader unlabelled_loader(use_unlabelled ? ds.unlabelled_x.size() : 0,
                             use_unlabelled ? &rng : nullptr);

    Eigen::MatrixXd all_labelled_x = features_to_matrix(ds.labelled_x);
    Eigen::MatrixXd all_labelled_t =
        labels_to_targets(ds.labelled_y, ds.label_kind, ds.num_outputs);
    Eigen::MatrixXd all_unlabelled_x = features_to_matrix(ds.unlabelled_x);

    Gradients velocity = Gradients::zeros_like(net);
    TrainResult result;

    std::size_t bl = static_cast<std::size_t>(cfg.batch_labelled);
    std::size_t bu = static_cast<std::size_t>(cfg.batch_unlabelled);
    std::size_t steps = (labelled_loader.size() + bl - 1) / bl;
    if (use_unlabelled)
        steps = std::max(steps, (unlabelled_loader.size() + bu - 1) / bu);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t s = 0; s < steps; ++s) {
            auto li = labelled_loader.take(std::min(bl, labelled_loader.size()));
            Batch lab;
            lab.x = gather(ds.labelled_x, li);
            lab.targets = Eigen::MatrixXd(ds.num_outputs, li.size());
            for (std::size_t j = 0; j < li.size(); ++j)
                lab.targets.col(j) = all_labelled_t.col(static_cast<Eigen::Index>(li[j]));

            Eigen::MatrixXd ux;
            if (use_unlabelled) {
                auto ui = unlabelled_loader.take(std::min(bu, unlabelled_loader.size()));
                ux = gather(ds.unlabelled_x, ui);
            }

            Gradients grads = Gradients::zeros_like(net);
            double loss = batch_loss(net, lab, ux, cfg, epoch, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", step " + std::to_string(s));

            for (std::size_t l = 0; l < net.layer_count(); ++l) {
                velocity.weights[l] =
                    cfg.momentum * velocity.weights[l] - cfg.learning_rate * grads.weights[l];
                velocity.biases[l] =
                    cfg.momentum * velocity.biases[l] - cfg.learning_rate * grads.biases[l];
                net.weights[l] += velocity.weights[l];
                net.biases[l] += velocity.biases[l];
            }
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_accuracy = accuracy_of(net, ds.labelled_x, ds.labelled_y, ds.label_kind);
        m.test_accuracy = accuracy_of(net, ds.test_x, ds.test_y, ds.label_kind);
        {
            ForwardPass fp = forward(net, all_labelled_x);
            m.supervised_loss = supervised_nll(net, fp, all_labelled_t, nullptr);
        }
        if (!ds.unlabelled_x.empty()) {
            Eigen::MatrixXd theta = predict(net, all_unlabelled_x);
            double sum_log_q = unsup_term(cfg.relaxation, theta, 0.0, nullptr);
            m.mean_log_q = sum_log_q / static_cast<double>(theta.cols());
            m.unsupervised_loss = -m.mean_log_q;
        }
        if (!std::isfinite(m.supervised_loss))
            throw std::runtime_error("training diverged: non-finite epoch loss at epoch " +
                                     std::to_string(epoch));
        result.metrics.push_back(m);
    }
    result.network = std::move(net);
    return result;
}

double EvalResult::intermediate_fraction() const {
    if (count == 0) return 0.0;
    std::int64_t mid = 0;
    // Bins 5..44 cover [0.1, 0.9) exactly with 50 uniform bins.
    for (int b = 5; b < 45; ++b) mid += histogram[b];
    std::int64_t total = 0;
    for (std::int64_t h : histogram) total += h;
    return total == 0 ? 0.0 : static_cast<double>(mid) / static_cast<double>(total);
}

EvalResult evaluate(const Network& net, const std::vector<std::vector<double>>& xs,
                    const std::vector<std::uint32_t>& labels, data::LabelKind kind,
                    const logic::ValidSet* valid) {
    EvalResult out;
    out.count = xs.size();
    if (xs.empty()) return out;
    Eigen::MatrixXd theta = predict(net, features_to_matrix(xs));

    auto bin_of = [](double v) {
        int b = static_cast<int>(v * kHistogramBins);
        return std::clamp(b, 0, kHistogramBins - 1);
    };

    std::size_t correct = 0;
    std::size_t violations = 0;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        if (kind == data::LabelKind::ClassIndex) {
            Eigen::Index best;
            theta.col(j).maxCoeff(&best);
            correct += static_cast<std::uint32_t>(best) == labels[j];
            out.histogram[bin_of(theta(static_cast<Eigen::Index>(labels[j]), j))] += 1;
        } else {
            std::uint32_t rounded = 0;
            for (Eigen::Index k = 0; k < theta.rows(); ++k) {
                if (theta(k, j) >= 0.5) rounded |= 1u << k;
                bool true_bit = (labels[j] >> k) & 1u;
                out.histogram[bin_of(true_bit ? theta(k, j) : 1.0 - theta(k, j))] += 1;
            }
            correct += rounded == labels[j];
            if (valid && !valid->contains(rounded)) ++violations;
        }
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(xs.size());
    if (valid) out.rule_violation_rate = static_cast<double>(violations) / static_cast<double>(xs.size());
    return out;
}

}  // namespace detssl::net
