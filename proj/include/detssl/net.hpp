#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace detssl::net {

enum class Activation { ReLU, Tanh };
enum class Head { Softmax, SigmoidPerAttribute };

/// A dense feed-forward network x -> theta. The softmax head emits a simplex
/// point (distinct classes); the sigmoid head emits independent per-attribute
/// probabilities (binary features).
struct Network {
    std::vector<int> sizes;  // input, hidden..., output K
    Activation activation = Activation::ReLU;
    Head head = Head::Softmax;
    std::vector<Eigen::MatrixXd> weights;  // [l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;

    int input_dim() const { return sizes.front(); }
    int output_dim() const { return sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }
    void validate() const;
};

/// Fan-in scaled uniform init, biases zero; deterministic per seed.
Network make_network(std::vector<int> sizes, Activation activation, Head head,
                     std::uint64_t seed);

/// Stored activations of one forward pass, columns = samples.
struct ForwardPass {
    std::vector<Eigen::MatrixXd> pre;   // z_l, one per layer
    std::vector<Eigen::MatrixXd> post;  // a_0 = x, then act(z_l); back() = head output

    const Eigen::MatrixXd& logits() const { return pre.back(); }
    const Eigen::MatrixXd& output() const { return post.back(); }
};

ForwardPass forward(const Network& net, const Eigen::MatrixXd& x);

/// Head outputs only (K x B).
Eigen::MatrixXd predict(const Network& net, const Eigen::MatrixXd& x);
std::vector<double> predict_one(const Network& net, std::span<const double> x);

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    static Gradients zeros_like(const Network& net);
    void add_scaled(const Gradients& other, double s);
};

/// Reverse accumulation from a gradient on the (pre-head) logits;
/// accumulates into `grads`.
void backprop_from_logits(const Network& net, const ForwardPass& fp,
                          const Eigen::MatrixXd& dlogits, Gradients* grads);

/// Chain rule through the head: dL/dtheta -> dL/dlogits.
Eigen::MatrixXd head_jacobian_vjp(Head head, const Eigen::MatrixXd& theta,
                                  const Eigen::MatrixXd& dtheta);

/// Mean negative log-likelihood of targets under the head, computed fused
/// from logits for stability. Targets: one-hot columns (softmax) or 0/1
/// attribute columns (sigmoid). Optionally emits dL/dlogits (already / B).
double supervised_nll(const Network& net, const ForwardPass& fp,
                      const Eigen::MatrixXd& targets, Eigen::MatrixXd* dlogits = nullptr);

/// Flat binary weight serialization: magic, layer-size header, little-endian
/// 64-bit floats.
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace detssl::net
