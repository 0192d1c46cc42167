#include "detssl/net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "detssl/errors.hpp"
#include "detssl/rng.hpp"

namespace detssl::net {

void Network::validate() const {
    if (sizes.size() < 2) throw ConfigError("network needs at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw ConfigError("network layer sizes must be >= 1");
    if (head == Head::Softmax && sizes.back() < 2)
        throw ConfigError("softmax head needs K >= 2 outputs");
    if (weights.size() != sizes.size() - 1 || biases.size() != weights.size())
        throw ConfigError("network weight/bias shape mismatch");
}

Network make_network(std::vector<int> sizes, Activation activation, Head head,
                     std::uint64_t seed) {
    Network net;
    net.sizes = std::move(sizes);
    net.activation = activation;
    net.head = head;
    CounterRng rng(derive_seed(seed, /*tag=*/0x11));
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        int rows = net.sizes[l + 1];
        int cols = net.sizes[l];
        Eigen::MatrixXd w(rows, cols);
        double bound = std::sqrt(3.0 / static_cast<double>(cols));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    net.validate();
    return net;
}

namespace {

Eigen::MatrixXd apply_activation(Activation act, const Eigen::MatrixXd& z) {
    if (act == Activation::ReLU) return z.cwiseMax(0.0);
    return z.array().tanh().matrix();
}

// act'(z) given z and act(z).
Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& z,
                                      const Eigen::MatrixXd& a) {
    if (act == Activation::ReLU)
        return (z.array() > 0.0).cast<double>().matrix();
    return (1.0 - a.array().square()).matrix();
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        Eigen::VectorXd col = z.col(j);
        double m = col.maxCoeff();
        // Floor at -700 keeps exp() out of the denormal range, which costs
        // two orders of magnitude in throughput on x86 once nets get
        // confident.
        Eigen::VectorXd e = (col.array() - m).max(-700.0).exp();
        out.col(j) = e / e.sum();
    }
    return out;
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

double log_sigmoid(double z) {
    return z < 0.0 ? z - std::log1p(std::exp(z)) : -std::log1p(std::exp(-z));
}

}  // namespace

ForwardPass forward(const Network& net, const Eigen::MatrixXd& x) {
    if (x.rows() != net.input_dim())
        throw std::invalid_argument("input has " + std::to_string(x.rows()) +
                                    " features, network expects " +
                                    std::to_string(net.input_dim()));
    ForwardPass fp;
    fp.post.push_back(x);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        Eigen::MatrixXd z =
            (net.weights[l] * fp.post.back()).colwise() + net.biases[l];
        bool last = l + 1 == net.layer_count();
        fp.pre.push_back(z);
        if (last) {
            fp.post.push_back(net.head == Head::Softmax ? softmax_columns(z) : sigmoid(z));
        } else {
            fp.post.push_back(apply_activation(net.activation, z));
        }
    }
    return fp;
}

Eigen::MatrixXd predict(const Network& net, const Eigen::MatrixXd& x) {
    return forward(net, x).output();
}

std::vector<double> predict_one(const Network& net, std::span<const double> x) {
    Eigen::MatrixXd col(x.size(), 1);
    for (std::size_t i = 0; i < x.size(); ++i) col(i, 0) = x[i];
    Eigen::MatrixXd out = predict(net, col);
    return std::vector<double>(out.data(), out.data() + out.rows());
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    return g;
}

void Gradients::add_scaled(const Gradients& other, double s) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += s * other.weights[l];
        biases[l] += s * other.biases[l];
    }
}

void backprop_from_logits(const Network& net, const ForwardPass& fp,
                          const Eigen::MatrixXd& dlogits, Gradients* grads) {
    Eigen::MatrixXd delta = dlogits;
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        grads->weights[l] += delta * fp.post[l].transpose();
        grads->biases[l] += delta.rowwise().sum();
        if (l > 0) {
            delta = (net.weights[l].transpose() * delta)
                        .cwiseProduct(activation_derivative(net.activation, fp.pre[l - 1],
                                                            fp.post[l]));
        }
    }
}

Eigen::MatrixXd head_jacobian_vjp(Head head, const Eigen::MatrixXd& theta,
                                  const Eigen::MatrixXd& dtheta) {
    if (head == Head::SigmoidPerAttribute)
        return dtheta.cwiseProduct(theta.cwiseProduct((1.0 - theta.array()).matrix()));
    // Softmax jacobian: diag(theta) - theta theta^T, per column.
    Eigen::MatrixXd out = theta.cwiseProduct(dtheta);
    Eigen::RowVectorXd inner = out.colwise().sum();
    out -= theta * inner.asDiagonal();
    return out;
}

double supervised_nll(const Network& net, const ForwardPass& fp,
                      const Eigen::MatrixXd& targets, Eigen::MatrixXd* dlogits) {
    const Eigen::MatrixXd& z = fp.logits();
    if (targets.rows() != z.rows() || targets.cols() != z.cols())
        throw std::invalid_argument("target shape does not match network output");
    Eigen::Index batch = z.cols();
    double loss = 0.0;
    if (net.head == Head::Softmax) {
        for (Eigen::Index j = 0; j < batch; ++j) {
            double m = z.col(j).maxCoeff();
            double lse = m + std::log((z.col(j).array() - m).exp().sum());
            loss -= targets.col(j).dot(z.col(j)) - lse;  // targets one-hot
        }
    } else {
        for (Eigen::Index j = 0; j < batch; ++j) {
            for (Eigen::Index k = 0; k < z.rows(); ++k) {
                double zz = z(k, j);
                double y = targets(k, j);
                loss -= y * log_sigmoid(zz) + (1.0 - y) * (log_sigmoid(zz) - zz);
            }
        }
    }
    loss /= static_cast<double>(batch);
    if (dlogits) *dlogits = (fp.output() - targets) / static_cast<double>(batch);
    return loss;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ostream& os, double d) {
    std::uint64_t v = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

constexpr char kMagic[8] = {'D', 'S', 'S', 'L', 'N', 'E', 'T', '1'};

}  // namespace

void save_network(const Network& net, const std::filesystem::path& path) {
    net.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 8);
    write_u32(os, static_cast<std::uint32_t>(net.sizes.size()));
    for (int s : net.sizes) write_u32(os, static_cast<std::uint32_t>(s));
    write_u32(os, net.activation == Activation::ReLU ? 0 : 1);
    write_u32(os, net.head == Head::Softmax ? 0 : 1);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Eigen::MatrixXd& w = net.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) write_f64(os, w(r, c));
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r)
            write_f64(os, net.biases[l](r));
    }
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error(path.string() + " is not a network weight file");
    Network net;
    std::uint32_t n = read_u32(is);
    if (n < 2 || n > 64) throw std::runtime_error("corrupt weight file header");
    for (std::uint32_t i = 0; i < n; ++i)
        net.sizes.push_back(static_cast<int>(read_u32(is)));
    net.activation = read_u32(is) == 0 ? Activation::ReLU : Activation::Tanh;
    net.head = read_u32(is) == 0 ? Head::Softmax : Head::SigmoidPerAttribute;
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        Eigen::MatrixXd w(net.sizes[l + 1], net.sizes[l]);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = read_f64(is);
        Eigen::VectorXd b(net.sizes[l + 1]);
        for (Eigen::Index r = 0; r < b.size(); ++r) b(r) = read_f64(is);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    if (!is) throw std::runtime_error("truncated weight file " + path.string());
    net.validate();
    return net;
}

}  // namespace detssl::net
