#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "detssl/errors.hpp"
#include "detssl/harness.hpp"
#include "detssl/quadrature.hpp"
#include "detssl/rng.hpp"
#include "detssl/rule_relaxation.hpp"

namespace detssl::harness {

namespace {

std::vector<double> random_interior_simplex(int k, CounterRng& rng) {
    // Dirichlet(1) blended with uniform keeps components away from the
    // boundary, where central differences degrade.
    std::vector<double> v(k);
    double sum = 0.0;
    for (double& x : v) {
        x = -std::log(rng.uniform01());
        sum += x;
    }
    for (double& x : v) x = 0.8 * (x / sum) + 0.2 / k;
    return v;
}

std::vector<double> random_box_point(int k, CounterRng& rng) {
    std::vector<double> v(k);
    for (double& x : v) x = rng.uniform(0.1, 0.9);
    return v;
}

double vector_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double denom = std::sqrt(na) + std::sqrt(nb);
    if (denom < 1e-12) return 0.0;
    return std::sqrt(diff) / denom;
}

// Central finite differences of a scalar function of a point.
std::vector<double> finite_diff(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double orig = x[i];
        x[i] = orig + h;
        double up = f(x);
        x[i] = orig - h;
        double down = f(x);
        x[i] = orig;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

struct CheckLine {
    std::string name;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    bool pass() const { return max_rel_err < tolerance; }
};

CheckLine pointwise_check(const std::string& name, const relax::RelaxationSpec& spec,
                          int k, bool simplex, double inject, CounterRng& rng) {
    CheckLine line{name, 0.0, 1e-4};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> theta =
            simplex ? random_interior_simplex(k, rng) : random_box_point(k, rng);
        LossGrad lg = relax::unsup_loss_grad(spec, theta);
        if (inject != 0.0) lg.grad[0] += inject;
        auto value_of = [&spec](const std::vector<double>& t) {
            return relax::unsup_loss_grad(spec, t).value;
        };
        std::vector<double> fd = finite_diff(value_of, theta, 1e-6);
        line.max_rel_err = std::max(line.max_rel_err, vector_rel_err(lg.grad, fd));
    }
    return line;
}

struct NetFixture {
    net::Network network;
    net::Batch labelled;
    Eigen::MatrixXd unlabelled;
};

NetFixture make_net_fixture(net::Head head, int k, CounterRng& rng) {
    NetFixture fx;
    fx.network = net::make_network({2, 16, 16, k}, net::Activation::Tanh, head, rng.next_u64());
    int nl = 8, nu = 8;
    fx.labelled.x = Eigen::MatrixXd(2, nl);
    fx.labelled.targets = Eigen::MatrixXd::Zero(k, nl);
    for (int j = 0; j < nl; ++j) {
        fx.labelled.x(0, j) = rng.normal();
        fx.labelled.x(1, j) = rng.normal();
        if (head == net::Head::Softmax) {
            fx.labelled.targets(static_cast<int>(rng.below(k)), j) = 1.0;
        } else {
            for (int b = 0; b < k; ++b) fx.labelled.targets(b, j) = rng.below(2) ? 1.0 : 0.0;
        }
    }
    fx.unlabelled = Eigen::MatrixXd(2, nu);
    for (int j = 0; j < nu; ++j) {
        fx.unlabelled(0, j) = rng.normal();
        fx.unlabelled(1, j) = rng.normal();
    }
    return fx;
}

std::vector<double*> parameter_view(net::Network& n) {
    std::vector<double*> ps;
    for (std::size_t l = 0; l < n.layer_count(); ++l) {
        for (Eigen::Index i = 0; i < n.weights[l].size(); ++i)
            ps.push_back(n.weights[l].data() + i);
        for (Eigen::Index i = 0; i < n.biases[l].size(); ++i)
            ps.push_back(n.biases[l].data() + i);
    }
    return ps;
}

CheckLine network_check(const std::string& name, net::Head head, int k,
                        const relax::RelaxationSpec& spec, bool prior_on_labelled,
                        CounterRng& rng) {
    CheckLine line{name, 0.0, 1e-3};
    NetFixture fx = make_net_fixture(head, k, rng);
    net::TrainConfig cfg;
    cfg.lambda_u = 1.0;
    cfg.rampup_epochs = 0;
    cfg.relaxation = spec;
    cfg.apply_prior_to_labelled = prior_on_labelled;

    net::Gradients grads = net::Gradients::zeros_like(fx.network);
    net::batch_loss(fx.network, fx.labelled, fx.unlabelled, cfg, 0, &grads);

    std::vector<double> analytic;
    for (std::size_t l = 0; l < fx.network.layer_count(); ++l) {
        for (Eigen::Index i = 0; i < grads.weights[l].size(); ++i)
            analytic.push_back(*(grads.weights[l].data() + i));
        for (Eigen::Index i = 0; i < grads.biases[l].size(); ++i)
            analytic.push_back(*(grads.biases[l].data() + i));
    }

    std::vector<double*> params = parameter_view(fx.network);
    const double h = 1e-5;
    std::vector<double> fd(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        double orig = *params[i];
        *params[i] = orig + h;
        double up = net::batch_loss(fx.network, fx.labelled, fx.unlabelled, cfg, 0);
        *params[i] = orig - h;
        double down = net::batch_loss(fx.network, fx.labelled, fx.unlabelled, cfg, 0);
        *params[i] = orig;
        fd[i] = (up - down) / (2.0 * h);
    }
    line.max_rel_err = vector_rel_err(analytic, fd);
    return line;
}

std::shared_ptr<const logic::CompiledRelaxation> fixture_rules(logic::GFunction g) {
    logic::RuleSet rules = logic::parse_rule_file(
        "attrs: a, b, c\n"
        "a -> !b\n"
        "a | b | c\n");
    logic::ValidSet valid = logic::enumerate_valid(*rules.formula, 3);
    return std::make_shared<const logic::CompiledRelaxation>(
        logic::CompiledRelaxation::from_valid_set(valid, g));
}

}  // namespace

int run_gradcheck(std::ostream& os, double inject_gradient_error) {
    CounterRng rng(0xD55Eu);
    std::vector<CheckLine> lines;

    relax::RelaxationSpec spec;
    spec.kind = relax::Kind::Entropy;
    lines.push_back(pointwise_check("pointwise entropy/softmax", spec, 4, true,
                                    inject_gradient_error, rng));
    spec.kind = relax::Kind::MutualExclusivity;
    lines.push_back(pointwise_check("pointwise exclusivity/softmax", spec, 4, true, 0.0, rng));
    spec.kind = relax::Kind::PseudoLabel;
    lines.push_back(pointwise_check("pointwise pseudo_label/softmax", spec, 4, true, 0.0, rng));
    spec.kind = relax::Kind::DetPrior;
    spec.temperature = 10.0;
    lines.push_back(pointwise_check("pointwise dp/softmax", spec, 4, true, 0.0, rng));

    relax::RelaxationSpec rules_id;
    rules_id.kind = relax::Kind::CompiledRules;
    rules_id.rules = fixture_rules({logic::GFunction::Kind::Identity, 1.0});
    lines.push_back(pointwise_check("pointwise rules(identity)/sigmoid", rules_id, 3, false,
                                    0.0, rng));

    relax::RelaxationSpec rules_pow;
    rules_pow.kind = relax::Kind::CompiledRules;
    rules_pow.temperature = 10.0;
    rules_pow.rules = fixture_rules({logic::GFunction::Kind::Power, 10.0});
    lines.push_back(pointwise_check("pointwise rules(power T=10)/sigmoid", rules_pow, 3, false,
                                    0.0, rng));

    spec.kind = relax::Kind::Entropy;
    lines.push_back(network_check("network entropy/softmax", net::Head::Softmax, 3, spec,
                                  false, rng));
    spec.kind = relax::Kind::MutualExclusivity;
    lines.push_back(network_check("network exclusivity/softmax", net::Head::Softmax, 3, spec,
                                  false, rng));
    spec.kind = relax::Kind::PseudoLabel;
    lines.push_back(network_check("network pseudo_label/softmax", net::Head::Softmax, 3, spec,
                                  false, rng));
    spec.kind = relax::Kind::DetPrior;
    lines.push_back(
        network_check("network dp/softmax", net::Head::Softmax, 3, spec, false, rng));
    lines.push_back(network_check("network dp/softmax+labelled-prior", net::Head::Softmax, 3,
                                  spec, true, rng));
    lines.push_back(network_check("network rules/softmax", net::Head::Softmax, 3, rules_pow,
                                  false, rng));
    lines.push_back(network_check("network rules/sigmoid", net::Head::SigmoidPerAttribute, 3,
                                  rules_pow, false, rng));

    bool all_pass = true;
    for (const CheckLine& line : lines) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-42s max rel err %.3e  (tol %.0e)  %s",
                      line.name.c_str(), line.max_rel_err, line.tolerance,
                      line.pass() ? "PASS" : "FAIL");
        os << buf << '\n';
        all_pass = all_pass && line.pass();
    }
    return all_pass ? 0 : 1;
}

void write_density_csv(const gaussmix::GaussianMixture1D& mix, int grid_size,
                       std::ostream& os) {
    mix.validate();
    if (grid_size < 2) throw ConfigError("density grid size must be >= 2");
    double normalization = gaussmix::theta_density_mass(mix, 0.0, 1.0, 1e-8);
    char buf[200];
    std::snprintf(buf, sizeof buf, "# normalization %.12f\n", normalization);
    os << buf;
    os << "theta,p_theta,p_theta_y0,p_theta_y1\n";
    for (int i = 0; i < grid_size; ++i) {
        double theta = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_size);
        double j0 = gaussmix::p_theta_joint(theta, 0, mix);
        double j1 = gaussmix::p_theta_joint(theta, 1, mix);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", theta, j0 + j1, j0, j1);
        os << buf;
    }
}

int compile_rules_report(const std::string& rule_file_text, std::ostream& os) {
    logic::RuleSet rules = logic::parse_rule_file(rule_file_text);
    int k = static_cast<int>(rules.attributes.size());
    logic::DnfForm dnf = to_dnf(*rules.formula, k);
    os << "attributes:";
    for (const std::string& a : rules.attributes) os << ' ' << a;
    os << "\ndnf: " << dnf_to_string(dnf, rules.attributes) << '\n';
    logic::ValidSet valid = logic::enumerate_valid(*rules.formula, k);
    os << "|V| = " << valid.vectors.size() << '\n';
    if (valid.vectors.empty()) {
        os << "empty valid set\n";
        return 1;
    }
    for (std::uint32_t v : valid.vectors)
        os << logic::format_vector(v, k) << '\n';
    return 0;
}

}  // namespace detssl::harness
