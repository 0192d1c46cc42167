// Python bindings for the main operations: Table-1 losses, the 1-D mixture
// density machinery, rule parsing/compilation, dataset generators and the
// training loop.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include <sstream>

#include "detssl/gaussmix.hpp"
#include "detssl/harness.hpp"
#include "detssl/logic.hpp"
#include "detssl/prob.hpp"
#include "detssl/relaxations.hpp"
#include "detssl/rule_relaxation.hpp"
#include "detssl/synthdata.hpp"
#include "detssl/train.hpp"

namespace py = pybind11;
using namespace detssl;

namespace {

relax::RelaxationSpec make_spec(const std::string& kind, double temperature,
                                const std::string& g, const std::string& rules_text) {
    relax::RelaxationSpec spec;
    spec.temperature = temperature;
    if (kind == "entropy") {
        spec.kind = relax::Kind::Entropy;
    } else if (kind == "exclusivity") {
        spec.kind = relax::Kind::MutualExclusivity;
    } else if (kind == "pseudo_label") {
        spec.kind = relax::Kind::PseudoLabel;
    } else if (kind == "dp") {
        spec.kind = relax::Kind::DetPrior;
    } else if (kind == "rules") {
        spec.kind = relax::Kind::CompiledRules;
        logic::RuleSet rules = logic::parse_rule_file(rules_text);
        logic::ValidSet valid = logic::enumerate_valid(
            *rules.formula, static_cast<int>(rules.attributes.size()));
        logic::GFunction gf;
        if (g == "identity") {
            gf.kind = logic::GFunction::Kind::Identity;
        } else {
            gf.kind = logic::GFunction::Kind::Power;
            gf.temperature = temperature;
        }
        spec.rules = std::make_shared<const logic::CompiledRelaxation>(
            logic::CompiledRelaxation::from_valid_set(valid, gf));
    } else {
        throw std::invalid_argument("unknown relaxation kind '" + kind + "'");
    }
    return spec;
}

py::dict dataset_to_dict(const data::Dataset& ds) {
    py::dict d;
    d["label_kind"] =
        ds.label_kind == data::LabelKind::ClassIndex ? "class" : "attributes";
    d["num_outputs"] = ds.num_outputs;
    d["num_features"] = ds.num_features;
    d["labelled_x"] = ds.labelled_x;
    d["labelled_y"] = ds.labelled_y;
    d["unlabelled_x"] = ds.unlabelled_x;
    d["unlabelled_hidden_y"] = ds.unlabelled_hidden_y;
    d["test_x"] = ds.test_x;
    d["test_y"] = ds.test_y;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discriminative semi-supervised learning core";

    // ---- Table-1 relaxation losses ----
    m.def("entropy_loss",
          [](const std::vector<double>& t) { return relax::entropy_loss(ProbVector(t)); },
          py::arg("theta"));
    m.def("exclusivity_loss",
          [](const std::vector<double>& t) { return relax::exclusivity_loss(ProbVector(t)); },
          py::arg("theta"));
    m.def("pseudo_label_loss",
          [](const std::vector<double>& t) { return relax::pseudo_label_loss(ProbVector(t)); },
          py::arg("theta"));
    m.def("dp_loss",
          [](const std::vector<double>& t, double temperature) {
              return relax::dp_loss(ProbVector(t), temperature);
          },
          py::arg("theta"), py::arg("temperature") = 10.0);
    m.def("unsup_loss_grad",
          [](const std::string& kind, const std::vector<double>& theta, double temperature,
             const std::string& g, const std::string& rules_text) {
              LossGrad lg = relax::unsup_loss_grad(make_spec(kind, temperature, g, rules_text),
                                                   theta);
              return py::make_tuple(lg.value, lg.grad);
          },
          py::arg("kind"), py::arg("theta"), py::arg("temperature") = 10.0,
          py::arg("g") = "power", py::arg("rules_text") = "");

    // ---- 1-D Gaussian mixture / theta density ----
    py::class_<gaussmix::GaussianMixture1D>(m, "GaussianMixture1D")
        .def(py::init([](double mu0, double mu1, double sigma, double pi1) {
                 gaussmix::GaussianMixture1D mix{mu0, mu1, sigma, pi1};
                 mix.validate();
                 return mix;
             }),
             py::arg("mu0") = -1.0, py::arg("mu1") = 1.0, py::arg("sigma") = 1.0,
             py::arg("pi1") = 0.5)
        .def_readonly("mu0", &gaussmix::GaussianMixture1D::mu0)
        .def_readonly("mu1", &gaussmix::GaussianMixture1D::mu1)
        .def_readonly("sigma", &gaussmix::GaussianMixture1D::sigma)
        .def_readonly("pi1", &gaussmix::GaussianMixture1D::pi1);

    m.def("theta_of_x", &gaussmix::theta_of_x, py::arg("x"), py::arg("mix"));
    m.def("x_of_theta", &gaussmix::x_of_theta, py::arg("theta"), py::arg("mix"));
    m.def("p_x_density", &gaussmix::p_x_density, py::arg("x"), py::arg("mix"));
    m.def("p_theta_density", &gaussmix::p_theta_density, py::arg("theta"), py::arg("mix"));
    m.def("p_theta_joint", &gaussmix::p_theta_joint, py::arg("theta"), py::arg("k"),
          py::arg("mix"));
    m.def("theta_density_mass", &gaussmix::theta_density_mass, py::arg("mix"), py::arg("lo"),
          py::arg("hi"), py::arg("abs_tol") = 1e-6);
    m.def("sample_mixture",
          [](const gaussmix::GaussianMixture1D& mix, std::size_t n, std::uint64_t seed) {
              std::vector<std::pair<double, int>> out;
              for (const auto& s : gaussmix::sample(mix, n, seed)) out.emplace_back(s.x, s.y);
              return out;
          },
          py::arg("mix"), py::arg("n"), py::arg("seed"));

    // ---- propositional rules ----
    m.def("compile_rules",
          [](const std::string& rules_text) {
              logic::RuleSet rules = logic::parse_rule_file(rules_text);
              int k = static_cast<int>(rules.attributes.size());
              logic::DnfForm dnf = logic::to_dnf(*rules.formula, k);
              logic::ValidSet valid = logic::enumerate_valid(*rules.formula, k);
              py::dict d;
              d["attributes"] = rules.attributes;
              d["dnf"] = logic::dnf_to_string(dnf, rules.attributes);
              std::vector<std::string> vecs;
              for (std::uint32_t v : valid.vectors)
                  vecs.push_back(logic::format_vector(v, k));
              d["valid"] = vecs;
              d["formula"] = logic::pretty_print(*rules.formula);
              return d;
          },
          py::arg("rules_text"));
    m.def("rule_logloss_grad",
          [](const std::string& rules_text, const std::vector<double>& theta,
             const std::string& g, double temperature) {
              LossGrad lg = relax::unsup_loss_grad(
                  make_spec("rules", temperature, g, rules_text), theta);
              return py::make_tuple(lg.value, lg.grad);
          },
          py::arg("rules_text"), py::arg("theta"), py::arg("g") = "power",
          py::arg("temperature") = 10.0);

    // ---- datasets ----
    m.def("gen_blobs",
          [](int k, int dims, double separation, int n_lab, int n_unlab, int n_test,
             std::uint64_t seed) {
              return dataset_to_dict(
                  data::gen_blobs(k, dims, separation, n_lab, n_unlab, n_test, seed));
          },
          py::arg("num_classes") = 4, py::arg("dims") = 2, py::arg("separation") = 3.0,
          py::arg("n_labelled_per_class") = 4, py::arg("n_unlabelled") = 1000,
          py::arg("n_test") = 1000, py::arg("seed") = 1);
    m.def("gen_two_moons",
          [](double noise, int n_lab, int n_unlab, int n_test, std::uint64_t seed) {
              return dataset_to_dict(
                  data::gen_two_moons(noise, n_lab, n_unlab, n_test, seed));
          },
          py::arg("noise") = 0.1, py::arg("n_labelled_per_class") = 3,
          py::arg("n_unlabelled") = 500, py::arg("n_test") = 500, py::arg("seed") = 1);

    // ---- experiments ----
    m.def("run_experiment",
          [](const std::string& config_json, int jobs) {
              harness::ExperimentConfig cfg =
                  harness::parse_config(harness::Json::parse(config_json));
              harness::RunReport report = harness::run_experiment(cfg, jobs);
              return py::module_::import("json").attr("loads")(
                  harness::report_to_json(report).dump());
          },
          py::arg("config_json"), py::arg("jobs") = 1);
    m.def("gradcheck_report", [] {
        std::ostringstream os;
        int rc = harness::run_gradcheck(os);
        return py::make_tuple(rc, os.str());
    });
}
