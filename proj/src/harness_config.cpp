#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detssl/errors.hpp"
#include "detssl/harness.hpp"
#include "detssl/rule_relaxation.hpp"

namespace detssl::harness {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

template <typename T>
T get_or(const Json& j, const std::string& field, T fallback) {
    if (!j.contains(field)) return fallback;
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        bad_field(field, "has the wrong type");
    }
}

template <typename T>
T require(const Json& j, const std::string& field) {
    if (!j.contains(field)) bad_field(field, "is required");
    try {
        return j.at(field).get<T>();
    } catch (const nlohmann::json::exception&) {
        bad_field(field, "has the wrong type");
    }
}

relax::Kind parse_kind(const std::string& s) {
    if (s == "entropy") return relax::Kind::Entropy;
    if (s == "exclusivity") return relax::Kind::MutualExclusivity;
    if (s == "pseudo_label") return relax::Kind::PseudoLabel;
    if (s == "dp") return relax::Kind::DetPrior;
    if (s == "rules") return relax::Kind::CompiledRules;
    bad_field("relaxation.kind", "unknown kind '" + s +
                                     "' (entropy|exclusivity|pseudo_label|dp|rules)");
}

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open rules file '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", "run");
    cfg.out_dir = get_or<std::string>(j, "out_dir", "runs/" + cfg.name);

    if (!j.contains("dataset")) bad_field("dataset", "is required");
    const Json& d = j.at("dataset");
    cfg.dataset.type = require<std::string>(d, "type");
    if (cfg.dataset.type != "blobs" && cfg.dataset.type != "moons" &&
        cfg.dataset.type != "attributes" && cfg.dataset.type != "gauss1d")
        bad_field("dataset.type", "unknown type '" + cfg.dataset.type +
                                      "' (blobs|moons|attributes|gauss1d)");
    cfg.dataset.num_classes = get_or<int>(d, "num_classes", 4);
    cfg.dataset.dims = get_or<int>(d, "dims", 2);
    cfg.dataset.separation = get_or<double>(d, "separation", 3.0);
    cfg.dataset.noise = get_or<double>(d, "noise", 0.1);
    cfg.dataset.rules_file = get_or<std::string>(d, "rules_file", "");
    cfg.dataset.rules_text = get_or<std::string>(d, "rules_text", "");
    cfg.dataset.clusters_per_valid_label = get_or<int>(d, "clusters_per_valid_label", 1);
    cfg.dataset.mix.mu0 = get_or<double>(d, "mu0", -1.0);
    cfg.dataset.mix.mu1 = get_or<double>(d, "mu1", 1.0);
    cfg.dataset.mix.sigma = get_or<double>(d, "sigma", 1.0);
    cfg.dataset.mix.pi1 = get_or<double>(d, "pi1", 0.5);
    cfg.dataset.n_labelled_per_class = get_or<int>(d, "n_labelled_per_class", 4);
    cfg.dataset.n_unlabelled = get_or<int>(d, "n_unlabelled", 1000);
    cfg.dataset.n_test = get_or<int>(d, "n_test", 1000);

    const Json m = j.contains("model") ? j.at("model") : Json::object();
    cfg.model.hidden = get_or<std::vector<int>>(m, "hidden", {64, 64});
    std::string act = get_or<std::string>(m, "activation", "relu");
    if (act == "relu")
        cfg.model.activation = net::Activation::ReLU;
    else if (act == "tanh")
        cfg.model.activation = net::Activation::Tanh;
    else
        bad_field("model.activation", "unknown activation '" + act + "' (relu|tanh)");
    std::string head = get_or<std::string>(m, "head", "softmax");
    if (head == "softmax")
        cfg.model.head = net::Head::Softmax;
    else if (head == "sigmoid")
        cfg.model.head = net::Head::SigmoidPerAttribute;
    else
        bad_field("model.head", "unknown head '" + head + "' (softmax|sigmoid)");

    const Json t = j.contains("train") ? j.at("train") : Json::object();
    cfg.train.lambda_u = get_or<double>(t, "lambda_u", 1.0);
    cfg.train.rampup_epochs = get_or<int>(t, "rampup_epochs", 0);
    cfg.train.learning_rate = get_or<double>(t, "learning_rate", 0.1);
    cfg.train.momentum = get_or<double>(t, "momentum", 0.9);
    cfg.train.epochs = get_or<int>(t, "epochs", 100);
    cfg.train.batch_labelled = get_or<int>(t, "batch_labelled", 32);
    cfg.train.batch_unlabelled = get_or<int>(t, "batch_unlabelled", 32);
    cfg.train.apply_prior_to_labelled = get_or<bool>(t, "apply_prior_to_labelled", false);

    const Json r = j.contains("relaxation") ? j.at("relaxation") : Json::object();
    cfg.train.relaxation.kind = parse_kind(get_or<std::string>(r, "kind", "dp"));
    cfg.train.relaxation.temperature = get_or<double>(r, "T", 10.0);
    cfg.train.relaxation.epsilon = get_or<double>(r, "epsilon", relax::kDefaultEps);
    std::string gname = get_or<std::string>(r, "g", "power");
    bool weighted = get_or<bool>(r, "weighted", false);

    cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds",
                                                   {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    if (cfg.seeds.empty()) bad_field("seeds", "must be nonempty");

    // Resolve rules once: the dataset generator and the compiled relaxation
    // share the same rule set.
    bool needs_rules = cfg.dataset.type == "attributes" ||
                       cfg.train.relaxation.kind == relax::Kind::CompiledRules;
    if (needs_rules) {
        std::string text = cfg.dataset.rules_text;
        if (text.empty() && !cfg.dataset.rules_file.empty())
            text = read_file(cfg.dataset.rules_file);
        if (text.empty())
            bad_field("dataset.rules_file",
                      "attribute datasets and rule relaxations need rules_file or rules_text");
        auto rules = std::make_shared<logic::RuleSet>(logic::parse_rule_file(text));
        cfg.rules = rules;
        if (cfg.train.relaxation.kind == relax::Kind::CompiledRules) {
            logic::ValidSet valid = logic::enumerate_valid(
                *rules->formula, static_cast<int>(rules->attributes.size()));
            if (valid.vectors.empty())
                throw UnsatisfiableRulesError("rules admit no valid label: empty valid set");
            logic::GFunction g;
            if (gname == "identity") {
                g.kind = logic::GFunction::Kind::Identity;
            } else if (gname == "power") {
                g.kind = logic::GFunction::Kind::Power;
                g.temperature = cfg.train.relaxation.temperature;
            } else {
                bad_field("relaxation.g", "unknown g '" + gname + "' (identity|power)");
            }
            std::map<std::uint32_t, double> weights;
            if (weighted) {
                // pi_y weights from the valid-set-uniform prior are a no-op;
                // accept explicit weights only.
                if (!r.contains("weights"))
                    bad_field("relaxation.weights", "weighted mode needs explicit weights");
                for (const auto& [key, value] : r.at("weights").items()) {
                    std::uint32_t vec = 0;
                    if (key.size() != rules->attributes.size())
                        bad_field("relaxation.weights", "weight key '" + key +
                                                            "' has the wrong length");
                    for (std::size_t i = 0; i < key.size(); ++i)
                        if (key[i] == '1') vec |= 1u << i;
                    weights[vec] = value.get<double>();
                }
            }
            cfg.train.relaxation.rules =
                std::make_shared<const logic::CompiledRelaxation>(
                    logic::CompiledRelaxation::from_valid_set(
                        valid, g, weighted ? &weights : nullptr));
        }
    }

    cfg.train.validate(cfg.model.head);
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path.string() + "'");
    Json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

Json config_to_json(const ExperimentConfig& cfg) {
    Json d;
    d["type"] = cfg.dataset.type;
    if (cfg.dataset.type == "blobs") {
        d["num_classes"] = cfg.dataset.num_classes;
        d["dims"] = cfg.dataset.dims;
        d["separation"] = cfg.dataset.separation;
    } else if (cfg.dataset.type == "moons") {
        d["noise"] = cfg.dataset.noise;
    } else if (cfg.dataset.type == "attributes") {
        d["dims"] = cfg.dataset.dims;
        d["clusters_per_valid_label"] = cfg.dataset.clusters_per_valid_label;
        if (!cfg.dataset.rules_file.empty()) d["rules_file"] = cfg.dataset.rules_file;
        if (!cfg.dataset.rules_text.empty()) d["rules_text"] = cfg.dataset.rules_text;
    } else if (cfg.dataset.type == "gauss1d") {
        d["mu0"] = cfg.dataset.mix.mu0;
        d["mu1"] = cfg.dataset.mix.mu1;
        d["sigma"] = cfg.dataset.mix.sigma;
        d["pi1"] = cfg.dataset.mix.pi1;
    }
    d["n_labelled_per_class"] = cfg.dataset.n_labelled_per_class;
    d["n_unlabelled"] = cfg.dataset.n_unlabelled;
    d["n_test"] = cfg.dataset.n_test;

    Json m;
    m["hidden"] = cfg.model.hidden;
    m["activation"] = cfg.model.activation == net::Activation::ReLU ? "relu" : "tanh";
    m["head"] = cfg.model.head == net::Head::Softmax ? "softmax" : "sigmoid";

    Json t;
    t["lambda_u"] = cfg.train.lambda_u;
    t["rampup_epochs"] = cfg.train.rampup_epochs;
    t["learning_rate"] = cfg.train.learning_rate;
    t["momentum"] = cfg.train.momentum;
    t["epochs"] = cfg.train.epochs;
    t["batch_labelled"] = cfg.train.batch_labelled;
    t["batch_unlabelled"] = cfg.train.batch_unlabelled;
    t["apply_prior_to_labelled"] = cfg.train.apply_prior_to_labelled;

    Json r;
    r["kind"] = relax::kind_name(cfg.train.relaxation.kind);
    r["T"] = cfg.train.relaxation.temperature;
    r["epsilon"] = cfg.train.relaxation.epsilon;
    if (cfg.train.relaxation.rules) {
        r["g"] = cfg.train.relaxation.rules->g().kind == logic::GFunction::Kind::Identity
                     ? "identity"
                     : "power";
        r["weighted"] = cfg.train.relaxation.rules->weighted();
    }

    Json j;
    j["name"] = cfg.name;
    j["dataset"] = d;
    j["model"] = m;
    j["train"] = t;
    j["relaxation"] = r;
    j["seeds"] = cfg.seeds;
    j["out_dir"] = cfg.out_dir;
    return j;
}

data::Dataset make_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
    const DatasetSpec& d = cfg.dataset;
    if (d.type == "blobs")
        return data::gen_blobs(d.num_classes, d.dims, d.separation, d.n_labelled_per_class,
                               d.n_unlabelled, d.n_test, seed);
    if (d.type == "moons")
        return data::gen_two_moons(d.noise, d.n_labelled_per_class, d.n_unlabelled, d.n_test,
                                   seed);
    if (d.type == "attributes") {
        if (!cfg.rules) throw ConfigError("attribute dataset has no parsed rules");
        return data::gen_attribute_task(*cfg.rules->formula,
                                        static_cast<int>(cfg.rules->attributes.size()),
                                        d.clusters_per_valid_label, d.dims,
                                        d.n_labelled_per_class, d.n_unlabelled, d.n_test,
                                        seed);
    }
    if (d.type == "gauss1d")
        return data::gen_gauss1d(d.mix, d.n_labelled_per_class, d.n_unlabelled, d.n_test,
                                 seed);
    throw ConfigError("unknown dataset type '" + d.type + "'");
}

}  // namespace detssl::harness
