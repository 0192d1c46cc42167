// Command-line front end: train / compare / gradcheck / density /
// compile-rules / gen-data.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "detssl/errors.hpp"
#include "detssl/harness.hpp"

namespace {

using namespace detssl;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw ConfigError("--seeds list is empty");
    return seeds;
}

harness::ExperimentConfig load_with_overrides(const std::string& config_path,
                                              const std::string& seeds_csv,
                                              const std::string& out_dir) {
    harness::ExperimentConfig cfg = harness::load_config_file(config_path);
    if (!seeds_csv.empty()) cfg.seeds = parse_seed_list(seeds_csv);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    return cfg;
}

int cmd_train(const std::string& config_path, const std::string& seeds_csv,
              const std::string& out_dir, int jobs) {
    harness::ExperimentConfig cfg = load_with_overrides(config_path, seeds_csv, out_dir);
    harness::RunReport report = harness::run_experiment(cfg, jobs);
    harness::write_report_files(report);
    std::cout << "wrote " << cfg.out_dir << "/report.json  (mean test accuracy "
              << report.mean_test_accuracy << " +- " << report.stderr_test_accuracy << ")\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& seeds_csv,
                const std::string& out_dir, int jobs) {
    std::vector<harness::ExperimentConfig> cfgs;
    for (const std::string& p : config_paths) {
        harness::ExperimentConfig cfg = load_with_overrides(p, seeds_csv, "");
        if (!out_dir.empty())
            cfg.out_dir = out_dir + "/" + cfg.name;
        cfgs.push_back(std::move(cfg));
    }
    std::vector<harness::RunReport> reports;
    std::vector<harness::MethodRow> rows = harness::run_comparison(cfgs, jobs, &reports);
    for (const harness::RunReport& rep : reports) harness::write_report_files(rep);

    std::ostringstream csv;
    harness::write_comparison_csv(rows, csv);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        harness::atomic_write(std::filesystem::path(out_dir) / "compare.csv", csv.str());
    }
    harness::write_comparison_table(rows, std::cout);
    return 0;
}

int cmd_gen_data(const std::string& config_path, const std::string& out_path,
                 std::uint64_t seed) {
    harness::ExperimentConfig cfg = harness::load_config_file(config_path);
    data::Dataset ds = harness::make_dataset(cfg, seed);
    std::ostringstream os;
    data::write_csv(ds, os);
    harness::atomic_write(out_path, os.str());
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discriminative semi-supervised learning toolkit"};
    app.require_subcommand(1);

    std::string config_path, seeds_csv, out_dir, out_path, rules_path;
    std::vector<std::string> config_paths;
    int jobs = 1;
    int grid = 200;
    std::uint64_t seed = 1;
    gaussmix::GaussianMixture1D mix;

    CLI::App* train = app.add_subcommand("train", "Run one experiment over its seed list");
    train->add_option("--config", config_path, "JSON experiment config")->required();
    train->add_option("--seeds", seeds_csv, "comma-separated seed override");
    train->add_option("--out", out_dir, "output directory override");
    train->add_option("--jobs", jobs, "parallel seed workers");

    CLI::App* compare = app.add_subcommand("compare", "Align methods on one dataset");
    compare->add_option("--config", config_paths, "JSON configs, one per method")
        ->required()
        ->expected(-1);
    compare->add_option("--seeds", seeds_csv, "comma-separated seed override");
    compare->add_option("--out", out_dir, "output directory for reports + compare.csv");
    compare->add_option("--jobs", jobs, "parallel seed workers");

    app.add_subcommand("gradcheck", "Finite-difference checks for every loss");

    CLI::App* density = app.add_subcommand("density", "Tabulate p(theta) for a 1-D mixture");
    density->add_option("--mu0", mix.mu0, "class-0 mean");
    density->add_option("--mu1", mix.mu1, "class-1 mean");
    density->add_option("--sigma", mix.sigma, "shared standard deviation");
    density->add_option("--pi1", mix.pi1, "class-1 prior");
    density->add_option("--grid", grid, "number of grid points");
    density->add_option("--out", out_path, "output CSV (default stdout)");

    CLI::App* compile = app.add_subcommand("compile-rules", "DNF + valid set of a rule file");
    compile->add_option("rules", rules_path, "rule file")->required();

    CLI::App* gen = app.add_subcommand("gen-data", "Emit a dataset CSV from a config");
    gen->add_option("--config", config_path, "JSON experiment config")->required();
    gen->add_option("--out", out_path, "output CSV path")->required();
    gen->add_option("--seed", seed, "dataset seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(config_path, seeds_csv, out_dir, jobs);
        if (compare->parsed()) return cmd_compare(config_paths, seeds_csv, out_dir, jobs);
        if (app.get_subcommand("gradcheck")->parsed())
            return harness::run_gradcheck(std::cout);
        if (density->parsed()) {
            if (out_path.empty()) {
                harness::write_density_csv(mix, grid, std::cout);
            } else {
                std::ostringstream os;
                harness::write_density_csv(mix, grid, os);
                harness::atomic_write(out_path, os.str());
                std::cout << "wrote " << out_path << '\n';
            }
            return 0;
        }
        if (compile->parsed()) {
            std::ifstream is(rules_path);
            if (!is) throw ConfigError("cannot open rule file '" + rules_path + "'");
            std::ostringstream ss;
            ss << is.rdbuf();
            return harness::compile_rules_report(ss.str(), std::cout);
        }
        if (gen->parsed()) return cmd_gen_data(config_path, out_path, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
