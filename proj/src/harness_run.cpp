#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "detssl/errors.hpp"
#include "detssl/harness.hpp"
#include "detssl/rule_relaxation.hpp"

namespace detssl::harness {

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    data::Dataset ds = make_dataset(cfg, seed);

    std::vector<int> sizes;
    sizes.push_back(ds.num_features);
    for (int h : cfg.model.hidden) sizes.push_back(h);
    sizes.push_back(ds.num_outputs);

    net::Network network = net::make_network(sizes, cfg.model.activation, cfg.model.head, seed);
    net::TrainConfig tc = cfg.train;
    tc.seed = seed;
    net::TrainResult tr = net::train(std::move(network), ds, tc);

    const logic::ValidSet* valid_ptr = nullptr;
    logic::ValidSet valid;
    if (cfg.rules && ds.label_kind == data::LabelKind::AttributeVector) {
        valid = logic::enumerate_valid(*cfg.rules->formula,
                                       static_cast<int>(cfg.rules->attributes.size()));
        valid_ptr = &valid;
    }

    SeedResult r;
    r.seed = seed;
    r.metrics = tr.metrics;
    r.eval_labelled =
        net::evaluate(tr.network, ds.labelled_x, ds.labelled_y, ds.label_kind, valid_ptr);
    r.eval_unlabelled = net::evaluate(tr.network, ds.unlabelled_x, ds.unlabelled_hidden_y,
                                      ds.label_kind, valid_ptr);
    r.eval_test = net::evaluate(tr.network, ds.test_x, ds.test_y, ds.label_kind, valid_ptr);
    r.test_accuracy = r.eval_test.accuracy;
    r.train_accuracy = r.eval_labelled.accuracy;
    r.rule_violation_rate = r.eval_test.rule_violation_rate;
    r.intermediate_fraction_unlabelled = r.eval_unlabelled.intermediate_fraction();
    r.final_mean_log_q = tr.metrics.empty() ? 0.0 : tr.metrics.back().mean_log_q;
    return r;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_histogram_csv(const net::EvalResult& eval, const std::filesystem::path& path) {
    std::ostringstream os;
    os << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < net::kHistogramBins; ++b) {
        os << format_double(static_cast<double>(b) / net::kHistogramBins) << ','
           << format_double(static_cast<double>(b + 1) / net::kHistogramBins) << ','
           << eval.histogram[b] << '\n';
    }
    atomic_write(path, os.str());
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, int jobs) {
    if (cfg.seeds.empty()) throw ConfigError("seed list is empty");
    if (jobs < 1) jobs = 1;
    auto started = std::chrono::steady_clock::now();

    RunReport report;
    report.config = cfg;
    report.per_seed.resize(cfg.seeds.size());

    if (jobs == 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            report.per_seed[i] = run_seed(cfg, cfg.seeds[i]);
    } else {
        // Seeds are independent jobs; results land in their slot, so the
        // report is identical regardless of scheduling.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(cfg.seeds.size());
        int n_workers = std::min<int>(jobs, static_cast<int>(cfg.seeds.size()));
        for (int w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cfg.seeds.size();
                     i = next.fetch_add(1)) {
                    try {
                        report.per_seed[i] = run_seed(cfg, cfg.seeds[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<double> accs, fracs, violations;
    for (const SeedResult& r : report.per_seed) {
        accs.push_back(r.test_accuracy);
        fracs.push_back(r.intermediate_fraction_unlabelled);
        violations.push_back(r.rule_violation_rate);
    }
    std::tie(report.mean_test_accuracy, report.stderr_test_accuracy) = mean_stderr(accs);
    report.mean_intermediate_fraction = mean_stderr(fracs).first;
    report.mean_rule_violation_rate = mean_stderr(violations).first;
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

Json report_to_json(const RunReport& report) {
    Json j;
    j["config"] = config_to_json(report.config);
    Json seeds = Json::array();
    for (const SeedResult& r : report.per_seed) {
        Json s;
        s["seed"] = r.seed;
        s["test_accuracy"] = r.test_accuracy;
        s["train_accuracy"] = r.train_accuracy;
        s["intermediate_fraction_unlabelled"] = r.intermediate_fraction_unlabelled;
        s["rule_violation_rate"] = r.rule_violation_rate;
        s["final_mean_log_q"] = r.final_mean_log_q;
        seeds.push_back(s);
    }
    j["per_seed"] = seeds;
    j["mean_test_accuracy"] = report.mean_test_accuracy;
    j["stderr_test_accuracy"] = report.stderr_test_accuracy;
    j["mean_intermediate_fraction"] = report.mean_intermediate_fraction;
    j["mean_rule_violation_rate"] = report.mean_rule_violation_rate;
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    return j;
}

void write_report_files(const RunReport& report) {
    std::filesystem::path out(report.config.out_dir);
    std::filesystem::create_directories(out);
    atomic_write(out / "report.json", report_to_json(report).dump(2) + "\n");

    for (const SeedResult& r : report.per_seed) {
        std::filesystem::path dir = out / ("seed_" + std::to_string(r.seed));
        std::filesystem::create_directories(dir);
        std::ostringstream os;
        os << "epoch,train_accuracy,test_accuracy,supervised_loss,unsupervised_loss,"
              "mean_log_q\n";
        for (const net::EpochMetrics& m : r.metrics) {
            os << m.epoch << ',' << format_double(m.train_accuracy) << ','
               << format_double(m.test_accuracy) << ',' << format_double(m.supervised_loss)
               << ',' << format_double(m.unsupervised_loss) << ','
               << format_double(m.mean_log_q) << '\n';
        }
        atomic_write(dir / "metrics.csv", os.str());
        write_histogram_csv(r.eval_labelled, dir / "hist_labelled.csv");
        write_histogram_csv(r.eval_unlabelled, dir / "hist_unlabelled.csv");
        write_histogram_csv(r.eval_test, dir / "hist_test.csv");
    }
}

std::vector<MethodRow> run_comparison(const std::vector<ExperimentConfig>& cfgs, int jobs,
                                      std::vector<RunReport>* reports) {
    if (cfgs.empty()) throw ConfigError("comparison needs at least one config");
    Json dataset0 = config_to_json(cfgs.front())["dataset"];
    for (const ExperimentConfig& c : cfgs) {
        if (config_to_json(c)["dataset"] != dataset0)
            throw ConfigError("comparison configs use different datasets");
        if (c.seeds != cfgs.front().seeds)
            throw ConfigError("comparison configs use different seed lists");
    }
    std::vector<MethodRow> rows;
    for (const ExperimentConfig& c : cfgs) {
        RunReport rep = run_experiment(c, jobs);
        MethodRow row;
        row.name = c.name;
        row.mean_accuracy = rep.mean_test_accuracy;
        row.stderr_accuracy = rep.stderr_test_accuracy;
        row.mean_intermediate_fraction = rep.mean_intermediate_fraction;
        for (const SeedResult& r : rep.per_seed) row.per_seed_accuracy.push_back(r.test_accuracy);
        rows.push_back(std::move(row));
        if (reports) reports->push_back(std::move(rep));
    }
    return rows;
}

void write_comparison_csv(const std::vector<MethodRow>& rows, std::ostream& os) {
    os << "method,mean_test_accuracy,stderr_test_accuracy,intermediate_fraction\n";
    for (const MethodRow& r : rows) {
        os << r.name << ',' << format_double(r.mean_accuracy) << ','
           << format_double(r.stderr_accuracy) << ','
           << format_double(r.mean_intermediate_fraction) << '\n';
    }
}

void write_comparison_table(const std::vector<MethodRow>& rows, std::ostream& os) {
    os << std::left << std::setw(24) << "method" << std::right << std::setw(12) << "acc mean"
       << std::setw(12) << "std err" << std::setw(14) << "mid-conf frac" << '\n';
    for (const MethodRow& r : rows) {
        os << std::left << std::setw(24) << r.name << std::right << std::fixed
           << std::setprecision(4) << std::setw(12) << r.mean_accuracy << std::setw(12)
           << r.stderr_accuracy << std::setw(14) << r.mean_intermediate_fraction << '\n';
        os.unsetf(std::ios::fixed);
    }
}

}  // namespace detssl::harness
