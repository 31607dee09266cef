#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopsi/errors.hpp"
#include "hopsi/experiments.hpp"
#include "hopsi/inference.hpp"
#include "hopsi/io.hpp"
#include "hopsi/screening.hpp"

namespace {

using namespace hopsi;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct Options {
    std::string input;
    std::string output;
    std::optional<int> order;
    std::optional<int> topk;
    double alpha = 0.05;
    std::string sigma;
    std::uint64_t seed = 0;
    std::optional<long> max_rows;
    bool binarize = false;
    bool no_prune = false;
    std::string format = "json";
    int threads = 1;

    // synth / perf
    std::string study = "fpr";
    int n = 100;
    int d = 100;
    double sparsity = 0.5;
    int trials = 0;
    double beta = 1.0;
    std::string sweep;
    std::vector<double> values;
    std::vector<int> d_values;
    std::vector<int> order_values;
    std::vector<double> sparsity_values;
};

void add_shared(CLI::App* cmd, Options& o) {
    cmd->add_option("--output", o.output, "Write results here instead of stdout");
    cmd->add_option("--order", o.order, "Maximum interaction order r")->check(CLI::PositiveNumber);
    cmd->add_option("--topk", o.topk, "Number of screened features k")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--sigma", o.sigma, "Noise level, or 'estimate'");
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-prune", o.no_prune, "Disable subtree pruning (exhaustive search)");
}

void add_data(CLI::App* cmd, Options& o) {
    cmd->add_option("--input", o.input, "CSV with covariates then the response")->required();
    cmd->add_option("--max-rows", o.max_rows, "Random subsample of at most N rows")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--binarize", o.binarize,
                  "Split each continuous covariate into indicators of >1 and <-1 after "
                  "standardization");
}

void add_synthetic(CLI::App* cmd, Options& o) {
    cmd->add_option("--n", o.n, "Rows per trial")->check(CLI::PositiveNumber);
    cmd->add_option("--sparsity", o.sparsity, "Fraction of zero covariate entries")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--trials", o.trials, "Trials per setting")->check(CLI::PositiveNumber);
}

// Output goes to --output or stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw DataError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw DataError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

Dataset load(const Options& o) {
    RawTable table = ingest_csv(o.input, csv_has_header(o.input));
    if (o.max_rows) table = subsample(table, *o.max_rows, o.seed);
    return to_dataset(table, o.binarize);
}

ModelConfig data_model(const Options& o) {
    ModelConfig config;
    config.max_order = o.order.value_or(3);
    config.k = o.topk.value_or(30);
    config.alpha = o.alpha;
    return config;
}

void report_metrics(const char* stage, const TraversalMetrics& m) {
    std::fprintf(stderr, "%s: visited %llu nodes in %.3f s (1-pruning rate %.4g)\n", stage,
                 static_cast<unsigned long long>(m.nodes_visited), m.elapsed, m.visit_rate());
}

int run_screen(const Options& o) {
    const Dataset data = load(o);
    const ModelConfig config = data_model(o);
    config.validate(data);
    const auto [sel, metrics] =
        marginal_screen(data, config.k, config.max_order, ScreeningOptions{!o.no_prune});
    report_metrics("screening", metrics);
    Sink sink(o.output);
    emit_screening(sel, data.names(), sink.stream(), parse_format(o.format));
    sink.finish();
    return kExitOk;
}

int run_infer(const Options& o) {
    const Dataset data = load(o);
    ModelConfig config = data_model(o);
    config.sigma = 1.0;  // placeholder until sigma is known
    config.validate(data);
    const auto [sel, metrics] =
        marginal_screen(data, config.k, config.max_order, ScreeningOptions{!o.no_prune});
    report_metrics("screening", metrics);

    if (o.sigma.empty() || o.sigma == "estimate") {
        config.sigma = estimate_sigma(data, sel);
        std::fprintf(stderr, "sigma estimate: %.6g\n", config.sigma);
        if (!(config.sigma > 0.0))
            throw NumericError("estimated sigma is zero: the selected model fits exactly");
    } else {
        try {
            std::size_t used = 0;
            config.sigma = std::stod(o.sigma, &used);
            if (used != o.sigma.size()) throw std::invalid_argument(o.sigma);
        } catch (const std::exception&) {
            throw UsageError("--sigma expects a number or 'estimate'");
        }
        if (!(config.sigma > 0.0)) throw UsageError("--sigma must be positive");
    }

    const InferenceReport report =
        infer(data, config, sel, metrics, InferenceOptions{!o.no_prune, o.threads});
    std::fprintf(stderr, "inference: visited %llu nodes in %.3f s (mean 1-pruning rate %.4g)\n",
                 static_cast<unsigned long long>(report.inference_metrics.nodes_visited),
                 report.inference_metrics.elapsed, report.mean_visit_rate());
    Sink sink(o.output);
    emit_report(report, data.names(), sink.stream(), parse_format(o.format));
    sink.finish();
    return kExitOk;
}

SyntheticSpec synthetic_spec(const Options& o, int default_trials) {
    SyntheticSpec spec;
    spec.n = o.n;
    spec.d = o.d;
    spec.max_order = o.order.value_or(3);
    spec.k = o.topk.value_or(10);
    spec.sparsity = o.sparsity;
    spec.alpha = o.alpha;
    spec.seed = o.seed;
    spec.trials = o.trials > 0 ? o.trials : default_trials;
    if (!o.sigma.empty()) {
        try {
            spec.sigma = std::stod(o.sigma);
        } catch (const std::exception&) {
            throw UsageError("synthetic studies need a numeric --sigma");
        }
    }
    return spec;
}

void apply_sweep(SyntheticSpec& spec, double& beta, const std::string& param, double value) {
    if (param == "n")
        spec.n = static_cast<int>(value);
    else if (param == "d")
        spec.d = static_cast<int>(value);
    else if (param == "sigma")
        spec.sigma = value;
    else if (param == "sparsity")
        spec.sparsity = value;
    else if (param == "beta")
        beta = value;
    else
        throw UsageError("unknown sweep parameter '" + param + "'");
}

nlohmann::json rate_json(const MethodRate& r) {
    return {{"method", method_name(r.method)}, {"rate", r.rate},     {"std_error", r.std_error},
            {"trials", r.trials},              {"degenerate", r.degenerate}};
}

int run_synth(const Options& o) {
    const SyntheticSpec base = synthetic_spec(o, 1000);
    const bool fpr = o.study == "fpr";
    if (!fpr && o.study != "tpr") throw UsageError("--study must be fpr or tpr");
    const Itemset target{0, 1, 2};

    std::vector<double> values = o.values;
    std::string param = o.sweep;
    if (param.empty()) {
        if (!values.empty()) throw UsageError("--values needs --sweep");
        param = "none";
        values = {0.0};
    } else if (values.empty()) {
        throw UsageError("--sweep needs --values");
    }
    if (param == "beta" && fpr) throw UsageError("the false-positive study has no signal to sweep");

    const ReportFormat format = parse_format(o.format);
    Sink sink(o.output);
    nlohmann::json rows = nlohmann::json::array();
    bool first = true;
    for (double value : values) {
        SyntheticSpec spec = base;
        double beta = o.beta;
        if (param != "none") apply_sweep(spec, beta, param, value);
        std::vector<MethodRate> rates;
        nlohmann::json extra;
        if (fpr) {
            const FprStudy study = run_fpr_study(spec, o.threads);
            rates = study.rates;
            const KsResult ks = ks_uniform(study.top_pivots);
            extra = {{"pivot_ks_statistic", ks.statistic}, {"pivot_ks_p_value", ks.p_value}};
            std::fprintf(stderr, "%s=%g: pivot KS p-value %.4g over %zu trials\n", param.c_str(),
                         value, ks.p_value, study.top_pivots.size());
        } else {
            if (spec.d < 3) throw UsageError("the true-positive study needs d >= 3");
            spec.truth = {{target, beta}};
            rates = run_tpr_study(spec, target, o.threads);
        }
        if (format == ReportFormat::csv) {
            write_rates_csv(sink.stream(), param, value, rates, first);
        } else {
            nlohmann::json row = {{"parameter", param}, {"value", value}};
            row["rates"] = nlohmann::json::array();
            for (const auto& r : rates) row["rates"].push_back(rate_json(r));
            if (!extra.is_null()) row.update(extra);
            rows.push_back(row);
        }
        first = false;
    }
    if (format == ReportFormat::json) {
        nlohmann::json doc = {{"study", o.study}, {"alpha", base.alpha}, {"seed", base.seed},
                              {"rows", rows}};
        sink.stream() << doc.dump(2) << '\n';
    }
    sink.finish();
    return kExitOk;
}

int run_perf(const Options& o) {
    PerfGrid grid;
    grid.base = synthetic_spec(o, 10);
    grid.d_values = o.d_values.empty() ? std::vector<int>{o.d} : o.d_values;
    grid.order_values =
        o.order_values.empty() ? std::vector<int>{grid.base.max_order} : o.order_values;
    grid.sparsity_values =
        o.sparsity_values.empty() ? std::vector<double>{o.sparsity} : o.sparsity_values;
    const auto rows = run_perf_study(grid, o.threads);
    Sink sink(o.output);
    if (parse_format(o.format) == ReportFormat::csv) {
        write_perf_csv(sink.stream(), rows);
    } else {
        nlohmann::json doc = nlohmann::json::array();
        for (const auto& r : rows)
            doc.push_back({{"d", r.d},
                           {"r", r.max_order},
                           {"sparsity", r.sparsity},
                           {"trials", r.trials},
                           {"mean_time", r.mean_time},
                           {"sd_time", r.sd_time},
                           {"mean_visit_rate", r.mean_visit_rate},
                           {"sd_visit_rate", r.sd_visit_rate}});
        sink.stream() << doc.dump(2) << '\n';
    }
    sink.finish();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-order interaction screening with selective inference"};
    app.require_subcommand(1);
    Options o;

    auto* screen = app.add_subcommand("screen", "Top-k marginal screening of interaction features");
    add_shared(screen, o);
    add_data(screen, o);

    auto* infer_cmd =
        app.add_subcommand("infer", "Screen, then selective p-values and confidence intervals");
    add_shared(infer_cmd, o);
    add_data(infer_cmd, o);

    auto* synth = app.add_subcommand("synth", "False/true positive rate studies on synthetic data");
    add_shared(synth, o);
    add_synthetic(synth, o);
    synth->add_option("--study", o.study, "fpr or tpr")->check(CLI::IsMember({"fpr", "tpr"}));
    synth->add_option("--d", o.d, "Covariates")->check(CLI::PositiveNumber);
    synth->add_option("--beta", o.beta, "Coefficient of z1*z2*z3 in the tpr study");
    synth->add_option("--sweep", o.sweep, "Parameter to sweep: n, d, sigma, sparsity or beta");
    synth->add_option("--values", o.values, "Sweep values")->delimiter(',');

    auto* perf = app.add_subcommand("perf", "Timing and 1-pruning rate of the truncation search");
    add_shared(perf, o);
    add_synthetic(perf, o);
    perf->add_option("--d", o.d_values, "Covariate counts")->delimiter(',');
    perf->add_option("--orders", o.order_values, "Interaction orders")->delimiter(',');
    perf->add_option("--sparsities", o.sparsity_values, "Sparsity levels")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*screen) return run_screen(o);
        if (*infer_cmd) return run_infer(o);
        if (*synth) return run_synth(o);
        if (*perf) return run_perf(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}
