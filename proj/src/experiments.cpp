#include "hopsi/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "hopsi/errors.hpp"
#include "hopsi/io.hpp"
#include "hopsi/linear_model.hpp"
#include "hopsi/parallel.hpp"
#include "hopsi/screening.hpp"

namespace hopsi {

namespace {

// Independent generator per (seed, trial, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t trial, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      stream};
    return std::mt19937_64(seq);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Itemset> significant_of(const std::vector<Itemset>& selected,
                                    const std::vector<double>& p_values, double alpha) {
    std::vector<Itemset> out;
    for (std::size_t j = 0; j < selected.size(); ++j)
        if (p_values[j] < alpha) out.push_back(selected[j]);
    return out;
}

// Classical z-tests of every selected coefficient on `fit_data`.
void z_test_all(TrialOutcome& out, const Dataset& fit_data, const ModelConfig& config) {
    const GramSolver gram(selected_design(out.selected, fit_data.z()));
    const NoiseModel noise{config.sigma, std::nullopt};
    for (std::size_t j = 0; j < out.selected.size(); ++j)
        out.p_values.push_back(
            naive_z_pvalue(gram, static_cast<Eigen::Index>(j), fit_data.y(), noise));
    out.significant = significant_of(out.selected, out.p_values, config.alpha);
}

MethodRate summarize(Method method, const std::vector<double>& values, int degenerate,
                     bool binomial) {
    MethodRate r;
    r.method = method;
    r.trials = static_cast<int>(values.size());
    r.degenerate = degenerate;
    if (values.empty()) return r;
    const double t = static_cast<double>(values.size());
    r.rate = std::accumulate(values.begin(), values.end(), 0.0) / t;
    if (binomial) {
        r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / t);
    } else if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.rate) * (v - r.rate);
        r.std_error = std::sqrt(ss / (t - 1.0) / t);
    }
    return r;
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n < 2 || d < 1 || max_order < 1 || k < 1) throw UsageError("invalid synthetic sizes");
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw UsageError("sparsity must lie in [0, 1]");
    if (!(sigma > 0.0)) throw UsageError("sigma must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (trials < 1) throw UsageError("trials must be at least 1");
    for (const auto& [itemset, coeff] : truth) {
        if (itemset.empty() || itemset.order() > max_order || itemset.back() >= d)
            throw UsageError("truth itemset " + itemset.label() + " is out of range");
    }
}

ModelConfig SyntheticSpec::model() const {
    ModelConfig m;
    m.max_order = max_order;
    m.k = k;
    m.sigma = sigma;
    m.alpha = alpha;
    return m;
}

Dataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t trial) {
    spec.validate();
    auto rng = make_rng(spec.seed, trial, 0);
    std::bernoulli_distribution present(1.0 - spec.sparsity);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    Eigen::MatrixXd z(spec.n, spec.d);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.d; ++j) z(i, j) = present(rng) ? 1.0 : 0.0;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(spec.n);
    for (const auto& [itemset, coeff] : spec.truth) y += coeff * feature_column(itemset, z);
    for (int i = 0; i < spec.n; ++i) y[i] += noise(rng);
    return Dataset(std::move(z), std::move(y));
}

std::string method_name(Method m) {
    switch (m) {
        case Method::psi: return "PSI";
        case Method::ols: return "OLS";
        case Method::split: return "SPLIT";
    }
    return "?";
}

TrialOutcome psi_inference(const Dataset& data, const ModelConfig& config,
                           InferenceOptions options) {
    TrialOutcome out;
    out.method = Method::psi;
    const auto start = std::chrono::steady_clock::now();
    auto [sel, screen_metrics] =
        marginal_screen(data, config.k, config.max_order, ScreeningOptions{options.prune});
    out.selected = sel.selected;
    try {
        const InferenceReport report = infer(data, config, sel, screen_metrics, options);
        for (const auto& f : report.features) {
            out.p_values.push_back(f.p_value);
            out.pivots.push_back(f.pivot);
        }
        out.significant = significant_of(out.selected, out.p_values, config.alpha);
        out.nodes_visited = report.inference_metrics.nodes_visited;
        out.visit_rate = report.mean_visit_rate();
    } catch (const NumericError&) {
        out.degenerate = true;
    }
    out.elapsed = seconds_since(start);
    return out;
}

TrialOutcome naive_ols_inference(const Dataset& data, const ModelConfig& config) {
    TrialOutcome out;
    out.method = Method::ols;
    const auto start = std::chrono::steady_clock::now();
    auto [sel, metrics] = marginal_screen(data, config.k, config.max_order);
    out.selected = sel.selected;
    out.nodes_visited = metrics.nodes_visited;
    try {
        z_test_all(out, data, config);
    } catch (const NumericError&) {
        out.degenerate = true;
        out.p_values.clear();
    }
    out.elapsed = seconds_since(start);
    return out;
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_rows(Eigen::Index n,
                                                                          std::uint64_t seed) {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto first = static_cast<long>((n + 1) / 2);
    return {{perm.begin(), perm.begin() + first}, {perm.begin() + first, perm.end()}};
}

TrialOutcome split_inference(const Dataset& data, const ModelConfig& config, std::uint64_t seed) {
    if (data.n() < 2) throw UsageError("data splitting needs at least two rows");
    TrialOutcome out;
    out.method = Method::split;
    const auto start = std::chrono::steady_clock::now();
    const auto [screen_rows, test_rows] = split_rows(data.n(), seed);
    const Dataset screen_half = data.rows(screen_rows);
    const Dataset test_half = data.rows(test_rows);

    auto [sel, metrics] = marginal_screen(screen_half, config.k, config.max_order);
    out.selected = sel.selected;
    out.nodes_visited = metrics.nodes_visited;
    try {
        z_test_all(out, test_half, config);
    } catch (const NumericError&) {
        out.degenerate = true;
        out.p_values.clear();
    }
    out.elapsed = seconds_since(start);
    return out;
}

FprStudy run_fpr_study(const SyntheticSpec& spec, int threads) {
    spec.validate();
    if (!spec.truth.empty()) throw UsageError("false-positive study requires an empty truth");
    const ModelConfig config = spec.model();
    const auto trials = static_cast<std::size_t>(spec.trials);
    std::vector<TrialOutcome> psi(trials), ols(trials), split(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const Dataset data = gen_synthetic(spec, t);
        psi[t] = psi_inference(data, config);
        ols[t] = naive_ols_inference(data, config);
        split[t] = split_inference(data, config, make_rng(spec.seed, t, 1)());
    });

    FprStudy study;
    for (auto [method, outcomes] : {std::pair{Method::psi, &psi}, std::pair{Method::ols, &ols},
                                    std::pair{Method::split, &split}}) {
        std::vector<double> fractions;
        int degenerate = 0;
        for (const auto& o : *outcomes) {
            if (o.degenerate) {
                ++degenerate;
                continue;
            }
            fractions.push_back(static_cast<double>(o.significant.size()) /
                                static_cast<double>(o.selected.size()));
        }
        study.rates.push_back(summarize(method, fractions, degenerate, false));
    }
    for (const auto& o : psi)
        if (!o.degenerate) study.top_pivots.push_back(o.pivots.front());
    return study;
}

std::vector<MethodRate> run_tpr_study(const SyntheticSpec& spec, const Itemset& target,
                                      int threads) {
    spec.validate();
    const ModelConfig config = spec.model();
    const auto trials = static_cast<std::size_t>(spec.trials);
    std::vector<TrialOutcome> psi(trials), split(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        const Dataset data = gen_synthetic(spec, t);
        psi[t] = psi_inference(data, config);
        split[t] = split_inference(data, config, make_rng(spec.seed, t, 1)());
    });

    std::vector<MethodRate> rates;
    for (auto [method, outcomes] : {std::pair{Method::psi, &psi}, std::pair{Method::split, &split}}) {
        std::vector<double> hits;
        int degenerate = 0;
        for (const auto& o : *outcomes) {
            if (o.degenerate) {
                ++degenerate;
                continue;
            }
            const bool found =
                std::find(o.significant.begin(), o.significant.end(), target) != o.significant.end();
            hits.push_back(found ? 1.0 : 0.0);
        }
        rates.push_back(summarize(method, hits, degenerate, true));
    }
    return rates;
}

std::vector<PerfRow> run_perf_study(const PerfGrid& grid, int threads) {
    std::vector<PerfRow> rows;
    for (int d : grid.d_values)
        for (int r : grid.order_values)
            for (double sparsity : grid.sparsity_values) {
                SyntheticSpec spec = grid.base;
                spec.d = d;
                spec.max_order = r;
                spec.sparsity = sparsity;
                spec.validate();
                const ModelConfig config = spec.model();
                const auto trials = static_cast<std::size_t>(spec.trials);
                std::vector<double> times, rates;
                // degenerate draws are replaced by further trial indices, up to 10x
                std::size_t next = 0;
                while (times.size() < trials && next < 10 * trials) {
                    const std::size_t batch = trials - times.size();
                    std::vector<TrialOutcome> outcomes(batch);
                    parallel_for(batch, threads, [&](std::size_t t) {
                        outcomes[t] = psi_inference(gen_synthetic(spec, next + t), config);
                    });
                    next += batch;
                    for (const auto& o : outcomes) {
                        if (o.degenerate) continue;
                        times.push_back(o.elapsed);
                        rates.push_back(o.visit_rate);
                    }
                }
                PerfRow row;
                row.d = d;
                row.max_order = r;
                row.sparsity = sparsity;
                row.trials = static_cast<int>(times.size());
                std::tie(row.mean_time, row.sd_time) = mean_sd(times);
                std::tie(row.mean_visit_rate, row.sd_visit_rate) = mean_sd(rates);
                rows.push_back(row);
            }
    return rows;
}

KsResult ks_uniform(std::vector<double> values) {
    if (values.empty()) throw UsageError("KS test needs at least one value");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double dstat = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double u = std::clamp(values[i], 0.0, 1.0);
        dstat = std::max({dstat, (static_cast<double>(i) + 1.0) / n - u,
                          u - static_cast<double>(i) / n});
    }
    // Kolmogorov limiting distribution with Stephens' small-sample scaling
    const double sn = std::sqrt(n);
    const double x = (sn + 0.12 + 0.11 / sn) * dstat;
    double p = 0.0;
    if (x < 0.2) {
        p = 1.0;
    } else {
        for (int j = 1; j <= 100; ++j) {
            const double term = std::exp(-2.0 * j * j * x * x);
            p += (j % 2 == 1 ? 2.0 : -2.0) * term;
            if (term < 1e-16) break;
        }
    }
    return {dstat, std::clamp(p, 0.0, 1.0)};
}

void write_rates_csv(std::ostream& out, const std::string& parameter, double value,
                     const std::vector<MethodRate>& rates, bool with_header) {
    if (with_header) out << "parameter,value,method,rate,std_error,trials,degenerate\n";
    for (const auto& r : rates)
        out << parameter << ',' << format_real(value) << ',' << method_name(r.method) << ','
            << format_real(r.rate) << ',' << format_real(r.std_error) << ',' << r.trials << ','
            << r.degenerate << '\n';
}

void write_perf_csv(std::ostream& out, const std::vector<PerfRow>& rows) {
    out << "d,r,sparsity,trials,mean_time,sd_time,mean_visit_rate,sd_visit_rate\n";
    for (const auto& r : rows)
        out << r.d << ',' << r.max_order << ',' << format_real(r.sparsity) << ',' << r.trials << ','
            << format_real(r.mean_time) << ',' << format_real(r.sd_time) << ','
            << format_real(r.mean_visit_rate) << ',' << format_real(r.sd_visit_rate) << '\n';
}

}  // namespace hopsi
