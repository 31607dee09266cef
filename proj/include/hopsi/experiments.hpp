#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hopsi/dataset.hpp"
#include "hopsi/inference.hpp"
#include "hopsi/itemset.hpp"

namespace hopsi {

/// Synthetic study: binary Z with a given rate of zeros, y = X beta + noise.
struct SyntheticSpec {
    int n = 100;
    int d = 100;
    int max_order = 3;
    int k = 10;
    double sparsity = 0.5;  // fraction of zero entries in Z
    double sigma = 0.1;
    std::vector<std::pair<Itemset, double>> truth;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int trials = 1000;

    void validate() const;
    ModelConfig model() const;
};

/// Deterministic function of (spec.seed, trial).
Dataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t trial);

enum class Method { psi, ols, split };
std::string method_name(Method m);

struct TrialOutcome {
    Method method = Method::psi;
    std::vector<Itemset> selected;
    std::vector<Itemset> significant;  // subset of selected
    std::vector<double> p_values;      // aligned with selected
    std::vector<double> pivots;        // PSI only, aligned with selected
    double elapsed = 0.0;
    std::uint64_t nodes_visited = 0;
    double visit_rate = 0.0;
    bool degenerate = false;  // singular design; no inference was possible
};

TrialOutcome psi_inference(const Dataset& data, const ModelConfig& config,
                           InferenceOptions options = {});

/// Screen and test on the same data with classical z-tests (known sigma).
TrialOutcome naive_ols_inference(const Dataset& data, const ModelConfig& config);

/// Seeded random halves of 0..n-1: the first has ceil(n/2) rows.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_rows(Eigen::Index n,
                                                                          std::uint64_t seed);
/// Screen on the first ceil(n/2) rows of a seeded permutation, then fit and
/// z-test on the remaining rows.
TrialOutcome split_inference(const Dataset& data, const ModelConfig& config, std::uint64_t seed);

struct MethodRate {
    Method method = Method::psi;
    int trials = 0;      // non-degenerate trials
    int degenerate = 0;  // trials skipped for a singular design
    double rate = 0.0;
    double std_error = 0.0;
};

struct FprStudy {
    std::vector<MethodRate> rates;  // psi, ols, split
    /// Pivot of the top-ranked PSI coefficient, one per usable trial.
    std::vector<double> top_pivots;
};

/// Mean over trials of (#significant / k) for each method; truth must be empty.
FprStudy run_fpr_study(const SyntheticSpec& spec, int threads = 1);

/// Fraction of trials in which `target` is selected and significant
/// (PSI and SPLIT).
std::vector<MethodRate> run_tpr_study(const SyntheticSpec& spec, const Itemset& target,
                                      int threads = 1);

struct PerfRow {
    int d = 0;
    int max_order = 0;
    double sparsity = 0.0;
    int trials = 0;
    double mean_time = 0.0;
    double sd_time = 0.0;
    double mean_visit_rate = 0.0;
    double sd_visit_rate = 0.0;
};

struct PerfGrid {
    SyntheticSpec base;
    std::vector<int> d_values;
    std::vector<int> order_values;
    std::vector<double> sparsity_values;
};

/// Computation time and visited fraction of the truncation-point search,
/// averaged over base.trials trials per grid point.
std::vector<PerfRow> run_perf_study(const PerfGrid& grid, int threads = 1);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Unif(0, 1).
KsResult ks_uniform(std::vector<double> values);

void write_rates_csv(std::ostream& out, const std::string& parameter, double value,
                     const std::vector<MethodRate>& rates, bool with_header);
void write_perf_csv(std::ostream& out, const std::vector<PerfRow>& rows);

}  // namespace hopsi
