#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hopsi/dataset.hpp"
#include "hopsi/itemset.hpp"
#include "hopsi/linear_model.hpp"
#include "hopsi/metrics.hpp"
#include "hopsi/screening.hpp"

namespace hopsi {

/// Denominators (A c)_r with magnitude below this are treated as zero: the
/// constraint then bounds neither truncation point.
inline constexpr double kDenominatorTolerance = 1e-12;

/// Which row of the selection event attains a truncation point.
struct ActiveConstraint {
    enum class Kind { none, sign, pair_minus, pair_plus };
    Kind kind = Kind::none;
    int selected = -1;   // position in the screening result
    Itemset unselected;  // only for pair rows

    // pair_minus: (x_l - s_j x_j)^T y <= 0;  pair_plus: (-x_l - s_j x_j)^T y <= 0
};

/// Conditioning interval [v_minus, v_plus] of eta^T y given the selection
/// event; either end may be infinite.
struct TruncationInterval {
    double v_minus = 0.0;
    double v_plus = 0.0;
    ActiveConstraint lower;
    ActiveConstraint upper;
    TraversalMetrics metrics;
};

struct TruncationOptions {
    bool prune = true;
};

/// Truncation points of eta^T y under the marginal-screening event, found by
/// one depth-first walk of the itemset tree per selected feature with the
/// subtree pruning rules. Matches the explicit max/min over all 2*k*(D-k)+k
/// rows of the event.
TruncationInterval truncation_points(const ScreeningResult& sel, const Dataset& data,
                                     const Contrast& con, int max_order,
                                     TruncationOptions options = {});

/// Truncated-Normal pivot of eta^T y under eta^T mu = 0.
double selective_pivot(double eta_y, double eta_var, const TruncationInterval& interval);

/// Two-sided selective p-value, 2 * min(F, 1 - F).
double selective_pvalue(double eta_y, double eta_var, const TruncationInterval& interval);

/// Confidence interval for eta^T mu at level 1 - alpha obtained by inverting
/// the pivot in its mean. An endpoint that cannot be bracketed is infinite.
std::pair<double, double> selective_interval(double eta_y, double eta_var,
                                             const TruncationInterval& interval, double alpha);

struct ModelConfig {
    int max_order = 3;
    int k = 10;
    double sigma = 1.0;
    std::optional<Eigen::MatrixXd> covariance;
    double alpha = 0.05;

    NoiseModel noise() const { return {sigma, covariance}; }
    /// Throws UsageError for out-of-range settings.
    void validate(const Dataset& data) const;
};

struct InferenceOptions {
    bool prune = true;
    int threads = 1;
};

struct FeatureInference {
    Itemset itemset;
    int sign = 1;
    double score = 0.0;
    double beta_hat = 0.0;
    double eta_var = 0.0;
    TruncationInterval interval;
    double pivot = 0.5;
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool significant = false;
};

struct InferenceReport {
    std::vector<FeatureInference> features;  // in screening order
    ScreeningResult screening;
    TraversalMetrics screening_metrics;
    TraversalMetrics inference_metrics;  // summed over all coefficients
    double sigma = 0.0;
    double alpha = 0.05;
    int max_order = 0;

    /// Count of significant features by interaction order 1..max_order.
    std::vector<int> significant_by_order() const;
    /// Mean over coefficients of the visited fraction of the tree.
    double mean_visit_rate() const;
};

/// Screen, fit the selected model and run selective inference on every
/// selected coefficient.
InferenceReport infer(const Dataset& data, const ModelConfig& config,
                      InferenceOptions options = {});

/// Same, reusing a screening result computed on `data` with config.k and
/// config.max_order.
InferenceReport infer(const Dataset& data, const ModelConfig& config,
                      const ScreeningResult& screening, const TraversalMetrics& screening_metrics,
                      InferenceOptions options = {});

}  // namespace hopsi
