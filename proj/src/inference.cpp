#include "hopsi/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hopsi/errors.hpp"
#include "hopsi/node_stats.hpp"
#include "hopsi/normal.hpp"
#include "hopsi/parallel.hpp"

namespace hopsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A pruning test only fires when the incumbent clears the bound by this
// relative margin, so floating-point rounding in a descendant's ratio can
// never let it overtake the incumbent.
constexpr double kPruneMargin = 1e-10;

double margin(double bound) { return kPruneMargin * (1.0 + std::abs(bound)); }

// Sums of the unselected column entering one family of pair rows:
// numerator kappa + x^T xi, denominator rho + x^T chi.
struct CaseSums {
    double a_minus;
    double b_plus;
    double b_minus;
};

// pair_minus rows use xi = -y, chi = c; pair_plus rows use xi = y, chi = -c.
CaseSums minus_case(const SignedSums& sy, const SignedSums& sc) { return {sy.pos, sc.pos, sc.neg}; }
CaseSums plus_case(const SignedSums& sy, const SignedSums& sc) { return {sy.neg, sc.neg, sc.pos}; }

// No row below the node can raise the lower truncation point.
bool lower_rule(double kappa, double rho, const CaseSums& s, double best) {
    const double slack = kappa - s.a_minus;
    const double low_den = std::abs(rho - s.b_minus);
    const double high_den = std::abs(rho + s.b_plus);
    const double den = rho + s.b_plus < 0.0 ? low_den : std::max(low_den, high_den);
    if (den == 0.0) return true;  // every descendant denominator is exactly zero
    const double bound = -slack / den;
    return best >= bound + margin(bound);
}

// No row below the node can lower the upper truncation point.
bool upper_rule(double kappa, double rho, const CaseSums& s, double best) {
    const double slack = kappa - s.a_minus;
    const double low_den = std::abs(rho - s.b_minus);
    const double high_den = std::abs(rho + s.b_plus);
    const double den = rho - s.b_minus > 0.0 ? high_den : std::max(low_den, high_den);
    if (den == 0.0) return true;
    const double bound = slack / den;
    return best <= bound - margin(bound);
}

struct Incumbents {
    double lower = -kInf;
    double upper = kInf;
    ActiveConstraint lower_row;
    ActiveConstraint upper_row;

    // Ratios are offsets from eta^T y; numerators are >= 0 because y
    // satisfies every row, so clamp away rounding below zero.
    void offer(double numerator, double denominator, bool lower_open, bool upper_open,
               const auto& describe) {
        numerator = std::max(numerator, 0.0);
        if (lower_open && denominator < -kDenominatorTolerance) {
            const double ratio = numerator / denominator;
            if (ratio > lower) {
                lower = ratio;
                lower_row = describe();
            }
        } else if (upper_open && denominator > kDenominatorTolerance) {
            const double ratio = numerator / denominator;
            if (ratio < upper) {
                upper = ratio;
                upper_row = describe();
            }
        }
    }
};

bool is_selected(const std::vector<Itemset>& sorted_selected, std::span<const int> path) {
    auto it = std::lower_bound(sorted_selected.begin(), sorted_selected.end(), path,
                               [](const Itemset& s, std::span<const int> p) {
                                   const auto idx = s.indices();
                                   return std::lexicographical_compare(idx.begin(), idx.end(),
                                                                       p.begin(), p.end());
                               });
    return it != sorted_selected.end() && std::ranges::equal(it->indices(), path);
}

}  // namespace

TruncationInterval truncation_points(const ScreeningResult& sel, const Dataset& data,
                                     const Contrast& con, int max_order,
                                     TruncationOptions options) {
    const auto start = std::chrono::steady_clock::now();
    const auto& z = data.z();
    const auto& y = data.y();
    const auto k = sel.size();
    if (k == 0) throw UsageError("empty screening result");
    if (con.c.size() != data.n()) throw UsageError("contrast length does not match the data");

    std::vector<double> kappa(k);
    std::vector<double> rho(k);
    for (std::size_t j = 0; j < k; ++j) {
        const NodeStats stats = node_stats(sel.selected[j], z, y, &con.c);
        kappa[j] = sel.signs[j] * stats.y.net();
        rho[j] = -sel.signs[j] * stats.c->net();
    }

    Incumbents best;
    for (std::size_t j = 0; j < k; ++j) {
        best.offer(kappa[j], rho[j], true, true, [&] {
            return ActiveConstraint{ActiveConstraint::Kind::sign, static_cast<int>(j), {}};
        });
    }

    std::vector<Itemset> sorted_selected = sel.selected;
    std::sort(sorted_selected.begin(), sorted_selected.end());

    // warm start from the runners-up of the screening
    for (const Itemset& l : sel.runners_up) {
        if (l.order() > max_order || is_selected(sorted_selected, l.indices())) continue;
        const NodeStats stats = node_stats(l, z, y, &con.c);
        const double xy = stats.y.net();
        const double xc = stats.c->net();
        for (std::size_t j = 0; j < k; ++j) {
            auto describe = [&](ActiveConstraint::Kind kind) {
                return [&, kind] { return ActiveConstraint{kind, static_cast<int>(j), l}; };
            };
            best.offer(kappa[j] - xy, rho[j] + xc, true, true,
                       describe(ActiveConstraint::Kind::pair_minus));
            best.offer(kappa[j] + xy, rho[j] - xc, true, true,
                       describe(ActiveConstraint::Kind::pair_plus));
        }
    }

    struct Open {
        bool lower = true;
        bool upper = true;
    };
    const auto depth_limit = static_cast<std::size_t>(std::max(max_order, 0));
    std::vector<Open> open(depth_limit + 1);

    TraversalMetrics metrics;
    metrics.total_nodes = total_feature_count(data.d(), max_order);
    metrics.passes = k;

    for (std::size_t j = 0; j < k; ++j) {
        const double kap = kappa[j];
        const double rh = rho[j];
        auto visit = [&](const NodeView& node) {
            const std::size_t depth = node.path.size();
            const Open parent = open[depth - 1];
            if (!is_selected(sorted_selected, node.path)) {
                const double xy = node.y.net();
                const double xc = node.c.net();
                auto describe = [&](ActiveConstraint::Kind kind) {
                    return [&, kind] {
                        return ActiveConstraint{kind, static_cast<int>(j), Itemset(node.path)};
                    };
                };
                best.offer(kap - xy, rh + xc, parent.lower, parent.upper,
                           describe(ActiveConstraint::Kind::pair_minus));
                best.offer(kap + xy, rh - xc, parent.lower, parent.upper,
                           describe(ActiveConstraint::Kind::pair_plus));
            }
            Open here = parent;
            if (options.prune) {
                const CaseSums cm = minus_case(node.y, node.c);
                const CaseSums cp = plus_case(node.y, node.c);
                if (here.lower)
                    here.lower = !(lower_rule(kap, rh, cm, best.lower) &&
                                   lower_rule(kap, rh, cp, best.lower));
                if (here.upper)
                    here.upper = !(upper_rule(kap, rh, cm, best.upper) &&
                                   upper_rule(kap, rh, cp, best.upper));
            }
            open[depth] = here;
            return here.lower || here.upper;
        };
        metrics.nodes_visited += walk_itemset_tree(z, y, &con.c, max_order, visit);
    }

    TruncationInterval out;
    out.v_minus = best.lower + con.eta_y;
    out.v_plus = best.upper + con.eta_y;
    out.lower = best.lower_row;
    out.upper = best.upper_row;
    metrics.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.metrics = metrics;
    if (!(out.v_minus <= con.eta_y && con.eta_y <= out.v_plus))
        throw std::logic_error("observed statistic lies outside its truncation interval");
    if (!(out.v_minus < out.v_plus))
        throw NumericError("degenerate truncation interval: v_minus equals v_plus");
    return out;
}

double selective_pivot(double eta_y, double eta_var, const TruncationInterval& interval) {
    if (!(interval.v_minus <= eta_y && eta_y <= interval.v_plus))
        throw std::logic_error("observed statistic lies outside its truncation interval");
    return trunc_norm_cdf(eta_y, 0.0, eta_var, interval.v_minus, interval.v_plus);
}

double selective_pvalue(double eta_y, double eta_var, const TruncationInterval& interval) {
    const double f = selective_pivot(eta_y, eta_var, interval);
    const double sf = trunc_norm_sf(eta_y, 0.0, eta_var, interval.v_minus, interval.v_plus);
    return std::clamp(2.0 * std::min(f, sf), 0.0, 1.0);
}

namespace {

// Solve F(m) = target where F(m) = trunc_norm_cdf(x, m, var, v, w) is
// decreasing in m.
double invert_pivot(double x, double var, double v, double w, double target) {
    const double sd = std::sqrt(var);
    auto f = [&](double m) { return trunc_norm_cdf(x, m, var, v, w); };
    constexpr int kMaxDoublings = 200;

    double lo = x - sd;
    double hi = x + sd;
    double step = sd;
    int doublings = 0;
    while (f(lo) < target) {
        if (++doublings > kMaxDoublings) return -kInf;
        hi = std::min(hi, lo);
        step *= 2;
        lo = x - step;
    }
    step = sd;
    doublings = 0;
    while (f(hi) > target) {
        if (++doublings > kMaxDoublings) return kInf;
        lo = std::max(lo, hi);
        step *= 2;
        hi = x + step;
    }

    const double tol = 1e-8 * sd;
    for (int iter = 0; iter < 400; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (hi - lo <= tol && std::abs(fm - target) <= 1e-10) return mid;
        if (fm > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::pair<double, double> selective_interval(double eta_y, double eta_var,
                                             const TruncationInterval& interval, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (!(eta_var > 0.0)) throw UsageError("variance must be positive");
    if (!(interval.v_minus <= eta_y && eta_y <= interval.v_plus))
        throw std::logic_error("observed statistic lies outside its truncation interval");
    const double lo =
        invert_pivot(eta_y, eta_var, interval.v_minus, interval.v_plus, 1.0 - alpha / 2.0);
    const double hi = invert_pivot(eta_y, eta_var, interval.v_minus, interval.v_plus, alpha / 2.0);
    return {lo, hi};
}

void ModelConfig::validate(const Dataset& data) const {
    if (max_order < 1) throw UsageError("maximum interaction order must be at least 1");
    if (k < 1) throw UsageError("screening size k must be at least 1");
    const auto total = total_feature_count(data.d(), max_order);
    if (total && static_cast<std::uint64_t>(k) > *total)
        throw UsageError("screening size k exceeds the number of features");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    if (covariance) {
        if (covariance->rows() != data.n() || covariance->cols() != data.n())
            throw UsageError("covariance must be n x n");
        Eigen::LLT<Eigen::MatrixXd> llt(*covariance);
        if (llt.info() != Eigen::Success || !covariance->isApprox(covariance->transpose()))
            throw UsageError("covariance must be symmetric positive definite");
    } else if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw NumericError("noise level sigma must be positive");
    }
}

std::vector<int> InferenceReport::significant_by_order() const {
    std::vector<int> counts(static_cast<std::size_t>(std::max(max_order, 0)), 0);
    for (const auto& f : features)
        if (f.significant && f.itemset.order() <= max_order)
            ++counts[static_cast<std::size_t>(f.itemset.order() - 1)];
    return counts;
}

double InferenceReport::mean_visit_rate() const {
    if (features.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& f : features) sum += f.interval.metrics.visit_rate();
    return sum / static_cast<double>(features.size());
}

InferenceReport infer(const Dataset& data, const ModelConfig& config, InferenceOptions options) {
    config.validate(data);
    auto [screening, metrics] =
        marginal_screen(data, config.k, config.max_order, ScreeningOptions{options.prune});
    return infer(data, config, screening, metrics, options);
}

InferenceReport infer(const Dataset& data, const ModelConfig& config,
                      const ScreeningResult& screening, const TraversalMetrics& screening_metrics,
                      InferenceOptions options) {
    config.validate(data);
    std::vector<std::string> labels;
    for (const auto& s : screening.selected) labels.push_back(s.label(data.names()));
    const GramSolver gram(selected_design(screening.selected, data.z()), labels);
    const NoiseModel noise = config.noise();

    InferenceReport report;
    report.screening = screening;
    report.screening_metrics = screening_metrics;
    report.sigma = config.sigma;
    report.alpha = config.alpha;
    report.max_order = config.max_order;
    report.features.resize(screening.size());

    auto run_one = [&](std::size_t j) {
        FeatureInference& f = report.features[j];
        f.itemset = screening.selected[j];
        f.sign = screening.signs[j];
        f.score = screening.scores[j];
        const Contrast con =
            contrast_for_coefficient(gram, static_cast<Eigen::Index>(j), data.y(), noise);
        f.beta_hat = con.eta_y;
        f.eta_var = con.eta_var;
        f.interval = truncation_points(screening, data, con, config.max_order,
                                       TruncationOptions{options.prune});
        f.pivot = selective_pivot(con.eta_y, con.eta_var, f.interval);
        f.p_value = selective_pvalue(con.eta_y, con.eta_var, f.interval);
        std::tie(f.ci_low, f.ci_high) =
            selective_interval(con.eta_y, con.eta_var, f.interval, config.alpha);
        f.significant = f.p_value < config.alpha;
    };

    parallel_for(screening.size(), options.threads, run_one);

    report.inference_metrics.total_nodes = total_feature_count(data.d(), config.max_order);
    report.inference_metrics.passes = 0;
    for (const auto& f : report.features) {
        report.inference_metrics.nodes_visited += f.interval.metrics.nodes_visited;
        report.inference_metrics.passes += f.interval.metrics.passes;
        report.inference_metrics.elapsed += f.interval.metrics.elapsed;
    }
    return report;
}

}  // namespace hopsi
