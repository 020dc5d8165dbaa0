#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace kfpls {

/// RASE/ARPE of one evaluated split. y_max_abs is max_i |Y_i| over the same
/// split the metrics were computed on.
struct EvalReport {
    double rase = 0.0;
    double arpe = 0.0;
    std::size_t n = 0;
    double y_max_abs = 0.0;
};

/// Replicate aggregation with the unbiased (n-1) standard deviation.
struct McSummary {
    double mean_rase = 0.0;
    double sd_rase = 0.0;
    double mean_arpe = 0.0;
    double sd_arpe = 0.0;
    std::size_t n_runs = 0;
};

/// sqrt(mean((y_hat - y)^2)).
double rase(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

/// mean(|y_hat - y|) / max|y|; throws when max|y| = 0 (metric undefined).
double arpe(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

/// Both metrics plus the split's n and Y_max.
EvalReport evaluate(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

/// Mean and sample sd of rase/arpe across >= 2 replicate reports.
McSummary mc_summarize(const std::vector<EvalReport>& reports);

}  // namespace kfpls
