#include "kfpls/metrics.hpp"

#include <cmath>
#include <tuple>
#include <utility>

#include "kfpls/errors.hpp"

namespace kfpls {

namespace {

void check_pair(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
    if (y_hat.size() != y.size())
        throw StructuralError("prediction and response lengths differ");
    if (y.size() < 1) throw StructuralError("metrics need at least one observation");
}

}  // namespace

double rase(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
    check_pair(y_hat, y);
    return std::sqrt((y_hat - y).squaredNorm() / static_cast<double>(y.size()));
}

double arpe(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
    check_pair(y_hat, y);
    const double y_max = y.cwiseAbs().maxCoeff();
    if (y_max == 0.0)
        throw NumericError("undefined_metric", "ARPE undefined: all responses are zero");
    return (y_hat - y).cwiseAbs().mean() / y_max;
}

EvalReport evaluate(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
    EvalReport report;
    report.rase = rase(y_hat, y);
    report.arpe = arpe(y_hat, y);
    report.n = static_cast<std::size_t>(y.size());
    report.y_max_abs = y.cwiseAbs().maxCoeff();
    return report;
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

McSummary mc_summarize(const std::vector<EvalReport>& reports) {
    if (reports.size() < 2)
        throw ConfigError("Monte Carlo summary needs at least 2 replicates");
    std::vector<double> rases;
    std::vector<double> arpes;
    rases.reserve(reports.size());
    arpes.reserve(reports.size());
    for (const auto& r : reports) {
        rases.push_back(r.rase);
        arpes.push_back(r.arpe);
    }
    McSummary s;
    std::tie(s.mean_rase, s.sd_rase) = mean_sd(rases);
    std::tie(s.mean_arpe, s.sd_arpe) = mean_sd(arpes);
    s.n_runs = reports.size();
    return s;
}

}  // namespace kfpls
