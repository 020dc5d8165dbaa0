#include "kfpls/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "kfpls/errors.hpp"

namespace kfpls {

BsplineBasis::BsplineBasis(int order, std::vector<double> breakpoints) : order_(order) {
    if (order_ < 1) throw ConfigError("B-spline order must be >= 1");
    if (breakpoints.size() < 2) throw ConfigError("need at least 2 breakpoints");
    for (double b : breakpoints)
        if (!std::isfinite(b)) throw ConfigError("breakpoints must be finite");
    if (std::adjacent_find(breakpoints.begin(), breakpoints.end(),
                           [](double a, double b) { return a >= b; }) != breakpoints.end())
        throw ConfigError("breakpoints must be strictly increasing");

    n_basis_ = order_ + static_cast<int>(breakpoints.size()) - 2;
    knots_.reserve(breakpoints.size() + 2 * static_cast<std::size_t>(order_ - 1));
    knots_.insert(knots_.end(), static_cast<std::size_t>(order_ - 1), breakpoints.front());
    knots_.insert(knots_.end(), breakpoints.begin(), breakpoints.end());
    knots_.insert(knots_.end(), static_cast<std::size_t>(order_ - 1), breakpoints.back());
}

BsplineBasis BsplineBasis::simulation_basis() {
    std::vector<double> breaks(21);
    for (std::size_t k = 0; k < breaks.size(); ++k)
        breaks[k] = static_cast<double>(k) / 20.0;
    return {4, std::move(breaks)};
}

Eigen::VectorXd BsplineBasis::eval(double t) const {
    if (!(t >= domain_min() && t <= domain_max()))
        throw ConfigError("evaluation point outside the basis domain");

    const int degree = order_ - 1;
    // Span k satisfies knots[k] <= t < knots[k+1]; the domain end belongs to
    // the last nondegenerate span.
    int span;
    if (t == domain_max()) {
        span = n_basis_ - 1;
    } else {
        auto first = knots_.begin() + degree;
        auto last = knots_.begin() + n_basis_ + 1;
        span = static_cast<int>(std::upper_bound(first, last, t) - knots_.begin()) - 1;
    }

    // Cox-de Boor triangle for the `order` functions alive on the span.
    std::vector<double> local(static_cast<std::size_t>(order_), 0.0);
    std::vector<double> left(static_cast<std::size_t>(order_), 0.0);
    std::vector<double> right(static_cast<std::size_t>(order_), 0.0);
    local[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = t - knots_[static_cast<std::size_t>(span + 1 - j)];
        right[j] = knots_[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = local[r] / (right[r + 1] + left[j - r]);
            local[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        local[j] = saved;
    }

    Eigen::VectorXd values = Eigen::VectorXd::Zero(n_basis_);
    for (int r = 0; r <= degree; ++r) values[span - degree + r] = local[r];
    return values;
}

Eigen::MatrixXd BsplineBasis::design_matrix(const Grid& grid) const {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(grid.size()), n_basis_);
    for (std::size_t k = 0; k < grid.size(); ++k)
        design.row(static_cast<Eigen::Index>(k)) = eval(grid.points()[k]).transpose();
    return design;
}

double beta1(double t) { return 2.0 * std::sin(2.0 * std::numbers::pi * t); }
double beta2(double t) { return 2.0 * std::cos(2.0 * std::numbers::pi * t); }

void ScenarioSpec::validate() const {
    const bool ok = (scenario == 1 && link_case >= 1 && link_case <= 4) ||
                    (scenario == 2 && (link_case == 1 || link_case == 2)) ||
                    (scenario == 3 && link_case == 1);
    if (!ok) throw ConfigError("invalid scenario/case combination");
    if (n_train < 1) throw ConfigError("n_train must be >= 1");
    if (n_test < 1) throw ConfigError("n_test must be >= 1");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw ConfigError("noise_sd must be finite and >= 0");
    if (grid_size < 2) throw ConfigError("grid_size must be >= 2");
}

Grid uniform_grid(std::size_t grid_size) {
    if (grid_size < 2) throw ConfigError("grid_size must be >= 2");
    std::vector<double> pts(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k)
        pts[k] = static_cast<double>(k) / static_cast<double>(grid_size - 1);
    return Grid(std::move(pts));
}

double link_value(int scenario, int link_case, double z) {
    if (scenario != 1) throw ConfigError("single-argument link is Scenario 1 only");
    switch (link_case) {
        case 1: return z;
        case 2: return z * z;
        case 3: return std::cos(std::numbers::pi * z / 2.0);
        case 4: return z == 0.0 ? 10.0 : 10.0 * std::sin(z) / z;
        default: throw ConfigError("Scenario 1 case must be in 1..4");
    }
}

double link_value(int scenario, int link_case, double z1, double z2) {
    if (scenario != 2) throw ConfigError("two-argument link is Scenario 2 only");
    const double g1 = std::cos(std::numbers::pi * z1 / 2.0);
    if (link_case == 1) return g1 + std::sin(std::numbers::pi * z2 / 2.0);
    if (link_case == 2) return g1 + z2 * z2;
    throw ConfigError("Scenario 2 case must be 1 or 2");
}

namespace {

double weighted_beta_integral(const SampledCurve& curve, double (*beta)(double)) {
    const auto& pts = curve.grid.points();
    std::vector<double> integrand(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k)
        integrand[k] = curve.values[k] * beta(pts[k]);
    return trapezoid_integral(integrand, curve.grid);
}

}  // namespace

double truth_value_s1_s2(const FunctionalSample& sample, int scenario, int link_case) {
    if (sample.n_curves() != 2) throw StructuralError("scenario truths require p = 2");
    const double z1 = weighted_beta_integral(sample.curve(0), beta1);
    const double z2 = weighted_beta_integral(sample.curve(1), beta2);
    if (scenario == 1) return link_value(1, link_case, z1 + z2);
    return link_value(2, link_case, z1, z2);
}

double truth_value_s3(const FunctionalSample& sample) {
    if (sample.n_curves() != 2) throw StructuralError("scenario truths require p = 2");
    double total = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& curve = sample.curve(j);
        const auto& pts = curve.grid.points();
        std::vector<double> integrand(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double x = curve.values[k];
            integrand[k] = pts[k] * (j == 0 ? std::sin(x) : std::cos(x));
        }
        total += trapezoid_integral(integrand, curve.grid);
    }
    return total;
}

double truth_value(const FunctionalSample& sample, int scenario, int link_case) {
    if (scenario == 3) return truth_value_s3(sample);
    return truth_value_s1_s2(sample, scenario, link_case);
}

FunctionalSample sample_from_coeffs(const Eigen::VectorXd& coeffs1,
                                    const Eigen::VectorXd& coeffs2, const BsplineBasis& basis,
                                    const Grid& grid) {
    if (coeffs1.size() != basis.n_basis() || coeffs2.size() != basis.n_basis())
        throw ConfigError("coefficient length does not match the basis");
    const Eigen::MatrixXd design = basis.design_matrix(grid);
    const Eigen::VectorXd v1 = design * coeffs1;
    const Eigen::VectorXd v2 = design * coeffs2;
    std::vector<SampledCurve> curves;
    curves.emplace_back(grid, std::vector<double>(v1.begin(), v1.end()));
    curves.emplace_back(grid, std::vector<double>(v2.begin(), v2.end()));
    return FunctionalSample(std::move(curves));
}

std::vector<FunctionalSample> gen_covariates(std::size_t n, const BsplineBasis& basis,
                                             const Grid& grid, Rng& rng) {
    if (n < 1) throw ConfigError("need n >= 1 subjects");
    const Eigen::MatrixXd design = basis.design_matrix(grid);
    const int n_basis = basis.n_basis();

    std::vector<FunctionalSample> samples;
    samples.reserve(n);
    Eigen::VectorXd coeffs(n_basis);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<SampledCurve> curves;
        curves.reserve(2);
        for (int j = 0; j < 2; ++j) {
            for (int l = 0; l < n_basis; ++l) coeffs[l] = rng.normal();
            const Eigen::VectorXd values = design * coeffs;
            curves.emplace_back(grid, std::vector<double>(values.begin(), values.end()));
        }
        samples.emplace_back(std::move(curves));
    }
    return samples;
}

namespace {

FunctionalDataset assemble_split(std::vector<FunctionalSample> samples,
                                 const std::vector<double>& noise, int scenario, int link_case,
                                 std::vector<double>& truth_out) {
    truth_out.resize(samples.size());
    std::vector<double> responses(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        truth_out[i] = truth_value(samples[i], scenario, link_case);
        responses[i] = truth_out[i] + noise[i];
    }
    return FunctionalDataset(std::move(samples), std::move(responses));
}

}  // namespace

GeneratedData generate(const ScenarioSpec& spec) {
    spec.validate();
    const BsplineBasis basis = BsplineBasis::simulation_basis();
    const Grid grid = uniform_grid(spec.grid_size);
    Rng rng(spec.seed);

    auto train_samples = gen_covariates(spec.n_train, basis, grid, rng);
    std::vector<double> train_noise(spec.n_train);
    for (auto& e : train_noise) e = rng.normal(0.0, spec.noise_sd);
    auto test_samples = gen_covariates(spec.n_test, basis, grid, rng);
    std::vector<double> test_noise(spec.n_test);
    for (auto& e : test_noise) e = rng.normal(0.0, spec.noise_sd);

    std::vector<double> train_truth;
    std::vector<double> test_truth;
    FunctionalDataset train = assemble_split(std::move(train_samples), train_noise,
                                             spec.scenario, spec.link_case, train_truth);
    FunctionalDataset test = assemble_split(std::move(test_samples), test_noise, spec.scenario,
                                            spec.link_case, test_truth);
    return {std::move(train), std::move(test), std::move(train_truth), std::move(test_truth)};
}

}  // namespace kfpls
