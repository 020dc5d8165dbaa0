#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kfpls/errors.hpp"

namespace kfpls {

/// Ordered observation points on a closed interval. Strictly increasing, at
/// least two points, all finite.
class Grid {
public:
    explicit Grid(std::vector<double> points);

    const std::vector<double>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double front() const noexcept { return points_.front(); }
    double back() const noexcept { return points_.back(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::vector<double> points_;
};

/// One functional observation sampled on a grid.
struct SampledCurve {
    Grid grid;
    std::vector<double> values;

    SampledCurve(Grid g, std::vector<double> v);
};

/// The p curves of one subject. Coordinates may live on different grids, but
/// every subject in a dataset shares the same per-coordinate grids.
class FunctionalSample {
public:
    explicit FunctionalSample(std::vector<SampledCurve> curves);

    std::size_t n_curves() const noexcept { return curves_.size(); }
    const SampledCurve& curve(std::size_t j) const { return curves_.at(j); }
    const std::vector<SampledCurve>& curves() const noexcept { return curves_; }

private:
    std::vector<SampledCurve> curves_;
};

/// Same p and identical per-coordinate grids (exact point equality).
bool structurally_identical(const FunctionalSample& a, const FunctionalSample& b);

/// n subjects with optional scalar responses. Construction validates that all
/// samples are structurally identical and responses (if any) are finite with
/// matching length.
class FunctionalDataset {
public:
    explicit FunctionalDataset(std::vector<FunctionalSample> samples,
                               std::optional<std::vector<double>> responses = std::nullopt);

    std::size_t size() const noexcept { return samples_.size(); }
    std::size_t n_predictors() const noexcept { return samples_.front().n_curves(); }
    const FunctionalSample& sample(std::size_t i) const { return samples_.at(i); }
    const std::vector<FunctionalSample>& samples() const noexcept { return samples_; }

    bool has_responses() const noexcept { return responses_.has_value(); }
    const std::vector<double>& responses() const;

    /// Grid of coordinate j (shared by all subjects).
    const Grid& grid(std::size_t j) const { return samples_.front().curve(j).grid; }

    /// New dataset from the given subject indices (responses carried along).
    FunctionalDataset subset(std::span<const std::size_t> indices) const;

private:
    std::vector<FunctionalSample> samples_;
    std::optional<std::vector<double>> responses_;
};

/// Responses as an Eigen vector; throws when the dataset has none.
Eigen::VectorXd responses_vector(const FunctionalDataset& ds);

/// Composite trapezoid integral of sampled values over the grid:
/// sum_k (g_{k+1} - g_k) * (v_k + v_{k+1}) / 2.
double trapezoid_integral(std::span<const double> values, const Grid& grid);

/// Quadrature weights w with sum_k w_k v_k equal to the composite trapezoid
/// rule. Precomputed once when many integrals share a grid.
std::vector<double> trapezoid_weights(const Grid& grid);

/// Squared L2 distance over the product space: sum over coordinates of the
/// trapezoid integral of the squared pointwise difference.
double sq_l2_distance(const FunctionalSample& a, const FunctionalSample& b);

/// Sum over coordinates of the trapezoid integral of the pointwise product.
double l2_inner_product(const FunctionalSample& a, const FunctionalSample& b);

/// D(i, h) = sq_l2_distance(a_i, b_h) for all pairs, parallelized over rows.
/// a and b must be structurally identical datasets.
Eigen::MatrixXd pairwise_sq_dists(const FunctionalDataset& a, const FunctionalDataset& b);

/// G(i, h) = l2_inner_product(a_i, b_h) for all pairs.
Eigen::MatrixXd pairwise_inner_products(const FunctionalDataset& a, const FunctionalDataset& b);

/// Affinely maps every grid onto [0, 1]; curve values are untouched.
FunctionalDataset rescale_domain(const FunctionalDataset& ds);

}  // namespace kfpls
