#include "kfpls/fdata.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "kfpls/parallel.hpp"

namespace kfpls {

namespace {

void require(bool condition, const std::string& msg) {
    if (!condition) throw StructuralError(msg);
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// sum_k w_k * (a_k - b_k)^2
double weighted_sq_diff(std::span<const double> a, std::span<const double> b,
                        std::span<const double> w) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double d = a[k] - b[k];
        acc += w[k] * d * d;
    }
    return acc;
}

// sum_k w_k * a_k * b_k
double weighted_product(std::span<const double> a, std::span<const double> b,
                        std::span<const double> w) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * a[k] * b[k];
    }
    return acc;
}

std::vector<std::vector<double>> per_coordinate_weights(const FunctionalDataset& ds) {
    std::vector<std::vector<double>> weights;
    weights.reserve(ds.n_predictors());
    for (std::size_t j = 0; j < ds.n_predictors(); ++j) {
        weights.push_back(trapezoid_weights(ds.grid(j)));
    }
    return weights;
}

void require_same_structure(const FunctionalDataset& a, const FunctionalDataset& b) {
    require(structurally_identical(a.sample(0), b.sample(0)),
            "datasets are not structurally identical (predictor count or grids differ)");
}

}  // namespace

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    require(points_.size() >= 2, "grid needs at least 2 points");
    require(all_finite(points_), "grid points must be finite");
    for (std::size_t k = 1; k < points_.size(); ++k) {
        require(points_[k] > points_[k - 1], "grid points must be strictly increasing");
    }
}

SampledCurve::SampledCurve(Grid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    require(values.size() == grid.size(), "curve values and grid lengths differ");
    require(all_finite(values), "curve values must be finite");
}

FunctionalSample::FunctionalSample(std::vector<SampledCurve> curves)
    : curves_(std::move(curves)) {
    require(!curves_.empty(), "a functional sample needs at least one curve");
}

bool structurally_identical(const FunctionalSample& a, const FunctionalSample& b) {
    if (a.n_curves() != b.n_curves()) return false;
    for (std::size_t j = 0; j < a.n_curves(); ++j) {
        if (!(a.curve(j).grid == b.curve(j).grid)) return false;
    }
    return true;
}

FunctionalDataset::FunctionalDataset(std::vector<FunctionalSample> samples,
                                     std::optional<std::vector<double>> responses)
    : samples_(std::move(samples)), responses_(std::move(responses)) {
    require(!samples_.empty(), "dataset needs at least one sample");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        require(structurally_identical(samples_[0], samples_[i]),
                "sample " + std::to_string(i) + " does not match the dataset structure");
    }
    if (responses_) {
        require(responses_->size() == samples_.size(),
                "response vector length differs from the number of samples");
        require(all_finite(*responses_), "responses must be finite");
    }
}

const std::vector<double>& FunctionalDataset::responses() const {
    if (!responses_) throw StructuralError("dataset has no responses");
    return *responses_;
}

Eigen::VectorXd responses_vector(const FunctionalDataset& ds) {
    const auto& y = ds.responses();
    return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

FunctionalDataset FunctionalDataset::subset(std::span<const std::size_t> indices) const {
    std::vector<FunctionalSample> picked;
    picked.reserve(indices.size());
    std::optional<std::vector<double>> resp;
    if (responses_) resp.emplace();
    for (std::size_t i : indices) {
        picked.push_back(samples_.at(i));
        if (resp) resp->push_back((*responses_)[i]);
    }
    return FunctionalDataset(std::move(picked), std::move(resp));
}

double trapezoid_integral(std::span<const double> values, const Grid& grid) {
    require(values.size() == grid.size(), "integrand length differs from grid length");
    const auto& g = grid.points();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        acc += (g[k + 1] - g[k]) * (values[k] + values[k + 1]) / 2.0;
    }
    return acc;
}

std::vector<double> trapezoid_weights(const Grid& grid) {
    const auto& g = grid.points();
    std::vector<double> w(g.size(), 0.0);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double half = (g[k + 1] - g[k]) / 2.0;
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

double sq_l2_distance(const FunctionalSample& a, const FunctionalSample& b) {
    require(structurally_identical(a, b), "samples are not structurally identical");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.n_curves(); ++j) {
        const auto w = trapezoid_weights(a.curve(j).grid);
        acc += weighted_sq_diff(a.curve(j).values, b.curve(j).values, w);
    }
    return acc;
}

double l2_inner_product(const FunctionalSample& a, const FunctionalSample& b) {
    require(structurally_identical(a, b), "samples are not structurally identical");
    double acc = 0.0;
    for (std::size_t j = 0; j < a.n_curves(); ++j) {
        const auto w = trapezoid_weights(a.curve(j).grid);
        acc += weighted_product(a.curve(j).values, b.curve(j).values, w);
    }
    return acc;
}

Eigen::MatrixXd pairwise_sq_dists(const FunctionalDataset& a, const FunctionalDataset& b) {
    require_same_structure(a, b);
    const auto weights = per_coordinate_weights(a);
    Eigen::MatrixXd d(a.size(), b.size());
    parallel_for(a.size(), [&](std::size_t i) {
        for (std::size_t h = 0; h < b.size(); ++h) {
            double acc = 0.0;
            for (std::size_t j = 0; j < a.n_predictors(); ++j) {
                acc += weighted_sq_diff(a.sample(i).curve(j).values,
                                        b.sample(h).curve(j).values, weights[j]);
            }
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = acc;
        }
    });
    return d;
}

Eigen::MatrixXd pairwise_inner_products(const FunctionalDataset& a, const FunctionalDataset& b) {
    require_same_structure(a, b);
    const auto weights = per_coordinate_weights(a);
    Eigen::MatrixXd g(a.size(), b.size());
    parallel_for(a.size(), [&](std::size_t i) {
        for (std::size_t h = 0; h < b.size(); ++h) {
            double acc = 0.0;
            for (std::size_t j = 0; j < a.n_predictors(); ++j) {
                acc += weighted_product(a.sample(i).curve(j).values,
                                        b.sample(h).curve(j).values, weights[j]);
            }
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = acc;
        }
    });
    return g;
}

FunctionalDataset rescale_domain(const FunctionalDataset& ds) {
    // Precompute the rescaled grid per coordinate so all subjects share the
    // exact same point values.
    std::vector<Grid> scaled;
    scaled.reserve(ds.n_predictors());
    for (std::size_t j = 0; j < ds.n_predictors(); ++j) {
        const auto& g = ds.grid(j).points();
        const double a = g.front();
        const double span = g.back() - a;
        require(span > 0.0, "cannot rescale a degenerate grid");
        std::vector<double> pts(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) pts[k] = (g[k] - a) / span;
        scaled.emplace_back(std::move(pts));
    }

    std::vector<FunctionalSample> samples;
    samples.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::vector<SampledCurve> curves;
        curves.reserve(ds.n_predictors());
        for (std::size_t j = 0; j < ds.n_predictors(); ++j) {
            curves.emplace_back(scaled[j], ds.sample(i).curve(j).values);
        }
        samples.emplace_back(std::move(curves));
    }
    std::optional<std::vector<double>> resp;
    if (ds.has_responses()) resp = ds.responses();
    return FunctionalDataset(std::move(samples), std::move(resp));
}

}  // namespace kfpls
