#pragma once

// Dataset builders and scratch-directory plumbing shared across the test
// files.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kfpls/fdata.hpp"
#include "kfpls/rng.hpp"
#include "kfpls/simgen.hpp"

namespace helpers {

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("kfpls_test_" + tag + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline kfpls::Grid make_grid(std::size_t n, double a = 0.0, double b = 1.0) {
    std::vector<double> pts(n);
    for (std::size_t k = 0; k < n; ++k)
        pts[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return kfpls::Grid(pts);
}

inline std::vector<double> sample_fn(const kfpls::Grid& grid,
                                     const std::function<double(double)>& f) {
    std::vector<double> v;
    v.reserve(grid.size());
    for (double t : grid.points()) v.push_back(f(t));
    return v;
}

inline kfpls::FunctionalSample one_curve(const kfpls::Grid& grid,
                                         const std::function<double(double)>& f) {
    return kfpls::FunctionalSample({kfpls::SampledCurve(grid, sample_fn(grid, f))});
}

inline kfpls::FunctionalSample two_curves(const kfpls::Grid& grid,
                                          const std::function<double(double)>& f1,
                                          const std::function<double(double)>& f2) {
    return kfpls::FunctionalSample({kfpls::SampledCurve(grid, sample_fn(grid, f1)),
                                    kfpls::SampledCurve(grid, sample_fn(grid, f2))});
}

/// Random p=2 B-spline dataset with standard-normal responses.
inline kfpls::FunctionalDataset random_dataset(std::size_t n, std::uint64_t seed,
                                               std::size_t grid_size = 41,
                                               bool with_responses = true) {
    const auto basis = kfpls::BsplineBasis::simulation_basis();
    const auto grid = kfpls::uniform_grid(grid_size);
    kfpls::Rng rng(seed);
    auto samples = kfpls::gen_covariates(n, basis, grid, rng);
    std::optional<std::vector<double>> resp;
    if (with_responses) {
        resp.emplace();
        for (std::size_t i = 0; i < n; ++i) resp->push_back(rng.normal());
    }
    return kfpls::FunctionalDataset(std::move(samples), std::move(resp));
}

/// Subjects whose curves are constant in t, one coordinate per feature. On
/// [0, 1] grids the L2 inner product then equals the Euclidean one, so the
/// linear kernel matches an explicit d-dimensional feature matrix exactly.
struct FlatDataset {
    kfpls::FunctionalDataset ds;
    Eigen::MatrixXd features;  // n x d
};

inline FlatDataset flat_dataset(std::size_t n, std::size_t d, std::uint64_t seed,
                                bool with_responses = true) {
    const auto grid = make_grid(9);
    kfpls::Rng rng(seed);
    Eigen::MatrixXd feats(n, d);
    std::vector<kfpls::FunctionalSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<kfpls::SampledCurve> curves;
        curves.reserve(d);
        for (std::size_t j = 0; j < d; ++j) {
            const double c = rng.normal();
            feats(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c;
            curves.emplace_back(grid, std::vector<double>(grid.size(), c));
        }
        samples.emplace_back(std::move(curves));
    }
    std::optional<std::vector<double>> resp;
    if (with_responses) {
        resp.emplace();
        for (std::size_t i = 0; i < n; ++i) resp->push_back(rng.normal());
    }
    return {kfpls::FunctionalDataset(std::move(samples), std::move(resp)), std::move(feats)};
}

}  // namespace helpers
