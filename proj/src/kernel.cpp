#include "kfpls/kernel.hpp"

#include <cmath>

namespace kfpls {

const char* to_string(KernelFamily family) {
    return family == KernelFamily::gaussian ? "gaussian" : "linear";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian") return KernelFamily::gaussian;
    if (name == "linear") return KernelFamily::linear;
    throw ConfigError("unknown kernel family '" + name + "' (expected gaussian or linear)");
}

void KernelSpec::validate() const {
    if (family == KernelFamily::gaussian) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw ConfigError("gaussian kernel requires finite gamma > 0");
        }
    }
}

double kernel_value(const FunctionalSample& a, const FunctionalSample& b,
                    const KernelSpec& spec) {
    spec.validate();
    if (spec.family == KernelFamily::gaussian) {
        return std::exp(-spec.gamma * sq_l2_distance(a, b));
    }
    return l2_inner_product(a, b);
}

Eigen::MatrixXd center_cross(const Eigen::MatrixXd& raw0, const Eigen::MatrixXd& train_raw) {
    if (raw0.cols() != train_raw.rows() || train_raw.rows() != train_raw.cols()) {
        throw StructuralError("cross Gram and training Gram dimensions do not conform");
    }
    // (K0 - (1/n) 1_m 1_n' K)(I - (1/n) 1_n 1_n'): subtract K's column means
    // row-wise, then each row's own mean.
    Eigen::MatrixXd centered = raw0.rowwise() - train_raw.colwise().mean();
    centered.colwise() -= centered.rowwise().mean().eval();
    return centered;
}

GramBundle gram(const FunctionalDataset& train, const KernelSpec& spec) {
    spec.validate();
    if (train.size() < 2) throw StructuralError("Gram centering needs at least 2 samples");

    Eigen::MatrixXd raw;
    if (spec.family == KernelFamily::gaussian) {
        raw = (-spec.gamma * pairwise_sq_dists(train, train)).array().exp();
    } else {
        raw = pairwise_inner_products(train, train);
    }
    // Entries are computed independently per (i, h); averaging with the
    // transpose removes any residual floating-point asymmetry.
    raw = 0.5 * (raw + raw.transpose()).eval();

    GramBundle bundle;
    bundle.centered = center_cross(raw, raw);
    bundle.raw = std::move(raw);
    return bundle;
}

CrossGram cross_gram(const FunctionalDataset& new_samples, const FunctionalDataset& train,
                     const KernelSpec& spec, const Eigen::MatrixXd& train_raw) {
    spec.validate();
    if (train_raw.rows() != train_raw.cols() ||
        train_raw.rows() != static_cast<Eigen::Index>(train.size())) {
        throw StructuralError("train_raw dimensions do not match the training set");
    }

    CrossGram cg;
    if (spec.family == KernelFamily::gaussian) {
        cg.raw = (-spec.gamma * pairwise_sq_dists(new_samples, train)).array().exp();
    } else {
        cg.raw = pairwise_inner_products(new_samples, train);
    }
    cg.centered = center_cross(cg.raw, train_raw);
    return cg;
}

GramBundle gram_from_sq_dists(const Eigen::MatrixXd& sq_dists, double gamma) {
    if (sq_dists.rows() != sq_dists.cols()) {
        throw StructuralError("squared-distance matrix must be square");
    }
    GramBundle bundle;
    bundle.raw = (-gamma * sq_dists).array().exp();
    bundle.raw = 0.5 * (bundle.raw + bundle.raw.transpose()).eval();
    bundle.centered = center_cross(bundle.raw, bundle.raw);
    return bundle;
}

CrossGram cross_gram_from_sq_dists(const Eigen::MatrixXd& sq_dists0,
                                   const Eigen::MatrixXd& train_raw, double gamma) {
    CrossGram cg;
    cg.raw = (-gamma * sq_dists0).array().exp();
    cg.centered = center_cross(cg.raw, train_raw);
    return cg;
}

}  // namespace kfpls
