#include "kfpls/kpls.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/LU>

#include "kfpls/errors.hpp"
#include "kfpls/fdata.hpp"

namespace kfpls {

void FitConfig::validate(std::size_t n_train) const {
    if (n_components < 1) throw ConfigError("n_components must be >= 1");
    if (n_train >= 1 && static_cast<std::size_t>(n_components) >= n_train)
        throw ConfigError("n_components must be < n_train (centered Gram has rank at most n-1)");
    if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(rank_tol > 0.0)) throw ConfigError("rank_tol must be > 0");
    if (!(rcond_min > 0.0)) throw ConfigError("rcond_min must be > 0");
}

namespace {

Eigen::VectorXd initial_u(const Eigen::VectorXd& y_work, const FitConfig& cfg, Rng* init_rng) {
    const double y_norm = y_work.norm();
    if (y_norm < cfg.rank_tol)
        throw DegenerateResponseError("working response is numerically zero");
    if (!cfg.random_init) return y_work / y_norm;

    Rng local(cfg.init_seed);
    Rng& rng = init_rng != nullptr ? *init_rng : local;
    Eigen::VectorXd u(y_work.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.normal();
    const double u_norm = u.norm();
    if (u_norm < cfg.rank_tol) return y_work / y_norm;
    return u / u_norm;
}

}  // namespace

NipalsScores nipals_component(const Eigen::MatrixXd& k_work, const Eigen::VectorXd& y_work,
                              const FitConfig& cfg, Rng* init_rng) {
    if (k_work.rows() != k_work.cols()) throw StructuralError("working Gram must be square");
    if (y_work.size() != k_work.rows())
        throw StructuralError("response length does not match Gram size");

    Eigen::VectorXd u = initial_u(y_work, cfg, init_rng);
    Eigen::VectorXd t_prev = Eigen::VectorXd::Zero(y_work.size());
    Eigen::VectorXd t;

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Eigen::VectorXd v = k_work * u;
        const double v_norm = v.norm();
        if (v_norm < cfg.rank_tol)
            throw RankExhaustionError("deflated Gram annihilates the score direction");
        t = v / v_norm;

        Eigen::VectorXd w = y_work * y_work.dot(t);
        const double w_norm = w.norm();
        if (w_norm < cfg.rank_tol)
            throw DegenerateResponseError("response projection vanished during iteration");
        u = w / w_norm;

        // Scores are sign-indeterminate; compare against both orientations.
        const double delta = std::min((t - t_prev).norm(), (t + t_prev).norm());
        if (iter > 1 && delta < cfg.tol) return {std::move(t), std::move(u), iter};
        t_prev = t;
    }
    throw NonConvergenceError("score iteration did not converge within max_iter sweeps",
                              std::move(t_prev), std::move(u));
}

ScoreExtraction extract_scores(const Eigen::MatrixXd& k_centered,
                               const Eigen::VectorXd& y_centered, int n_components,
                               const FitConfig& cfg) {
    const Eigen::Index n = k_centered.rows();
    ScoreExtraction out;
    out.t_scores.resize(n, 0);
    out.u_scores.resize(n, 0);

    Eigen::MatrixXd k_work = k_centered;
    Eigen::VectorXd y_work = y_centered;
    Rng init_rng(cfg.init_seed);

    for (int l = 0; l < n_components; ++l) {
        NipalsScores s;
        try {
            s = nipals_component(k_work, y_work, cfg, &init_rng);
        } catch (const NumericError&) {
            out.failure = std::current_exception();
            break;
        }
        // Orientation convention: t is non-obtuse to the original centered
        // response, so repeated fits agree componentwise.
        if (s.t.dot(y_centered) < 0.0) {
            s.t = -s.t;
            s.u = -s.u;
        }

        out.t_scores.conservativeResize(Eigen::NoChange, l + 1);
        out.u_scores.conservativeResize(Eigen::NoChange, l + 1);
        out.t_scores.col(l) = s.t;
        out.u_scores.col(l) = s.u;

        if (l + 1 == n_components) break;  // last deflation never consumed

        // K <- (I - tt')K(I - tt') as a symmetric rank-2 update; keeps the
        // stored matrix bitwise symmetric.
        Eigen::VectorXd v = k_work * s.t;
        const double tkt = s.t.dot(v);
        Eigen::VectorXd w = v - (tkt / 2.0) * s.t;
        k_work.noalias() -= s.t * w.transpose();
        k_work.noalias() -= w * s.t.transpose();
        y_work -= s.t * s.t.dot(y_work);
    }
    return out;
}

Eigen::VectorXd combine_coefficients(const ScoreExtraction& scores,
                                     const Eigen::MatrixXd& k_centered,
                                     const Eigen::VectorXd& y_centered, int n_components,
                                     double rcond_min) {
    if (n_components < 1 || n_components > scores.extracted())
        throw ConfigError("n_components exceeds the number of extracted scores");
    const auto q = static_cast<Eigen::Index>(n_components);
    const auto t_q = scores.t_scores.leftCols(q);
    const auto u_q = scores.u_scores.leftCols(q);

    Eigen::MatrixXd m = t_q.transpose() * (k_centered * u_q);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double rcond = lu.rcond();
    if (!std::isfinite(rcond) || rcond < rcond_min)
        throw SingularSystemError("T' Kc U is numerically singular (rcond=" +
                                  std::to_string(rcond) + ")");
    Eigen::VectorXd z = lu.solve(t_q.transpose() * y_centered);
    return u_q * z;
}

GramFit fit_gram(const GramBundle& bundle, const Eigen::VectorXd& y, const FitConfig& cfg) {
    if (bundle.centered.rows() != bundle.centered.cols() ||
        bundle.raw.rows() != bundle.centered.rows())
        throw StructuralError("Gram bundle matrices must be square and same-sized");
    if (y.size() != bundle.centered.rows())
        throw StructuralError("response length does not match Gram size");
    cfg.validate(static_cast<std::size_t>(y.size()));

    GramFit fit;
    fit.y_mean = y.mean();
    Eigen::VectorXd y_c = y.array() - fit.y_mean;

    ScoreExtraction scores = extract_scores(bundle.centered, y_c, cfg.n_components, cfg);
    if (scores.extracted() < cfg.n_components) std::rethrow_exception(scores.failure);

    fit.coef = combine_coefficients(scores, bundle.centered, y_c, cfg.n_components,
                                    cfg.rcond_min);
    fit.t_scores = std::move(scores.t_scores);
    fit.u_scores = std::move(scores.u_scores);
    return fit;
}

Eigen::VectorXd predict_gram(const GramFit& fit, const Eigen::MatrixXd& centered_cross) {
    if (centered_cross.cols() != fit.coef.size())
        throw StructuralError("cross Gram width does not match training size");
    return (centered_cross * fit.coef).array() + fit.y_mean;
}

KfplsModel::KfplsModel(KernelSpec spec, FunctionalDataset train_samples, GramBundle bundle,
                       GramFit fit)
    : spec_(spec),
      train_(std::move(train_samples)),
      bundle_(std::move(bundle)),
      fit_(std::move(fit)) {
    if (bundle_.raw.rows() != static_cast<Eigen::Index>(train_.size()))
        throw StructuralError("Gram size does not match training sample count");
    if (fit_.coef.size() != bundle_.raw.rows())
        throw StructuralError("coefficient length does not match Gram size");
}

Eigen::VectorXd KfplsModel::fitted() const { return predict_gram(fit_, bundle_.centered); }

KfplsModel fit(const FunctionalDataset& train, const KernelSpec& spec, const FitConfig& cfg) {
    if (!train.has_responses()) throw StructuralError("training dataset has no responses");
    if (train.size() < 3) throw StructuralError("need at least 3 training samples");
    spec.validate();
    cfg.validate(train.size());

    GramBundle bundle = gram(train, spec);
    const auto& y_vec = train.responses();
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_vec.data(),
                                                          static_cast<Eigen::Index>(y_vec.size()));
    GramFit gfit = fit_gram(bundle, y, cfg);
    return {spec, train, std::move(bundle), std::move(gfit)};
}

Eigen::VectorXd predict(const KfplsModel& model, const FunctionalDataset& new_samples) {
    if (new_samples.n_predictors() != model.training_samples().n_predictors() ||
        !structurally_identical(new_samples.sample(0), model.training_samples().sample(0)))
        throw StructuralError("new samples are not structurally identical to the training set");
    CrossGram cg = cross_gram(new_samples, model.training_samples(), model.kernel(),
                              model.raw_gram());
    return predict_gram(model.fit_result(), cg.centered);
}

}  // namespace kfpls
