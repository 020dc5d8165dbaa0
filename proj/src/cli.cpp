#include "kfpls/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "kfpls/errors.hpp"
#include "kfpls/io.hpp"
#include "kfpls/kpls.hpp"
#include "kfpls/metrics.hpp"
#include "kfpls/parallel.hpp"
#include "kfpls/rng.hpp"
#include "kfpls/simgen.hpp"
#include "kfpls/tuning.hpp"

namespace fs = std::filesystem;

namespace kfpls {

namespace {

using Manifest = std::vector<std::pair<std::string, std::string>>;

int exit_code_for(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::parse: return 3;
        case ErrorCategory::structural: return 4;
        case ErrorCategory::io: return 5;
        case ErrorCategory::numeric: return 6;
    }
    return 1;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

/// Flags shared by every subcommand.
struct CommonOpts {
    unsigned threads = 0;  // 0 = hardware default
};

void add_common(CLI::App* cmd, CommonOpts& common) {
    cmd->add_option("--threads", common.threads,
                    "Worker thread cap (0 = hardware concurrency)");
    // The config option lives on the root app (CLI11 only processes it
    // there); fallthrough lets `--config` be written after the subcommand.
    cmd->fallthrough();
}

void apply_common(const CommonOpts& common) { set_max_threads(common.threads); }

struct CvOpts {
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<int> q_grid = default_q_grid();
    std::vector<double> gamma_grid = default_gamma_grid();
};

void add_cv_opts(CLI::App* cmd, CvOpts& cv, const std::string& seed_name = "--cv-seed") {
    cmd->add_option("--folds", cv.folds, "Number of cross-validation folds");
    cmd->add_option(seed_name, cv.seed, "Seed for the fold shuffle");
    cmd->add_option("--q-grid", cv.q_grid, "Candidate component counts")->expected(-1);
    cmd->add_option("--gamma-grid", cv.gamma_grid, "Candidate gaussian bandwidths")
        ->expected(-1);
}

CvPlan make_plan(const CvOpts& cv, KernelFamily family) {
    CvPlan plan;
    plan.n_folds = cv.folds;
    plan.seed = cv.seed;
    plan.q_grid = cv.q_grid;
    plan.gamma_grid = cv.gamma_grid;
    plan.family = family;
    return plan;
}

void append_cv_manifest(Manifest& m, const CvOpts& cv, const CvResult& result) {
    m.emplace_back("cv_folds", std::to_string(cv.folds));
    m.emplace_back("cv_seed", std::to_string(cv.seed));
    m.emplace_back("cv_q_grid", join_ints(cv.q_grid));
    m.emplace_back("cv_gamma_grid", join_doubles(cv.gamma_grid));
    m.emplace_back("cv_best_q", std::to_string(result.best_q));
    m.emplace_back("cv_best_gamma", format_double(result.best_gamma));
    m.emplace_back("cv_best_score", format_double(result.best_score));
    m.emplace_back("cv_failed_cells", std::to_string(result.n_failed_cells));
}

void write_cv_table(const fs::path& path, const CvResult& result) {
    std::vector<std::vector<double>> rows;
    rows.reserve(result.q_grid.size() * result.gamma_grid.size());
    for (std::size_t qi = 0; qi < result.q_grid.size(); ++qi)
        for (std::size_t gi = 0; gi < result.gamma_grid.size(); ++gi)
            rows.push_back({static_cast<double>(result.q_grid[qi]), result.gamma_grid[gi],
                            result.scores(static_cast<Eigen::Index>(qi),
                                          static_cast<Eigen::Index>(gi))});
    write_csv(path, rows, {"q", "gamma", "score"});
}

void write_column_csv(const fs::path& path, const Eigen::VectorXd& values,
                      const std::string& name) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) rows.push_back({values[i]});
    write_csv(path, rows, {name});
}

std::pair<double, double> mean_sd_of(const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

// ---- simulate ----------------------------------------------------------

struct SimulateOpts {
    ScenarioSpec spec;
    std::string out;
    CommonOpts common;
};

void run_simulate(const SimulateOpts& opt) {
    apply_common(opt.common);
    const fs::path dir = prepare_out_dir(opt.out);
    const GeneratedData data = generate(opt.spec);
    save_dataset(dir / "train", data.train, &data.train_truth);
    save_dataset(dir / "test", data.test, &data.test_truth);

    Manifest m{{"command", "simulate"},
               {"scenario", std::to_string(opt.spec.scenario)},
               {"case", std::to_string(opt.spec.link_case)},
               {"n_train", std::to_string(opt.spec.n_train)},
               {"n_test", std::to_string(opt.spec.n_test)},
               {"noise_sd", format_double(opt.spec.noise_sd)},
               {"grid_size", std::to_string(opt.spec.grid_size)},
               {"seed", std::to_string(opt.spec.seed)}};
    const auto [tr_mean, tr_sd] = mean_sd_of(data.train_truth);
    const auto [te_mean, te_sd] = mean_sd_of(data.test_truth);
    m.emplace_back("train_truth_mean", format_double(tr_mean));
    m.emplace_back("train_truth_sd", format_double(tr_sd));
    m.emplace_back("test_truth_mean", format_double(te_mean));
    m.emplace_back("test_truth_sd", format_double(te_sd));
    write_manifest(dir / "manifest.txt", m);

    std::cout << "simulate: scenario=" << opt.spec.scenario << " case=" << opt.spec.link_case
              << " n_train=" << opt.spec.n_train << " n_test=" << opt.spec.n_test
              << " noise_sd=" << format_double(opt.spec.noise_sd)
              << " truth_mean=" << format_double(tr_mean)
              << " truth_sd=" << format_double(tr_sd) << "\n";
}

// ---- fit ---------------------------------------------------------------

struct FitOpts {
    std::string train_dir;
    std::string out;
    std::string kernel = "gaussian";
    double gamma = std::numeric_limits<double>::quiet_NaN();
    int q = 0;
    bool auto_tune = false;
    CvOpts cv;
    double tol = 1e-8;
    int max_iter = 100;
    CommonOpts common;
};

void run_fit(const FitOpts& opt) {
    apply_common(opt.common);
    const fs::path dir = prepare_out_dir(opt.out);
    const FunctionalDataset ds = load_dataset(opt.train_dir);
    const KernelFamily family = kernel_family_from_string(opt.kernel);

    FitConfig cfg;
    cfg.tol = opt.tol;
    cfg.max_iter = opt.max_iter;
    KernelSpec spec{family, 1.0};

    Manifest m{{"command", "fit"},
               {"train", opt.train_dir},
               {"kernel", opt.kernel},
               {"n_train", std::to_string(ds.size())},
               {"auto", opt.auto_tune ? "true" : "false"}};

    if (opt.auto_tune) {
        CvPlan plan = make_plan(opt.cv, family);
        plan.fit = cfg;
        const CvResult result = grid_search(ds, plan);
        spec.gamma = result.best_gamma;
        cfg.n_components = result.best_q;
        write_cv_table(dir / "cv_table.csv", result);
        append_cv_manifest(m, opt.cv, result);
    } else {
        if (opt.q < 1) throw ConfigError("--q is required unless --auto is given");
        if (family == KernelFamily::gaussian && !std::isfinite(opt.gamma))
            throw ConfigError("--gamma is required for the gaussian kernel unless --auto");
        cfg.n_components = opt.q;
        if (std::isfinite(opt.gamma)) spec.gamma = opt.gamma;
    }

    const KfplsModel model = fit(ds, spec, cfg);
    save_model(dir / "model.json", model);
    const Eigen::VectorXd fitted = model.fitted();
    write_column_csv(dir / "fitted.csv", fitted, "fitted");
    const EvalReport train_report = evaluate(fitted, responses_vector(ds));

    m.emplace_back("gamma", format_double(spec.gamma));
    m.emplace_back("q", std::to_string(cfg.n_components));
    m.emplace_back("train_rase", format_double(train_report.rase));
    m.emplace_back("train_arpe", format_double(train_report.arpe));
    write_manifest(dir / "manifest.txt", m);

    std::cout << "fit: n=" << ds.size() << " kernel=" << opt.kernel
              << " gamma=" << format_double(spec.gamma) << " q=" << cfg.n_components
              << " train_rase=" << format_double(train_report.rase)
              << " train_arpe=" << format_double(train_report.arpe) << "\n";
}

// ---- predict -----------------------------------------------------------

struct PredictOpts {
    std::string model_path;
    std::string data_dir;
    std::string out;
    CommonOpts common;
};

void run_predict(const PredictOpts& opt) {
    apply_common(opt.common);
    const fs::path dir = prepare_out_dir(opt.out);
    const KfplsModel model = load_model(opt.model_path);
    const FunctionalDataset ds = load_dataset(opt.data_dir);
    const Eigen::VectorXd pred = predict(model, ds);
    write_column_csv(dir / "predictions.csv", pred, "prediction");

    Manifest m{{"command", "predict"},
               {"model", opt.model_path},
               {"data", opt.data_dir},
               {"n", std::to_string(ds.size())}};
    std::string metrics_note;
    if (ds.has_responses()) {
        const EvalReport report = evaluate(pred, responses_vector(ds));
        m.emplace_back("rase", format_double(report.rase));
        m.emplace_back("arpe", format_double(report.arpe));
        metrics_note = " rase=" + format_double(report.rase) +
                       " arpe=" + format_double(report.arpe);
    }
    write_manifest(dir / "manifest.txt", m);
    std::cout << "predict: n=" << ds.size() << metrics_note << "\n";
}

// ---- cv ----------------------------------------------------------------

struct CvCmdOpts {
    std::string train_dir;
    std::string out;
    std::string kernel = "gaussian";
    CvOpts cv;
    CommonOpts common;
};

void run_cv(const CvCmdOpts& opt) {
    apply_common(opt.common);
    const fs::path dir = prepare_out_dir(opt.out);
    const FunctionalDataset ds = load_dataset(opt.train_dir);
    const KernelFamily family = kernel_family_from_string(opt.kernel);
    const CvResult result = grid_search(ds, make_plan(opt.cv, family));

    write_cv_table(dir / "cv_table.csv", result);
    Manifest m{{"command", "cv"},
               {"train", opt.train_dir},
               {"kernel", opt.kernel},
               {"n_train", std::to_string(ds.size())}};
    append_cv_manifest(m, opt.cv, result);
    write_manifest(dir / "manifest.txt", m);

    std::cout << "cv: best_q=" << result.best_q
              << " best_gamma=" << format_double(result.best_gamma)
              << " best_score=" << format_double(result.best_score)
              << " failed_cells=" << result.n_failed_cells << "\n";
}

// ---- benchmark ---------------------------------------------------------

struct BenchmarkOpts {
    ScenarioSpec spec;
    int replicates = 100;
    std::string kernel = "gaussian";
    CvOpts cv;
    std::string out;
    CommonOpts common;
};

struct RepOutcome {
    std::uint64_t seed = 0;
    int q = 0;
    double gamma = 0.0;
    EvalReport train;
    EvalReport test;
};

/// One simulate -> tune -> fit -> evaluate pass shared by benchmark
/// replicates. cv_seed must be derived by the caller.
RepOutcome evaluate_split(const FunctionalDataset& train, const FunctionalDataset& test,
                          const CvPlan& plan) {
    const CvResult cv = grid_search(train, plan);
    FitConfig cfg = plan.fit;
    cfg.n_components = cv.best_q;
    const KfplsModel model = fit(train, KernelSpec{plan.family, cv.best_gamma}, cfg);
    RepOutcome out;
    out.q = cv.best_q;
    out.gamma = cv.best_gamma;
    out.train = evaluate(model.fitted(), responses_vector(train));
    out.test = evaluate(predict(model, test), responses_vector(test));
    return out;
}

void summarize_runs(const fs::path& dir, const std::vector<RepOutcome>& runs,
                    std::vector<std::vector<double>> leading, Manifest& m,
                    const std::vector<std::string>& leading_names, std::size_t n_failed,
                    const std::string& detail_name) {
    std::vector<EvalReport> train_reports;
    std::vector<EvalReport> test_reports;
    std::vector<std::vector<double>> detail_rows;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& run = runs[r];
        train_reports.push_back(run.train);
        test_reports.push_back(run.test);
        detail_rows.push_back({static_cast<double>(r), static_cast<double>(run.seed),
                               static_cast<double>(run.q), run.gamma, run.train.rase,
                               run.train.arpe, run.test.rase, run.test.arpe});
    }
    write_csv(dir / detail_name, detail_rows,
              {"run", "seed", "q", "gamma", "train_rase", "train_arpe", "test_rase",
               "test_arpe"});

    const McSummary train_sum = mc_summarize(train_reports);
    const McSummary test_sum = mc_summarize(test_reports);
    std::vector<std::string> header = leading_names;
    for (const char* name :
         {"n_runs", "n_failed", "train_rase_mean", "train_rase_sd", "train_arpe_mean",
          "train_arpe_sd", "test_rase_mean", "test_rase_sd", "test_arpe_mean",
          "test_arpe_sd"})
        header.emplace_back(name);
    std::vector<double>& row = leading.front();
    for (double v : {static_cast<double>(runs.size()), static_cast<double>(n_failed),
                     train_sum.mean_rase, train_sum.sd_rase, train_sum.mean_arpe,
                     train_sum.sd_arpe, test_sum.mean_rase, test_sum.sd_rase,
                     test_sum.mean_arpe, test_sum.sd_arpe})
        row.push_back(v);
    write_csv(dir / "summary.csv", leading, header);

    m.emplace_back("n_runs", std::to_string(runs.size()));
    m.emplace_back("n_failed", std::to_string(n_failed));
    m.emplace_back("train_rase_mean", format_double(train_sum.mean_rase));
    m.emplace_back("train_rase_sd", format_double(train_sum.sd_rase));
    m.emplace_back("train_arpe_mean", format_double(train_sum.mean_arpe));
    m.emplace_back("train_arpe_sd", format_double(train_sum.sd_arpe));
    m.emplace_back("test_rase_mean", format_double(test_sum.mean_rase));
    m.emplace_back("test_rase_sd", format_double(test_sum.sd_rase));
    m.emplace_back("test_arpe_mean", format_double(test_sum.mean_arpe));
    m.emplace_back("test_arpe_sd", format_double(test_sum.sd_arpe));

    std::cout << "test_rase_mean=" << format_double(test_sum.mean_rase)
              << " test_rase_sd=" << format_double(test_sum.sd_rase)
              << " test_arpe_mean=" << format_double(test_sum.mean_arpe)
              << " n_runs=" << runs.size() << " n_failed=" << n_failed << "\n";
}

void run_benchmark(const BenchmarkOpts& opt) {
    apply_common(opt.common);
    if (opt.replicates < 2) throw ConfigError("--replicates must be >= 2");
    const fs::path dir = prepare_out_dir(opt.out);
    opt.spec.validate();
    const KernelFamily family = kernel_family_from_string(opt.kernel);

    const auto n_reps = static_cast<std::size_t>(opt.replicates);
    std::vector<std::optional<RepOutcome>> outcomes(n_reps);
    parallel_for(n_reps, [&](std::size_t r) {
        ScenarioSpec spec = opt.spec;
        spec.seed = opt.spec.seed + r;
        const GeneratedData data = generate(spec);
        CvPlan plan = make_plan(opt.cv, family);
        plan.seed = derive_seed(spec.seed, 1);
        try {
            RepOutcome out = evaluate_split(data.train, data.test, plan);
            out.seed = spec.seed;
            outcomes[r] = std::move(out);
        } catch (const NumericError&) {
            // replicate excluded; counted below
        }
    });

    std::vector<RepOutcome> runs;
    runs.reserve(n_reps);
    for (auto& o : outcomes)
        if (o) runs.push_back(std::move(*o));
    const std::size_t n_failed = n_reps - runs.size();
    if (n_failed > 0)
        std::cerr << "warning: " << n_failed << " of " << n_reps
                  << " replicates failed numerically and were excluded\n";
    if (runs.size() < 2)
        throw NumericError("benchmark_failed", "fewer than 2 replicates succeeded");

    Manifest m{{"command", "benchmark"},
               {"scenario", std::to_string(opt.spec.scenario)},
               {"case", std::to_string(opt.spec.link_case)},
               {"n_train", std::to_string(opt.spec.n_train)},
               {"n_test", std::to_string(opt.spec.n_test)},
               {"noise_sd", format_double(opt.spec.noise_sd)},
               {"grid_size", std::to_string(opt.spec.grid_size)},
               {"seed", std::to_string(opt.spec.seed)},
               {"replicates", std::to_string(opt.replicates)},
               {"kernel", opt.kernel},
               {"cv_folds", std::to_string(opt.cv.folds)},
               {"cv_q_grid", join_ints(opt.cv.q_grid)},
               {"cv_gamma_grid", join_doubles(opt.cv.gamma_grid)}};

    std::cout << "benchmark: scenario=" << opt.spec.scenario << " case=" << opt.spec.link_case
              << " n_train=" << opt.spec.n_train << " ";
    summarize_runs(dir, runs,
                   {{static_cast<double>(opt.spec.scenario),
                     static_cast<double>(opt.spec.link_case),
                     static_cast<double>(opt.spec.n_train)}},
                   m, {"scenario", "case", "n_train"}, n_failed, "replicates.csv");
    write_manifest(dir / "manifest.txt", m);
}

// ---- tecator -----------------------------------------------------------

struct TecatorOpts {
    std::string file;
    std::string out;
    int splits = 100;
    std::uint64_t seed = 0;
    std::size_t spectrum_cols = 100;
    int response_col = -1;
    int fixed_q = 0;
    double fixed_gamma = std::numeric_limits<double>::quiet_NaN();
    CvOpts cv;
    CommonOpts common;
};

void run_tecator(const TecatorOpts& opt) {
    apply_common(opt.common);
    if (opt.splits < 2) throw ConfigError("--splits must be >= 2");
    const bool has_q = opt.fixed_q > 0;
    const bool has_gamma = std::isfinite(opt.fixed_gamma);
    if (has_q != has_gamma)
        throw ConfigError("--q and --gamma must be given together to pin the parameters");
    const bool fixed = has_q;

    const fs::path dir = prepare_out_dir(opt.out);
    const FunctionalDataset ds = load_tecator(opt.file, opt.spectrum_cols, opt.response_col);
    const std::size_t n = ds.size();

    std::size_t n_train = 165;
    if (n != 215) {
        n_train = static_cast<std::size_t>(
            std::lround(static_cast<double>(n) * 165.0 / 215.0));
        n_train = std::clamp<std::size_t>(n_train, 4, n > 1 ? n - 1 : 1);
        std::cerr << "warning: " << n << " rows instead of 215; using proportional split "
                  << n_train << "/" << (n - n_train) << "\n";
    }
    if (n_train < 4 || n - n_train < 1)
        throw StructuralError("too few rows for a train/test split");

    const auto n_splits = static_cast<std::size_t>(opt.splits);
    std::vector<std::optional<RepOutcome>> outcomes(n_splits);
    parallel_for(n_splits, [&](std::size_t r) {
        const std::uint64_t split_seed = derive_seed(opt.seed, r);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(split_seed);
        rng.shuffle(order);
        const std::vector<std::size_t> train_idx(order.begin(),
                                                 order.begin() +
                                                     static_cast<std::ptrdiff_t>(n_train));
        const std::vector<std::size_t> test_idx(
            order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        const FunctionalDataset train = ds.subset(train_idx);
        const FunctionalDataset test = ds.subset(test_idx);

        try {
            RepOutcome out;
            if (fixed) {
                FitConfig cfg;
                cfg.n_components = opt.fixed_q;
                const KfplsModel model =
                    fit(train, KernelSpec{KernelFamily::gaussian, opt.fixed_gamma}, cfg);
                out.q = opt.fixed_q;
                out.gamma = opt.fixed_gamma;
                out.train = evaluate(model.fitted(), responses_vector(train));
                out.test = evaluate(predict(model, test), responses_vector(test));
            } else {
                CvPlan plan = make_plan(opt.cv, KernelFamily::gaussian);
                plan.seed = derive_seed(split_seed, 1);
                out = evaluate_split(train, test, plan);
            }
            out.seed = split_seed;
            outcomes[r] = std::move(out);
        } catch (const NumericError&) {
        }
    });

    std::vector<RepOutcome> runs;
    runs.reserve(n_splits);
    for (auto& o : outcomes)
        if (o) runs.push_back(std::move(*o));
    const std::size_t n_failed = n_splits - runs.size();
    if (n_failed > 0)
        std::cerr << "warning: " << n_failed << " of " << n_splits
                  << " splits failed numerically and were excluded\n";
    if (runs.size() < 2)
        throw NumericError("tecator_failed", "fewer than 2 splits succeeded");

    Manifest m{{"command", "tecator"},
               {"file", opt.file},
               {"n_rows", std::to_string(n)},
               {"n_train_split", std::to_string(n_train)},
               {"n_test_split", std::to_string(n - n_train)},
               {"splits", std::to_string(opt.splits)},
               {"seed", std::to_string(opt.seed)},
               {"spectrum_cols", std::to_string(opt.spectrum_cols)},
               {"response_col", std::to_string(opt.response_col)},
               {"fixed_params", fixed ? "true" : "false"},
               {"cv_folds", std::to_string(opt.cv.folds)},
               {"cv_q_grid", join_ints(opt.cv.q_grid)},
               {"cv_gamma_grid", join_doubles(opt.cv.gamma_grid)}};

    std::cout << "tecator: n=" << n << " split=" << n_train << "/" << (n - n_train) << " ";
    summarize_runs(dir, runs,
                   {{static_cast<double>(n), static_cast<double>(n_train),
                     static_cast<double>(n - n_train)}},
                   m, {"n_rows", "n_train", "n_test"}, n_failed, "splits.csv");
    write_manifest(dir / "manifest.txt", m);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Kernel functional partial least squares toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "INI/TOML file with per-subcommand sections; flags win");

    SimulateOpts sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a simulation scenario dataset");
    sim_cmd->add_option("--scenario", sim.spec.scenario, "Scenario number (1-3)");
    sim_cmd->add_option("--case", sim.spec.link_case, "Link case within the scenario");
    sim_cmd->add_option("--n-train", sim.spec.n_train, "Training set size");
    sim_cmd->add_option("--n-test", sim.spec.n_test, "Test set size");
    sim_cmd->add_option("--noise-sd", sim.spec.noise_sd, "Response noise sd");
    sim_cmd->add_option("--grid-size", sim.spec.grid_size, "Observation points per curve");
    sim_cmd->add_option("--seed", sim.spec.seed, "Generator seed");
    sim_cmd->add_option("--out", sim.out, "Output directory")->required();
    add_common(sim_cmd, sim.common);
    sim_cmd->callback([&] { run_simulate(sim); });

    FitOpts fit_opt;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a dataset directory");
    fit_cmd->add_option("--train", fit_opt.train_dir, "Training dataset directory")
        ->required();
    fit_cmd->add_option("--out", fit_opt.out, "Output directory")->required();
    fit_cmd->add_option("--kernel", fit_opt.kernel, "Kernel family: gaussian|linear");
    fit_cmd->add_option("--gamma", fit_opt.gamma, "Gaussian bandwidth");
    fit_cmd->add_option("--q", fit_opt.q, "Number of components");
    fit_cmd->add_flag("--auto", fit_opt.auto_tune, "Select q and gamma by cross-validation");
    add_cv_opts(fit_cmd, fit_opt.cv);
    fit_cmd->add_option("--tol", fit_opt.tol, "Score iteration convergence tolerance");
    fit_cmd->add_option("--max-iter", fit_opt.max_iter, "Score iteration sweep cap");
    add_common(fit_cmd, fit_opt.common);
    fit_cmd->callback([&] { run_fit(fit_opt); });

    PredictOpts pred;
    auto* pred_cmd = app.add_subcommand("predict", "Predict responses for new samples");
    pred_cmd->add_option("--model", pred.model_path, "Model file")->required();
    pred_cmd->add_option("--data", pred.data_dir, "Dataset directory")->required();
    pred_cmd->add_option("--out", pred.out, "Output directory")->required();
    add_common(pred_cmd, pred.common);
    pred_cmd->callback([&] { run_predict(pred); });

    CvCmdOpts cv_opt;
    auto* cv_cmd = app.add_subcommand("cv", "Cross-validated grid search");
    cv_cmd->add_option("--train", cv_opt.train_dir, "Training dataset directory")->required();
    cv_cmd->add_option("--out", cv_opt.out, "Output directory")->required();
    cv_cmd->add_option("--kernel", cv_opt.kernel, "Kernel family: gaussian|linear");
    add_cv_opts(cv_cmd, cv_opt.cv, "--seed");
    add_common(cv_cmd, cv_opt.common);
    cv_cmd->callback([&] { run_cv(cv_opt); });

    BenchmarkOpts bench;
    auto* bench_cmd =
        app.add_subcommand("benchmark", "Monte Carlo replicates of simulate+cv+fit+evaluate");
    bench_cmd->add_option("--scenario", bench.spec.scenario, "Scenario number (1-3)");
    bench_cmd->add_option("--case", bench.spec.link_case, "Link case within the scenario");
    bench_cmd->add_option("--n-train", bench.spec.n_train, "Training set size");
    bench_cmd->add_option("--n-test", bench.spec.n_test, "Test set size");
    bench_cmd->add_option("--noise-sd", bench.spec.noise_sd, "Response noise sd");
    bench_cmd->add_option("--grid-size", bench.spec.grid_size, "Observation points per curve");
    bench_cmd->add_option("--seed", bench.spec.seed, "Master seed (replicate r uses seed+r)");
    bench_cmd->add_option("--replicates", bench.replicates, "Monte Carlo replicates");
    bench_cmd->add_option("--kernel", bench.kernel, "Kernel family: gaussian|linear");
    add_cv_opts(bench_cmd, bench.cv);
    bench_cmd->add_option("--out", bench.out, "Output directory")->required();
    add_common(bench_cmd, bench.common);
    bench_cmd->callback([&] { run_benchmark(bench); });

    TecatorOpts tec;
    auto* tec_cmd = app.add_subcommand("tecator", "Random-split evaluation on a Tecator file");
    tec_cmd->add_option("--file", tec.file, "Tecator data file")->required();
    tec_cmd->add_option("--out", tec.out, "Output directory")->required();
    tec_cmd->add_option("--splits", tec.splits, "Number of random train/test splits");
    tec_cmd->add_option("--seed", tec.seed, "Master seed for the split sequence");
    tec_cmd->add_option("--spectrum-cols", tec.spectrum_cols,
                        "Leading columns holding the spectrum");
    tec_cmd->add_option("--response-col", tec.response_col,
                        "Response column index (default: last)");
    tec_cmd->add_option("--q", tec.fixed_q, "Pin the component count (with --gamma)");
    tec_cmd->add_option("--gamma", tec.fixed_gamma, "Pin the bandwidth (with --q)");
    add_cv_opts(tec_cmd, tec.cv);
    add_common(tec_cmd, tec.common);
    tec_cmd->callback([&] { run_tecator(tec); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error category=config " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error category=" << to_string(e.category()) << " " << e.what() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error category=internal " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace kfpls
