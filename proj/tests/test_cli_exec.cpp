#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "kfpls/io.hpp"

#include "helpers.hpp"

using namespace kfpls;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::string shq(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

/// Runs the installed binary through the shell, capturing exit code and both
/// streams. tag keeps capture files distinct within one scratch dir.
CliRun exec_cli(const helpers::TempDir& scratch, const std::string& tag,
                const std::string& args) {
    const std::filesystem::path out_path = scratch / (tag + ".stdout");
    const std::filesystem::path err_path = scratch / (tag + ".stderr");
    const std::string cmd = std::string("\"") + KFPLS_CLI_BIN + "\" " + args + " > " +
                            shq(out_path) + " 2> " + shq(err_path);
    const int raw = std::system(cmd.c_str());
    CliRun r;
    if (WIFEXITED(raw)) r.code = WEXITSTATUS(raw);
    r.out = helpers::read_text(out_path);
    r.err = helpers::read_text(err_path);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string after_header(const std::string& text) {
    const auto pos = text.find('\n');
    return pos == std::string::npos ? std::string() : text.substr(pos + 1);
}

long line_count(const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
}

std::string simulate_args(const std::filesystem::path& out, std::uint64_t seed,
                          int n_train = 12, int n_test = 6, int grid = 21) {
    return "simulate --scenario 1 --case 1 --n-train " + std::to_string(n_train) +
           " --n-test " + std::to_string(n_test) + " --grid-size " + std::to_string(grid) +
           " --seed " + std::to_string(seed) + " --out " + shq(out);
}

}  // namespace

TEST_CASE("cli rejects a missing subcommand and answers --help") {
    helpers::TempDir dir("cli_noargs");

    const CliRun r = exec_cli(dir, "none", "");
    CHECK(r.code == 2);
    CHECK(contains(r.err, "error category=config"));

    const CliRun h = exec_cli(dir, "help", "--help");
    CHECK(h.code == 0);
    CHECK(contains(h.out, "simulate"));
    CHECK(contains(h.out, "tecator"));
}

TEST_CASE("cli simulate writes both splits and reruns byte-identically") {
    helpers::TempDir dir("cli_sim");

    const CliRun a = exec_cli(dir, "a", simulate_args(dir / "one", 42));
    REQUIRE(a.code == 0);
    CHECK(contains(a.out, "simulate: scenario=1 case=1 n_train=12 n_test=6"));

    const std::vector<std::string> files = {
        "train/grid.csv", "train/x1.csv", "train/x2.csv", "train/y.csv",
        "train/truth.csv", "test/grid.csv", "test/x1.csv", "test/x2.csv",
        "test/y.csv", "test/truth.csv", "manifest.txt"};
    for (const auto& f : files) CHECK(std::filesystem::exists(dir / ("one/" + f)));

    const CliRun b = exec_cli(dir, "b", simulate_args(dir / "two", 42));
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    for (const auto& f : files)
        CHECK(helpers::read_text(dir / ("one/" + f)) ==
              helpers::read_text(dir / ("two/" + f)));

    const std::string manifest = helpers::read_text(dir / "one/manifest.txt");
    CHECK(contains(manifest, "command=simulate"));
    CHECK(contains(manifest, "seed=42"));
}

TEST_CASE("cli fit validates parameter combinations") {
    helpers::TempDir dir("cli_fitval");
    REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 7)).code == 0);
    const std::string train = shq(dir / "data/train");

    SUBCASE("gaussian without q") {
        const CliRun r = exec_cli(dir, "noq", "fit --train " + train + " --out " +
                                                  shq(dir / "o1") + " --gamma 1.0");
        CHECK(r.code == 2);
        CHECK(contains(r.err, "error category=config"));
        CHECK(contains(r.err, "--q"));
    }
    SUBCASE("gaussian without gamma") {
        const CliRun r = exec_cli(dir, "nog", "fit --train " + train + " --out " +
                                                  shq(dir / "o2") + " --q 2");
        CHECK(r.code == 2);
        CHECK(contains(r.err, "--gamma"));
    }
    SUBCASE("linear kernel needs no gamma") {
        const CliRun r = exec_cli(dir, "lin", "fit --train " + train + " --out " +
                                                  shq(dir / "o3") + " --kernel linear --q 2");
        CHECK(r.code == 0);
    }
}

TEST_CASE("cli fit and predict artifacts are deterministic and consistent") {
    helpers::TempDir dir("cli_fit");
    REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 11)).code == 0);
    const std::string train = shq(dir / "data/train");
    const std::string fit_args = "fit --train " + train + " --q 2 --gamma 1.0 --out ";

    const CliRun f1 = exec_cli(dir, "f1", fit_args + shq(dir / "fit1"));
    REQUIRE(f1.code == 0);
    CHECK(contains(f1.out, "fit: n=12"));
    CHECK(contains(f1.out, "train_rase="));
    CHECK(std::filesystem::exists(dir / "fit1/model.json"));
    CHECK(std::filesystem::exists(dir / "fit1/fitted.csv"));
    const std::string manifest = helpers::read_text(dir / "fit1/manifest.txt");
    CHECK(contains(manifest, "command=fit"));
    CHECK(contains(manifest, "gamma=1"));
    CHECK(contains(manifest, "q=2"));

    const CliRun f2 = exec_cli(dir, "f2", fit_args + shq(dir / "fit2"));
    REQUIRE(f2.code == 0);
    CHECK(helpers::read_text(dir / "fit1/model.json") ==
          helpers::read_text(dir / "fit2/model.json"));
    CHECK(helpers::read_text(dir / "fit1/fitted.csv") ==
          helpers::read_text(dir / "fit2/fitted.csv"));

    // thread cap must not change any written value
    const CliRun f3 = exec_cli(dir, "f3", fit_args + shq(dir / "fit3") + " --threads 1");
    REQUIRE(f3.code == 0);
    CHECK(helpers::read_text(dir / "fit1/model.json") ==
          helpers::read_text(dir / "fit3/model.json"));

    // predicting the training inputs reproduces the fitted values
    const CliRun pt = exec_cli(dir, "pt",
                               "predict --model " + shq(dir / "fit1/model.json") +
                                   " --data " + train + " --out " + shq(dir / "ptrain"));
    REQUIRE(pt.code == 0);
    CHECK(after_header(helpers::read_text(dir / "ptrain/predictions.csv")) ==
          after_header(helpers::read_text(dir / "fit1/fitted.csv")));

    // fresh inputs with responses: metrics reach manifest and stdout
    const CliRun pf = exec_cli(dir, "pf",
                               "predict --model " + shq(dir / "fit1/model.json") +
                                   " --data " + shq(dir / "data/test") + " --out " +
                                   shq(dir / "ptest"));
    REQUIRE(pf.code == 0);
    CHECK(contains(pf.out, "predict: n=6"));
    CHECK(contains(pf.out, "rase="));
    CHECK(contains(helpers::read_text(dir / "ptest/manifest.txt"), "arpe="));
    CHECK(line_count(helpers::read_text(dir / "ptest/predictions.csv")) == 7);
}

TEST_CASE("cli cv and fit --auto emit the same tuning table") {
    helpers::TempDir dir("cli_cv");
    REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 13, 15, 5)).code == 0);
    const std::string train = shq(dir / "data/train");
    const std::string grids = " --folds 3 --q-grid 1 2 --gamma-grid 0.5 2.0";

    const CliRun cv = exec_cli(dir, "cv", "cv --train " + train + " --out " +
                                              shq(dir / "cvout") + " --seed 3" + grids);
    REQUIRE(cv.code == 0);
    CHECK(contains(cv.out, "cv: best_q="));
    const std::string table = helpers::read_text(dir / "cvout/cv_table.csv");
    CHECK(contains(table, "q,gamma,score"));
    CHECK(line_count(table) == 5);  // header + 2x2 grid
    const std::string manifest = helpers::read_text(dir / "cvout/manifest.txt");
    CHECK(contains(manifest, "command=cv"));
    CHECK(contains(manifest, "cv_best_q="));
    CHECK(contains(manifest, "cv_gamma_grid=0.5,2"));

    const CliRun au = exec_cli(dir, "auto", "fit --train " + train + " --out " +
                                                shq(dir / "auto") + " --auto --cv-seed 3" +
                                                grids);
    REQUIRE(au.code == 0);
    CHECK(std::filesystem::exists(dir / "auto/model.json"));
    CHECK(helpers::read_text(dir / "auto/cv_table.csv") == table);
}

TEST_CASE("cli failure paths map to the documented exit codes") {
    helpers::TempDir dir("cli_errs");

    SUBCASE("missing dataset directory is an io error") {
        const CliRun r = exec_cli(dir, "io", "fit --train " + shq(dir / "absent") +
                                                 " --out " + shq(dir / "o") +
                                                 " --q 2 --gamma 1.0");
        CHECK(r.code == 5);
        CHECK(contains(r.err, "error category=io"));
    }
    SUBCASE("malformed csv is a parse error with a line number") {
        REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 5)).code == 0);
        helpers::write_text(dir / "data/train/x1.csv", "1 2\n3 oops\n");
        const CliRun r = exec_cli(dir, "parse", "fit --train " + shq(dir / "data/train") +
                                                    " --out " + shq(dir / "o") +
                                                    " --q 2 --gamma 1.0");
        CHECK(r.code == 3);
        CHECK(contains(r.err, "error category=parse"));
        CHECK(contains(r.err, ":2:"));
    }
    SUBCASE("grid mismatch on predict is a structural error") {
        REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 5)).code == 0);
        REQUIRE(exec_cli(dir, "sim31", simulate_args(dir / "other", 5, 12, 6, 31)).code == 0);
        REQUIRE(exec_cli(dir, "fit", "fit --train " + shq(dir / "data/train") + " --out " +
                                         shq(dir / "m") + " --q 2 --gamma 1.0")
                    .code == 0);
        const CliRun r = exec_cli(dir, "pred",
                                  "predict --model " + shq(dir / "m/model.json") +
                                      " --data " + shq(dir / "other/test") + " --out " +
                                      shq(dir / "o"));
        CHECK(r.code == 4);
        CHECK(contains(r.err, "error category=structural"));
    }
    SUBCASE("rank exhaustion surfaces as a numeric error") {
        const std::filesystem::path ddir = dir / "dup";
        std::filesystem::create_directories(ddir);
        helpers::write_text(ddir / "grid.csv", "0,0.5,1\n");
        helpers::write_text(ddir / "x1.csv", "0,1,0\n1,0,1\n0,1,0\n1,0,1\n0,1,0\n1,0,1\n");
        helpers::write_text(ddir / "y.csv", "1\n2\n3\n4\n5\n6\n");
        const CliRun r = exec_cli(dir, "num", "fit --train " + shq(ddir) + " --out " +
                                                  shq(dir / "o") + " --q 2 --gamma 1.0");
        CHECK(r.code == 6);
        CHECK(contains(r.err, "error category=numeric"));
    }
}

TEST_CASE("cli config file supplies defaults and explicit flags win") {
    helpers::TempDir dir("cli_cfg");
    REQUIRE(exec_cli(dir, "sim", simulate_args(dir / "data", 21)).code == 0);
    helpers::write_text(dir / "fit.ini", "[fit]\ngamma=2.5\nq=1\n");
    const std::string train = shq(dir / "data/train");

    const CliRun a = exec_cli(dir, "a", "fit --train " + train + " --out " + shq(dir / "oa") +
                                            " --config " + shq(dir / "fit.ini"));
    REQUIRE(a.code == 0);
    const std::string ma = helpers::read_text(dir / "oa/manifest.txt");
    CHECK(contains(ma, "gamma=2.5"));
    CHECK(contains(ma, "q=1"));

    // the config option may also precede the subcommand
    const CliRun a2 = exec_cli(dir, "a2", "--config " + shq(dir / "fit.ini") + " fit --train " +
                                              train + " --out " + shq(dir / "oa2"));
    REQUIRE(a2.code == 0);
    CHECK(contains(helpers::read_text(dir / "oa2/manifest.txt"), "gamma=2.5"));

    const CliRun b = exec_cli(dir, "b", "fit --train " + train + " --out " + shq(dir / "ob") +
                                            " --q 2 --config " + shq(dir / "fit.ini"));
    REQUIRE(b.code == 0);
    const std::string mb = helpers::read_text(dir / "ob/manifest.txt");
    CHECK(contains(mb, "gamma=2.5"));
    CHECK(contains(mb, "q=2"));
}

TEST_CASE("cli benchmark smoke run writes replicate and summary tables") {
    helpers::TempDir dir("cli_bench");
    const std::string args =
        "benchmark --scenario 1 --case 1 --n-train 15 --n-test 8 --grid-size 15 --seed 5"
        " --replicates 2 --folds 3 --q-grid 1 2 --gamma-grid 0.5 5.0 --out ";

    const CliRun r = exec_cli(dir, "b", args + shq(dir / "bench"));
    REQUIRE(r.code == 0);
    CHECK(contains(r.out, "benchmark: scenario=1 case=1 n_train=15"));
    CHECK(contains(r.out, "n_runs=2 n_failed=0"));

    const std::string reps = helpers::read_text(dir / "bench/replicates.csv");
    CHECK(contains(reps, "run,seed,q,gamma,train_rase,train_arpe,test_rase,test_arpe"));
    CHECK(line_count(reps) == 3);
    const std::string summary = helpers::read_text(dir / "bench/summary.csv");
    CHECK(line_count(summary) == 2);
    CHECK(contains(summary, "test_rase_mean"));
    CHECK(contains(helpers::read_text(dir / "bench/manifest.txt"), "command=benchmark"));

    const CliRun r2 = exec_cli(dir, "b2", args + shq(dir / "bench2"));
    REQUIRE(r2.code == 0);
    CHECK(helpers::read_text(dir / "bench2/replicates.csv") == reps);
    CHECK(helpers::read_text(dir / "bench2/summary.csv") == summary);
}

TEST_CASE("cli tecator pipeline pins parameters and reports odd row counts") {
    helpers::TempDir dir("cli_tec");
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < 40; ++k) {
        std::vector<double> row;
        for (int j = 0; j < 10; ++j) row.push_back(std::sin(0.1 * (k + 1) * (j + 1)));
        row.push_back(3.0 + 0.05 * k + 0.5 * std::sin(static_cast<double>(k)));
        rows.push_back(row);
    }
    write_csv(dir / "tec.csv", rows);
    const std::string base = "tecator --file " + shq(dir / "tec.csv") +
                             " --splits 3 --seed 1 --spectrum-cols 10 ";

    const CliRun r = exec_cli(dir, "t", base + "--q 2 --gamma 1.0 --out " + shq(dir / "tout"));
    REQUIRE(r.code == 0);
    CHECK(contains(r.err, "proportional split"));
    CHECK(contains(r.out, "tecator: n=40 split=31/9"));
    CHECK(line_count(helpers::read_text(dir / "tout/splits.csv")) == 4);
    CHECK(std::filesystem::exists(dir / "tout/summary.csv"));
    const std::string manifest = helpers::read_text(dir / "tout/manifest.txt");
    CHECK(contains(manifest, "fixed_params=true"));
    CHECK(contains(manifest, "n_train_split=31"));

    const CliRun r2 = exec_cli(dir, "t2", base + "--q 2 --gamma 1.0 --out " + shq(dir / "tout2"));
    REQUIRE(r2.code == 0);
    CHECK(helpers::read_text(dir / "tout2/splits.csv") ==
          helpers::read_text(dir / "tout/splits.csv"));
    CHECK(helpers::read_text(dir / "tout2/summary.csv") ==
          helpers::read_text(dir / "tout/summary.csv"));

    const CliRun bad = exec_cli(dir, "bad", base + "--q 2 --out " + shq(dir / "t3"));
    CHECK(bad.code == 2);
    CHECK(contains(bad.err, "error category=config"));
    CHECK(contains(bad.err, "together"));
}
