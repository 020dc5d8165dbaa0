#include "kfpls/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <string_view>
#include <system_error>

#include <json.hpp>

#include "kfpls/errors.hpp"

namespace fs = std::filesystem;

namespace kfpls {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericError("format", "cannot format double");
    return {buf, ptr};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    if (line.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            tokens.push_back(trim(line.substr(start, pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    } else {
        std::size_t k = 0;
        while (k < line.size()) {
            while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
            if (k >= line.size()) break;
            std::size_t end = k;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
            tokens.push_back(trim(line.substr(k, end - k)));
            k = end;
        }
    }
    return tokens;
}

bool try_parse_double(std::string_view token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (begin != end && *begin == '+') ++begin;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

double parse_double(std::string_view token, const fs::path& path, std::size_t line_no) {
    double v = 0.0;
    if (!try_parse_double(token, v)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" +
                         std::string(token) + "' as a number");
    }
    return v;
}

}  // namespace

NumericTable read_numeric_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    NumericTable table;
    std::string line;
    std::size_t line_no = 0;
    bool seen_first = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(trim(line));
        if (tokens.empty() || (tokens.size() == 1 && tokens[0].empty())) continue;

        if (!seen_first) {
            seen_first = true;
            double probe = 0.0;
            if (!try_parse_double(tokens[0], probe)) {
                for (auto t : tokens) table.header.emplace_back(t);
                continue;
            }
        }
        std::vector<double> row;
        row.reserve(tokens.size());
        for (auto t : tokens) row.push_back(parse_double(t, path, line_no));
        table.rows.push_back(std::move(row));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    if (table.rows.empty()) throw ParseError(path.string() + ": no data rows");
    return table;
}

Eigen::MatrixXd read_matrix(const fs::path& path) {
    const NumericTable table = read_numeric_table(path);
    const std::size_t cols = table.rows.front().size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != cols)
            throw ParseError(path.string() + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(table.rows[i].size()) + " fields, expected " +
                             std::to_string(cols));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    return m;
}

namespace {

void write_lines(const fs::path& path, const std::vector<std::string>& header,
                 const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out << ',';
            out << header[j];
        }
        out << '\n';
    }
    body(out);
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace

void write_csv(const fs::path& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header) {
    write_lines(path, header, [&](std::ostream& out) {
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            for (Eigen::Index j = 0; j < values.cols(); ++j) {
                if (j) out << ',';
                out << format_double(values(i, j));
            }
            out << '\n';
        }
    });
}

void write_csv(const fs::path& path, const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& header) {
    write_lines(path, header, [&](std::ostream& out) {
        for (const auto& row : rows) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) out << ',';
                out << format_double(row[j]);
            }
            out << '\n';
        }
    });
}

void save_dataset(const fs::path& dir, const FunctionalDataset& ds,
                  const std::vector<double>* truth) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    const std::size_t p = ds.n_predictors();
    std::vector<std::vector<double>> grid_rows;
    grid_rows.reserve(p);
    for (std::size_t j = 0; j < p; ++j) grid_rows.push_back(ds.grid(j).points());
    write_csv(dir / "grid.csv", grid_rows);

    for (std::size_t j = 0; j < p; ++j) {
        std::vector<std::vector<double>> rows;
        rows.reserve(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i)
            rows.push_back(ds.sample(i).curve(j).values);
        write_csv(dir / ("x" + std::to_string(j + 1) + ".csv"), rows);
    }

    if (ds.has_responses()) {
        std::vector<std::vector<double>> rows;
        rows.reserve(ds.size());
        for (double y : ds.responses()) rows.push_back({y});
        write_csv(dir / "y.csv", rows);
    }
    if (truth != nullptr) {
        if (truth->size() != ds.size())
            throw StructuralError("truth length does not match dataset size");
        std::vector<std::vector<double>> rows;
        rows.reserve(truth->size());
        for (double v : *truth) rows.push_back({v});
        write_csv(dir / "truth.csv", rows);
    }
}

namespace {

std::vector<double> read_column(const fs::path& path) {
    const NumericTable table = read_numeric_table(path);
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != 1)
            throw ParseError(path.string() + ": expected one value per row, row " +
                             std::to_string(i + 1) + " has " +
                             std::to_string(table.rows[i].size()));
        out.push_back(table.rows[i][0]);
    }
    return out;
}

}  // namespace

FunctionalDataset load_dataset(const fs::path& dir) {
    const NumericTable grid_table = read_numeric_table(dir / "grid.csv");
    const std::size_t p = grid_table.rows.size();
    std::vector<Grid> grids;
    grids.reserve(p);
    for (const auto& row : grid_table.rows) grids.emplace_back(row);

    std::vector<Eigen::MatrixXd> curve_mats;
    curve_mats.reserve(p);
    std::size_t n = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const fs::path xpath = dir / ("x" + std::to_string(j + 1) + ".csv");
        Eigen::MatrixXd m = read_matrix(xpath);
        if (static_cast<std::size_t>(m.cols()) != grids[j].size())
            throw StructuralError(xpath.string() + ": " + std::to_string(m.cols()) +
                                  " columns but grid row " + std::to_string(j + 1) + " has " +
                                  std::to_string(grids[j].size()) + " points");
        if (j == 0)
            n = static_cast<std::size_t>(m.rows());
        else if (static_cast<std::size_t>(m.rows()) != n)
            throw StructuralError(xpath.string() + ": row count differs across predictors");
        curve_mats.push_back(std::move(m));
    }

    std::vector<FunctionalSample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<SampledCurve> curves;
        curves.reserve(p);
        for (std::size_t j = 0; j < p; ++j) {
            const auto& m = curve_mats[j];
            std::vector<double> values(m.cols());
            for (Eigen::Index k = 0; k < m.cols(); ++k)
                values[static_cast<std::size_t>(k)] = m(static_cast<Eigen::Index>(i), k);
            curves.emplace_back(grids[j], std::move(values));
        }
        samples.emplace_back(std::move(curves));
    }

    std::optional<std::vector<double>> responses;
    if (fs::exists(dir / "y.csv")) {
        responses = read_column(dir / "y.csv");
        if (responses->size() != n)
            throw StructuralError((dir / "y.csv").string() + ": response count " +
                                  std::to_string(responses->size()) + " does not match " +
                                  std::to_string(n) + " samples");
    }
    return FunctionalDataset(std::move(samples), std::move(responses));
}

std::optional<std::vector<double>> load_truth(const fs::path& dir) {
    if (!fs::exists(dir / "truth.csv")) return std::nullopt;
    return read_column(dir / "truth.csv");
}

namespace {

constexpr int kModelVersion = 1;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty())
        throw ParseError("model field '" + what + "' must be a nonempty array");
    const std::size_t n_cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != n_cols)
            throw ParseError("model field '" + what + "' is ragged");
        for (std::size_t j = 0; j < n_cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[j].get<double>();
    }
    return m;
}

}  // namespace

void save_model(const fs::path& path, const KfplsModel& model) {
    nlohmann::json doc;
    doc["format"] = "kfpls-model";
    doc["version"] = kModelVersion;
    doc["kernel"] = {{"family", to_string(model.kernel().family)},
                     {"gamma", model.kernel().gamma}};
    doc["n_components"] = model.n_components();
    doc["y_mean"] = model.y_mean();
    doc["coef"] = std::vector<double>(model.coefficients().begin(),
                                      model.coefficients().end());
    doc["x_scores"] = matrix_to_json(model.x_scores());
    doc["y_scores"] = matrix_to_json(model.y_scores());

    const auto& train = model.training_samples();
    nlohmann::json grids = nlohmann::json::array();
    for (std::size_t j = 0; j < train.n_predictors(); ++j)
        grids.push_back(train.grid(j).points());
    nlohmann::json curves = nlohmann::json::array();
    for (std::size_t i = 0; i < train.size(); ++i) {
        nlohmann::json subject = nlohmann::json::array();
        for (std::size_t j = 0; j < train.n_predictors(); ++j)
            subject.push_back(train.sample(i).curve(j).values);
        curves.push_back(std::move(subject));
    }
    doc["train"] = {{"grids", std::move(grids)}, {"curves", std::move(curves)}};

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump() << '\n';
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

KfplsModel load_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    try {
        if (doc.at("format").get<std::string>() != "kfpls-model")
            throw ParseError(path.string() + ": not a kfpls model file");
        if (doc.at("version").get<int>() != kModelVersion)
            throw ParseError(path.string() + ": unsupported model version");

        KernelSpec spec;
        spec.family = kernel_family_from_string(doc.at("kernel").at("family").get<std::string>());
        spec.gamma = doc.at("kernel").at("gamma").get<double>();
        spec.validate();

        const auto& train_doc = doc.at("train");
        std::vector<Grid> grids;
        for (const auto& g : train_doc.at("grids"))
            grids.emplace_back(g.get<std::vector<double>>());
        std::vector<FunctionalSample> samples;
        for (const auto& subject : train_doc.at("curves")) {
            if (subject.size() != grids.size())
                throw ParseError(path.string() + ": curve count does not match grid count");
            std::vector<SampledCurve> curves;
            for (std::size_t j = 0; j < grids.size(); ++j)
                curves.emplace_back(grids[j], subject[j].get<std::vector<double>>());
            samples.emplace_back(std::move(curves));
        }
        FunctionalDataset train(std::move(samples));

        GramFit fit;
        fit.y_mean = doc.at("y_mean").get<double>();
        const auto coef = doc.at("coef").get<std::vector<double>>();
        fit.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(),
                                                     static_cast<Eigen::Index>(coef.size()));
        fit.t_scores = matrix_from_json(doc.at("x_scores"), "x_scores");
        fit.u_scores = matrix_from_json(doc.at("y_scores"), "y_scores");

        GramBundle bundle = gram(train, spec);
        return {spec, std::move(train), std::move(bundle), std::move(fit)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

FunctionalDataset load_tecator(const fs::path& path, std::size_t spectrum_cols,
                               int response_col) {
    if (spectrum_cols < 2) throw ConfigError("spectrum_cols must be >= 2");
    const Eigen::MatrixXd m = read_matrix(path);
    const auto n_cols = static_cast<std::size_t>(m.cols());
    if (n_cols < spectrum_cols + 1)
        throw ParseError(path.string() + ": " + std::to_string(n_cols) +
                         " columns, need at least " + std::to_string(spectrum_cols + 1));
    std::size_t resp;
    if (response_col < 0) {
        resp = n_cols - 1;
    } else {
        resp = static_cast<std::size_t>(response_col);
        if (resp < spectrum_cols || resp >= n_cols)
            throw ConfigError("response column must lie outside the spectrum columns");
    }

    // Tecator wavelengths: 850..1050nm equally spaced over the channels.
    std::vector<double> wavelengths(spectrum_cols);
    for (std::size_t k = 0; k < spectrum_cols; ++k)
        wavelengths[k] = 850.0 + 200.0 * static_cast<double>(k) /
                                     static_cast<double>(spectrum_cols - 1);
    const Grid grid(std::move(wavelengths));

    std::vector<FunctionalSample> samples;
    std::vector<double> responses;
    samples.reserve(static_cast<std::size_t>(m.rows()));
    responses.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> values(spectrum_cols);
        for (std::size_t k = 0; k < spectrum_cols; ++k)
            values[k] = m(i, static_cast<Eigen::Index>(k));
        std::vector<SampledCurve> curves;
        curves.emplace_back(grid, std::move(values));
        samples.emplace_back(std::move(curves));
        responses.push_back(m(i, static_cast<Eigen::Index>(resp)));
    }
    return rescale_domain(FunctionalDataset(std::move(samples), std::move(responses)));
}

void write_manifest(const fs::path& path,
                    std::vector<std::pair<std::string, std::string>> entries) {
    std::sort(entries.begin(), entries.end());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace kfpls
