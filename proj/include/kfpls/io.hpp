#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kfpls/fdata.hpp"
#include "kfpls/kpls.hpp"

namespace kfpls {

/// Numeric table reader shared by every input path. Delimiter is detected per
/// line (comma when present, otherwise whitespace); a header row is detected
/// when the first cell of the first line does not parse as a number. Rows may
/// vary in width (grid files are ragged when predictors have different
/// observation counts).
struct NumericTable {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;  // empty when the file had none
};

NumericTable read_numeric_table(const std::filesystem::path& path);

/// Rectangular variant; throws ParseError when row widths differ.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

/// Writes comma-separated values with shortest round-trip formatting, one
/// trailing newline per row. An optional header row is emitted first.
void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header = {});
void write_csv(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& header = {});

/// Dataset directory layout: grid.csv holds one row of observation points per
/// predictor; x1.csv .. xp.csv hold one row of curve values per subject;
/// y.csv (optional) one response per row; truth.csv (optional) noise-free
/// responses.
void save_dataset(const std::filesystem::path& dir, const FunctionalDataset& ds,
                  const std::vector<double>* truth = nullptr);
FunctionalDataset load_dataset(const std::filesystem::path& dir);
std::optional<std::vector<double>> load_truth(const std::filesystem::path& dir);

/// Versioned JSON model container: kernel spec, scores, coefficients, the
/// response mean and the training curves (required to form cross Grams).
/// Loading rebuilds the training Gram, which is deterministic, so reloaded
/// models predict identically.
void save_model(const std::filesystem::path& path, const KfplsModel& model);
KfplsModel load_model(const std::filesystem::path& path);

/// Tecator-style file: rows are samples, the first `spectrum_cols` columns
/// are the spectrum and `response_col` (negative = last column) selects the
/// response. The wavelength grid is mapped onto [0, 1].
FunctionalDataset load_tecator(const std::filesystem::path& path,
                               std::size_t spectrum_cols = 100, int response_col = -1);

/// Sorted key=value lines; deterministic, no timestamps.
void write_manifest(const std::filesystem::path& path,
                    std::vector<std::pair<std::string, std::string>> entries);

/// Shortest round-trip decimal formatting used across all outputs.
std::string format_double(double v);

}  // namespace kfpls
